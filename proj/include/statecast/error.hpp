#pragma once

#include <stdexcept>
#include <string>

namespace statecast {

// All library failures surface as Error with a human-readable message.
// Parse errors carry "<file>:<line>:" prefixes so tooling can jump to them.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

} // namespace statecast
