#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

// Scratch-file helper: every test artifact lands in one per-process
// directory under the system temp root, so parallel ctest invocations never
// collide and nothing is left in the source tree.
inline std::string test_path(const std::string& name) {
    namespace fs = std::filesystem;
    static const fs::path root = [] {
        fs::path p = fs::temp_directory_path() /
                     ("statecast_tests_" + std::to_string(unsigned(::getpid())));
        fs::create_directories(p);
        return p;
    }();
    return (root / name).string();
}
