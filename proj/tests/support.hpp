#pragma once

#include <filesystem>
#include <string>

namespace testsupport {

inline std::string fixture(const std::string& name) { return std::string(COHREL_FIXTURE_DIR) + "/" + name; }

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("cohrel_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testsupport
