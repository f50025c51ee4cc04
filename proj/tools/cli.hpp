#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace cohrel::cli {

// Entry point shared by main() and the tests. Returns the process exit code:
// 0 ok, 2 input/parse, 3 unsupported system, 4 inference precondition,
// 5 numeric singularity, 1 anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs the command a manifest describes and writes its outputs, including a
// copy of the manifest, into out_dir. Throws cohrel errors.
void execute(const nlohmann::json& manifest, const std::filesystem::path& out_dir, std::ostream& log);

int exit_code_for(const std::exception& e);

}  // namespace cohrel::cli
