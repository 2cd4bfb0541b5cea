#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinjj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // bad arguments or inputs
inline constexpr int kExitNumerical = 2;  // integrator or solver failure

/// Runs one command line. `args` excludes the program name. Data files go
/// where --out points (stdout when absent, in which case the summary goes
/// to `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace spinjj::cli
