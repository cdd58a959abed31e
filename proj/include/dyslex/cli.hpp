#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dyslex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;         // unknown subcommand/flag, bad invocation
inline constexpr int kExitMissingInput = 3;  // input file absent
inline constexpr int kExitConfig = 4;        // config invariant violation
inline constexpr int kExitData = 5;          // malformed cohort / evaluation data error
inline constexpr int kExitIo = 6;            // artifact write failure
inline constexpr int kExitInternal = 7;

// argv without the program name; failures print an error JSON on err
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(const std::vector<std::string>& args);  // std::cout / std::cerr

}  // namespace dyslex::cli
