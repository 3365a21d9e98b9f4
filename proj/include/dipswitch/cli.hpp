#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dipswitch/geometry.hpp"
#include "dipswitch/sweep.hpp"

namespace dipswitch::cli {

enum class Subcommand { Sweep, Spectrum, Point, Feasibility };

struct CliInvocation {
  Subcommand subcommand = Subcommand::Sweep;
  SweepConfig sweep;     ///< sweep, spectrum and point
  double x = 0.0;        ///< spectrum and point
  PhysicalParams physical{};
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> transitions_out;
  int verbosity = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad or missing flag; the message names the flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// args excludes the program name.
CliInvocation parse_args(const std::vector<std::string>& args);

/// Data goes to `out` (or files), diagnostics and progress to `err`.
int run(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_args + run with exit-code mapping.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dipswitch::cli
