#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace uqcd {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitConfig = 2,
  kExitNumericalGuard = 3,
  kExitNonConvergence = 4,
};

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out;      // overrides the config's output path
  std::optional<std::uint64_t> seed;   // overrides the config's seed
  std::size_t threads = 1;
  bool trace = false;
  // run-detector overrides
  std::optional<std::string> algorithm;
  std::optional<double> threshold;
  std::optional<double> gamma;
  std::optional<std::uint64_t> change_point;
  std::optional<std::uint64_t> horizon;
  std::optional<std::string> trace_path;
};

/// Runs one subcommand: divergence, solve-weights, run-detector, simulate,
/// oc-curve or verify. Reports go to the output path or to `out`;
/// diagnostics go to `err`. Returns an ExitCode.
int dispatch(const std::string& subcommand, const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Same, with the configuration document given as text.
int dispatch_text(const std::string& subcommand, const std::string& config_text, const CommandOptions& opts,
                  std::ostream& out, std::ostream& err);

}  // namespace uqcd
