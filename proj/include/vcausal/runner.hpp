#pragma once

#include <iosfwd>
#include <string>

#include "vcausal/config.hpp"

namespace vcausal::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitValidation = 3,
  kExitDomain = 4,
  kExitIo = 5,
};

inline constexpr const char* kVersion = "vcausal 1.0.0";

/// Run the experiment and return the formatted results.
std::string render(const ExperimentConfig& config);

/// Run and write to config.output (file or `out`); errors go to `err` and are
/// mapped onto ExitCode.
int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Parse, validate and run a config document.
int run_config_text(const std::string& text, std::ostream& out, std::ostream& err,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double value);

}  // namespace vcausal::cli
