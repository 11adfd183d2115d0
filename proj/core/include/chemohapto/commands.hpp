#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemohapto/config.hpp"
#include "chemohapto/diagnostics.hpp"
#include "chemohapto/io.hpp"

namespace chemohapto {

/// Command-line overrides applied on top of the config file.
struct CliOptions {
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const std::filesystem::path& path, const CliOptions& opts);

/// Header fields of a report (model echo) for the given command name.
RunReport make_report(const std::string& command, const RunConfig& cfg);

/// Runs one configuration and writes the artifacts enabled in cfg.output into
/// dir: series.csv, report.json, {u,v,w}_final.bin and {u,v,w}_final.svg.
/// A solver exception is caught and stored in the report's error field after
/// the partial series has been written. The recorded series is copied to
/// `records` when given.
RunReport execute_run(const RunConfig& cfg, const std::filesystem::path& dir, const GnEstimate& gn,
                      std::vector<DiagnosticsRecord>* records = nullptr);

/// Human-readable table of every intermediate quantity of the check.
std::string format_threshold_report(const ThresholdReport& t);

/// Exit codes: 0 success, 1 failed verification or solver error, 2 usage or
/// configuration error.
int cmd_run(const std::string& config, const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& config, const CliOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_verify(const std::string& suite, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& config, const std::vector<std::string>& axes,
              const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace chemohapto
