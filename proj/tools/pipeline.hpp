#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cxg::cli {

inline constexpr int kConfigSchemaVersion = 1;

/// Flat key=value configuration. Every known key has a default; values are
/// kept as text and parsed (and range-checked) on access, so the full
/// effective configuration can be echoed verbatim into reports.
class PipelineConfig {
 public:
  PipelineConfig();

  /// Throws InputError for an unknown key.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  long long get_int(const std::string& key, long long min, long long max) const;
  double get_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::filesystem::path get_path(const std::string& key) const;  // empty -> InputError
  std::vector<std::string> get_list(const std::string& key) const;  // comma separated

  /// Parses every key once so a bad value fails before any work starts.
  void validate() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// `key = value` lines; '#' starts a comment, blank lines are ignored.
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

/// Writes `key=value` for every configuration entry.
void echo_config(const PipelineConfig& config, std::ostream& out);

/// Pipeline stages. Each reads and writes the files named in `config`,
/// logs to `log`, and reports failure by throwing.
void cmd_categories(const PipelineConfig& config, std::ostream& log);
void cmd_learn(const PipelineConfig& config, std::ostream& log);
void cmd_prune(const PipelineConfig& config, std::ostream& log);
void cmd_annotate(const PipelineConfig& config, std::ostream& log);
void cmd_profile(const PipelineConfig& config, std::ostream& log);
void cmd_delta(const PipelineConfig& config, std::ostream& log);
void cmd_cluster(const PipelineConfig& config, std::ostream& log);
void cmd_clip(const PipelineConfig& config, std::ostream& log);
void cmd_distribution(const PipelineConfig& config, std::ostream& log);
void cmd_table(const PipelineConfig& config, std::ostream& log);
/// categories -> learn -> prune -> annotate -> profile -> delta -> cluster,
/// writing every intermediate file under `out_dir`.
void cmd_run_all(const PipelineConfig& config, std::ostream& log);

/// Runs `command` and maps failures to exit codes: 0 success, 2 bad input
/// or arguments, 1 anything else.
int run_command(std::string_view command, const PipelineConfig& config, std::ostream& log, std::ostream& err);

/// Command-line entry point.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cxg::cli
