#include "povmlab/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

namespace {

using povmlab::RunConfig;

void add_common_options(CLI::App* cmd, RunConfig& config, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (flags override it)");
  cmd->add_option("--observable", config.observable, "observable spec string");
  cmd->add_option("--family", config.families, "shrinking-family spec (repeatable)");
  cmd->add_option("--set", config.sets, "measurable set in text syntax (repeatable)");
  cmd->add_option("--dims", config.dims, "truncation dimensions for scaling");
  cmd->add_option("--measure", config.measure, "reference measure spec");
  cmd->add_option("--kernel", config.kernel, "kernel spec string");
  cmd->add_option("--probe", config.probe, "scaling probe: norm:<set> | residual:<k>");
  cmd->add_option("--state", config.state, "sampling state: basis:<k> | gaussian");
  cmd->add_option("--seed", config.seed, "RNG seed (POVMLAB_SEED overrides)");
  cmd->add_option("--samples", config.samples, "number of measurement draws");
  cmd->add_option("--out", config.out_dir, "output directory for reports");
  cmd->add_flag("--csv", config.csv, "also export CSV sequences");
  cmd->add_flag("--fixed-timestamp", config.fixed_timestamp,
                "write a constant timestamp (reproducible output)");
}

// Flags override the config file: parse flags into a fresh struct, then copy
// every explicitly-set option over the file-loaded values.
RunConfig merge_with_file(const CLI::App* cmd, const RunConfig& flags,
                          const std::string& config_path) {
  if (config_path.empty()) return flags;
  RunConfig merged = povmlab::load_config_file(config_path);
  auto taken = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (taken("--observable")) merged.observable = flags.observable;
  if (taken("--family")) merged.families = flags.families;
  if (taken("--set")) merged.sets = flags.sets;
  if (taken("--dims")) merged.dims = flags.dims;
  if (taken("--measure")) merged.measure = flags.measure;
  if (taken("--kernel")) merged.kernel = flags.kernel;
  if (taken("--probe")) merged.probe = flags.probe;
  if (taken("--state")) merged.state = flags.state;
  if (taken("--seed")) merged.seed = flags.seed;
  if (taken("--samples")) merged.samples = flags.samples;
  if (taken("--out")) merged.out_dir = flags.out_dir;
  if (taken("--csv")) merged.csv = flags.csv;
  if (taken("--fixed-timestamp")) merged.fixed_timestamp = flags.fixed_timestamp;
  return merged;
}

int run_with_analyzers(const CLI::App* cmd, RunConfig flags,
                       const std::string& config_path,
                       std::vector<std::string> forced_analyzers) {
  RunConfig config = merge_with_file(cmd, flags, config_path);
  if (!forced_analyzers.empty()) config.analyzers = std::move(forced_analyzers);
  povmlab::apply_env_overrides(config);
  povmlab::AnalyzeOutcome outcome = povmlab::run_analyze(config);
  for (const auto& file : outcome.report_files) std::printf("wrote %s\n", file.c_str());
  if (!outcome.ok()) {
    for (const auto& failure : outcome.failures)
      std::fprintf(stderr, "FAIL: %s\n", failure.c_str());
    return povmlab::kExitNumericalFailure;
  }
  return povmlab::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"povmlab — POVM construction and structural-property analysis"};
  app.require_subcommand(1);

  RunConfig analyze_cfg, probe_cfg, sample_cfg, kernel_cfg;
  std::string analyze_file, probe_file, sample_file, kernel_file;
  std::vector<std::string> analyzers;

  CLI::App* analyze = app.add_subcommand("analyze", "run analyzers on an observable");
  add_common_options(analyze, analyze_cfg, analyze_file);
  analyze->add_option("--analyzer", analyzers,
                      "norm1 | uc-probe | abs-cont | commute | covariance | scaling | "
                      "sample | kernel-axioms");

  CLI::App* probe = app.add_subcommand("probe", "uniform-continuity probes only");
  add_common_options(probe, probe_cfg, probe_file);

  CLI::App* sample = app.add_subcommand("sample", "measurement-outcome sampling");
  add_common_options(sample, sample_cfg, sample_file);

  CLI::App* kernel = app.add_subcommand("kernel", "Markov-kernel axiom checks");
  add_common_options(kernel, kernel_cfg, kernel_file);

  std::string reproduce_out = "reports";
  bool reproduce_fixed_ts = false;
  CLI::App* reproduce =
      app.add_subcommand("reproduce-paper", "run the full structural-property suite");
  reproduce->add_option("--out", reproduce_out, "output directory");
  reproduce->add_flag("--fixed-timestamp", reproduce_fixed_ts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : povmlab::kExitParseError;
  }

  try {
    if (analyze->parsed()) {
      if (analyzers.empty() && analyze_file.empty())
        throw povmlab::SpecParseError("analyze needs at least one --analyzer");
      return run_with_analyzers(analyze, analyze_cfg, analyze_file, analyzers);
    }
    if (probe->parsed()) {
      std::vector<std::string> forced = {"uc-probe"};
      if (probe->count("--dims") > 0) forced.push_back("scaling");
      return run_with_analyzers(probe, probe_cfg, probe_file, forced);
    }
    if (sample->parsed())
      return run_with_analyzers(sample, sample_cfg, sample_file, {"sample"});
    if (kernel->parsed())
      return run_with_analyzers(kernel, kernel_cfg, kernel_file, {"kernel-axioms"});
    if (reproduce->parsed()) {
      int failures = povmlab::run_reproduce_paper(reproduce_out, reproduce_fixed_ts);
      return failures == 0 ? povmlab::kExitOk : povmlab::kExitNumericalFailure;
    }
  } catch (const povmlab::SpecParseError& e) {
    std::fprintf(stderr, "{\"error\":\"parse\",\"message\":\"%s\"}\n", e.what());
    return povmlab::kExitParseError;
  } catch (const povmlab::SetParseError& e) {
    std::fprintf(stderr, "{\"error\":\"parse\",\"message\":\"%s\"}\n", e.what());
    return povmlab::kExitParseError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"numerical\",\"message\":\"%s\"}\n", e.what());
    return povmlab::kExitNumericalFailure;
  }
  return povmlab::kExitOk;
}
