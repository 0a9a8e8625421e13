#pragma once

#include "povmlab/povm.hpp"
#include "povmlab/report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace povmlab {

struct SpecParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Batch run description. Accepted as flags, as a JSON config file, or both
/// (flags override the file; POVMLAB_SEED overrides the seed from either).
struct RunConfig {
  std::string observable;
  std::vector<std::string> analyzers;
  std::vector<std::string> families;  // family specs for the continuity probes
  std::vector<std::string> sets;      // explicit set list for norm1/commute/abs-cont
  std::vector<int> dims;              // scaling dimensions
  std::string measure;                // reference measure spec for abs-cont
  std::string kernel;                 // kernel spec for kernel-axioms
  std::string probe;                  // scaling probe: "norm:<set>" or "residual:<k>"
  std::string state;                  // sampling state: "basis:<k>" or "gaussian"
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  std::string out_dir = ".";
  bool csv = false;
  bool fixed_timestamp = false;  // reproducible output for tests
};

/// Parses the JSON config file into a RunConfig (missing keys keep defaults).
RunConfig load_config_file(const std::string& path);
/// Applies the POVMLAB_SEED environment override, if set.
void apply_env_overrides(RunConfig& config);

/// A catalog observable together with its smearing decomposition when one
/// exists (used by the two-stage sampler).
struct ObservableBundle {
  Povm povm;
  std::optional<SpectralMeasure> sharp;
  std::optional<MarkovKernel> kernel;
  std::string spec;
};

/// Observable spec strings:
///   unsharp-number:eps=0.5,dim=200
///   phase-e1:s=0,t=1,g=0.5,dim=64
///   phase-can:dim=256
///   bounded-pos:grid=200
///   gauss-pos:l=1,min=-50,max=0,grid=500
ObservableBundle parse_observable(const std::string& spec);
/// Same observable at another truncation dimension (dim/grid override).
ObservableBundle parse_observable_with_dim(const std::string& spec, int dim);

/// Kernel spec strings: gaussian:l=1.0 | binomial:eps=0.5 | conv:default | point
MarkovKernel parse_kernel_spec(const std::string& spec);

/// Family spec strings:
///   nested-interval:x=0,w=1,count=50[,geometric=1]
///   escaping-halfline:count=20[,start=-1,step=-1]
///   nat-tail:count=30
///   shrinking-arc:a=0,w=3.14,count=12[,geometric=1]
std::vector<MeasurableSet> parse_family_spec(const std::string& spec);

/// Reference measure specs: lebesgue-line | lebesgue-circle | counting |
/// weighted:M=1.5,lo=-1,hi=1
ReferenceMeasure parse_measure_spec(const std::string& spec);

struct AnalyzeOutcome {
  std::vector<std::string> report_files;
  std::vector<std::string> failures;  // machine-readable failure descriptions
  bool ok() const { return failures.empty(); }
};

/// Runs every configured analyzer, writes one JSON report each plus
/// summary.json under config.out_dir.
AnalyzeOutcome run_analyze(const RunConfig& config);

/// Runs the consolidated structural-property suite; writes
/// reproduce_paper.json and prints one line per criterion. Returns the
/// number of failed criteria.
int run_reproduce_paper(const std::string& out_dir, bool fixed_timestamp = false);

/// Exit-code mapping shared by the CLI: 0 ok, 2 parse/config error,
/// 3 numerical or invariant failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParseError = 2;
inline constexpr int kExitNumericalFailure = 3;

}  // namespace povmlab
