#include "povmlab/cli.hpp"

#include "povmlab/acceptance.hpp"
#include "povmlab/catalog.hpp"
#include "povmlab/sampler.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace povmlab {

namespace {

// --- spec-string machinery ---------------------------------------------------

struct Spec {
  std::string name;
  std::map<std::string, std::string> params;

  double number(const std::string& key, std::optional<double> fallback = {}) const {
    auto it = params.find(key);
    if (it == params.end()) {
      if (fallback) return *fallback;
      throw SpecParseError("missing parameter '" + key + "' in spec '" + name + "'");
    }
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw SpecParseError("parameter '" + key + "' is not a number: " + it->second);
    }
  }

  int integer(const std::string& key, std::optional<int> fallback = {}) const {
    double v = number(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (v != std::floor(v)) throw SpecParseError("parameter '" + key + "' must be integral");
    return static_cast<int>(v);
  }

  bool flag(const std::string& key) const {
    auto it = params.find(key);
    return it != params.end() && it->second != "0" && it->second != "false";
  }
};

Spec parse_spec(const std::string& text) {
  Spec spec;
  auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::string rest = text.substr(colon + 1);
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      spec.params[item] = "1";  // bare flags like "geometric"
    else
      spec.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return spec;
}

std::string iso_timestamp(bool fixed) {
  if (fixed) return "1970-01-01T00:00:00Z";
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

// --- config -------------------------------------------------------------------

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SpecParseError("config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig config;
  auto read_strings = [&](const char* key, std::vector<std::string>& out) {
    if (j.contains(key)) out = j[key].get<std::vector<std::string>>();
  };
  try {
    if (j.contains("observable")) config.observable = j["observable"].get<std::string>();
    read_strings("analyzers", config.analyzers);
    read_strings("families", config.families);
    read_strings("sets", config.sets);
    if (j.contains("dims")) config.dims = j["dims"].get<std::vector<int>>();
    if (j.contains("measure")) config.measure = j["measure"].get<std::string>();
    if (j.contains("kernel")) config.kernel = j["kernel"].get<std::string>();
    if (j.contains("probe")) config.probe = j["probe"].get<std::string>();
    if (j.contains("state")) config.state = j["state"].get<std::string>();
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("samples")) config.samples = j["samples"].get<std::uint64_t>();
    if (j.contains("out_dir")) config.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("csv")) config.csv = j["csv"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw SpecParseError("config file " + path + ": " + e.what());
  }
  return config;
}

void apply_env_overrides(RunConfig& config) {
  if (const char* seed = std::getenv("POVMLAB_SEED")) {
    try {
      config.seed = std::stoull(seed);
    } catch (const std::exception&) {
      throw SpecParseError("POVMLAB_SEED is not an unsigned integer");
    }
  }
}

// --- observable / kernel / family specs ---------------------------------------

ObservableBundle parse_observable(const std::string& text) {
  Spec spec = parse_spec(text);
  if (spec.name == "unsharp-number") {
    double eps = spec.number("eps", 0.5);
    int dim = spec.integer("dim", 200);
    std::vector<double> levels(dim);
    for (int m = 0; m < dim; ++m) levels[m] = m;
    SpectralMeasure sharp = SpectralMeasure::diagonal(std::move(levels));
    MarkovKernel kernel = binomial_kernel(eps);
    return {unsharp_number(eps, dim), sharp, kernel, text};
  }
  if (spec.name == "phase-e1") {
    int dim = spec.integer("dim", 64);
    int s = spec.integer("s", 0);
    int t = spec.integer("t", 1);
    double g = spec.number("g", 0.5);
    return {phase_e1(dim, s, t, g), std::nullopt, std::nullopt, text};
  }
  if (spec.name == "phase-can") {
    int dim = spec.integer("dim", 256);
    return {canonical_phase(dim), std::nullopt, std::nullopt, text};
  }
  if (spec.name == "bounded-pos") {
    int grid = spec.integer("grid", 200);
    std::vector<double> xs(grid);
    for (int j = 0; j < grid; ++j) xs[j] = static_cast<double>(j) / (grid - 1);
    SpectralMeasure sharp = SpectralMeasure::diagonal(std::move(xs));
    MarkovKernel kernel = convolution_kernel(KernelWeight::default_weight());
    return {smear(sharp, kernel), sharp, kernel, text};
  }
  if (spec.name == "gauss-pos") {
    double l = spec.number("l", 1.0);
    double lo = spec.number("min", -50.0);
    double hi = spec.number("max", 0.0);
    int grid = spec.integer("grid", 500);
    std::vector<double> xs(grid);
    for (int j = 0; j < grid; ++j)
      xs[j] = lo + (hi - lo) * static_cast<double>(j) / (grid - 1);
    SpectralMeasure sharp = SpectralMeasure::diagonal(std::move(xs));
    MarkovKernel kernel = gaussian_kernel(l);
    return {smear(sharp, kernel), sharp, kernel, text};
  }
  throw SpecParseError("unknown observable spec: " + text);
}

ObservableBundle parse_observable_with_dim(const std::string& text, int dim) {
  Spec spec = parse_spec(text);
  const std::string size_key =
      (spec.name == "bounded-pos" || spec.name == "gauss-pos") ? "grid" : "dim";
  spec.params[size_key] = std::to_string(dim);
  std::string rebuilt = spec.name;
  char sep = ':';
  for (const auto& [k, v] : spec.params) {
    rebuilt += sep + k + "=" + v;
    sep = ',';
  }
  return parse_observable(rebuilt);
}

MarkovKernel parse_kernel_spec(const std::string& text) {
  Spec spec = parse_spec(text);
  if (spec.name == "gaussian") return gaussian_kernel(spec.number("l", 1.0));
  if (spec.name == "binomial") return binomial_kernel(spec.number("eps", 0.5));
  if (spec.name == "conv") return convolution_kernel(KernelWeight::default_weight());
  if (spec.name == "point") return point_kernel();
  throw SpecParseError("unknown kernel spec: " + text);
}

std::vector<MeasurableSet> parse_family_spec(const std::string& text) {
  Spec spec = parse_spec(text);
  try {
    if (spec.name == "nested-interval")
      return nested_interval_family(spec.number("x", 0.0), spec.number("w", 1.0),
                                    spec.integer("count", 50), spec.flag("geometric"));
    if (spec.name == "escaping-halfline")
      return escaping_halfline_family(spec.integer("count", 20), spec.number("start", -1.0),
                                      spec.number("step", -1.0));
    if (spec.name == "nat-tail") return nat_tail_family(spec.integer("count", 30));
    if (spec.name == "shrinking-arc")
      return shrinking_arc_family(spec.number("a", 0.0), spec.number("w", M_PI),
                                  spec.integer("count", 12), spec.flag("geometric"));
  } catch (const std::invalid_argument& e) {
    throw SpecParseError(std::string("bad family parameters: ") + e.what());
  }
  throw SpecParseError("unknown family spec: " + text);
}

ReferenceMeasure parse_measure_spec(const std::string& text) {
  Spec spec = parse_spec(text);
  if (spec.name == "lebesgue-line") return ReferenceMeasure::lebesgue_line();
  if (spec.name == "lebesgue-circle") return ReferenceMeasure::lebesgue_circle();
  if (spec.name == "counting") return ReferenceMeasure::counting();
  if (spec.name == "weighted")
    return ReferenceMeasure::weighted_restricted(
        spec.number("M", 1.5), spec.number("lo", -1.0), spec.number("hi", 1.0));
  throw SpecParseError("unknown measure spec: " + text);
}

// --- defaults ------------------------------------------------------------------

namespace {

std::string default_family_spec(Domain domain) {
  switch (domain) {
    case Domain::line: return "nested-interval:x=0,w=1,count=50";
    case Domain::circle: return "shrinking-arc:a=0,w=3.141592653589793,count=12,geometric";
    case Domain::naturals: return "nat-tail:count=30";
  }
  throw std::logic_error("unreachable");
}

std::vector<MeasurableSet> default_sets(Domain domain) {
  switch (domain) {
    case Domain::line:
      return {LineSet::interval(0.0, 0.25), LineSet::interval(0.1, 0.5),
              LineSet::interval(0.25, 0.75), LineSet::interval(0.5, 1.0),
              LineSet::interval(-LineSet::kInf, 0.5), LineSet::interval(-1.0, 2.0)};
    case Domain::circle:
      return {CircleSet::arc(0.0, M_PI / 2), CircleSet::arc(M_PI / 4, M_PI),
              CircleSet::arc(0.0, M_PI), CircleSet::arc(M_PI, kTwoPi),
              CircleSet::arc(3 * M_PI / 2, M_PI / 2)};
    case Domain::naturals: {
      std::vector<MeasurableSet> sets;
      for (std::uint64_t n = 0; n < 10; ++n) sets.push_back(NatSet::singleton(n));
      sets.push_back(NatSet::cofinite({0, 1, 2, 3, 4}));
      return sets;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<MeasurableSet> default_partition(Domain domain) {
  switch (domain) {
    case Domain::line: {
      std::vector<MeasurableSet> cells;
      cells.push_back(LineSet::interval(-LineSet::kInf, -2.0));
      for (double x = -2.0; x < 2.0 - 1e-9; x += 0.5)
        cells.push_back(LineSet::interval(x, x + 0.5));
      cells.push_back(LineSet::interval(2.0, LineSet::kInf));
      return cells;
    }
    case Domain::circle: {
      std::vector<MeasurableSet> cells;
      for (int q = 0; q < 4; ++q)
        cells.push_back(CircleSet::arc(q * M_PI / 2, (q + 1) * M_PI / 2));
      return cells;
    }
    case Domain::naturals: {
      std::vector<MeasurableSet> cells;
      std::vector<std::uint64_t> head;
      for (std::uint64_t n = 0; n < 10; ++n) {
        cells.push_back(NatSet::singleton(n));
        head.push_back(n);
      }
      cells.push_back(NatSet::cofinite(head));
      return cells;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<double> default_probe_points(Domain domain) {
  switch (domain) {
    case Domain::line: return {0.0, 0.25, 0.5, 1.0};
    case Domain::circle: return {0.0, 1.0, M_PI};
    case Domain::naturals: return {0.0, 1.0, 2.0, 3.0};
  }
  throw std::logic_error("unreachable");
}

std::vector<double> default_lambdas(const MarkovKernel& kernel) {
  switch (kernel.lambda_domain()) {
    case KernelDomain::line: {
      std::vector<double> xs;
      for (double x = -3.0; x <= 3.0 + 1e-9; x += 0.5) xs.push_back(x);
      return xs;
    }
    case KernelDomain::unit_interval: {
      std::vector<double> xs;
      for (double x = 0.0; x <= 1.0 + 1e-9; x += 0.1) xs.push_back(x);
      return xs;
    }
    case KernelDomain::naturals: {
      std::vector<double> xs;
      for (int m = 0; m <= 12; ++m) xs.push_back(m);
      return xs;
    }
  }
  throw std::logic_error("unreachable");
}

// --- report assembly ------------------------------------------------------------

Json make_report(const std::string& analyzer, Json inputs, Json sequence,
                 const std::string& verdict, Json tolerances, std::uint64_t seed,
                 bool fixed_timestamp) {
  Json report = Json::object();
  report.set("analyzer", Json::str(analyzer));
  report.set("inputs", std::move(inputs));
  report.set("sequence", std::move(sequence));
  report.set("verdict", Json::str(verdict));
  report.set("tolerances", std::move(tolerances));
  report.set("seed", Json::integer(static_cast<std::int64_t>(seed)));
  report.set("timestamp", Json::str(iso_timestamp(fixed_timestamp)));
  return report;
}

// Emit-time schema validation: the dumped report must parse back with every
// required key present and typed as documented (docs/report_schema.json).
void validate_and_write(const std::string& path, const Json& report) {
  std::string text = report.dump();
  nlohmann::json parsed = nlohmann::json::parse(text);
  const char* required[] = {"analyzer", "inputs",     "sequence", "verdict",
                            "tolerances", "seed",     "timestamp"};
  for (const char* key : required)
    if (!parsed.contains(key))
      throw std::runtime_error(std::string("report missing required key ") + key);
  if (!parsed["analyzer"].is_string() || !parsed["verdict"].is_string() ||
      !parsed["inputs"].is_object() || !parsed["tolerances"].is_object() ||
      !parsed["sequence"].is_array() || !parsed["seed"].is_number_unsigned())
    throw std::runtime_error("report violates the schema field types");
  write_text_file(path, text);
}

struct AnalyzerContext {
  const RunConfig& config;
  const ObservableBundle& bundle;
  std::vector<MeasurableSet> family;  // continuity families
  std::vector<MeasurableSet> sets;    // pointwise set list
  AnalyzeOutcome* outcome;
};

Json inputs_json(const AnalyzerContext& ctx, std::initializer_list<const char*> extra = {}) {
  Json inputs = Json::object();
  inputs.set("observable", Json::str(ctx.bundle.spec));
  Json fam = Json::array();
  for (const auto& f : ctx.config.families) fam.push(Json::str(f));
  inputs.set("families", std::move(fam));
  Json sets = Json::array();
  for (const auto& s : ctx.sets) sets.push(Json::str(to_string(s)));
  inputs.set("sets", std::move(sets));
  for (const char* note : extra) inputs.set("note", Json::str(note));
  return inputs;
}

Json run_norm1(const AnalyzerContext& ctx) {
  std::vector<double> probes = default_probe_points(ctx.bundle.povm.domain());
  Norm1Scan scan = norm1_scan(ctx.bundle.povm, ctx.sets, probes);
  Json tol = Json::object();
  tol.set("norm1_slack", Json::num(1e-6));
  tol.set("nonzero_floor", Json::num(1e-9));
  Json report = make_report(
      "norm1", inputs_json(ctx), Json::num_array(scan.norms),
      scan.norm1_on_family ? "norm-1-on-family" : "not-norm-1", std::move(tol),
      ctx.config.seed, ctx.config.fixed_timestamp);
  report.set("singleton_norms", Json::num_array(scan.singleton_norms));
  report.set("point_mass_condition", Json::boolean(scan.point_mass_condition));
  return report;
}

Json run_uc_probe(const AnalyzerContext& ctx) {
  ContinuityReport probe = uniform_continuity_probe(ctx.bundle.povm, ctx.family);
  Json tol = Json::object();
  tol.set("decay_factor", Json::num(kDecayFactor));
  tol.set("persist_factor", Json::num(kPersistFactor));
  Json report =
      make_report("uc-probe", inputs_json(ctx), Json::num_array(probe.norms),
                  to_string(probe.verdict), std::move(tol), ctx.config.seed,
                  ctx.config.fixed_timestamp);
  report.set("fitted_rate", Json::num(probe.fitted_rate));
  report.set("fit_r2", Json::num(probe.fit_r2));
  if (ctx.config.csv)
    write_text_file(ctx.config.out_dir + "/uc-probe.csv", norms_csv(probe.norms));
  return report;
}

Json run_abs_cont(const AnalyzerContext& ctx) {
  std::string measure_spec = ctx.config.measure;
  if (measure_spec.empty()) {
    switch (ctx.bundle.povm.domain()) {
      case Domain::line: measure_spec = "lebesgue-line"; break;
      case Domain::circle: measure_spec = "lebesgue-circle"; break;
      case Domain::naturals: measure_spec = "counting"; break;
    }
  }
  ReferenceMeasure nu = parse_measure_spec(measure_spec);
  AbsContFit fit = absolute_continuity_fit(ctx.bundle.povm, nu, ctx.sets);
  std::vector<double> ratios;
  for (std::size_t i = 0; i < ctx.sets.size(); ++i) {
    double m = nu(ctx.sets[i]);
    ratios.push_back(std::isinf(m) || m == 0.0
                         ? 0.0
                         : ctx.bundle.povm.at(ctx.sets[i]).norm() / m);
  }
  Json tol = Json::object();
  tol.set("violation_floor", Json::num(1e-9));
  Json inputs = inputs_json(ctx);
  inputs.set("measure", Json::str(measure_spec));
  Json report = make_report(
      "abs-cont", std::move(inputs), Json::num_array(ratios),
      fit.absolutely_continuous() ? "absolutely-continuous" : "not-absolutely-continuous",
      std::move(tol), ctx.config.seed, ctx.config.fixed_timestamp);
  report.set("c_hat", Json::num(fit.c_hat));
  report.set("skipped_infinite", Json::integer(static_cast<std::int64_t>(fit.skipped.size())));
  return report;
}

Json run_commute(const AnalyzerContext& ctx) {
  double worst = check_commutative(ctx.bundle.povm, ctx.sets, 512, ctx.config.seed);
  Json tol = Json::object();
  tol.set("commutative_floor", Json::num(1e-10));
  std::vector<double> seq = {worst};
  return make_report("commute", inputs_json(ctx), Json::num_array(seq),
                     worst <= 1e-10 ? "commutative" : "non-commutative", std::move(tol),
                     ctx.config.seed, ctx.config.fixed_timestamp);
}

Json run_covariance(const AnalyzerContext& ctx) {
  if (ctx.bundle.povm.domain() != Domain::circle)
    throw std::invalid_argument("covariance analyzer needs a circle observable");
  RandomStream rs(ctx.config.seed);
  std::uint64_t ctr = 0;
  std::vector<double> thetas;
  std::vector<CircleSet> arcs;
  for (int i = 0; i < 25; ++i) {
    thetas.push_back(rs.uniform(ctr++) * kTwoPi);
    double start = rs.uniform(ctr++) * kTwoPi;
    arcs.push_back(CircleSet::arc(start, start + 0.1 + rs.uniform(ctr++) * 2.0));
  }
  double worst = covariance_check(ctx.bundle.povm, thetas, arcs);
  Json tol = Json::object();
  tol.set("covariance_tolerance", Json::num(1e-10));
  std::vector<double> seq = {worst};
  Json report = make_report("covariance", inputs_json(ctx), Json::num_array(seq),
                            worst <= 1e-10 ? "covariant" : "covariance-broken",
                            std::move(tol), ctx.config.seed, ctx.config.fixed_timestamp);
  if (worst > 1e-10)
    ctx.outcome->failures.push_back("covariance deviation " + format_double_17(worst));
  return report;
}

Json run_scaling(const AnalyzerContext& ctx) {
  std::vector<int> dims = ctx.config.dims;
  if (dims.empty()) dims = {32, 64, 128, 256};

  std::string probe_spec = ctx.config.probe;
  if (probe_spec.empty()) {
    switch (ctx.bundle.povm.domain()) {
      case Domain::line: probe_spec = "norm:[0,1)"; break;
      case Domain::circle: probe_spec = "norm:circ:[0,0.1)"; break;
      case Domain::naturals: probe_spec = "residual:5"; break;
    }
  }
  std::function<double(const Povm&)> probe;
  std::string probe_label = probe_spec;
  if (probe_spec.rfind("norm:", 0) == 0) {
    MeasurableSet target = parse_set(probe_spec.substr(5));
    probe = [target](const Povm& f) { return f.at(target).norm(); };
  } else if (probe_spec.rfind("residual:", 0) == 0) {
    int k = std::stoi(probe_spec.substr(9));
    probe = [k](const Povm& f) {
      Matrix sum = Matrix::Zero(f.dim(), f.dim());
      for (int i = 0; i <= k; ++i) sum += f.at(NatSet::singleton(i)).matrix();
      return operator_norm(
          HermitianOperator::symmetrized(Matrix::Identity(f.dim(), f.dim()) - sum));
    };
  } else {
    throw SpecParseError("unknown scaling probe: " + probe_spec);
  }

  const std::string observable_spec = ctx.bundle.spec;
  ScalingReport scaling = dimension_scaling(
      [&](int d) { return parse_observable_with_dim(observable_spec, d).povm; }, dims,
      probe, probe_label);

  std::vector<double> seq;
  for (const auto& row : scaling.rows) seq.push_back(row.value);
  std::string verdict = scaling.obstruction()    ? "obstruction"
                        : scaling.uc_evidence()  ? "uc-evidence"
                                                 : "inconclusive";
  if (scaling.rows.size() < 2) verdict = "inconclusive (insufficient dims)";
  Json tol = Json::object();
  tol.set("obstruction_level", Json::num(kObstructionLevel));
  Json inputs = inputs_json(ctx);
  Json dims_json = Json::array();
  for (int d : dims) dims_json.push(Json::integer(d));
  inputs.set("dims", std::move(dims_json));
  inputs.set("probe", Json::str(probe_label));
  return make_report("scaling", std::move(inputs), Json::num_array(seq), verdict,
                     std::move(tol), ctx.config.seed, ctx.config.fixed_timestamp);
}

Json run_sample(const AnalyzerContext& ctx) {
  std::vector<MeasurableSet> partition = default_partition(ctx.bundle.povm.domain());
  std::string state_spec = ctx.config.state.empty() ? "basis:0" : ctx.config.state;
  Spec sspec = parse_spec(state_spec);
  State psi = [&]() -> State {
    int dim = ctx.bundle.povm.dim();
    if (sspec.name == "basis") return State::basis(dim, sspec.integer("k", 0));
    if (sspec.name == "gaussian") {
      Vector amp(dim);
      for (int j = 0; j < dim; ++j) {
        double x = (static_cast<double>(j) / (dim - 1) - 0.5) * 4.0;
        amp(j) = std::exp(-x * x / 2.0);
      }
      return State::normalized(amp);
    }
    throw SpecParseError("unknown state spec: " + state_spec);
  }();

  std::vector<double> probs = born_probabilities(ctx.bundle.povm, psi, partition);
  OutcomeHistogram direct =
      sample_direct(ctx.bundle.povm, psi, partition, ctx.config.samples, ctx.config.seed);
  ChiSquareResult fit = chi_square_vs_expected(direct, probs);

  Json inputs = inputs_json(ctx);
  inputs.set("state", Json::str(state_spec));
  inputs.set("samples", Json::integer(static_cast<std::int64_t>(ctx.config.samples)));
  Json tol = Json::object();
  tol.set("chi_square_quantile", Json::num(0.999));

  std::vector<double> freq;
  for (std::uint64_t c : direct.counts)
    freq.push_back(static_cast<double>(c) / static_cast<double>(direct.total));
  Json report = make_report("sample", std::move(inputs), Json::num_array(freq),
                            fit.below_quantile ? "consistent" : "chi-square-exceeded",
                            std::move(tol), ctx.config.seed, ctx.config.fixed_timestamp);
  report.set("chi_square", Json::num(fit.statistic));
  report.set("chi_square_q999", Json::num(fit.quantile_999));
  report.set("born_probabilities", Json::num_array(probs));

  if (ctx.bundle.sharp && ctx.bundle.kernel) {
    OutcomeHistogram two_stage =
        sample_two_stage(*ctx.bundle.sharp, *ctx.bundle.kernel, psi, partition,
                         ctx.config.samples, ctx.config.seed + 1);
    ChiSquareResult vs = chi_square_two_sample(direct, two_stage);
    report.set("two_stage_chi_square", Json::num(vs.statistic));
    report.set("two_stage_consistent", Json::boolean(vs.below_quantile));
    if (!vs.below_quantile)
      ctx.outcome->failures.push_back("two-stage sampling diverges from direct sampling");
  }
  if (!fit.below_quantile)
    ctx.outcome->failures.push_back("sampled frequencies fail the chi-square check");
  if (ctx.config.csv)
    write_text_file(ctx.config.out_dir + "/histogram.csv", histogram_csv(direct));
  return report;
}

Json run_kernel_axioms(const AnalyzerContext& ctx) {
  MarkovKernel kernel = ctx.config.kernel.empty()
                            ? (ctx.bundle.kernel ? *ctx.bundle.kernel
                                                 : throw SpecParseError(
                                                       "kernel-axioms needs --kernel or a "
                                                       "smeared observable"))
                            : parse_kernel_spec(ctx.config.kernel);
  std::vector<double> lambdas = default_lambdas(kernel);
  std::vector<MeasurableSet> partition = default_partition(kernel.target_domain());
  KernelAxiomReport axioms = kernel_axiom_report(kernel, lambdas, partition);

  Json tol = Json::object();
  tol.set("axiom_tolerance", Json::num(1e-9));
  std::vector<double> seq = {axioms.normalization_error, axioms.additivity_error,
                             axioms.range_excess};
  Json inputs = inputs_json(ctx);
  inputs.set("kernel", Json::str(kernel.label()));
  Json report = make_report("kernel-axioms", std::move(inputs), Json::num_array(seq),
                            axioms.passes() ? "markov-kernel" : "axioms-violated",
                            std::move(tol), ctx.config.seed, ctx.config.fixed_timestamp);
  report.set("range_violations", Json::integer(axioms.range_violations));
  if (!axioms.passes())
    ctx.outcome->failures.push_back("kernel axioms violated for " + kernel.label());
  return report;
}

}  // namespace

AnalyzeOutcome run_analyze(const RunConfig& config) {
  if (config.observable.empty()) throw SpecParseError("no observable given");
  if (config.analyzers.empty()) throw SpecParseError("no analyzers given");
  std::filesystem::create_directories(config.out_dir);

  ObservableBundle bundle = parse_observable(config.observable);
  AnalyzeOutcome outcome;

  AnalyzerContext ctx{config, bundle, {}, {}, &outcome};
  if (config.families.empty()) {
    ctx.family = parse_family_spec(default_family_spec(bundle.povm.domain()));
  } else {
    for (const auto& spec : config.families) {
      auto members = parse_family_spec(spec);
      ctx.family.insert(ctx.family.end(), members.begin(), members.end());
    }
  }
  if (config.sets.empty()) {
    ctx.sets = default_sets(bundle.povm.domain());
  } else {
    for (const auto& text : config.sets) ctx.sets.push_back(parse_set(text));
  }

  for (const std::string& analyzer : config.analyzers) {
    Json report;
    if (analyzer == "norm1")
      report = run_norm1(ctx);
    else if (analyzer == "uc-probe")
      report = run_uc_probe(ctx);
    else if (analyzer == "abs-cont")
      report = run_abs_cont(ctx);
    else if (analyzer == "commute")
      report = run_commute(ctx);
    else if (analyzer == "covariance")
      report = run_covariance(ctx);
    else if (analyzer == "scaling")
      report = run_scaling(ctx);
    else if (analyzer == "sample")
      report = run_sample(ctx);
    else if (analyzer == "kernel-axioms")
      report = run_kernel_axioms(ctx);
    else
      throw SpecParseError("unknown analyzer: " + analyzer);

    std::string path = config.out_dir + "/" + analyzer + ".json";
    validate_and_write(path, report);
    outcome.report_files.push_back(path);
  }

  Json summary = Json::object();
  summary.set("observable", Json::str(config.observable));
  Json files = Json::array();
  for (const auto& f : outcome.report_files) files.push(Json::str(f));
  summary.set("reports", std::move(files));
  Json failures = Json::array();
  for (const auto& f : outcome.failures) failures.push(Json::str(f));
  summary.set("failures", std::move(failures));
  summary.set("ok", Json::boolean(outcome.ok()));
  write_text_file(config.out_dir + "/summary.json", summary.dump());
  return outcome;
}

int run_reproduce_paper(const std::string& out_dir, bool fixed_timestamp) {
  std::filesystem::create_directories(out_dir);
  std::vector<CriterionResult> results = run_acceptance_criteria();

  int failures = 0;
  Json rows = Json::array();
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    std::printf("%s  #%-2d %s — %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    Json row = Json::object();
    row.set("id", Json::integer(r.id));
    row.set("name", Json::str(r.name));
    row.set("pass", Json::boolean(r.pass));
    row.set("detail", Json::str(r.detail));
    rows.push(std::move(row));
  }
  Json report = Json::object();
  report.set("criteria", std::move(rows));
  report.set("all_pass", Json::boolean(failures == 0));
  report.set("timestamp", Json::str(iso_timestamp(fixed_timestamp)));
  write_text_file(out_dir + "/reproduce_paper.json", report.dump());
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures;
}

}  // namespace povmlab
