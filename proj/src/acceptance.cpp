#include "povmlab/acceptance.hpp"

#include "povmlab/catalog.hpp"
#include "povmlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace povmlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Independent binomial pmf route: multiplicative recurrence over m at fixed
// n, no lgamma. Used as the oracle against the kernel's log-space values.
std::vector<double> oracle_binomial_row(double eps, std::uint64_t n, std::uint64_t dim) {
  std::vector<double> row(dim, 0.0);
  if (n >= dim) return row;
  double p = std::pow(eps, static_cast<double>(n));  // pmf at m = n
  row[n] = p;
  for (std::uint64_t m = n; m + 1 < dim; ++m) {
    p *= (1.0 - eps) * static_cast<double>(m + 1) / static_cast<double>(m + 1 - n);
    row[m + 1] = p;
  }
  return row;
}

// max over m < dim of P(Bin(m, eps) > n_max)
double oracle_binomial_tail(double eps, std::uint64_t n_max, std::uint64_t dim) {
  double worst = 0.0;
  std::vector<std::vector<double>> rows;
  for (std::uint64_t n = 0; n <= n_max; ++n)
    rows.push_back(oracle_binomial_row(eps, n, dim));
  for (std::uint64_t m = 0; m < dim; ++m) {
    double head = 0.0;
    for (const auto& row : rows) head += row[m];
    worst = std::max(worst, 1.0 - head);
  }
  return worst;
}

CircleSet random_arc_union(const RandomStream& rs, std::uint64_t& ctr, int max_arcs) {
  int n_arcs = 1 + static_cast<int>(rs.bits(ctr++) % static_cast<std::uint64_t>(max_arcs));
  std::vector<Interval> raw;
  for (int a = 0; a < n_arcs; ++a) {
    double start = rs.uniform(ctr++) * kTwoPi;
    double width = 0.05 + rs.uniform(ctr++) * 1.8;
    raw.push_back({start, start + width});
  }
  return CircleSet::of(std::move(raw));
}

LineSet random_line_union(const RandomStream& rs, std::uint64_t& ctr, double lo, double hi) {
  int n = 1 + static_cast<int>(rs.bits(ctr++) % 3);
  std::vector<Interval> raw;
  for (int a = 0; a < n; ++a) {
    double start = lo + rs.uniform(ctr++) * (hi - lo - 0.05);
    double width = 0.02 + rs.uniform(ctr++) * (hi - start - 0.02);
    raw.push_back({start, start + width});
  }
  return LineSet::of(std::move(raw));
}

// --- criterion bodies -------------------------------------------------------

CriterionResult gaussian_lipschitz_bound() {
  const double widths[] = {0.5, 1.0, 2.0};
  RandomStream rs(41);
  std::uint64_t ctr = 0;
  double worst_margin = -1.0;
  bool ok = true;
  std::vector<double> grid;
  for (double x = -3.0; x <= 3.0 + 1e-12; x += 0.02) grid.push_back(x);

  for (double l : widths) {
    MarkovKernel mu = gaussian_kernel(l);
    double bound = std::sqrt(2.0) / (l * std::sqrt(M_PI));
    for (int trial = 0; trial < 100; ++trial) {
      double a = -4.0 + 8.0 * rs.uniform(ctr++);
      double w = 0.01 + 2.99 * rs.uniform(ctr++);
      MeasurableSet delta = LineSet::interval(a, a + w);
      std::vector<double> values(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) values[i] = mu(grid[i], delta);
      for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size() && grid[j] - grid[i] <= 0.1 + 1e-12;
             ++j) {
          double lhs = std::abs(values[j] - values[i]);
          double rhs = bound * (grid[j] - grid[i]) + 1e-9;
          worst_margin = std::max(worst_margin, lhs - rhs);
          if (lhs > rhs) ok = false;
        }
      ModulusResult modulus = continuity_modulus(mu, delta, grid, 0.1);
      if (!modulus.applicable || modulus.value > bound * 0.1 + 1e-9) ok = false;
    }
  }
  return {1, "gaussian kernel Lipschitz bound sqrt(2)/(l sqrt(pi))", ok,
          "worst bound margin " + fmt(worst_margin)};
}

CriterionResult binomial_normalization() {
  bool ok = true;
  double worst = 0.0;
  for (double eps : {0.1, 0.5, 0.9}) {
    MarkovKernel mu = binomial_kernel(eps);
    for (std::uint64_t m = 0; m <= 200; ++m) {
      double sum = 0.0;
      for (std::uint64_t n = 0; n <= m; ++n)
        sum += mu(static_cast<double>(m), NatSet::singleton(n));
      worst = std::max(worst, std::abs(sum - 1.0));
      if (std::abs(sum - 1.0) > 1e-12) ok = false;
    }
  }
  return {2, "binomial kernel rows sum to 1 (m <= 200)", ok,
          "worst |sum-1| = " + fmt(worst)};
}

CriterionResult unsharp_number_norm1_structure() {
  const double eps = 0.5;
  const int dim = 500;
  Povm f = unsharp_number(eps, dim);

  double norm0 = f.at(NatSet::singleton(0)).norm();
  bool ok = norm0 == 1.0;

  double worst_eig = 0.0, worst_dev = 0.0;
  for (std::uint64_t n = 1; n <= 20; ++n) {
    Effect e = f.at(NatSet::singleton(n));
    std::vector<double> oracle = oracle_binomial_row(eps, n, dim);
    for (int m = 0; m < dim; ++m) {
      double entry = e.matrix()(m, m).real();
      worst_dev = std::max(worst_dev, std::abs(entry - oracle[static_cast<std::size_t>(m)]));
    }
    worst_eig = std::max(worst_eig, e.norm());
    if (e.norm() >= 1.0 - 1e-12) ok = false;
  }
  if (worst_dev > 1e-12) ok = false;
  return {3, "unsharp number: only F({0}) reaches norm 1", ok,
          "||F({0})|| = " + fmt(norm0) + ", max_n>=1 " + fmt(worst_eig) +
              ", oracle deviation " + fmt(worst_dev)};
}

CriterionResult compactness_obstruction_scaling() {
  const double eps = 0.5;
  std::vector<int> dims = {50, 100, 200, 400};
  auto probe = [](const Povm& f) {
    Matrix sum = Matrix::Zero(f.dim(), f.dim());
    for (std::uint64_t i = 0; i <= 5; ++i) sum += f.at(NatSet::singleton(i)).matrix();
    return operator_norm(
        HermitianOperator::symmetrized(Matrix::Identity(f.dim(), f.dim()) - sum));
  };
  ScalingReport report = dimension_scaling(
      [eps](int d) { return unsharp_number(eps, d); }, dims, probe,
      "residual ||1 - sum_{i<=5} F_i||");

  bool ok = report.obstruction();
  double worst_oracle_dev = 0.0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    double oracle = oracle_binomial_tail(eps, 5, static_cast<std::uint64_t>(dims[i]));
    worst_oracle_dev = std::max(worst_oracle_dev, std::abs(report.rows[i].value - oracle));
    if (i + 1 < report.rows.size() &&
        report.rows[i + 1].value < report.rows[i].value - 1e-12)
      ok = false;
  }
  if (report.rows.back().value < 0.9 || worst_oracle_dev > 1e-10) ok = false;
  return {4, "unsharp number residual grows with D (compactness obstruction)", ok,
          "residual(D=400) = " + fmt(report.rows.back().value) + ", oracle deviation " +
              fmt(worst_oracle_dev)};
}

CriterionResult e1_absolute_continuity() {
  const int dim = 64;
  Povm f = phase_e1(dim);
  const double c = 3.0 / kTwoPi;  // 3/(2 pi)
  RandomStream rs(55);
  std::uint64_t ctr = 0;
  bool ok = true;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    CircleSet delta = random_arc_union(rs, ctr, 3);
    double norm = f.at(delta).norm();
    double bound = c * delta.length() + 1e-9;
    if (norm > bound) ok = false;
    if (delta.length() > 0) worst_ratio = std::max(worst_ratio, norm / delta.length());
  }

  auto family = shrinking_arc_family(0.0, M_PI, 12, /*geometric=*/true);
  ContinuityReport probe = uniform_continuity_probe(f, family, "arcs [0, pi/2^i)");
  if (probe.verdict != Trend::decays) ok = false;
  return {5, "E_1 absolutely continuous: ||E_1(D)|| <= 3/(2pi)|D| and uc-probe decays",
          ok,
          "worst ||E_1||/|D| = " + fmt(worst_ratio) + " vs 3/(2pi) = " + fmt(c) +
              ", probe " + to_string(probe.verdict)};
}

CriterionResult canonical_phase_norm_growth() {
  std::vector<int> dims = {32, 64, 128, 256};
  MeasurableSet small_arc = CircleSet::arc(0.0, 0.1);
  ScalingReport report = dimension_scaling(
      [](int d) { return canonical_phase(d); }, dims,
      [&](const Povm& f) { return f.at(small_arc).norm(); }, "||E_can([0,0.1))||");

  bool ok = report.obstruction();
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i)
    if (report.rows[i + 1].value < report.rows[i].value - 1e-12) ok = false;
  if (report.rows.back().value < 0.9) ok = false;

  Povm e_can = canonical_phase(64);
  double worst_singleton = 0.0;
  for (double x : {0.0, 1.0, M_PI, 5.5})
    worst_singleton = std::max(worst_singleton, e_can.at_point(x).norm());
  if (worst_singleton != 0.0) ok = false;
  return {6, "canonical phase: small-arc norm grows to 1, singletons vanish", ok,
          "||E_can([0,0.1))|| at D=256: " + fmt(report.rows.back().value) +
              ", max singleton " + fmt(worst_singleton)};
}

CriterionResult phase_covariance() {
  const int dim = 64;
  RandomStream rs(77);
  std::uint64_t ctr = 0;
  double worst = 0.0;
  for (const Povm& f : {phase_e1(dim), canonical_phase(dim)}) {
    for (int trial = 0; trial < 50; ++trial) {
      double theta = rs.uniform(ctr++) * kTwoPi;
      CircleSet arcs = random_arc_union(rs, ctr, 2);
      std::vector<double> thetas = {theta};
      std::vector<CircleSet> sets = {arcs};
      worst = std::max(worst, covariance_check(f, thetas, sets));
    }
  }
  return {7, "phase covariance e^{iN t} E(D) e^{-iN t} = E(D+t)", worst <= 1e-10,
          "max deviation " + fmt(worst)};
}

CriterionResult gaussian_halfline_persistence() {
  bool ok = true;
  double loc40 = halfline_localization(1.0, -1.0, 40);
  if (loc40 < 1.0 - 1e-6) ok = false;

  Povm f = gaussian_unsharp_position(1.0, -50.0, 0.0, 500);
  auto family = escaping_halfline_family(20);
  ContinuityReport probe =
      uniform_continuity_probe(f, family, "half-lines (-inf,-i), i <= 20");
  double min_norm = *std::min_element(probe.norms.begin(), probe.norms.end());
  if (min_norm < 0.999 || probe.verdict != Trend::persists) ok = false;

  std::vector<double> probes = {-10.0, -1.0, 0.0};
  Norm1Scan scan = norm1_scan(f, family, probes);
  double max_singleton =
      *std::max_element(scan.singleton_norms.begin(), scan.singleton_norms.end());
  if (max_singleton != 0.0 || scan.point_mass_condition) ok = false;
  return {8, "gaussian position: half-line norms persist at 1, point masses vanish", ok,
          "localization(n=40) = " + fmt(loc40) + ", min half-line norm " + fmt(min_norm) +
              ", probe " + to_string(probe.verdict)};
}

CriterionResult bounded_position_absolute_continuity() {
  Povm f = bounded_unsharp_position(KernelWeight::default_weight(), 200);
  ReferenceMeasure nu = ReferenceMeasure::weighted_restricted(1.5, -1.0, 1.0);
  RandomStream rs(99);
  std::uint64_t ctr = 0;
  std::vector<MeasurableSet> family;
  for (int trial = 0; trial < 200; ++trial)
    family.push_back(random_line_union(rs, ctr, -3.0, 3.0));
  AbsContFit fit = absolute_continuity_fit(f, nu, family);
  bool ok = fit.c_hat <= 1.0 + 1e-9 && fit.absolutely_continuous();

  auto shrink = nested_interval_family(0.0, 1.0, 50);
  ContinuityReport probe = uniform_continuity_probe(f, shrink, "intervals (0, 1/i)");
  if (probe.verdict != Trend::decays) ok = false;
  for (std::size_t i = 0; i < probe.norms.size(); ++i)
    if (probe.norms[i] > 1.5 / static_cast<double>(i + 1) + 1e-9) ok = false;
  return {9, "bounded position: c_hat <= 1 against 1.5|D cap [-1,1]|, probe decays", ok,
          "c_hat = " + fmt(fit.c_hat) + ", probe " + to_string(probe.verdict) +
              " (final norm " + fmt(probe.norms.back()) + ")"};
}

CriterionResult smearing_identities() {
  bool ok = true;
  double worst_pvm_dev = 0.0, worst_axiom = 0.0, worst_comm = 0.0;

  // A spectral measure with a genuinely non-standard eigenbasis.
  const int dim = 6;
  RandomStream rs(123);
  Matrix seed_matrix(dim, dim);
  std::uint64_t ctr = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      seed_matrix(i, j) = std::complex<double>(rs.uniform(ctr++) - 0.5,
                                               rs.uniform(ctr++) - 0.5);
  Matrix basis = Eigen::HouseholderQR<Matrix>(seed_matrix).householderQ();
  std::vector<double> levels = {0.2, 0.2, 0.5, 0.5, 0.5, 0.8};
  SpectralMeasure sharp = SpectralMeasure::with_basis(basis, levels);

  Povm f = smear(sharp, point_kernel());
  std::vector<MeasurableSet> family = {
      LineSet::interval(0.0, 0.3), LineSet::interval(0.1, 0.6),
      LineSet::interval(0.4, 1.0), LineSet::interval(-LineSet::kInf, 0.5),
      LineSet::full()};
  for (const auto& delta : family) {
    // Independent route: sum the projections of the points inside Delta.
    Matrix expected = Matrix::Zero(dim, dim);
    for (double lambda : sharp.points())
      if (std::get<LineSet>(delta).contains(lambda))
        expected += sharp.projection_at(lambda).matrix();
    double dev = operator_norm(
        HermitianOperator::symmetrized(f.at(delta).matrix() - expected));
    worst_pvm_dev = std::max(worst_pvm_dev, dev);
  }
  if (worst_pvm_dev > 1e-12) ok = false;
  if (!is_pvm(f, family).is_pvm) ok = false;

  // Normalization, additivity and commutativity across the smeared catalog.
  std::vector<MeasurableSet> line_partition = {
      LineSet::interval(-LineSet::kInf, 0.3), LineSet::interval(0.3, 0.6),
      LineSet::interval(0.6, LineSet::kInf)};
  std::vector<MeasurableSet> nat_partition = {
      NatSet::of({0, 1, 2, 3, 4}), NatSet::of({5, 6, 7, 8, 9}),
      NatSet::cofinite({0, 1, 2, 3, 4, 5, 6, 7, 8, 9})};

  struct Case {
    Povm povm;
    std::span<const MeasurableSet> partition;
    std::span<const MeasurableSet> family;
  };
  std::vector<MeasurableSet> nat_family = {NatSet::singleton(0), NatSet::of({1, 2, 3}),
                                           NatSet::cofinite({0, 1})};
  std::vector<Case> cases;
  cases.push_back({f, line_partition, family});
  cases.push_back({smear(sharp, gaussian_kernel(0.5)), line_partition, family});
  cases.push_back(
      {bounded_unsharp_position(KernelWeight::default_weight(), 50), line_partition,
       family});
  cases.push_back({unsharp_number(0.3, 40), nat_partition, nat_family});

  for (const auto& c : cases) {
    PovmAxiomReport axioms = povm_axiom_check(c.povm, c.partition);
    worst_axiom = std::max(
        worst_axiom, std::max(axioms.normalization_error, axioms.additivity_error));
    if (!axioms.passes()) ok = false;
    worst_comm = std::max(worst_comm, check_commutative(c.povm, c.family));
  }
  if (worst_comm > 1e-10) ok = false;
  return {10, "smearing identities: point kernel reproduces the PVM, axioms hold", ok,
          "PVM deviation " + fmt(worst_pvm_dev) + ", worst axiom error " +
              fmt(worst_axiom) + ", worst commutator " + fmt(worst_comm)};
}

CriterionResult sampler_equivalence() {
  const int grid = 61;
  SpectralMeasure sharp = [&] {
    std::vector<double> xs(grid);
    for (int j = 0; j < grid; ++j) xs[j] = -3.0 + 6.0 * j / (grid - 1);
    return SpectralMeasure::diagonal(std::move(xs));
  }();
  MarkovKernel mu = gaussian_kernel(1.0);
  Povm f = smear(sharp, mu);

  Vector amplitudes(grid);
  for (int j = 0; j < grid; ++j) {
    double x = -3.0 + 6.0 * j / (grid - 1);
    amplitudes(j) = std::exp(-x * x / 2.0);
  }
  State psi = State::normalized(amplitudes);

  std::vector<MeasurableSet> partition = {
      LineSet::interval(-LineSet::kInf, -2.0), LineSet::interval(-2.0, -1.0),
      LineSet::interval(-1.0, -0.5),           LineSet::interval(-0.5, 0.0),
      LineSet::interval(0.0, 0.5),             LineSet::interval(0.5, 1.0),
      LineSet::interval(1.0, 2.0),             LineSet::interval(2.0, LineSet::kInf)};

  std::vector<double> probs = born_probabilities(f, psi, partition);

  // Exact marginal identity: Born probabilities equal the kernel mixture.
  std::vector<double> weights = sharp.column_weights(psi);
  const auto& xs = sharp.column_values();
  double worst_identity = 0.0;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    double mixture = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k)
      mixture += weights[k] * mu(xs[k], partition[j]);
    worst_identity = std::max(worst_identity, std::abs(mixture - probs[j]));
  }

  const std::uint64_t n = 100000;
  OutcomeHistogram direct = sample_direct(f, psi, partition, n, 2026);
  OutcomeHistogram two_stage = sample_two_stage(sharp, mu, psi, partition, n, 2027);
  ChiSquareResult two_sample = chi_square_two_sample(direct, two_stage);
  ChiSquareResult vs_exact = chi_square_vs_expected(two_stage, probs);

  bool ok = worst_identity <= 1e-12 && two_sample.below_quantile &&
            vs_exact.below_quantile;
  return {11, "sampler: two-stage randomization matches direct Born sampling", ok,
          "marginal identity deviation " + fmt(worst_identity) + ", chi2 " +
              fmt(two_sample.statistic) + " < q999 " + fmt(two_sample.quantile_999)};
}

CriterionResult e1_noncommutativity() {
  Povm f = phase_e1(16);
  std::vector<MeasurableSet> arcs = {CircleSet::arc(0.0, M_PI),
                                     CircleSet::arc(M_PI / 2.0, 3.0 * M_PI / 2.0)};
  double comm = check_commutative(f, arcs);
  return {12, "E_1 is not commutative on overlapping arcs", comm > 1e-3,
          "commutator norm " + fmt(comm) + " at D=16"};
}

}  // namespace

std::vector<CriterionResult> run_acceptance_criteria() {
  return {
      gaussian_lipschitz_bound(),
      binomial_normalization(),
      unsharp_number_norm1_structure(),
      compactness_obstruction_scaling(),
      e1_absolute_continuity(),
      canonical_phase_norm_growth(),
      phase_covariance(),
      gaussian_halfline_persistence(),
      bounded_position_absolute_continuity(),
      smearing_identities(),
      sampler_equivalence(),
      e1_noncommutativity(),
  };
}

}  // namespace povmlab
