#include "povmlab/povm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace povmlab {

// ---------------------------------------------------------------------------
// SpectralMeasure

SpectralMeasure SpectralMeasure::diagonal(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("spectral measure needs dim >= 1");
  SpectralMeasure e;
  e.column_values_ = std::move(values);
  return e;
}

SpectralMeasure SpectralMeasure::with_basis(Matrix basis, std::vector<double> column_values) {
  if (basis.rows() != basis.cols() ||
      basis.rows() != static_cast<Eigen::Index>(column_values.size()))
    throw std::invalid_argument("basis shape does not match the value list");
  double unitary_defect =
      (basis.adjoint() * basis - Matrix::Identity(basis.rows(), basis.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (unitary_defect > 1e-10)
    throw std::invalid_argument("spectral basis is not unitary (defect " +
                                std::to_string(unitary_defect) + ")");
  SpectralMeasure e;
  e.column_values_ = std::move(column_values);
  e.basis_ = std::move(basis);
  return e;
}

std::vector<double> SpectralMeasure::points() const {
  std::vector<double> p = column_values_;
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

Matrix SpectralMeasure::apply_diagonal(const std::vector<double>& per_column) const {
  if (per_column.size() != column_values_.size())
    throw std::invalid_argument("coefficient vector has the wrong length");
  Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(per_column.data(),
                                                        per_column.size());
  if (!basis_) {
    Matrix m = Matrix::Zero(dim(), dim());
    m.diagonal() = g.cast<std::complex<double>>();
    return m;
  }
  Matrix m = (*basis_) * g.asDiagonal() * basis_->adjoint();
  return (m + m.adjoint()) / 2.0;  // kill rounding asymmetry from the products
}

Projection SpectralMeasure::projection_at(double lambda) const {
  std::vector<double> mask(column_values_.size(), 0.0);
  bool hit = false;
  for (std::size_t j = 0; j < column_values_.size(); ++j)
    if (column_values_[j] == lambda) {
      mask[j] = 1.0;
      hit = true;
    }
  if (!hit)
    throw std::invalid_argument("no spectral point at " + std::to_string(lambda));
  return Projection(HermitianOperator(apply_diagonal(mask)));
}

std::vector<double> SpectralMeasure::column_weights(const State& psi) const {
  if (psi.dim() != dim())
    throw std::invalid_argument("state dimension does not match the spectral measure");
  Vector coords = basis_ ? Vector(basis_->adjoint() * psi.vector()) : psi.vector();
  std::vector<double> w(column_values_.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::norm(coords(j));
  return w;
}

// ---------------------------------------------------------------------------
// Povm

Domain Povm::domain() const { return impl_->domain(); }
int Povm::dim() const { return impl_->dim(); }
Provenance Povm::provenance() const { return impl_->provenance(); }
const std::string& Povm::description() const { return impl_->description(); }

Effect Povm::at(const MeasurableSet& delta) const {
  if (domain_of(delta) != impl_->domain())
    throw DomainMismatchError("set belongs to a different domain than the POVM");
  return Effect(HermitianOperator(impl_->evaluate(delta)));
}

Effect Povm::at_point(double x) const {
  return Effect(HermitianOperator(impl_->evaluate_point(x)));
}

namespace {

class SmearImpl final : public Povm::Impl {
public:
  SmearImpl(SpectralMeasure sharp, MarkovKernel kernel)
      : Impl(kernel.target_domain(), sharp.dim(), Provenance::smeared,
             "smear(" + kernel.label() + ")"),
        sharp_(std::move(sharp)),
        kernel_(std::move(kernel)) {}

  Matrix evaluate(const MeasurableSet& delta) const override {
    const auto& vals = sharp_.column_values();
    std::vector<double> g(vals.size());
    for (std::size_t j = 0; j < vals.size(); ++j) g[j] = kernel_(vals[j], delta);
    return sharp_.apply_diagonal(g);
  }

  Matrix evaluate_point(double x) const override {
    const auto& vals = sharp_.column_values();
    std::vector<double> g(vals.size());
    for (std::size_t j = 0; j < vals.size(); ++j) g[j] = kernel_.point_mass(vals[j], x);
    return sharp_.apply_diagonal(g);
  }

  const SpectralMeasure& sharp() const { return sharp_; }

private:
  SpectralMeasure sharp_;
  MarkovKernel kernel_;
};

class DiagonalImpl final : public Povm::Impl {
public:
  DiagonalImpl(Domain domain, std::vector<double> grid,
               std::function<double(double, const MeasurableSet&)> entry_fn,
               std::function<double(double, double)> point_fn, std::string description)
      : Impl(domain, static_cast<int>(grid.size()), Provenance::diagonal,
             std::move(description)),
        grid_(std::move(grid)),
        entry_fn_(std::move(entry_fn)),
        point_fn_(std::move(point_fn)) {}

  Matrix evaluate(const MeasurableSet& delta) const override {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int j = 0; j < dim(); ++j) m(j, j) = entry_fn_(grid_[j], delta);
    return m;
  }

  Matrix evaluate_point(double x) const override {
    Matrix m = Matrix::Zero(dim(), dim());
    if (point_fn_)
      for (int j = 0; j < dim(); ++j) m(j, j) = point_fn_(grid_[j], x);
    return m;
  }

private:
  std::vector<double> grid_;
  std::function<double(double, const MeasurableSet&)> entry_fn_;
  std::function<double(double, double)> point_fn_;
};

}  // namespace

Povm smear(const SpectralMeasure& sharp, const MarkovKernel& kernel) {
  for (double lambda : sharp.points())
    if (!kernel.contains(lambda))
      throw std::invalid_argument("spectral point " + std::to_string(lambda) +
                                  " lies outside the domain of kernel " + kernel.label());
  return Povm(std::make_shared<SmearImpl>(sharp, kernel));
}

Povm diagonal_povm(Domain domain, std::vector<double> grid,
                   std::function<double(double, const MeasurableSet&)> entry_fn,
                   std::function<double(double, double)> point_fn, std::string description) {
  if (grid.empty()) throw std::invalid_argument("diagonal POVM needs a nonempty grid");
  return Povm(std::make_shared<DiagonalImpl>(domain, std::move(grid), std::move(entry_fn),
                                             std::move(point_fn), std::move(description)));
}

// ---------------------------------------------------------------------------
// Analyzers

namespace {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

HermitianOperator effect_difference(const Effect& a, const Effect& b) {
  return HermitianOperator::symmetrized(a.matrix() - b.matrix());
}

struct PowerFit {
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double r2 = 0.0;
  int points = 0;
};

// Least squares of log(norm_i) against log(i), 1-based. Zero norms are
// excluded; fewer than three usable points leaves the fit undefined.
PowerFit fit_power_law(const std::vector<double>& norms) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < norms.size(); ++i)
    if (norms[i] > 0.0) {
      xs.push_back(std::log(static_cast<double>(i + 1)));
      ys.push_back(std::log(norms[i]));
    }
  PowerFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 3) return fit;
  double n = static_cast<double>(xs.size());
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  double slope = sxy / sxx;
  fit.exponent = -slope;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
  return fit;
}

bool tail_monotone_nonincreasing(const std::vector<double>& v) {
  std::size_t start = v.size() / 2;
  for (std::size_t i = start; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] + 1e-9) return false;
  return true;
}

ContinuityReport verdict_from_norms(std::vector<double> norms, std::string label) {
  ContinuityReport report;
  report.family = std::move(label);
  PowerFit fit = fit_power_law(norms);
  report.fitted_rate = fit.exponent;
  report.fit_r2 = fit.r2;

  bool all_zero = std::all_of(norms.begin(), norms.end(),
                              [](double x) { return x <= 1e-12; });
  double initial = norms.front();
  double final_norm = norms.back();
  bool ratio_decay = final_norm <= kDecayFactor * initial;
  bool fit_decay = std::isfinite(fit.exponent) && fit.exponent >= kFitMinExponent &&
                   fit.r2 >= kFitMinR2 && final_norm <= kFitMaxRatio * initial;

  if (all_zero || (tail_monotone_nonincreasing(norms) && (ratio_decay || fit_decay)))
    report.verdict = Trend::decays;
  else if (initial > 1e-9 && final_norm >= kPersistFactor * initial)
    report.verdict = Trend::persists;
  else
    report.verdict = Trend::inconclusive;
  report.norms = std::move(norms);
  return report;
}

}  // namespace

std::string to_string(Trend t) {
  switch (t) {
    case Trend::decays: return "decays";
    case Trend::persists: return "persists";
    case Trend::inconclusive: return "inconclusive";
  }
  return "?";
}

double check_commutative(const Povm& f, std::span<const MeasurableSet> family,
                         int pair_budget, std::uint64_t seed) {
  if (family.empty()) throw std::invalid_argument("commutativity check needs a family");
  std::vector<Effect> effects;
  effects.reserve(family.size());
  for (const auto& s : family) effects.push_back(f.at(s));

  const std::size_t n = effects.size();
  double worst = 0.0;
  auto pair_norm = [&](std::size_t i, std::size_t j) {
    return commutator_norm(effects[i].op(), effects[j].op());
  };
  std::size_t total_pairs = n * (n - 1) / 2;
  if (total_pairs <= static_cast<std::size_t>(pair_budget)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) worst = std::max(worst, pair_norm(i, j));
  } else {
    for (int k = 0; k < pair_budget; ++k) {
      std::uint64_t r = splitmix64_at(seed, static_cast<std::uint64_t>(k));
      std::size_t i = static_cast<std::size_t>(r % n);
      std::size_t j = static_cast<std::size_t>((r / n) % n);
      if (i == j) continue;
      worst = std::max(worst, pair_norm(i, j));
    }
  }
  return worst;
}

PvmCheck is_pvm(const Povm& f, std::span<const MeasurableSet> family) {
  if (family.empty()) throw std::invalid_argument("PVM check needs a family");
  PvmCheck check{true, 0.0, 0};
  for (std::size_t i = 0; i < family.size(); ++i) {
    const Matrix& m = f.at(family[i]).matrix();
    double defect = operator_norm(HermitianOperator::symmetrized(m * m - m));
    if (defect > check.worst_defect) {
      check.worst_defect = defect;
      check.worst_index = i;
    }
  }
  check.is_pvm = check.worst_defect <= 1e-8;
  return check;
}

namespace {

MeasurableSet ball_around(Domain domain, double x, double r) {
  switch (domain) {
    case Domain::line: return LineSet::interval(x - r, x + r);
    case Domain::circle:
      return 2.0 * r >= kTwoPi ? CircleSet::full() : CircleSet::arc(x - r, x + r);
    case Domain::naturals: {
      std::vector<std::uint64_t> members;
      double lo = std::ceil(x - r), hi = std::floor(x + r);
      for (double m = std::max(lo, 0.0); m <= hi; m += 1.0)
        members.push_back(static_cast<std::uint64_t>(m));
      return NatSet::of(std::move(members));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<double> spectrum_estimate(const Povm& f, std::span<const double> grid,
                                      std::span<const double> radii) {
  if (radii.empty()) throw std::invalid_argument("spectrum estimate needs radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] > radii[i + 1]))
      throw std::invalid_argument("radii must be strictly decreasing");
  if (!(radii.back() > 0)) throw std::invalid_argument("radii must be positive");

  std::vector<double> detected;
  for (double x : grid) {
    bool in_all = true;
    for (double r : radii) {
      MeasurableSet ball = ball_around(f.domain(), x, r);
      if (is_empty(ball) || f.at(ball).norm() <= 1e-9) {
        in_all = false;
        break;
      }
    }
    if (in_all) detected.push_back(x);
  }
  return detected;
}

AbsContFit absolute_continuity_fit(const Povm& f, const ReferenceMeasure& nu,
                                   std::span<const MeasurableSet> family) {
  if (family.empty()) throw std::invalid_argument("absolute continuity fit needs a family");
  AbsContFit fit;
  for (std::size_t i = 0; i < family.size(); ++i) {
    double measure = nu(family[i]);
    if (std::isinf(measure)) {
      fit.skipped.push_back(i);  // outside the finite-measure scope
      continue;
    }
    double norm = f.at(family[i]).norm();
    if (measure == 0.0) {
      if (norm > 1e-9) fit.violations.push_back(i);
      continue;
    }
    double ratio = norm / measure;
    if (ratio > fit.c_hat) {
      fit.c_hat = ratio;
      fit.extremal_index = i;
    }
  }
  return fit;
}

namespace {

void require_decreasing(std::span<const MeasurableSet> family) {
  if (family.empty()) throw std::invalid_argument("continuity probe needs a family");
  for (std::size_t i = 0; i + 1 < family.size(); ++i)
    if (!subset_of(family[i + 1], family[i]))
      throw std::invalid_argument("family is not monotone decreasing at index " +
                                  std::to_string(i + 1));
}

}  // namespace

ContinuityReport uniform_continuity_probe(const Povm& f,
                                          std::span<const MeasurableSet> shrinking,
                                          std::string family_label) {
  require_decreasing(shrinking);
  std::vector<double> norms;
  norms.reserve(shrinking.size());
  for (const auto& s : shrinking) norms.push_back(f.at(s).norm());
  if (family_label.empty())
    family_label = "shrinking family, " + std::to_string(shrinking.size()) + " members";
  return verdict_from_norms(std::move(norms), std::move(family_label));
}

ContinuityReport uniform_continuity_from_below(const Povm& f, const MeasurableSet& target,
                                               std::span<const MeasurableSet> growing,
                                               std::string family_label) {
  if (growing.empty()) throw std::invalid_argument("continuity probe needs a family");
  for (std::size_t i = 0; i + 1 < growing.size(); ++i)
    if (!subset_of(growing[i], growing[i + 1]))
      throw std::invalid_argument("family is not monotone increasing at index " +
                                  std::to_string(i + 1));
  if (!subset_of(growing.back(), target))
    throw std::invalid_argument("family members must be contained in the target set");

  Effect target_effect = f.at(target);
  std::vector<double> norms;
  norms.reserve(growing.size());
  for (const auto& s : growing)
    norms.push_back(operator_norm(effect_difference(target_effect, f.at(s))));
  if (family_label.empty())
    family_label = "from-below family, " + std::to_string(growing.size()) + " members";
  return verdict_from_norms(std::move(norms), std::move(family_label));
}

ScalingReport dimension_scaling(const std::function<Povm(int)>& builder,
                                std::span<const int> dims,
                                const std::function<double(const Povm&)>& probe,
                                std::string probe_label) {
  for (std::size_t i = 0; i + 1 < dims.size(); ++i)
    if (!(dims[i] < dims[i + 1]))
      throw std::invalid_argument("dimensions must be strictly increasing");

  ScalingReport report;
  report.probe = std::move(probe_label);
  for (int d : dims) {
    Povm f = builder(d);
    report.rows.push_back({d, probe(f)});
  }

  if (report.rows.size() < 2) {
    report.verdict = Trend::inconclusive;  // protocol rule: need a trend
    return report;
  }
  bool nondecreasing = true, nonincreasing = true;
  double max_value = report.rows.front().value;
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    if (report.rows[i + 1].value < report.rows[i].value - 1e-9) nondecreasing = false;
    if (report.rows[i + 1].value > report.rows[i].value + 1e-9) nonincreasing = false;
    max_value = std::max(max_value, report.rows[i + 1].value);
  }
  if (nondecreasing && report.rows.back().value >= kObstructionLevel)
    report.verdict = Trend::persists;  // obstruction
  else if (nonincreasing && max_value <= 0.5)
    report.verdict = Trend::decays;  // uniform-continuity evidence
  else
    report.verdict = Trend::inconclusive;
  return report;
}

Norm1Scan norm1_scan(const Povm& f, std::span<const MeasurableSet> family,
                     std::span<const double> probe_points) {
  if (family.empty()) throw std::invalid_argument("norm-1 scan needs a family");
  Norm1Scan scan;
  scan.norm1_on_family = true;
  for (const auto& s : family) {
    double norm = f.at(s).norm();
    scan.norms.push_back(norm);
    if (norm > 1e-9 && norm < 1.0 - 1e-6) scan.norm1_on_family = false;
  }
  scan.point_mass_condition = true;
  for (double x : probe_points) {
    double norm = f.at_point(x).norm();
    scan.singleton_norms.push_back(norm);
    if (norm <= 1e-9) scan.point_mass_condition = false;
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Operator integral

namespace {

double cell_tag(const MeasurableSet& cell, TagRule rule) {
  if (const auto* line = std::get_if<LineSet>(&cell)) {
    const Interval& iv = line->pieces().front();
    bool lo_inf = std::isinf(iv.lo), hi_inf = std::isinf(iv.hi);
    if (lo_inf && hi_inf) return 0.0;
    if (lo_inf) return iv.hi - 1.0;  // interior representative of (-inf, b)
    if (hi_inf) return iv.lo;
    return rule == TagRule::left ? iv.lo : 0.5 * (iv.lo + iv.hi);
  }
  if (const auto* circle = std::get_if<CircleSet>(&cell)) {
    const Interval& iv = circle->arcs().front();
    return rule == TagRule::left ? iv.lo : 0.5 * (iv.lo + iv.hi);
  }
  const auto& nat = std::get<NatSet>(cell);
  if (nat.mode() == NatSet::Mode::finite) return static_cast<double>(nat.members().front());
  std::uint64_t m = 0;
  while (!nat.contains(m)) ++m;
  return static_cast<double>(m);
}

// One refinement level: split continuum pieces at interior points, halve
// finite natural cells. The union of the produced cells equals the input.
std::vector<MeasurableSet> refine_cell(const MeasurableSet& cell) {
  std::vector<MeasurableSet> out;
  if (const auto* line = std::get_if<LineSet>(&cell)) {
    for (const Interval& iv : line->pieces()) {
      bool lo_inf = std::isinf(iv.lo), hi_inf = std::isinf(iv.hi);
      double split;
      if (lo_inf && hi_inf)
        split = 0.0;
      else if (lo_inf)
        split = iv.hi - 1.0;
      else if (hi_inf)
        split = iv.lo + 1.0;
      else
        split = 0.5 * (iv.lo + iv.hi);
      out.push_back(LineSet::interval(iv.lo, split));
      out.push_back(LineSet::interval(split, iv.hi));
    }
    return out;
  }
  if (const auto* circle = std::get_if<CircleSet>(&cell)) {
    for (const Interval& iv : circle->arcs()) {
      double split = 0.5 * (iv.lo + iv.hi);
      out.push_back(CircleSet::arc(iv.lo, split));
      out.push_back(CircleSet::arc(split, iv.hi));
    }
    return out;
  }
  const auto& nat = std::get<NatSet>(cell);
  if (nat.mode() == NatSet::Mode::finite && nat.members().size() >= 2) {
    const auto& m = nat.members();
    std::size_t half = m.size() / 2;
    out.push_back(NatSet::of(std::vector<std::uint64_t>(m.begin(), m.begin() + half)));
    out.push_back(NatSet::of(std::vector<std::uint64_t>(m.begin() + half, m.end())));
  } else {
    out.push_back(cell);  // atoms and cofinite tails stay as they are
  }
  return out;
}

Matrix riemann_sum(const Povm& f, const std::function<double(double)>& fn,
                   std::span<const MeasurableSet> cells, TagRule rule) {
  Matrix total = Matrix::Zero(f.dim(), f.dim());
  for (const auto& cell : cells) {
    if (is_empty(cell)) continue;
    double t = cell_tag(cell, rule);
    double value = fn(t);
    if (!std::isfinite(value))
      throw std::invalid_argument("integrand is unbounded at tag " + std::to_string(t));
    total += value * f.at(cell).matrix();
  }
  return total;
}

}  // namespace

OperatorIntegral integrate(const Povm& f, const std::function<double(double)>& fn,
                           std::span<const MeasurableSet> partition, TagRule tag) {
  validate_partition(partition, f.domain());

  Matrix coarse = riemann_sum(f, fn, partition, tag);
  std::vector<MeasurableSet> fine;
  for (const auto& cell : partition) {
    auto split = refine_cell(cell);
    fine.insert(fine.end(), split.begin(), split.end());
  }
  Matrix refined = riemann_sum(f, fn, fine, tag);

  HermitianOperator value = HermitianOperator::symmetrized(coarse);
  double delta = operator_norm(HermitianOperator::symmetrized(coarse - refined));
  return {std::move(value), delta};
}

PovmAxiomReport povm_axiom_check(const Povm& f, std::span<const MeasurableSet> partition) {
  validate_partition(partition, f.domain());
  PovmAxiomReport report{0.0, 0.0, true};
  try {
    Effect full = f.normalization();
    report.normalization_error = operator_norm(HermitianOperator::symmetrized(
        full.matrix() - Matrix::Identity(f.dim(), f.dim())));

    Matrix sum = Matrix::Zero(f.dim(), f.dim());
    std::vector<Effect> cells;
    cells.reserve(partition.size());
    for (const auto& s : partition) cells.push_back(f.at(s));
    for (const auto& e : cells) sum += e.matrix();
    report.additivity_error =
        operator_norm(HermitianOperator::symmetrized(sum - full.matrix()));

    for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
      MeasurableSet joined = set_union(partition[j], partition[j + 1]);
      Matrix defect = f.at(joined).matrix() - cells[j].matrix() - cells[j + 1].matrix();
      report.additivity_error = std::max(
          report.additivity_error, operator_norm(HermitianOperator::symmetrized(defect)));
    }
  } catch (const std::invalid_argument&) {
    report.effects_valid = false;
    report.normalization_error = std::numeric_limits<double>::infinity();
    report.additivity_error = std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace povmlab
