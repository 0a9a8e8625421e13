#include "povmlab/kernels.hpp"

#include "povmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace povmlab {

double normal_cdf(double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// ---------------------------------------------------------------------------

class MarkovKernel::Impl {
public:
  Impl(KernelDomain lambda_dom, Domain target, std::string label)
      : lambda_domain_(lambda_dom), target_(target), label_(std::move(label)) {}
  virtual ~Impl() = default;

  KernelDomain lambda_domain() const { return lambda_domain_; }
  Domain target_domain() const { return target_; }
  const std::string& label() const { return label_; }

  virtual double evaluate(double lambda, const MeasurableSet& delta) const = 0;
  virtual double point_mass(double lambda, double x) const = 0;
  virtual bool contains(double lambda) const;

protected:
  void check_lambda(double lambda) const {
    if (!contains(lambda))
      throw std::invalid_argument("lambda " + std::to_string(lambda) +
                                  " outside the domain of kernel " + label_);
  }
  const LineSet& line_arg(const MeasurableSet& delta) const {
    if (const auto* s = std::get_if<LineSet>(&delta)) return *s;
    throw DomainMismatchError("kernel " + label_ + " expects line sets");
  }
  const NatSet& nat_arg(const MeasurableSet& delta) const {
    if (const auto* s = std::get_if<NatSet>(&delta)) return *s;
    throw DomainMismatchError("kernel " + label_ + " expects natural-number sets");
  }

private:
  KernelDomain lambda_domain_;
  Domain target_;
  std::string label_;
};

bool MarkovKernel::Impl::contains(double lambda) const {
  switch (lambda_domain_) {
    case KernelDomain::line: return std::isfinite(lambda);
    case KernelDomain::unit_interval: return lambda >= 0.0 && lambda <= 1.0;
    case KernelDomain::naturals:
      return lambda >= 0.0 && std::floor(lambda) == lambda && std::isfinite(lambda);
  }
  return false;
}

KernelDomain MarkovKernel::lambda_domain() const { return impl_->lambda_domain(); }
Domain MarkovKernel::target_domain() const { return impl_->target_domain(); }
const std::string& MarkovKernel::label() const { return impl_->label(); }

double MarkovKernel::operator()(double lambda, const MeasurableSet& delta) const {
  return impl_->evaluate(lambda, delta);
}

double MarkovKernel::point_mass(double lambda, double x) const {
  return impl_->point_mass(lambda, x);
}

bool MarkovKernel::contains(double lambda) const { return impl_->contains(lambda); }

// ---------------------------------------------------------------------------
// Gaussian kernel

namespace {

class GaussianKernel final : public MarkovKernel::Impl {
public:
  explicit GaussianKernel(double l)
      : Impl(KernelDomain::line, Domain::line, "gaussian(l=" + std::to_string(l) + ")"),
        l_(l) {}

  double evaluate(double x, const MeasurableSet& delta) const override {
    check_lambda(x);
    const LineSet& s = line_arg(delta);
    double total = 0.0;
    for (const auto& iv : s.pieces())
      total += normal_cdf((iv.hi - x) / l_) - normal_cdf((iv.lo - x) / l_);
    return std::clamp(total, 0.0, 1.0);
  }

  double point_mass(double x, double) const override {
    check_lambda(x);
    return 0.0;  // absolutely continuous
  }

private:
  double l_;
};

// Point (evaluation) kernel: mu_Delta(lambda) = chi_Delta(lambda).
class PointKernel final : public MarkovKernel::Impl {
public:
  PointKernel() : Impl(KernelDomain::line, Domain::line, "point") {}

  double evaluate(double lambda, const MeasurableSet& delta) const override {
    check_lambda(lambda);
    return line_arg(delta).contains(lambda) ? 1.0 : 0.0;
  }

  double point_mass(double lambda, double x) const override {
    check_lambda(lambda);
    return lambda == x ? 1.0 : 0.0;
  }
};

class BinomialKernel final : public MarkovKernel::Impl {
public:
  explicit BinomialKernel(double eps)
      : Impl(KernelDomain::naturals, Domain::naturals,
             "binomial(eps=" + std::to_string(eps) + ")"),
        eps_(eps),
        log_eps_(std::log(eps)),
        log_one_minus_(std::log1p(-eps)) {}

  double pmf(std::uint64_t m, std::uint64_t n) const {
    if (n > m) return 0.0;
    double dm = static_cast<double>(m), dn = static_cast<double>(n);
    double log_choose =
        std::lgamma(dm + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(dm - dn + 1.0);
    return std::exp(log_choose + dn * log_eps_ + (dm - dn) * log_one_minus_);
  }

  double evaluate(double lambda, const MeasurableSet& delta) const override {
    check_lambda(lambda);
    auto m = static_cast<std::uint64_t>(lambda);
    const NatSet& s = nat_arg(delta);
    double finite_sum = 0.0;
    for (std::uint64_t n : s.members()) {
      if (n > m) break;  // members are sorted; pmf vanishes beyond m
      finite_sum += pmf(m, n);
    }
    if (s.mode() == NatSet::Mode::finite) return std::clamp(finite_sum, 0.0, 1.0);
    return std::clamp(1.0 - finite_sum, 0.0, 1.0);
  }

  double point_mass(double lambda, double x) const override {
    check_lambda(lambda);
    if (x < 0 || std::floor(x) != x) return 0.0;
    return pmf(static_cast<std::uint64_t>(lambda), static_cast<std::uint64_t>(x));
  }

private:
  double eps_, log_eps_, log_one_minus_;
};

class ConvolutionKernel final : public MarkovKernel::Impl {
public:
  explicit ConvolutionKernel(KernelWeight f)
      : Impl(KernelDomain::unit_interval, Domain::line, "conv"), f_(std::move(f)) {}

  double evaluate(double x, const MeasurableSet& delta) const override {
    check_lambda(x);
    // mu_Delta(x) = int_{Delta ∩ [x-1, x]} f(x-y) dy; substitute u = x - y so
    // each piece [a,b) contributes int over [x-b, x-a] ∩ [0,1] of f.
    const LineSet& s = line_arg(delta);
    LineSet window = s.intersect(LineSet::interval(x - 1.0, x));
    if (window.empty()) return 0.0;
    double tol = 1e-10 / static_cast<double>(window.pieces().size());
    double total = 0.0;
    for (const auto& iv : window.pieces()) {
      double lo = std::max(x - iv.hi, 0.0);
      double hi = std::min(x - iv.lo, 1.0);
      if (lo < hi)
        total += adaptive_simpson([this](double u) { return f_(u); }, lo, hi, tol);
    }
    return std::clamp(total, 0.0, 1.0);
  }

  double point_mass(double x, double) const override {
    check_lambda(x);
    return 0.0;
  }

private:
  KernelWeight f_;
};

class BlendKernel final : public MarkovKernel::Impl {
public:
  BlendKernel(double alpha, MarkovKernel a, MarkovKernel b)
      : Impl(a.lambda_domain(), a.target_domain(),
             "blend(" + std::to_string(alpha) + "," + a.label() + "," + b.label() + ")"),
        alpha_(alpha),
        a_(std::move(a)),
        b_(std::move(b)) {}

  double evaluate(double lambda, const MeasurableSet& delta) const override {
    return alpha_ * a_(lambda, delta) + (1.0 - alpha_) * b_(lambda, delta);
  }

  double point_mass(double lambda, double x) const override {
    return alpha_ * a_.point_mass(lambda, x) + (1.0 - alpha_) * b_.point_mass(lambda, x);
  }

  bool contains(double lambda) const override {
    return a_.contains(lambda) && b_.contains(lambda);
  }

private:
  double alpha_;
  MarkovKernel a_, b_;
};

}  // namespace

MarkovKernel gaussian_kernel(double l) {
  if (!(l > 0)) throw std::invalid_argument("gaussian kernel needs l > 0");
  return MarkovKernel(std::make_shared<GaussianKernel>(l));
}

MarkovKernel binomial_kernel(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("binomial kernel needs eps in (0,1)");
  return MarkovKernel(std::make_shared<BinomialKernel>(eps));
}

MarkovKernel convolution_kernel(KernelWeight f) {
  return MarkovKernel(std::make_shared<ConvolutionKernel>(std::move(f)));
}

MarkovKernel point_kernel() { return MarkovKernel(std::make_shared<PointKernel>()); }

MarkovKernel blend(double alpha, const MarkovKernel& a, const MarkovKernel& b) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("blend weight must lie in [0,1]");
  if (a.lambda_domain() != b.lambda_domain() || a.target_domain() != b.target_domain())
    throw DomainMismatchError("blend of kernels over different domains");
  return MarkovKernel(std::make_shared<BlendKernel>(alpha, a, b));
}

// ---------------------------------------------------------------------------
// KernelWeight

KernelWeight::KernelWeight(std::function<double(double)> f, double bound)
    : f_(std::move(f)), bound_(bound) {
  if (!f_) throw std::invalid_argument("kernel weight function is empty");
  if (!(bound_ > 0)) throw std::invalid_argument("kernel weight bound must be positive");
  constexpr int kSamples = 2048;
  for (int i = 0; i <= kSamples; ++i) {
    double y = static_cast<double>(i) / kSamples;
    double v = f_(y);
    if (v < 0.0)
      throw std::invalid_argument("kernel weight is negative at y=" + std::to_string(y));
    if (v > bound_ * (1.0 + 1e-12))
      throw std::invalid_argument("kernel weight exceeds its bound at y=" + std::to_string(y));
  }
  double integral = adaptive_simpson(f_, 0.0, 1.0, 1e-10);
  if (std::abs(integral - 1.0) > 1e-8)
    throw std::invalid_argument("kernel weight does not integrate to 1 (got " +
                                std::to_string(integral) + ")");
}

KernelWeight KernelWeight::default_weight() {
  return KernelWeight([](double y) { return 6.0 * y * (1.0 - y); }, 1.5);
}

// ---------------------------------------------------------------------------
// Probes

ModulusResult continuity_modulus(const MarkovKernel& kernel, const MeasurableSet& delta,
                                 std::span<const double> grid, double delta_x) {
  if (grid.empty()) throw std::invalid_argument("continuity modulus needs a nonempty grid");
  if (!(delta_x > 0)) throw std::invalid_argument("continuity modulus needs delta_x > 0");
  if (kernel.lambda_domain() == KernelDomain::naturals)
    return {false, 0.0};  // no topology to refine on a discrete domain

  std::vector<double> points(grid.begin(), grid.end());
  std::sort(points.begin(), points.end());
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = kernel(points[i], delta);

  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size() && points[j] - points[i] <= delta_x; ++j)
      worst = std::max(worst, std::abs(values[j] - values[i]));
  return {true, worst};
}

KernelAxiomReport kernel_axiom_report(const MarkovKernel& kernel,
                                      std::span<const double> lambdas,
                                      std::span<const MeasurableSet> partition) {
  validate_partition(partition, kernel.target_domain());
  MeasurableSet full = full_set(kernel.target_domain());

  KernelAxiomReport report{0.0, 0.0, 0.0, 0};
  for (double lambda : lambdas) {
    double on_full = kernel(lambda, full);
    report.normalization_error =
        std::max(report.normalization_error, std::abs(on_full - 1.0));

    double sum = 0.0;
    for (const auto& cell : partition) {
      double v = kernel(lambda, cell);
      sum += v;
      double excess = std::max(-v, v - 1.0);
      if (excess > 0) {
        report.range_excess = std::max(report.range_excess, excess);
        if (excess > 1e-9) ++report.range_violations;
      }
    }
    report.additivity_error = std::max(report.additivity_error, std::abs(sum - on_full));

    // Pairwise additivity on adjacent cells.
    for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
      MeasurableSet joined = set_union(partition[j], partition[j + 1]);
      double defect = std::abs(kernel(lambda, joined) - kernel(lambda, partition[j]) -
                               kernel(lambda, partition[j + 1]));
      report.additivity_error = std::max(report.additivity_error, defect);
    }
  }
  return report;
}

}  // namespace povmlab
