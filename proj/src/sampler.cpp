#include "povmlab/sampler.hpp"

#include "povmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace povmlab {

std::uint64_t RandomStream::bits(std::uint64_t index) const {
  std::uint64_t z = seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RandomStream::uniform(std::uint64_t index) const {
  return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
}

namespace {

std::vector<double> cumulative(std::span<const double> probs) {
  std::vector<double> cum(probs.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    acc += probs[j];
    cum[j] = acc;
  }
  cum.back() = std::max(cum.back(), 1.0);  // absorb rounding in the last cell
  return cum;
}

std::size_t pick(const std::vector<double>& cum, double u) {
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                               cum.size() - 1);
}

}  // namespace

std::vector<double> born_probabilities(const Povm& f, const State& psi,
                                       std::span<const MeasurableSet> partition) {
  validate_partition(partition, f.domain());
  std::vector<double> probs;
  probs.reserve(partition.size());
  double sum = 0.0;
  for (const auto& cell : partition) {
    double p = expectation(f.at(cell).op(), psi);
    if (p < -1e-10 || p > 1.0 + 1e-10)
      throw std::runtime_error("Born probability escapes [0,1]: " + std::to_string(p));
    p = std::clamp(p, 0.0, 1.0);
    probs.push_back(p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::runtime_error("Born probabilities sum to " + std::to_string(sum));
  return probs;
}

OutcomeHistogram sample_direct(const Povm& f, const State& psi,
                               std::span<const MeasurableSet> partition, std::uint64_t n,
                               std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one draw");
  std::vector<double> probs = born_probabilities(f, psi, partition);
  if (std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0.0; }))
    throw std::invalid_argument("degenerate probability vector (all cells have mass 0)");
  std::vector<double> cum = cumulative(probs);

  OutcomeHistogram h;
  h.cells.assign(partition.begin(), partition.end());
  h.counts.assign(partition.size(), 0);
  h.total = n;
  h.seed = seed;
  RandomStream stream(seed);
  for (std::uint64_t i = 0; i < n; ++i) ++h.counts[pick(cum, stream.uniform(i))];
  return h;
}

OutcomeHistogram sample_two_stage(const SpectralMeasure& sharp, const MarkovKernel& kernel,
                                  const State& psi, std::span<const MeasurableSet> partition,
                                  std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one draw");
  Povm smeared = smear(sharp, kernel);  // also validates domains
  validate_partition(partition, smeared.domain());

  // Stage 1: sharp-outcome law over the distinct spectral points.
  std::vector<double> points = sharp.points();
  std::vector<double> weights = sharp.column_weights(psi);
  const auto& col_values = sharp.column_values();
  std::vector<double> sharp_probs(points.size(), 0.0);
  for (std::size_t j = 0; j < col_values.size(); ++j) {
    auto it = std::lower_bound(points.begin(), points.end(), col_values[j]);
    sharp_probs[static_cast<std::size_t>(it - points.begin())] += weights[j];
  }
  if (std::all_of(sharp_probs.begin(), sharp_probs.end(),
                  [](double p) { return p == 0.0; }))
    throw std::invalid_argument("degenerate probability vector (all cells have mass 0)");
  std::vector<double> sharp_cum = cumulative(sharp_probs);

  // Stage 2 rows: the kernel restricted to the partition, per sharp value.
  std::vector<std::vector<double>> row_cum(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::vector<double> row;
    row.reserve(partition.size());
    for (const auto& cell : partition) row.push_back(kernel(points[k], cell));
    row_cum[k] = cumulative(row);
  }

  OutcomeHistogram h;
  h.cells.assign(partition.begin(), partition.end());
  h.counts.assign(partition.size(), 0);
  h.total = n;
  h.seed = seed;
  RandomStream stream(seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::size_t k = pick(sharp_cum, stream.uniform(2 * i));
    ++h.counts[pick(row_cum[k], stream.uniform(2 * i + 1))];
  }
  return h;
}

ChiSquareResult chi_square_vs_expected(const OutcomeHistogram& h,
                                       std::span<const double> probs) {
  if (probs.size() != h.counts.size())
    throw std::invalid_argument("probability vector does not match the histogram cells");
  double statistic = 0.0;
  int used = 0;
  double n = static_cast<double>(h.total);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) {
      if (h.counts[j] > 0) statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    double expected = n * probs[j];
    double diff = static_cast<double>(h.counts[j]) - expected;
    statistic += diff * diff / expected;
    ++used;
  }
  double dof = std::max(used - 1, 1);
  double q = chi_square_quantile(0.999, dof);
  return {statistic, dof, q, statistic < q};
}

ChiSquareResult chi_square_two_sample(const OutcomeHistogram& a,
                                      const OutcomeHistogram& b) {
  if (a.counts.size() != b.counts.size())
    throw std::invalid_argument("histograms have different cell counts");
  double statistic = 0.0;
  int used = 0;
  for (std::size_t j = 0; j < a.counts.size(); ++j) {
    double s = static_cast<double>(a.counts[j] + b.counts[j]);
    if (s == 0.0) continue;
    double diff = static_cast<double>(a.counts[j]) - static_cast<double>(b.counts[j]);
    statistic += diff * diff / s;
    ++used;
  }
  double dof = std::max(used - 1, 1);
  double q = chi_square_quantile(0.999, dof);
  return {statistic, dof, q, statistic < q};
}

double total_variation(const OutcomeHistogram& h, std::span<const double> probs) {
  if (probs.size() != h.counts.size())
    throw std::invalid_argument("probability vector does not match the histogram cells");
  double tv = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j)
    tv += std::abs(static_cast<double>(h.counts[j]) / static_cast<double>(h.total) -
                   probs[j]);
  return tv / 2.0;
}

std::string histogram_csv(const OutcomeHistogram& h) {
  std::string out = "cell,lower,upper,count\n";
  for (std::size_t j = 0; j < h.cells.size(); ++j) {
    const MeasurableSet& cell = h.cells[j];
    std::string lower, upper;
    if (const auto* line = std::get_if<LineSet>(&cell)) {
      if (!line->empty()) {
        lower = std::to_string(line->pieces().front().lo);
        upper = std::to_string(line->pieces().back().hi);
      }
    } else if (const auto* circ = std::get_if<CircleSet>(&cell)) {
      if (!circ->empty()) {
        lower = std::to_string(circ->arcs().front().lo);
        upper = std::to_string(circ->arcs().back().hi);
      }
    }
    out += "\"" + to_string(cell) + "\"," + lower + "," + upper + "," +
           std::to_string(h.counts[j]) + "\n";
  }
  return out;
}

}  // namespace povmlab
