#pragma once

#include "povmlab/povm.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace povmlab {

/// Counter-mode SplitMix64: draw i is a pure function of (seed, i), so
/// sampling can shard across workers at any granularity and merge into the
/// same histogram.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}
  /// Uniform double in [0, 1) for the given draw index.
  double uniform(std::uint64_t index) const;
  std::uint64_t bits(std::uint64_t index) const;

private:
  std::uint64_t seed_;
};

struct OutcomeHistogram {
  std::vector<MeasurableSet> cells;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::uint64_t seed = 0;
};

/// p_j = <psi, F(Delta_j) psi> over a disjoint cover; values are clamped to
/// [0,1] and must sum to 1 within 1e-9.
std::vector<double> born_probabilities(const Povm& f, const State& psi,
                                       std::span<const MeasurableSet> partition);

/// Categorical sampling from the Born probabilities; deterministic under the
/// seed and independent of sharding.
OutcomeHistogram sample_direct(const Povm& f, const State& psi,
                               std::span<const MeasurableSet> partition, std::uint64_t n,
                               std::uint64_t seed);

/// Two-stage randomization: first the sharp value lambda_k with probability
/// <psi, P_k psi>, then a cell with probability mu_{Delta_j}(lambda_k). The
/// marginal law equals born_probabilities(smear(E, mu), psi, partition).
OutcomeHistogram sample_two_stage(const SpectralMeasure& sharp, const MarkovKernel& kernel,
                                  const State& psi, std::span<const MeasurableSet> partition,
                                  std::uint64_t n, std::uint64_t seed);

struct ChiSquareResult {
  double statistic;
  double dof;
  double quantile_999;
  bool below_quantile;
};

/// Goodness of fit of a histogram against exact cell probabilities.
ChiSquareResult chi_square_vs_expected(const OutcomeHistogram& h,
                                       std::span<const double> probs);

/// Two-sample chi-square between histograms over the same cells (equal
/// totals assumed): sum (a_j - b_j)^2 / (a_j + b_j).
ChiSquareResult chi_square_two_sample(const OutcomeHistogram& a,
                                      const OutcomeHistogram& b);

/// (1/2) sum_j |count_j / N - p_j|.
double total_variation(const OutcomeHistogram& h, std::span<const double> probs);

/// CSV export: header cell,lower,upper,count; nat cells print their set text
/// in the cell column with empty bounds.
std::string histogram_csv(const OutcomeHistogram& h);

}  // namespace povmlab
