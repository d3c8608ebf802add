#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

// Concentration and burstiness metrics over samples of nonnegative values.
// All functions are pure and throw attn::Error on invalid input.
namespace attn {

struct LorenzPoint {
  double population_fraction;
  double value_fraction;
};

/// Ascending in population fraction, starting at (0,0) and ending at (1,1).
using LorenzCurve = std::vector<LorenzPoint>;

struct InequalityReport {
  double gini = 0.0;
  LorenzCurve lorenz;
  std::map<double, double> top_shares;  // fraction -> share of total
};

struct HistogramBin {
  double lower;
  double upper;
  std::size_t count;
  double density;
};

/// Gini coefficient sum_i sum_j |x_i - x_j| / (2 N^2 mean), computed in O(N log N)
/// from the sorted sample. A single-element sample has Gini 0.
/// Throws EmptySample, NegativeValue, or ZeroMean.
double gini(std::span<const double> values);

/// Sorted ascending; point k is (k/N, cumsum_k / total), with (0,0) prepended.
LorenzCurve lorenz(std::span<const double> values);

/// Area between the diagonal and the curve, by the trapezoid rule.
double lorenz_area_gap(const LorenzCurve& curve);

/// Share of the total held by the ceil(fraction * N) largest values.
double top_share(std::span<const double> values, double fraction);

InequalityReport inequality_report(std::span<const double> values,
                                   std::span<const double> fractions);

/// Kurtosis m4 / m2^2 with population central moments. Used as a burstiness
/// score for per-period tweet counts. Throws TooShort (< 2 points) or
/// DegenerateSeries (zero variance).
double kurtosis_burstiness(std::span<const double> counts);

/// Logarithmic histogram. Bin k covers [base^k, base^(k+1)); bins are
/// contiguous between the smallest and largest positive value. Zeros go into a
/// leading bin with lower = upper = 0 whose density is the plain fraction of
/// the sample; other densities are count / (N * width).
std::vector<HistogramBin> log_bin(std::span<const double> values, double base);

}  // namespace attn
