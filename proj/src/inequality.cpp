#include "attn/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attn/error.hpp"

namespace attn {

namespace {

void check_values(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptySample, "sample is empty");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NegativeValue, "sample values must be finite and >= 0");
    }
  }
}

std::vector<double> sorted_checked(std::span<const double> values) {
  check_values(values);
  std::vector<double> sorted(values.begin(), values.end());
  std::stable_sort(sorted.begin(), sorted.end());
  if (sorted.back() == 0.0) throw Error(ErrorCode::ZeroMean, "all values are zero");
  return sorted;
}

}  // namespace

double gini(std::span<const double> values) {
  const auto sorted = sorted_checked(values);
  const auto n = static_cast<long double>(sorted.size());
  long double weighted = 0.0L;
  long double total = 0.0L;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    weighted += static_cast<long double>(2 * i + 1) * sorted[i];
    total += sorted[i];
  }
  // sum_ij |x_i - x_j| = 2 sum_i (2i - N + 1) x_(i) for 0-based ascending i.
  const long double g = weighted / (n * total) - 1.0L;
  return std::max(0.0, static_cast<double>(g));
}

LorenzCurve lorenz(std::span<const double> values) {
  const auto sorted = sorted_checked(values);
  const long double total = std::accumulate(sorted.begin(), sorted.end(), 0.0L);
  const auto n = static_cast<double>(sorted.size());

  LorenzCurve curve;
  curve.reserve(sorted.size() + 1);
  curve.push_back({0.0, 0.0});
  long double running = 0.0L;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    running += sorted[i];
    curve.push_back({static_cast<double>(i + 1) / n, static_cast<double>(running / total)});
  }
  curve.back().value_fraction = 1.0;
  return curve;
}

double lorenz_area_gap(const LorenzCurve& curve) {
  long double under = 0.0L;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const long double dx = curve[i].population_fraction - curve[i - 1].population_fraction;
    under += dx * (static_cast<long double>(curve[i].value_fraction) + curve[i - 1].value_fraction) / 2.0L;
  }
  return static_cast<double>(0.5L - under);
}

double top_share(std::span<const double> values, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::FractionOutOfRange, "fraction must lie in (0,1)");
  }
  auto sorted = sorted_checked(values);
  const std::size_t n = sorted.size();
  // Guard against products such as 0.07 * 100 = 7.000000000000001.
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, n);

  const long double total = std::accumulate(sorted.begin(), sorted.end(), 0.0L);
  const long double top = std::accumulate(sorted.end() - static_cast<std::ptrdiff_t>(k), sorted.end(), 0.0L);
  return static_cast<double>(top / total);
}

InequalityReport inequality_report(std::span<const double> values,
                                   std::span<const double> fractions) {
  InequalityReport report;
  report.gini = gini(values);
  report.lorenz = lorenz(values);
  for (double f : fractions) report.top_shares[f] = top_share(values, f);
  return report;
}

double kurtosis_burstiness(std::span<const double> counts) {
  if (counts.size() < 2) throw Error(ErrorCode::TooShort, "need at least two periods");
  const auto n = static_cast<long double>(counts.size());
  const long double mean = std::accumulate(counts.begin(), counts.end(), 0.0L) / n;
  long double m2 = 0.0L;
  long double m4 = 0.0L;
  for (double c : counts) {
    const long double d = c - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  if (m2 <= 0.0L) throw Error(ErrorCode::DegenerateSeries, "series has zero variance");
  return static_cast<double>(m4 / (m2 * m2));
}

std::vector<HistogramBin> log_bin(std::span<const double> values, double base) {
  if (!(base > 1.0) || !std::isfinite(base)) throw Error(ErrorCode::BadBase, "base must exceed 1");
  std::vector<HistogramBin> bins;
  if (values.empty()) return bins;
  check_values(values);

  const double log_base = std::log(base);
  auto bin_index = [&](double v) {
    auto k = static_cast<long>(std::floor(std::log(v) / log_base));
    while (std::pow(base, static_cast<double>(k)) > v) --k;
    while (std::pow(base, static_cast<double>(k + 1)) <= v) ++k;
    return k;
  };

  std::size_t zeros = 0;
  long kmin = 0;
  long kmax = 0;
  bool any_positive = false;
  std::vector<long> indices;
  indices.reserve(values.size());
  for (double v : values) {
    if (v == 0.0) {
      ++zeros;
      continue;
    }
    const long k = bin_index(v);
    indices.push_back(k);
    if (!any_positive) {
      kmin = kmax = k;
      any_positive = true;
    } else {
      kmin = std::min(kmin, k);
      kmax = std::max(kmax, k);
    }
  }

  const auto n = static_cast<double>(values.size());
  if (zeros > 0) bins.push_back({0.0, 0.0, zeros, static_cast<double>(zeros) / n});
  if (!any_positive) return bins;

  std::vector<std::size_t> counts(static_cast<std::size_t>(kmax - kmin + 1), 0);
  for (long k : indices) ++counts[static_cast<std::size_t>(k - kmin)];
  for (long k = kmin; k <= kmax; ++k) {
    const double lo = std::pow(base, static_cast<double>(k));
    const double hi = std::pow(base, static_cast<double>(k + 1));
    const std::size_t c = counts[static_cast<std::size_t>(k - kmin)];
    bins.push_back({lo, hi, c, static_cast<double>(c) / (n * (hi - lo))});
  }
  return bins;
}

}  // namespace attn
