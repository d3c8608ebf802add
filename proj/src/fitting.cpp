#include "attn/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "attn/error.hpp"
#include "attn/ingest.hpp"

namespace attn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

// x^e using a precomputed log x; follows the 0^0 = 1 convention.
double pow_from_log(double x, double log_x, double e) {
  if (x == 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::exp(e * log_x);
}

struct PowerColumn {
  std::vector<double> x;
  std::vector<double> log_x;
  bool all_zero = true;

  explicit PowerColumn(std::vector<double> values) : x(std::move(values)) {
    log_x.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      log_x[i] = x[i] > 0.0 ? std::log(x[i]) : 0.0;
      if (x[i] != 0.0) all_zero = false;
    }
  }

  double at(std::size_t i, double e) const { return pow_from_log(x[i], log_x[i], e); }
};

struct TwoTermSolution {
  double w1 = 0.0;
  double w2 = 0.0;
  double rmse = kInf;
};

// y ~ w1 x1^e1 + w2 x2^e2 with w >= 0. A disabled term is held at zero.
class TwoPowerTermModel {
 public:
  TwoPowerTermModel(std::vector<double> x1, std::vector<double> x2, std::vector<double> y)
      : c1_(std::move(x1)), c2_(std::move(x2)), y_(std::move(y)) {
    use1_ = !c1_.all_zero;
    use2_ = !c2_.all_zero;
  }

  bool uses_first() const { return use1_; }
  bool uses_second() const { return use2_; }

  TwoTermSolution solve(double e1, double e2) const {
    const std::size_t n = y_.size();
    double s11 = 0.0, s22 = 0.0, s12 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = use1_ ? c1_.at(i, e1) : 0.0;
      const double v = use2_ ? c2_.at(i, e2) : 0.0;
      s11 += u * u;
      s22 += v * v;
      s12 += u * v;
      b1 += u * y_[i];
      b2 += v * y_[i];
    }

    std::vector<std::pair<double, double>> candidates;
    const double det = s11 * s22 - s12 * s12;
    if (use1_ && use2_ && s11 > 0.0 && s22 > 0.0 && det > 1e-12 * s11 * s22) {
      const double w1 = (b1 * s22 - b2 * s12) / det;
      const double w2 = (b2 * s11 - b1 * s12) / det;
      if (w1 >= 0.0 && w2 >= 0.0) candidates.emplace_back(w1, w2);
    }
    if (candidates.empty()) {
      if (use1_ && s11 > 0.0) candidates.emplace_back(std::max(0.0, b1 / s11), 0.0);
      if (use2_ && s22 > 0.0) candidates.emplace_back(0.0, std::max(0.0, b2 / s22));
      candidates.emplace_back(0.0, 0.0);
    }

    TwoTermSolution best;
    for (auto [w1, w2] : candidates) {
      double sse = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = use1_ ? c1_.at(i, e1) : 0.0;
        const double v = use2_ ? c2_.at(i, e2) : 0.0;
        const double res = y_[i] - w1 * u - w2 * v;
        sse += res * res;
      }
      const double rmse = finite_or_inf(std::sqrt(sse / static_cast<double>(n)));
      if (rmse < best.rmse) best = {w1, w2, rmse};
    }
    return best;
  }

 private:
  PowerColumn c1_;
  PowerColumn c2_;
  std::vector<double> y_;
  bool use1_ = true;
  bool use2_ = true;
};

struct TwoTermFit {
  double e1 = 0.0;
  double e2 = 0.0;
  TwoTermSolution solution;
  bool converged = true;
};

TwoTermFit fit_two_power_terms(const TwoPowerTermModel& model, GridAxis axis) {
  // Only the enabled exponents are searched; a disabled one stays at 0.
  std::vector<GridAxis> axes;
  if (model.uses_first()) axes.push_back(axis);
  if (model.uses_second()) axes.push_back(axis);

  auto unpack = [&](std::span<const double> point) {
    std::pair<double, double> e{0.0, 0.0};
    std::size_t k = 0;
    if (model.uses_first()) e.first = point[k++];
    if (model.uses_second()) e.second = point[k++];
    return e;
  };
  auto objective = [&](std::span<const double> point) {
    for (double v : point) {
      if (v < axis.lo || v > axis.hi) return kInf;
    }
    auto [e1, e2] = unpack(point);
    return model.solve(e1, e2).rmse;
  };

  const GridBest best = scan_grid(axes, objective);
  std::vector<double> start(axes.size());
  std::size_t rem = best.index;
  for (std::size_t k = axes.size(); k-- > 0;) {
    start[k] = axes[k].at(rem % axes[k].size());
    rem /= axes[k].size();
  }

  const PolishResult polished = nelder_mead(objective, start, axis.step);
  std::vector<double> point = polished.value <= best.value ? polished.point : start;

  TwoTermFit fit;
  std::tie(fit.e1, fit.e2) = unpack(point);
  fit.solution = model.solve(fit.e1, fit.e2);
  fit.converged = polished.converged;
  return fit;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares; a constant x gives slope 0 and the mean of y.
LineFit ols(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return {0.0, my};
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

Quintile QuintileTable::class_of(UserId id) const {
  for (const auto& c : classes) {
    if (std::find(c.members.begin(), c.members.end(), id) != c.members.end()) return c.label;
  }
  throw Error(ErrorCode::BadConfig, "user " + std::to_string(id) + " not in quintile table");
}

QuintileTable assign_quintiles(std::span<const UserSummary> users) {
  if (users.size() < 5) throw Error(ErrorCode::TooFewUsers, "need at least 5 users");
  std::vector<UserSummary> ranked(users.begin(), users.end());
  std::sort(ranked.begin(), ranked.end(), [](const UserSummary& a, const UserSummary& b) {
    if (a.followers != b.followers) return a.followers > b.followers;
    return a.id < b.id;
  });

  QuintileTable table;
  const std::size_t n = ranked.size();
  std::size_t begin = 0;
  for (std::size_t q = 0; q < 5; ++q) {
    const std::size_t size = n / 5 + (q < n % 5 ? 1 : 0);
    auto& cls = table.classes[q];
    cls.label = static_cast<Quintile>(q + 1);
    long double followers = 0.0L, statuses = 0.0L;
    for (std::size_t i = begin; i < begin + size; ++i) {
      cls.members.push_back(ranked[i].id);
      followers += ranked[i].followers;
      statuses += ranked[i].statuses;
    }
    cls.mean_followers = static_cast<double>(followers / static_cast<long double>(size));
    cls.mean_statuses = static_cast<double>(statuses / static_cast<long double>(size));
    begin += size;
  }
  return table;
}

ProxyParams ProxyFit::combined() const {
  ProxyParams p = retweet.params;
  p.a_m = mention.params.a_m;
  p.b_m = mention.params.b_m;
  return p;
}

double evaluate_rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::LengthMismatch, "predicted and actual differ in length");
  }
  if (predicted.empty()) throw Error(ErrorCode::EmptyInput, "no values");
  long double sse = 0.0L;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const long double d = static_cast<long double>(predicted[i]) - actual[i];
    sse += d * d;
  }
  return static_cast<double>(std::sqrt(sse / static_cast<long double>(predicted.size())));
}

FitReport<ModelParams> fit_gain_params(std::span<const GainSample> samples) {
  if (samples.size() < kMinFitSamples) {
    throw Error(ErrorCode::DegenerateData, "gain fit needs at least 20 samples");
  }
  std::vector<double> r, m, y;
  for (const auto& s : samples) {
    if (!(s.r >= 0.0 && s.m >= 0.0 && s.p_plus >= 0.0 && s.p_plus <= 1.0)) {
      throw Error(ErrorCode::DegenerateData, "gain samples need r, m >= 0 and P+ in [0,1]");
    }
    r.push_back(s.r);
    m.push_back(s.m);
    y.push_back(s.p_plus);
  }
  const TwoPowerTermModel model(std::move(r), std::move(m), std::move(y));
  if (!model.uses_first() && !model.uses_second()) {
    throw Error(ErrorCode::DegenerateData, "all retweet and mention counts are zero");
  }

  const TwoTermFit fit = fit_two_power_terms(model, {0.0, 2.0, kGridStep});
  FitReport<ModelParams> report;
  report.params.alpha = fit.e1;
  report.params.beta = fit.e2;
  report.params.w1 = fit.solution.w1;
  report.params.w2 = fit.solution.w2;
  report.rmse = fit.solution.rmse;
  report.n_samples = samples.size();
  report.converged = fit.converged;
  return report;
}

FitReport<ModelParams> fit_loss_params(std::span<const LossSample> samples) {
  std::vector<double> r, y;
  for (const auto& s : samples) {
    if (s.r >= kMinEffectiveRetweets && std::isfinite(s.p_minus)) {
      r.push_back(s.r);
      y.push_back(s.p_minus);
    }
  }
  if (r.size() < kMinFitSamples) {
    throw Error(ErrorCode::DegenerateData, "loss fit needs at least 20 samples with r >= 1");
  }

  FitReport<ModelParams> report;
  report.n_samples = r.size();
  auto rmse_for = [&](double theta, double w3) {
    double sse = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double res = y[i] - w3 * std::pow(r[i], -theta);
      sse += res * res;
    }
    return finite_or_inf(std::sqrt(sse / static_cast<double>(r.size())));
  };

  if (std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; })) {
    std::vector<double> log_r(r.size()), log_y(y.size());
    std::transform(r.begin(), r.end(), log_r.begin(), [](double v) { return std::log(v); });
    std::transform(y.begin(), y.end(), log_y.begin(), [](double v) { return std::log(v); });
    const LineFit line = ols(log_r, log_y);
    report.params.theta = -line.slope;
    report.params.w3 = std::exp(line.intercept);
    report.rmse = rmse_for(report.params.theta, report.params.w3);
    return report;
  }

  if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
    report.params.theta = 0.0;
    report.params.w3 = 0.0;
    report.rmse = 0.0;
    return report;
  }

  auto solve_w3 = [&](double theta) {
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double x = std::pow(r[i], -theta);
      sxx += x * x;
      sxy += x * y[i];
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
  };
  const GridAxis axis{-2.0, 2.0, kGridStep};
  auto objective = [&](std::span<const double> point) {
    const double theta = point[0];
    if (theta < axis.lo || theta > axis.hi) return kInf;
    return rmse_for(theta, solve_w3(theta));
  };
  const std::array<GridAxis, 1> axes{axis};
  const GridBest best = scan_grid(axes, objective);
  const std::array<double, 1> start{axis.at(best.index)};
  const PolishResult polished = nelder_mead(objective, start, axis.step);
  const double theta = polished.value <= best.value ? polished.point[0] : start[0];

  report.params.theta = theta;
  report.params.w3 = solve_w3(theta);
  report.rmse = rmse_for(theta, report.params.w3);
  report.converged = polished.converged;
  return report;
}

ProxyFit fit_proxy_models(std::span<const ProxySample> samples) {
  if (samples.size() < kMinFitSamples) {
    throw Error(ErrorCode::DegenerateData, "proxy fit needs at least 20 windows");
  }
  ProxyFit out;

  std::vector<double> f, p, r;
  for (const auto& s : samples) {
    f.push_back(s.f);
    p.push_back(s.p);
    r.push_back(s.r);
  }
  const TwoPowerTermModel retweets(std::move(f), std::move(p), std::move(r));
  if (!retweets.uses_first() && !retweets.uses_second()) {
    throw Error(ErrorCode::DegenerateData, "all follower and tweet counts are zero");
  }
  const TwoTermFit rt = fit_two_power_terms(retweets, {0.0, 2.0, kGridStep});
  out.retweet.params.a = rt.solution.w1;
  out.retweet.params.b = rt.e1;
  out.retweet.params.c = rt.solution.w2;
  out.retweet.params.d = rt.e2;
  out.retweet.rmse = rt.solution.rmse;
  out.retweet.n_samples = samples.size();
  out.retweet.converged = rt.converged;

  std::vector<double> mf, log_m, m_pos;
  for (const auto& s : samples) {
    if (s.m > 0.0) {
      mf.push_back(s.f);
      log_m.push_back(std::log(s.m));
      m_pos.push_back(s.m);
    } else {
      ++out.mention_excluded;
    }
  }
  out.mention.n_samples = mf.size();
  if (!mf.empty()) {
    const LineFit line = ols(mf, log_m);
    out.mention.params.b_m = line.slope;
    out.mention.params.a_m = std::exp(line.intercept);
    std::vector<double> pred(mf.size());
    for (std::size_t i = 0; i < mf.size(); ++i) {
      pred[i] = out.mention.params.a_m * std::exp(out.mention.params.b_m * mf[i]);
    }
    out.mention.rmse = evaluate_rmse(pred, m_pos);
  }
  return out;
}

ProxyFit fit_proxy_models(std::span<const UserWindow> windows) {
  std::vector<ProxySample> samples;
  samples.reserve(windows.size());
  for (const auto& w : windows) samples.push_back({w.f_start, w.p, w.r, w.m});
  return fit_proxy_models(samples);
}

FitReport<ModelParams> fit_trajectory_constant(const ModelParams& params,
                                               std::span<const UserTrajectory> users) {
  const auto n = static_cast<double>(params.N);
  long double sgg = 0.0L, sgy = 0.0L;
  std::size_t points = 0;
  for (const auto& u : users) {
    const double b = -raw_gain(params, u.state.r, u.state.m);
    const double lambda = raw_loss(params, u.state.r);
    for (std::size_t k = 0; k < u.times.size(); ++k) {
      const double t = u.times[k];
      const double g = std::exp(b * t) - std::exp(lambda * t);
      const double y = u.observed[k] - u.state.f0 + b * n * t;
      if (!std::isfinite(g) || !std::isfinite(y)) continue;
      sgg += static_cast<long double>(g) * g;
      sgy += static_cast<long double>(g) * y;
      ++points;
    }
  }
  if (points == 0) throw Error(ErrorCode::DegenerateData, "no trajectory points");

  FitReport<ModelParams> report;
  report.params = params;
  report.params.C = sgg > 0.0L ? static_cast<double>(sgy / sgg) : 0.0;
  report.converged = std::isfinite(report.params.C);
  if (!report.converged) report.params.C = 0.0;

  std::vector<double> predicted, actual;
  for (const auto& u : users) {
    for (std::size_t k = 0; k < u.times.size(); ++k) {
      const double b = -raw_gain(report.params, u.state.r, u.state.m);
      const double lambda = raw_loss(report.params, u.state.r);
      const double t = u.times[k];
      const double f = u.state.f0 + report.params.C * (std::exp(b * t) - std::exp(lambda * t)) - b * n * t;
      if (!std::isfinite(f)) continue;
      predicted.push_back(f);
      actual.push_back(u.observed[k]);
    }
  }
  report.n_samples = predicted.size();
  report.rmse = predicted.empty() ? 0.0 : evaluate_rmse(predicted, actual);
  return report;
}

std::size_t GridAxis::size() const {
  return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
}

double GridAxis::at(std::size_t i) const { return lo + static_cast<double>(i) * step; }

namespace {

std::size_t grid_points(std::span<const GridAxis> axes) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  return total;
}

void grid_point(std::span<const GridAxis> axes, std::size_t index, std::span<double> point) {
  for (std::size_t k = axes.size(); k-- > 0;) {
    point[k] = axes[k].at(index % axes[k].size());
    index /= axes[k].size();
  }
}

GridBest first_minimum(std::span<const double> values) {
  GridBest best{0, kInf};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < best.value) best = {i, values[i]};
  }
  return best;
}

}  // namespace

GridBest scan_grid(std::span<const GridAxis> axes,
                   const std::function<double(std::span<const double>)>& objective) {
  const std::size_t total = grid_points(axes);
  std::vector<double> values(total);
  const auto count = static_cast<std::int64_t>(total);
#pragma omp parallel
  {
    std::vector<double> point(axes.size());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      grid_point(axes, static_cast<std::size_t>(i), point);
      values[static_cast<std::size_t>(i)] = finite_or_inf(objective(point));
    }
  }
  return first_minimum(values);
}

GridBest scan_grid_serial(std::span<const GridAxis> axes,
                          const std::function<double(std::span<const double>)>& objective) {
  const std::size_t total = grid_points(axes);
  std::vector<double> values(total);
  std::vector<double> point(axes.size());
  for (std::size_t i = 0; i < total; ++i) {
    grid_point(axes, i, point);
    values[i] = finite_or_inf(objective(point));
  }
  return first_minimum(values);
}

PolishResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                         std::span<const double> start, double step, int max_iterations,
                         double tolerance) {
  const std::size_t dim = start.size();
  PolishResult result;
  if (dim == 0) {
    result.value = objective(start);
    result.converged = true;
    return result;
  }

  struct Vertex {
    std::vector<double> x;
    double f;
  };
  auto eval = [&](std::vector<double> x) {
    const double f = finite_or_inf(objective(x));
    return Vertex{std::move(x), f};
  };

  std::vector<Vertex> simplex;
  simplex.push_back(eval(std::vector<double>(start.begin(), start.end())));
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<double> x(start.begin(), start.end());
    x[k] += step;
    Vertex v = eval(x);
    if (!std::isfinite(v.f)) {
      x[k] = start[k] - step;
      v = eval(x);
    }
    simplex.push_back(std::move(v));
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  auto blend = [&](const std::vector<double>& from, const std::vector<double>& to, double coeff) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k) x[k] = from[k] + coeff * (to[k] - from[k]);
    return x;
  };

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    if (simplex.back().f - simplex.front().f <= tolerance) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[v].x[k] / static_cast<double>(dim);
    }
    Vertex& worst = simplex.back();
    const Vertex reflected = eval(blend(centroid, worst.x, -1.0));

    if (reflected.f < simplex.front().f) {
      Vertex expanded = eval(blend(centroid, worst.x, -2.0));
      worst = expanded.f < reflected.f ? std::move(expanded) : reflected;
      continue;
    }
    if (reflected.f < simplex[dim - 1].f) {
      worst = reflected;
      continue;
    }
    const bool outside = reflected.f < worst.f;
    Vertex contracted = outside ? eval(blend(centroid, reflected.x, 0.5)) : eval(blend(centroid, worst.x, 0.5));
    if (contracted.f < std::min(reflected.f, worst.f)) {
      worst = std::move(contracted);
      continue;
    }
    for (std::size_t v = 1; v <= dim; ++v) simplex[v] = eval(blend(simplex[0].x, simplex[v].x, 0.5));
  }

  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  if (!result.converged && simplex.back().f - simplex.front().f <= tolerance) result.converged = true;
  result.point = simplex.front().x;
  result.value = simplex.front().f;
  result.iterations = iter;
  return result;
}

std::vector<UserSummary> summarize_users(std::span<const UserWindow> windows) {
  std::map<UserId, std::pair<const UserWindow*, double>> last;
  for (const auto& w : windows) {
    auto& entry = last[w.user_id];
    if (entry.first == nullptr || w.window_index > entry.first->window_index) entry.first = &w;
    entry.second += w.p;
  }
  std::vector<UserSummary> out;
  out.reserve(last.size());
  for (const auto& [id, entry] : last) {
    const UserWindow& w = *entry.first;
    out.push_back({id, w.f_start + w.gained - w.lost, entry.second});
  }
  return out;
}

QuintileFit fit_quintile(Quintile label, std::span<const UserWindow> windows,
                         std::int64_t population) {
  QuintileFit out;
  out.label = label;
  out.low_confidence = label == Quintile::Q4 || label == Quintile::Q5;

  const TransitionSamples empirical = empirical_transition_probs(windows, population);
  out.skipped_gain_rows = empirical.skipped_gain;
  std::vector<GainSample> gain_samples;
  std::vector<LossSample> loss_samples;
  for (const auto& s : empirical.samples) {
    if (s.p_plus) gain_samples.push_back({s.r, s.m, *s.p_plus});
    loss_samples.push_back({std::max(s.r, kMinEffectiveRetweets), s.p_minus});
  }
  out.gain = fit_gain_params(gain_samples);
  out.loss = fit_loss_params(loss_samples);
  out.proxy = fit_proxy_models(windows);

  ModelParams params = out.gain.params;
  params.theta = out.loss.params.theta;
  params.w3 = out.loss.params.w3;
  params.N = population;
  params.quintile = label;

  std::map<UserId, std::vector<const UserWindow*>> by_user;
  for (const auto& w : windows) by_user[w.user_id].push_back(&w);
  std::vector<UserTrajectory> trajectories;
  for (auto& [id, ws] : by_user) {
    std::sort(ws.begin(), ws.end(), [](const UserWindow* a, const UserWindow* b) {
      return a->window_index < b->window_index;
    });
    UserTrajectory traj;
    const std::int64_t origin = ws.front()->window_index;
    traj.state.f0 = ws.front()->f_start;
    for (const UserWindow* w : ws) {
      traj.state.r += w->r / static_cast<double>(ws.size());
      traj.state.m += w->m / static_cast<double>(ws.size());
      traj.state.p += w->p / static_cast<double>(ws.size());
      traj.times.push_back(static_cast<double>(w->window_index - origin));
      traj.observed.push_back(w->f_start);
    }
    const UserWindow* tail = ws.back();
    traj.times.push_back(static_cast<double>(tail->window_index - origin + 1));
    traj.observed.push_back(tail->f_start + tail->gained - tail->lost);
    trajectories.push_back(std::move(traj));
  }
  out.model = fit_trajectory_constant(params, trajectories);
  out.model.converged = out.model.converged && out.gain.converged && out.loss.converged;
  return out;
}

}  // namespace attn
