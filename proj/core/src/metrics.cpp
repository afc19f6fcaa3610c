#include "hydrolim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hydrolim/errors.hpp"

namespace hydrolim {

// ---------------------------------------------------------------------------
// ObservableDictionary
// ---------------------------------------------------------------------------

ObservableDictionary::ObservableDictionary(int max_mode) : max_mode_(max_mode) {
  if (max_mode < 0) throw ConfigError("dictionary mode count must be >= 0");
}

std::string ObservableDictionary::label(int index) const {
  if (index < 0 || index >= size()) throw ConfigError("observable index out of range");
  if (index == 0) return "const";
  const int k = (index + 1) / 2;
  return (index % 2 == 1 ? "cos" : "sin") + std::to_string(k);
}

int ObservableDictionary::index_of(const std::string& lbl) const {
  for (int i = 0; i < size(); ++i)
    if (label(i) == lbl) return i;
  throw ConfigError("unknown observable label: " + lbl);
}

double ObservableDictionary::evaluate(int index, double u) const {
  if (index < 0 || index >= size()) throw ConfigError("observable index out of range");
  if (index == 0) return 1.0;
  const int k = (index + 1) / 2;
  const double arg = 2.0 * std::numbers::pi * k * u;
  return index % 2 == 1 ? std::cos(arg) : std::sin(arg);
}

double ObservableDictionary::pair_field(int index, std::span<const double> field) const {
  const int n = static_cast<int>(field.size());
  double acc = 0.0;
  for (int x = 0; x < n; ++x)
    acc += evaluate(index, static_cast<double>(x) / n) * field[static_cast<std::size_t>(x)];
  return acc / n;
}

double ObservableDictionary::pair_field(int index, std::span<const std::int64_t> field) const {
  const int n = static_cast<int>(field.size());
  double acc = 0.0;
  for (int x = 0; x < n; ++x)
    acc += evaluate(index, static_cast<double>(x) / n) *
           static_cast<double>(field[static_cast<std::size_t>(x)]);
  return acc / n;
}

double ObservableDictionary::pair_profile(int index, const MacroProfile& f) const {
  const int m = f.grid_size;
  double acc = 0.0;
  for (int i = 0; i < m; ++i)
    acc += evaluate(index, static_cast<double>(i) / m) * f.values[static_cast<std::size_t>(i)];
  return acc / m;
}

// ---------------------------------------------------------------------------
// W1 on the circle
// ---------------------------------------------------------------------------

namespace {

struct Event {
  double position;
  double delta;  // signed normalized weight
};

double normalized_total(std::span<const PointMass> m, const char* which) {
  double total = 0.0;
  for (const auto& pm : m) {
    if (!(pm.position >= 0.0) || pm.position >= 1.0)
      throw ConfigError(std::string("w1 support point outside [0,1) in measure ") + which);
    if (pm.weight < -1e-12)
      throw ConfigError(std::string("w1 requires nonnegative weights in measure ") + which);
    total += std::max(pm.weight, 0.0);
  }
  if (!(total > 0.0)) throw ConfigError(std::string("w1 measure ") + which + " has zero mass");
  return total;
}

}  // namespace

double w1_circle(std::span<const PointMass> a, std::span<const PointMass> b) {
  const double ta = normalized_total(a, "a");
  const double tb = normalized_total(b, "b");

  std::vector<Event> events;
  events.reserve(a.size() + b.size());
  for (const auto& pm : a) events.push_back({pm.position, std::max(pm.weight, 0.0) / ta});
  for (const auto& pm : b) events.push_back({pm.position, -std::max(pm.weight, 0.0) / tb});
  std::sort(events.begin(), events.end(),
            [](const Event& l, const Event& r) { return l.position < r.position; });

  // Piecewise-constant CDF difference G on the segments between event
  // positions; the final segment wraps around to the first event, where G
  // telescopes back to zero.
  std::vector<double> g_vals, seg_lens;
  g_vals.reserve(events.size());
  seg_lens.reserve(events.size());
  double g = 0.0;
  std::size_t i = 0;
  while (i < events.size()) {
    const double pos = events[i].position;
    while (i < events.size() && events[i].position == pos) g += events[i++].delta;
    const double next = (i < events.size()) ? events[i].position : events.front().position + 1.0;
    if (next > pos) {
      g_vals.push_back(g);
      seg_lens.push_back(next - pos);
    }
  }
  if (g_vals.empty()) return 0.0;

  // min_c sum len |G - c| is attained at the weighted median of G.
  std::vector<std::size_t> order(g_vals.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return g_vals[l] < g_vals[r]; });
  double total_len = 0.0;
  for (double len : seg_lens) total_len += len;
  double cum = 0.0;
  double median = g_vals[order.back()];
  for (std::size_t k : order) {
    cum += seg_lens[k];
    if (cum >= 0.5 * total_len) {
      median = g_vals[k];
      break;
    }
  }

  double w1 = 0.0;
  for (std::size_t k = 0; k < g_vals.size(); ++k) w1 += seg_lens[k] * std::abs(g_vals[k] - median);
  return w1;
}

namespace {

template <typename T>
double w1_field_impl(std::span<const T> field, const MacroProfile& f) {
  std::vector<PointMass> a;
  a.reserve(field.size());
  const int n = static_cast<int>(field.size());
  for (int x = 0; x < n; ++x)
    a.push_back({static_cast<double>(x) / n, static_cast<double>(field[static_cast<std::size_t>(x)])});
  std::vector<PointMass> b;
  b.reserve(f.values.size());
  for (int i = 0; i < f.grid_size; ++i)
    b.push_back({static_cast<double>(i) / f.grid_size, f.values[static_cast<std::size_t>(i)]});
  return w1_circle(a, b);
}

}  // namespace

double w1_field_vs_profile(std::span<const std::int64_t> field, const MacroProfile& f) {
  return w1_field_impl(field, f);
}

double w1_field_vs_profile(std::span<const double> field, const MacroProfile& f) {
  return w1_field_impl(field, f);
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

double block_average_at(std::span<const double> field, int center, int ell) {
  const int n = static_cast<int>(field.size());
  if (ell < 0 || 2 * ell + 1 > n) throw ConfigError("block half-width does not fit the torus");
  double acc = 0.0;
  for (int d = -ell; d <= ell; ++d) {
    int y = (center + d) % n;
    if (y < 0) y += n;
    acc += field[static_cast<std::size_t>(y)];
  }
  return acc / (2 * ell + 1);
}

std::vector<int> block_centers(int sites, int ell) {
  const int width = 2 * ell + 1;
  if (width > sites) throw ConfigError("block wider than the torus");
  std::vector<int> centers;
  centers.reserve(static_cast<std::size_t>(sites / width));
  for (int start = 0; start + width <= sites; start += width) centers.push_back(start + ell);
  return centers;
}

double block_consistency_stat(std::span<const double> flux_field,
                              std::span<const double> density_field, int center, int ell,
                              double rho, double sigma_rho, double sigma_prime_rho) {
  if (flux_field.size() != density_field.size())
    throw ConfigError("flux and density fields must share a lattice");
  const double flux_avg = block_average_at(flux_field, center, ell);
  const double dens_avg = block_average_at(density_field, center, ell);
  return flux_avg - sigma_rho - sigma_prime_rho * (dens_avg - rho);
}

std::vector<double> consistency_prefactor(const MacroProfile& f,
                                          const std::function<double(double)>& sigma,
                                          double diffusivity) {
  const int m = f.grid_size;
  std::vector<double> sig(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) sig[static_cast<std::size_t>(i)] = sigma(f.values[static_cast<std::size_t>(i)]);
  std::vector<double> out(static_cast<std::size_t>(m));
  const double scale = diffusivity * static_cast<double>(m) * static_cast<double>(m);
  for (int i = 0; i < m; ++i) {
    const double left = sig[static_cast<std::size_t>((i + m - 1) % m)];
    const double right = sig[static_cast<std::size_t>((i + 1) % m)];
    const double mid = sig[static_cast<std::size_t>(i)];
    if (!(mid > 0.0)) throw NumericError("consistency prefactor undefined where sigma(f) <= 0");
    out[static_cast<std::size_t>(i)] = scale * (right - 2.0 * mid + left) / mid;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

MeanWithError bootstrap_stderr_mean(std::span<const double> xs, Rng& rng, int resamples) {
  const int n = static_cast<int>(xs.size());
  if (n == 0) throw ConfigError("cannot bootstrap an empty sample");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (n == 1) return {mean, 0.0};

  double acc = 0.0, acc2 = 0.0;
  for (int b = 0; b < resamples; ++b) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m += xs[rng.uniform_index(static_cast<std::uint64_t>(n))];
    m /= n;
    acc += m;
    acc2 += m * m;
  }
  const double bm = acc / resamples;
  const double var = std::max(acc2 / resamples - bm * bm, 0.0);
  return {mean, std::sqrt(var)};
}

double bootstrap_stderr_indices(int n, int resamples, Rng& rng,
                                const std::function<double(std::span<const int>)>& statistic) {
  if (n <= 0) throw ConfigError("cannot bootstrap an empty sample");
  if (n == 1) return 0.0;
  std::vector<int> idx(static_cast<std::size_t>(n));
  double acc = 0.0, acc2 = 0.0;
  for (int b = 0; b < resamples; ++b) {
    for (int i = 0; i < n; ++i)
      idx[static_cast<std::size_t>(i)] =
          static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const double s = statistic(idx);
    acc += s;
    acc2 += s * s;
  }
  const double bm = acc / resamples;
  return std::sqrt(std::max(acc2 / resamples - bm * bm, 0.0));
}

double trapezoid_average(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw ConfigError("times and values must align");
  const std::size_t n = times.size();
  if (n == 0) throw ConfigError("cannot average an empty series");
  if (n == 1) return values[0];
  double span = times[n - 1] - times[0];
  if (!(span > 0.0)) throw ConfigError("checkpoint times must increase for a time average");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = times[i + 1] - times[i];
    if (dt < 0.0) throw ConfigError("checkpoint times must be non-decreasing");
    acc += 0.5 * dt * (values[i] + values[i + 1]);
  }
  return acc / span;
}

// ---------------------------------------------------------------------------
// Rate fit
// ---------------------------------------------------------------------------

namespace {

struct WlsFit {
  double slope;
  double intercept;
};

WlsFit wls(const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<double>& w) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw NumericError("rate fit needs at least two distinct scales");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

RateFit fit_rate(std::span<const double> scales, std::span<const double> values,
                 std::span<const double> stderrs, Rng& rng, int resamples) {
  if (scales.size() != values.size() || scales.size() != stderrs.size())
    throw ConfigError("rate fit inputs must align");

  std::vector<double> x, y, s;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(values[i]) || !(values[i] > 0.0)) continue;
    x.push_back(std::log(scales[i]));
    y.push_back(std::log(values[i]));
    // Delta method: sd of log(value) is the relative error, floored so one
    // exact point cannot dominate.
    double rel = std::isfinite(stderrs[i]) && stderrs[i] > 0.0 ? stderrs[i] / values[i] : 0.0;
    s.push_back(std::max(rel, 1e-6));
  }
  const std::size_t n = x.size();
  if (n < 2) throw NumericError("rate fit needs at least two usable points");

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / (s[i] * s[i]);
  const WlsFit fit = wls(x, y, w);

  // Parametric bootstrap around the fitted line with the per-point log-space
  // errors; percentile interval of the refit slopes.
  std::vector<double> slopes(static_cast<std::size_t>(resamples));
  std::vector<double> yb(n);
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i)
      yb[i] = fit.intercept + fit.slope * x[i] + s[i] * rng.normal();
    slopes[static_cast<std::size_t>(b)] = wls(x, yb, w).slope;
  }
  std::sort(slopes.begin(), slopes.end());
  const auto quantile = [&](double q) {
    const double pos = q * (resamples - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, slopes.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return slopes[lo] * (1.0 - frac) + slopes[hi] * frac;
  };

  RateFit out;
  out.rate = fit.slope;
  out.intercept = fit.intercept;
  out.ci_lo = quantile(0.025);
  out.ci_hi = quantile(0.975);
  out.points_used = static_cast<int>(n);
  return out;
}

// ---------------------------------------------------------------------------
// Wilson interval
// ---------------------------------------------------------------------------

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) throw ConfigError("wilson interval needs at least one trial");
  if (successes < 0 || successes > trials)
    throw ConfigError("successes must lie in [0, trials]");
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace hydrolim
