#include "sast/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sast {

namespace {

constexpr double kPiClampEps = 1e-10;

// Unnormalized kernel shape K(u); the 1/h factor is applied by callers
// where it matters (it cancels in the time-weight ratios).
double kernel_shape(Kernel k, double u) {
  switch (k) {
    case Kernel::gaussian:
      return std::exp(-0.5 * u * u);
    case Kernel::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

// Normalizing constant so that K(u)/c integrates to 1 in u.
double kernel_norm(Kernel k) {
  switch (k) {
    case Kernel::gaussian:
      return 2.5066282746310002;  // sqrt(2*pi)
    case Kernel::epanechnikov:
      return 1.0;  // 0.75(1-u^2) already integrates to 1
  }
  return 1.0;
}

void check_config(const KernelConfig& cfg) {
  if (!(cfg.h_t > 0.0) || !(cfg.h_x > 0.0)) {
    throw std::invalid_argument("kernel bandwidths must be > 0");
  }
  if (cfg.d < 2) throw std::invalid_argument("window length d must be >= 2");
}

}  // namespace

SlidingWindow::SlidingWindow(std::int64_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("window capacity must be >= 1");
}

void SlidingWindow::push(std::int64_t index, double x, double p) {
  if (!std::isfinite(x)) throw std::invalid_argument("x must be finite");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  if (!entries_.empty() && index <= entries_.back().index) {
    throw std::invalid_argument("window indices must be strictly increasing");
  }
  entries_.push_back(WindowEntry{index, x, p});
  if (static_cast<std::int64_t>(entries_.size()) > capacity_) {
    entries_.pop_front();
  }
}

void SlidingWindow::clear() { entries_.clear(); }

std::int64_t SlidingWindow::last_index() const {
  if (entries_.empty()) throw std::logic_error("window is empty");
  return entries_.back().index;
}

TauPolicy TauPolicy::fixed_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("fixed tau must lie in (0,1)");
  }
  return TauPolicy{Mode::fixed, tau};
}

TauPolicy TauPolicy::bh_adaptive() { return TauPolicy{Mode::bh_adaptive, 0.5}; }

double TauPolicy::resolve(const SlidingWindow& window) const {
  return mode == Mode::fixed ? tau : select_tau_bh(window);
}

double estimate_density(const SlidingWindow& window, std::int64_t t, double x,
                        const KernelConfig& cfg) {
  check_config(cfg);
  if (!std::isfinite(x)) throw std::invalid_argument("x must be finite");
  if (window.empty()) throw std::invalid_argument("window is empty");
  if (window.last_index() >= t) {
    throw std::invalid_argument("window must contain only indices < t");
  }

  double weight_sum = 0.0;
  double value_sum = 0.0;
  const double x_norm = kernel_norm(cfg.kernel) * cfg.h_x;
  for (const WindowEntry& e : window.entries()) {
    const double w =
        kernel_shape(cfg.kernel, static_cast<double>(e.index - t) / cfg.h_t);
    weight_sum += w;
    value_sum += w * kernel_shape(cfg.kernel, (e.x - x) / cfg.h_x) / x_norm;
  }
  if (weight_sum <= 0.0) {
    throw std::domain_error("estimate_density: total time weight is zero");
  }
  return value_sum / weight_sum;
}

double estimate_pi(const SlidingWindow& window, std::int64_t t, double tau,
                   const KernelConfig& cfg) {
  check_config(cfg);
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("tau must lie in (0,1)");
  }
  if (window.empty()) throw std::invalid_argument("window is empty");

  double weight_sum = 0.0;
  double screened_sum = 0.0;
  for (const WindowEntry& e : window.entries()) {
    const double w =
        kernel_shape(cfg.kernel, static_cast<double>(t - e.index) / cfg.h_t);
    weight_sum += w;
    if (e.p > tau) screened_sum += w;
  }
  if (weight_sum <= 0.0) {
    throw std::domain_error("estimate_pi: total time weight is zero");
  }
  double pi_hat = 1.0 - screened_sum / ((1.0 - tau) * weight_sum);
  return std::clamp(pi_hat, 0.0, 1.0 - kPiClampEps);
}

double select_tau_bh(const SlidingWindow& window) {
  if (window.empty()) throw std::invalid_argument("window is empty");
  std::vector<double> p;
  p.reserve(window.size());
  for (const WindowEntry& e : window.entries()) p.push_back(e.p);
  std::sort(p.begin(), p.end());

  const double alpha = 0.5;
  const std::size_t m = p.size();
  std::size_t k = 0;
  for (std::size_t i = m; i >= 1; --i) {
    if (p[i - 1] <= alpha * static_cast<double>(i) / static_cast<double>(m)) {
      k = i;
      break;
    }
  }
  return k == 0 ? 0.5 : p[k - 1];
}

ClfdrScore estimate_clfdr(const SlidingWindow& window, double x_t,
                          std::int64_t t, const NullParams& null,
                          const KernelConfig& cfg, const TauPolicy& tau) {
  const double tau_value = tau.resolve(window);
  const double pi_hat = estimate_pi(window, t, tau_value, cfg);
  double f_hat = estimate_density(window, t, x_t, cfg);
  if (f_hat < kDensityFloor) f_hat = kDensityFloor;
  const double value = (1.0 - pi_hat) * null_density(x_t, null) / f_hat;
  return ClfdrScore{std::min(value, 1.0)};
}

Bandwidths silverman_bandwidths(const SlidingWindow& window) {
  const std::size_t n = window.size();
  if (n < 2) throw std::invalid_argument("need >= 2 entries for bandwidths");

  double mean_x = 0.0, mean_i = 0.0;
  for (const WindowEntry& e : window.entries()) {
    mean_x += e.x;
    mean_i += static_cast<double>(e.index);
  }
  mean_x /= static_cast<double>(n);
  mean_i /= static_cast<double>(n);

  double ss_x = 0.0, ss_i = 0.0;
  for (const WindowEntry& e : window.entries()) {
    ss_x += (e.x - mean_x) * (e.x - mean_x);
    const double di = static_cast<double>(e.index) - mean_i;
    ss_i += di * di;
  }
  const double denom = static_cast<double>(n - 1);
  const double sd_x = std::sqrt(ss_x / denom);
  const double sd_i = std::sqrt(ss_i / denom);
  const double scale = 1.06 * std::pow(static_cast<double>(n), -0.2);

  Bandwidths bw;
  bw.h_x = sd_x > 0.0 ? scale * sd_x : 1.0;  // degenerate x: documented default
  bw.h_t = scale * sd_i;                     // indices strictly increase, sd > 0
  return bw;
}

}  // namespace sast
