#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "sast/model.hpp"

// Data-driven estimation of the conditional density f_t, the screening
// proportion pi_t^tau, and the plug-in Clfdr, all computed from a sliding
// window of past observations.

namespace sast {

enum class Kernel { gaussian, epanechnikov };

// Bandwidths and window length for the one-sided bivariate kernel
// estimators. h_t is in units of index steps.
struct KernelConfig {
  Kernel kernel = Kernel::gaussian;
  double h_t = 1.0;
  double h_x = 1.0;
  std::int64_t d = 1000;
};

struct WindowEntry {
  std::int64_t index = 0;
  double x = 0.0;
  double p = 1.0;
};

// The last `capacity` observations, oldest evicted first. Indices must be
// pushed in strictly increasing order.
class SlidingWindow {
 public:
  explicit SlidingWindow(std::int64_t capacity);

  void push(std::int64_t index, double x, double p);
  void clear();

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::int64_t capacity() const { return capacity_; }
  std::int64_t last_index() const;

  const std::deque<WindowEntry>& entries() const { return entries_; }

 private:
  std::int64_t capacity_;
  std::deque<WindowEntry> entries_;
};

// Threshold used by the screening estimator: a fixed tau in (0,1), or a
// data-driven one chosen by running BH at level 0.5 on the window.
struct TauPolicy {
  enum class Mode { fixed, bh_adaptive };
  Mode mode = Mode::fixed;
  double tau = 0.5;

  static TauPolicy fixed_tau(double tau);
  static TauPolicy bh_adaptive();

  // Resolves the policy against a window (fixed mode ignores it).
  double resolve(const SlidingWindow& window) const;
};

// One-sided bivariate kernel density estimate of f_t at x:
//   sum_j K_ht(j - t) K_hx(x_j - x) / sum_j K_ht(j - t).
// All window indices must be < t. Throws on an empty window or when the
// total time weight vanishes (possible with the epanechnikov kernel).
double estimate_density(const SlidingWindow& window, std::int64_t t, double x,
                        const KernelConfig& cfg);

// Screening estimate of the signal proportion at time t:
//   1 - sum_{p_i > tau} K_ht(t - i) / ((1 - tau) sum_i K_ht(t - i)),
// clamped into [0, 1 - 1e-10].
double estimate_pi(const SlidingWindow& window, std::int64_t t, double tau,
                   const KernelConfig& cfg);

// Data-driven tau: the BH rejection threshold at level 0.5 on the window's
// p-values (the largest rejected p-value); 0.5 when BH rejects nothing.
double select_tau_bh(const SlidingWindow& window);

// Plug-in Clfdr: min{ (1 - pi_hat) f0(x_t) / f_hat(x_t), 1 }, with the
// density estimate floored before the division.
ClfdrScore estimate_clfdr(const SlidingWindow& window, double x_t,
                          std::int64_t t, const NullParams& null,
                          const KernelConfig& cfg, const TauPolicy& tau);

struct Bandwidths {
  double h_t = 1.0;
  double h_x = 1.0;
};

// Silverman's rule on the window: h = 1.06 * sd * n^(-1/5), applied to the
// x values and to the integer indices. Falls back to h_x = 1 when the x
// values are degenerate. Requires at least 2 entries.
Bandwidths silverman_bandwidths(const SlidingWindow& window);

}  // namespace sast
