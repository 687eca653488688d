#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "sast/estimators.hpp"
#include "sast/model.hpp"

// The SAST sequential decision engine: a knapsack-style budget on rejected
// Clfdr values plus a data-adaptive barrier maintained from a sliding
// window of recent Clfdr values.

namespace sast {

// Thrown by the data-driven engine when asked to decide before the
// estimation window has reached its burn-in size.
struct NotReadyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecisionRecord {
  std::int64_t t = 0;
  double x = 0.0;
  double clfdr_used = 1.0;
  double barrier = 1.0;
  bool reject = false;
  double capacity_after = 0.0;  // alpha * |R_t| - sum of rejected Clfdrs
};

// Last-d Clfdr values in both arrival and sorted order.
class ClfdrWindow {
 public:
  explicit ClfdrWindow(std::int64_t capacity);

  void push(double clfdr);
  bool empty() const { return arrival_.empty(); }
  std::size_t size() const { return arrival_.size(); }
  const std::multiset<double>& sorted() const { return sorted_; }

 private:
  std::int64_t capacity_;
  std::deque<double> arrival_;
  std::multiset<double> sorted_;
};

// Rejection-set accounting and barrier for one stream. Single-owner,
// strictly sequential; independent states may run on separate threads.
struct SastState {
  double alpha = 0.05;
  std::int64_t t = 0;           // decisions made so far
  double gamma;                 // current barrier, initialized to alpha
  std::int64_t rej_count = 0;
  double rej_clfdr_sum = 0.0;
  bool barrier_enabled = true;  // false pins gamma to 1 (ablation)
  ClfdrWindow window;

  SastState(double alpha_level, std::int64_t window_capacity,
            bool with_barrier = true);

  double running_average() const {
    return rej_count == 0 ? 0.0 : rej_clfdr_sum / static_cast<double>(rej_count);
  }
  double capacity() const {
    return alpha * static_cast<double>(rej_count) - rej_clfdr_sum;
  }
};

// Barrier step on the current window: keep gamma when the smallest window
// Clfdr exceeds alpha; otherwise gamma becomes the (k+1)-th order statistic
// where k is the longest prefix with average <= alpha, or 1 when the whole
// window qualifies. Returns the new gamma.
double update_barrier(SastState& state);

// Decision step: reject iff clfdr_t < gamma and the running average of
// rejected Clfdrs including clfdr_t stays <= alpha; updates the accounting.
bool decide(SastState& state, double clfdr_t);

// One full engine step on a precomputed Clfdr value: push it into the
// window, update the barrier, decide, advance t. Both the oracle and the
// data-driven procedures funnel through here.
DecisionRecord sast_step(SastState& state, double clfdr_t, double x_t);

// Oracle SAST: Clfdr computed from known mixture parameters.
class OracleSast {
 public:
  OracleSast(double alpha, MixtureParams params, std::int64_t d,
             bool with_barrier = true);

  DecisionRecord step(double x);
  const SastState& state() const { return state_; }

 private:
  MixtureParams params_;
  SastState state_;
};

struct DataDrivenConfig {
  double alpha = 0.05;
  std::int64_t d = 1000;
  std::int64_t burn_in = 500;
  std::int64_t refresh = 200;
  NullParams null;
  Kernel kernel = Kernel::gaussian;
  TauPolicy tau = TauPolicy::bh_adaptive();
  bool barrier = true;
  // Fixed bandwidths; when unset, Silverman's rule is applied at each
  // estimator refresh.
  std::optional<Bandwidths> bandwidths;
};

// Data-driven SAST: the plug-in Clfdr replaces the oracle one. Estimator
// state (window snapshot, bandwidths, pi_hat, tau) is rebuilt every
// `refresh` time points, counted over the whole stream including the
// burn-in feed so the cadence is anchored at the first observation, and
// reused in between; the density is re-evaluated at each new point against
// the cached snapshot.
class DataDrivenSast {
 public:
  explicit DataDrivenSast(DataDrivenConfig cfg);

  // Feeds one observation into the estimation window without deciding.
  void observe(double x);

  bool ready() const;

  // Decides on x, then absorbs it into the window. Throws NotReadyError
  // until `burn_in` observations have been fed.
  DecisionRecord step(double x);

  const SastState& state() const { return state_; }
  const DataDrivenConfig& config() const { return cfg_; }

 private:
  void refresh_estimates();
  double clfdr_estimate(double x) const;

  DataDrivenConfig cfg_;
  SastState state_;
  SlidingWindow window_;
  std::int64_t next_index_ = 1;

  // Cached estimator state.
  SlidingWindow snapshot_;
  std::int64_t snapshot_t_ = 0;
  KernelConfig snapshot_cfg_;
  double snapshot_pi_ = 0.0;
  bool has_snapshot_ = false;
};

}  // namespace sast
