#include "sast/engine.hpp"

#include <cmath>
#include <utility>

namespace sast {

ClfdrWindow::ClfdrWindow(std::int64_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("window capacity must be >= 1");
}

void ClfdrWindow::push(double clfdr) {
  if (!(clfdr >= 0.0 && clfdr <= 1.0)) {
    throw std::invalid_argument("clfdr must lie in [0,1]");
  }
  arrival_.push_back(clfdr);
  sorted_.insert(clfdr);
  if (static_cast<std::int64_t>(arrival_.size()) > capacity_) {
    sorted_.erase(sorted_.find(arrival_.front()));
    arrival_.pop_front();
  }
}

SastState::SastState(double alpha_level, std::int64_t window_capacity,
                     bool with_barrier)
    : alpha(alpha_level),
      gamma(alpha_level),
      barrier_enabled(with_barrier),
      window(window_capacity) {
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
}

double update_barrier(SastState& state) {
  if (!state.barrier_enabled) {
    state.gamma = 1.0;
    return state.gamma;
  }
  const auto& sorted = state.window.sorted();
  if (sorted.empty()) throw std::logic_error("barrier window is empty");

  if (*sorted.begin() > state.alpha) {
    return state.gamma;  // keep the previous barrier
  }
  // Prefix averages over the sorted window are nondecreasing, so the first
  // failure of avg <= alpha ends the scan; its value is Clfdr_(k+1).
  double sum = 0.0;
  std::int64_t j = 0;
  for (double v : sorted) {
    if ((sum + v) / static_cast<double>(j + 1) <= state.alpha) {
      sum += v;
      ++j;
    } else {
      state.gamma = v;
      return state.gamma;
    }
  }
  state.gamma = 1.0;  // k equals the window length: no barrier restriction
  return state.gamma;
}

bool decide(SastState& state, double clfdr_t) {
  if (!(clfdr_t >= 0.0 && clfdr_t <= 1.0)) {
    throw std::invalid_argument("clfdr must lie in [0,1]");
  }
  const double avg_if_rejected = (state.rej_clfdr_sum + clfdr_t) /
                                 static_cast<double>(state.rej_count + 1);
  const bool reject = clfdr_t < state.gamma && avg_if_rejected <= state.alpha;
  if (reject) {
    state.rej_count += 1;
    state.rej_clfdr_sum += clfdr_t;
  }
  return reject;
}

DecisionRecord sast_step(SastState& state, double clfdr_t, double x_t) {
  state.window.push(clfdr_t);
  const double gamma = update_barrier(state);
  const bool reject = decide(state, clfdr_t);
  state.t += 1;

  DecisionRecord rec;
  rec.t = state.t;
  rec.x = x_t;
  rec.clfdr_used = clfdr_t;
  rec.barrier = gamma;
  rec.reject = reject;
  rec.capacity_after = state.capacity();
  return rec;
}

OracleSast::OracleSast(double alpha, MixtureParams params, std::int64_t d,
                       bool with_barrier)
    : params_(std::move(params)), state_(alpha, d, with_barrier) {
  if (!params_.pi) throw std::invalid_argument("mixture pi function is unset");
}

DecisionRecord OracleSast::step(double x) {
  const std::int64_t t = state_.t + 1;
  const double pi_t = params_.pi(t);
  const ClfdrScore clfdr = clfdr_oracle(x, pi_t, params_.null, params_.alt);
  return sast_step(state_, clfdr.value, x);
}

DataDrivenSast::DataDrivenSast(DataDrivenConfig cfg)
    : cfg_(cfg),
      state_(cfg.alpha, cfg.d, cfg.barrier),
      window_(cfg.d),
      snapshot_(cfg.d) {
  if (cfg.burn_in < 1) throw std::invalid_argument("burn_in must be >= 1");
  if (cfg.refresh < 1) throw std::invalid_argument("refresh must be >= 1");
}

void DataDrivenSast::observe(double x) {
  window_.push(next_index_, x, z_to_pvalue(x, cfg_.null));
  next_index_ += 1;
}

bool DataDrivenSast::ready() const {
  return static_cast<std::int64_t>(window_.size()) >= cfg_.burn_in;
}

void DataDrivenSast::refresh_estimates() {
  snapshot_ = window_;
  snapshot_t_ = next_index_;

  KernelConfig kcfg;
  kcfg.kernel = cfg_.kernel;
  kcfg.d = cfg_.d;
  if (cfg_.bandwidths) {
    kcfg.h_t = cfg_.bandwidths->h_t;
    kcfg.h_x = cfg_.bandwidths->h_x;
  } else {
    const Bandwidths bw = silverman_bandwidths(snapshot_);
    kcfg.h_t = bw.h_t;
    kcfg.h_x = bw.h_x;
  }
  snapshot_cfg_ = kcfg;
  snapshot_pi_ = estimate_pi(snapshot_, snapshot_t_,
                             cfg_.tau.resolve(snapshot_), kcfg);
  has_snapshot_ = true;
}

double DataDrivenSast::clfdr_estimate(double x) const {
  // The whole estimator state is frozen at the refresh time, including the
  // time weights; only the x argument varies between refreshes. Sliding
  // the time weights instead would starve the snapshot of effective
  // sample by the end of a refresh cycle.
  double f_hat = estimate_density(snapshot_, snapshot_t_, x, snapshot_cfg_);
  if (f_hat < kDensityFloor) f_hat = kDensityFloor;
  const double value =
      (1.0 - snapshot_pi_) * null_density(x, cfg_.null) / f_hat;
  return std::min(value, 1.0);
}

DecisionRecord DataDrivenSast::step(double x) {
  if (!ready()) {
    throw NotReadyError("data-driven SAST: estimation window below burn-in");
  }
  // Refresh whenever the current time point crosses a cadence boundary
  // (positions 1, 1+refresh, 1+2*refresh, ... over the whole stream). The
  // anchor at the first observation keeps the cadence independent of when
  // decisions begin.
  if (!has_snapshot_ ||
      (next_index_ - 1) / cfg_.refresh > (snapshot_t_ - 1) / cfg_.refresh) {
    refresh_estimates();
  }
  const double clfdr = clfdr_estimate(x);
  DecisionRecord rec = sast_step(state_, clfdr, x);
  observe(x);  // the current point joins the window for future estimates
  return rec;
}

}  // namespace sast
