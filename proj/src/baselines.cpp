#include "sast/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace sast {

namespace {

constexpr double kPiSquaredOverSix = 1.6449340668482264;

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0,1]");
  }
}

double log_style_term(double j) {
  const double lj = std::log(j < 2.0 ? 2.0 : j);
  return lj / (j * std::exp(std::sqrt(std::log(j))));
}

// Sum of log_style_term over j >= 1. Direct series up to N, then the exact
// integral tail: with u = sqrt(log x), int_N^inf log x / (x e^sqrt(log x)) dx
// = 2 Gamma(4, sqrt(log N)) where Gamma(4,v) = e^-v (v^3 + 3v^2 + 6v + 6).
double log_style_total() {
  constexpr std::int64_t kTerms = 200000;
  double sum = 0.0;
  for (std::int64_t j = kTerms; j >= 1; --j) {
    sum += log_style_term(static_cast<double>(j));
  }
  const double v = std::sqrt(std::log(static_cast<double>(kTerms)));
  const double tail = 2.0 * std::exp(-v) * (v * v * v + 3.0 * v * v + 6.0 * v + 6.0);
  return sum + tail;
}

}  // namespace

GammaSequence GammaSequence::inverse_square() {
  return GammaSequence(Kind::inverse_square, 1.0 / kPiSquaredOverSix);
}

GammaSequence GammaSequence::log_style() {
  static const double scale = 1.0 / log_style_total();
  return GammaSequence(Kind::log_style, scale);
}

double GammaSequence::operator()(std::int64_t j) const {
  if (j < 1) throw std::invalid_argument("gamma sequence index must be >= 1");
  const double jd = static_cast<double>(j);
  switch (kind_) {
    case Kind::inverse_square:
      return scale_ / (jd * jd);
    case Kind::log_style:
      return scale_ * log_style_term(jd);
  }
  return 0.0;
}

double lond_level(const BaselineState& state, double alpha,
                  const GammaSequence& gamma) {
  return alpha * gamma(state.t + 1) *
         static_cast<double>(state.rejection_count + 1);
}

double lordpp_level(const BaselineState& state, double alpha,
                    const GammaSequence& gamma, double w0) {
  const std::int64_t t = state.t + 1;
  double level = gamma(t) * w0;
  for (std::size_t j = 0; j < state.rejection_times.size(); ++j) {
    const std::int64_t lag = t - state.rejection_times[j];
    if (lag < 1) continue;
    level += (j == 0 ? alpha - w0 : alpha) * gamma(lag);
  }
  return level;
}

bool lond_step(BaselineState& state, double p_t, double alpha,
               const GammaSequence& gamma) {
  check_p(p_t);
  const double level = lond_level(state, alpha, gamma);
  state.t += 1;
  const bool reject = p_t <= level;
  if (reject) {
    state.rejection_count += 1;
    state.rejection_times.push_back(state.t);
  }
  return reject;
}

bool lordpp_step(BaselineState& state, double p_t, double alpha,
                 const GammaSequence& gamma, double w0) {
  check_p(p_t);
  if (!(w0 > 0.0 && w0 <= alpha)) {
    throw std::invalid_argument("w0 must lie in (0, alpha]");
  }
  if (state.t == 0) state.wealth = w0;
  const double level = lordpp_level(state, alpha, gamma, w0);
  state.t += 1;

  state.wealth -= level;
  const bool reject = p_t <= level;
  if (reject) {
    state.wealth += state.rejection_count == 0 ? alpha - w0 : alpha;
    state.rejection_count += 1;
    state.rejection_times.push_back(state.t);
  }
  return reject;
}

bool fixed_threshold_step(double p_t, double c) {
  check_p(p_t);
  if (!(c > 0.0 && c < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0,1)");
  }
  return p_t <= c;
}

}  // namespace sast
