#pragma once

#include <cstdint>
#include <vector>

// Competing online FDR rules: LOND, LORD++, and a fixed p-value threshold.

namespace sast {

// Positive, non-increasing discount sequence with sum 1.
class GammaSequence {
 public:
  enum class Kind { inverse_square, log_style };

  // gamma_j = (6/pi^2) / j^2.
  static GammaSequence inverse_square();
  // gamma_j proportional to log(max(j,2)) / (j exp(sqrt(log j))); the
  // normalizing constant is computed once from the series plus an exact
  // integral tail.
  static GammaSequence log_style();

  double operator()(std::int64_t j) const;  // j >= 1

 private:
  GammaSequence(Kind kind, double scale) : kind_(kind), scale_(scale) {}
  Kind kind_;
  double scale_;
};

struct BaselineState {
  std::int64_t t = 0;  // steps taken
  std::int64_t rejection_count = 0;
  std::vector<std::int64_t> rejection_times;
  double wealth = 0.0;  // LORD++ only
};

// Test level each rule would apply at the next step (state.t + 1).
double lond_level(const BaselineState& state, double alpha,
                  const GammaSequence& gamma);
double lordpp_level(const BaselineState& state, double alpha,
                    const GammaSequence& gamma, double w0);

// LOND: reject iff p_t <= alpha * gamma_t * (D(t-1) + 1) where D(t-1)
// counts rejections so far. Advances the state.
bool lond_step(BaselineState& state, double p_t, double alpha,
               const GammaSequence& gamma);

// LORD++: test level
//   alpha_t = gamma_t w0 + (alpha - w0) gamma_{t - tau_1}
//           + alpha * sum_{j >= 2} gamma_{t - tau_j},
// with tau_j the past rejection times. Requires 0 < w0 <= alpha.
bool lordpp_step(BaselineState& state, double p_t, double alpha,
                 const GammaSequence& gamma, double w0);

// Reject iff p_t <= c.
bool fixed_threshold_step(double p_t, double c);

}  // namespace sast
