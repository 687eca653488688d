#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sast/model.hpp"

// Offline (simultaneous) reference procedures: BH, weighted BH, the
// step-wise Clfdr rule, and the oracle simultaneous-testing threshold.

namespace sast {

// Thrown when the oracle threshold does not exist (alpha at or above the
// marginal FDR of the reject-all rule).
struct UndefinedThresholdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Benjamini-Hochberg step-up at level alpha. Returns the rejected indices
// (original positions), empty for an empty input.
std::vector<std::size_t> bh(std::span<const double> pvalues, double alpha);

// BH applied to p_i / w_i, clamped into [0,1]. Weights must be positive.
std::vector<std::size_t> weighted_bh(std::span<const double> pvalues,
                                     std::span<const double> weights,
                                     double alpha);

struct StepwiseResult {
  std::size_t k = 0;                     // number of rejections
  std::optional<double> threshold;       // Clfdr_(k); empty when k = 0
  std::vector<std::size_t> rejections;   // indices of the k smallest
};

// Step-wise Clfdr rule: k = max{ j : mean of the j smallest values <= alpha };
// rejects the k smallest (ties broken by original index).
StepwiseResult clfdr_stepwise(std::span<const double> clfdrs, double alpha);

// Clfdr values of mc_samples independent draws from the constant-pi mixture.
std::vector<double> sample_clfdr_draws(double pi, const NullParams& null,
                                       const AltParams& alt,
                                       std::int64_t mc_samples,
                                       std::uint64_t seed);

// Empirical marginal FDR of the rule "reject iff Clfdr < gamma" over a set
// of Clfdr draws: mean of the rejected draws, or 0 when none qualify.
double q_or_estimate(std::span<const double> clfdr_draws, double gamma);

struct GammaOrResult {
  double gamma = 1.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

// Oracle threshold gamma_OR: the largest gamma with
// E[(Clfdr - alpha) 1{Clfdr < gamma}] <= 0, estimated by Monte Carlo with
// common random draws and bisection to 1e-4. The standard error comes from
// batch means. Throws UndefinedThresholdError when alpha >= Q_OR(1) (or no
// draw falls below 1).
GammaOrResult oracle_threshold_gamma(double pi, const NullParams& null,
                                     const AltParams& alt, double alpha,
                                     std::int64_t mc_samples,
                                     std::uint64_t seed);

}  // namespace sast
