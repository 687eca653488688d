#pragma once

#include <cstdint>
#include <functional>

// Two-group Gaussian mixture model, Clfdr statistic, and the z/p-value
// conversions used throughout. All functions here are pure and thread-safe.

namespace sast {

// Known null distribution N(mean, sd). The defaults give the theoretical
// standard normal null; callers may supply an empirical null instead.
struct NullParams {
  double mean = 0.0;
  double sd = 1.0;
};

// Alternative (signal) distribution N(mean, sd); a Gaussian location shift.
struct AltParams {
  double mean = 0.0;
  double sd = 1.0;
};

// Hierarchical two-group model: theta_t ~ Bernoulli(pi(t)),
// X_t ~ N(null) if theta_t = 0 else N(alt).
struct MixtureParams {
  std::function<double(std::int64_t)> pi;  // t -> P(theta_t = 1), in [0,1]
  NullParams null;
  AltParams alt;

  static MixtureParams constant(double pi_value, NullParams null_params,
                                AltParams alt_params);
};

// Posterior probability that the hypothesis is null given its observation.
struct ClfdrScore {
  double value = 1.0;  // in [0,1]
};

// Densities are floored at this value before entering any ratio.
inline constexpr double kDensityFloor = 1e-300;

// Standard normal pdf/cdf and quantile (inverse cdf).
double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);  // p in (0,1)

// Gaussian density of N(null.mean, null.sd) at x. Throws on non-finite x
// or sd <= 0. Result is strictly positive (floored).
double null_density(double x, const NullParams& null);

// Gaussian density of N(alt.mean, alt.sd) at x.
double alt_density(double x, const AltParams& alt);

// Clfdr = (1-pi) f0(x) / ((1-pi) f0(x) + pi f1(x)), clamped into [0,1].
// pi = 0 gives exactly 1, pi = 1 gives exactly 0.
ClfdrScore clfdr_oracle(double x, double pi_t, const NullParams& null,
                        const AltParams& alt);

// Same, with an arbitrary alternative density callback (used by the
// estimators when the plug-in alternative is not a Gaussian).
ClfdrScore clfdr_oracle(double x, double pi_t, const NullParams& null,
                        const std::function<double(double)>& alt_density_fn);

// Two-sided p-value of z under the null: p = 2 Phi(-|z - mean| / sd),
// in (0, 1].
double z_to_pvalue(double z, const NullParams& null);

// Randomized inverse of the above under the standard normal null:
// |z| = |Phi^-1(p/2)|, sign positive when coin is true. Round-trips with
// z_to_pvalue(., N(0,1)).
double p_to_z_randomized(double p, bool coin);

}  // namespace sast
