#include "sast/model.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace sast {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/sqrt(2*pi)
constexpr double kSqrt2 = 1.4142135623730951;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

void require_positive_sd(double sd) {
  require_finite(sd, "sd");
  if (sd <= 0.0) throw std::invalid_argument("sd must be > 0");
}

double gaussian_density(double x, double mean, double sd) {
  const double u = (x - mean) / sd;
  const double v = kInvSqrt2Pi / sd * std::exp(-0.5 * u * u);
  return v < kDensityFloor ? kDensityFloor : v;
}

}  // namespace

MixtureParams MixtureParams::constant(double pi_value, NullParams null_params,
                                      AltParams alt_params) {
  if (!(pi_value >= 0.0 && pi_value <= 1.0)) {
    throw std::invalid_argument("pi must lie in [0,1]");
  }
  MixtureParams m;
  m.pi = [pi_value](std::int64_t) { return pi_value; };
  m.null = null_params;
  m.alt = alt_params;
  return m;
}

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// Wichura's AS241 (PPND16) rational approximation, accurate to ~1e-16.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile requires p in (0,1)");
  }
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

double null_density(double x, const NullParams& null) {
  require_finite(x, "x");
  require_positive_sd(null.sd);
  return gaussian_density(x, null.mean, null.sd);
}

double alt_density(double x, const AltParams& alt) {
  require_finite(x, "x");
  require_positive_sd(alt.sd);
  return gaussian_density(x, alt.mean, alt.sd);
}

ClfdrScore clfdr_oracle(double x, double pi_t, const NullParams& null,
                        const AltParams& alt) {
  const AltParams alt_copy = alt;
  return clfdr_oracle(x, pi_t, null, [&alt_copy](double v) {
    return alt_density(v, alt_copy);
  });
}

ClfdrScore clfdr_oracle(double x, double pi_t, const NullParams& null,
                        const std::function<double(double)>& alt_density_fn) {
  require_finite(x, "x");
  if (!(pi_t >= 0.0 && pi_t <= 1.0)) {
    throw std::invalid_argument("pi_t must lie in [0,1]");
  }
  const double f0 = null_density(x, null);
  double f1 = alt_density_fn(x);
  require_finite(f1, "alternative density");
  if (f1 < kDensityFloor) f1 = kDensityFloor;

  const double num = (1.0 - pi_t) * f0;
  const double den = num + pi_t * f1;
  if (den <= 0.0) {
    throw std::domain_error("clfdr: both mixture densities are zero");
  }
  double value = num / den;
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  return ClfdrScore{value};
}

double z_to_pvalue(double z, const NullParams& null) {
  require_finite(z, "z");
  require_positive_sd(null.sd);
  const double zstd = std::abs(z - null.mean) / null.sd;
  // 2 Phi(-|z'|) = erfc(|z'| / sqrt(2))
  double p = std::erfc(zstd / kSqrt2);
  if (p < kDensityFloor) p = kDensityFloor;
  if (p > 1.0) p = 1.0;
  return p;
}

double p_to_z_randomized(double p, bool coin) {
  if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
    throw std::invalid_argument("p must lie in (0,1]");
  }
  if (p == 1.0) return 0.0;
  const double z = normal_quantile(0.5 * p);  // <= 0
  return coin ? -z : z;
}

}  // namespace sast
