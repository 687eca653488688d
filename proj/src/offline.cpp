#include "sast/offline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sast {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
}

// Largest feasible gamma over a sorted sample of Clfdr draws, where
// feasibility means sum (c - alpha) over {c < gamma} <= 0. Bisection on
// [alpha, 1]; the sum is nondecreasing in gamma on that interval.
double gamma_search(const std::vector<double>& sorted_draws, double alpha) {
  std::vector<double> prefix(sorted_draws.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted_draws.size(); ++i) {
    prefix[i + 1] = prefix[i] + (sorted_draws[i] - alpha);
  }
  const auto feasible = [&](double gamma) {
    const auto it = std::lower_bound(sorted_draws.begin(), sorted_draws.end(),
                                     gamma);
    const std::size_t count =
        static_cast<std::size_t>(it - sorted_draws.begin());
    return prefix[count] <= 0.0;
  };

  double lo = alpha;  // always feasible: every included term is negative
  double hi = 1.0;
  if (feasible(hi)) return hi;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

std::vector<std::size_t> bh(std::span<const double> pvalues, double alpha) {
  check_alpha(alpha);
  const std::size_t m = pvalues.size();
  if (m == 0) return {};
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("p-values must lie in [0,1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues[a] < pvalues[b];
  });

  std::size_t k = 0;
  for (std::size_t i = m; i >= 1; --i) {
    if (pvalues[order[i - 1]] <=
        alpha * static_cast<double>(i) / static_cast<double>(m)) {
      k = i;
      break;
    }
  }
  std::vector<std::size_t> rejected(order.begin(),
                                    order.begin() + static_cast<long>(k));
  std::sort(rejected.begin(), rejected.end());
  return rejected;
}

std::vector<std::size_t> weighted_bh(std::span<const double> pvalues,
                                     std::span<const double> weights,
                                     double alpha) {
  if (pvalues.size() != weights.size()) {
    throw std::invalid_argument("pvalues and weights differ in length");
  }
  std::vector<double> adjusted(pvalues.size());
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw std::invalid_argument("weights must be > 0");
    }
    adjusted[i] = std::min(pvalues[i] / weights[i], 1.0);
  }
  return bh(adjusted, alpha);
}

StepwiseResult clfdr_stepwise(std::span<const double> clfdrs, double alpha) {
  check_alpha(alpha);
  for (double v : clfdrs) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("clfdr values must lie in [0,1]");
    }
  }
  std::vector<std::size_t> order(clfdrs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return clfdrs[a] < clfdrs[b];
                   });

  StepwiseResult result;
  double sum = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double v = clfdrs[order[j]];
    if ((sum + v) / static_cast<double>(j + 1) > alpha) break;
    sum += v;
    result.k = j + 1;
  }
  if (result.k > 0) {
    result.threshold = clfdrs[order[result.k - 1]];
    result.rejections.assign(order.begin(),
                             order.begin() + static_cast<long>(result.k));
    std::sort(result.rejections.begin(), result.rejections.end());
  }
  return result;
}

std::vector<double> sample_clfdr_draws(double pi, const NullParams& null,
                                       const AltParams& alt,
                                       std::int64_t mc_samples,
                                       std::uint64_t seed) {
  if (!(pi >= 0.0 && pi <= 1.0)) {
    throw std::invalid_argument("pi must lie in [0,1]");
  }
  if (mc_samples < 1) throw std::invalid_argument("mc_samples must be >= 1");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution signal(pi);
  std::normal_distribution<double> null_draw(null.mean, null.sd);
  std::normal_distribution<double> alt_draw(alt.mean, alt.sd);

  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(mc_samples));
  for (std::int64_t i = 0; i < mc_samples; ++i) {
    const double x = signal(rng) ? alt_draw(rng) : null_draw(rng);
    draws.push_back(clfdr_oracle(x, pi, null, alt).value);
  }
  return draws;
}

double q_or_estimate(std::span<const double> clfdr_draws, double gamma) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double c : clfdr_draws) {
    if (c < gamma) {
      sum += c;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

GammaOrResult oracle_threshold_gamma(double pi, const NullParams& null,
                                     const AltParams& alt, double alpha,
                                     std::int64_t mc_samples,
                                     std::uint64_t seed) {
  check_alpha(alpha);
  std::vector<double> draws =
      sample_clfdr_draws(pi, null, alt, mc_samples, seed);

  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());

  const auto below_one =
      std::lower_bound(sorted.begin(), sorted.end(), 1.0) - sorted.begin();
  if (below_one == 0) {
    throw UndefinedThresholdError(
        "oracle threshold undefined: no Clfdr draw below 1");
  }
  const double q_at_one =
      q_or_estimate(std::span<const double>(sorted.data(),
                                            static_cast<std::size_t>(
                                                sorted.size())),
                    1.0);
  if (alpha >= q_at_one) {
    throw UndefinedThresholdError(
        "oracle threshold undefined: alpha >= Q_OR(1)");
  }

  GammaOrResult result;
  result.gamma = gamma_search(sorted, alpha);
  result.samples = mc_samples;

  // Batch-means standard error on contiguous sub-samples.
  const std::size_t batches =
      std::min<std::size_t>(10, static_cast<std::size_t>(mc_samples));
  std::vector<double> batch_gammas;
  if (batches >= 2) {
    const std::size_t batch_size = draws.size() / batches;
    for (std::size_t b = 0; b < batches && batch_size >= 1; ++b) {
      std::vector<double> part(
          draws.begin() + static_cast<long>(b * batch_size),
          draws.begin() + static_cast<long>((b + 1) * batch_size));
      std::sort(part.begin(), part.end());
      if (part.front() >= 1.0) continue;
      batch_gammas.push_back(gamma_search(part, alpha));
    }
  }
  if (batch_gammas.size() >= 2) {
    const double n = static_cast<double>(batch_gammas.size());
    double mean = 0.0;
    for (double g : batch_gammas) mean += g;
    mean /= n;
    double ss = 0.0;
    for (double g : batch_gammas) ss += (g - mean) * (g - mean);
    result.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return result;
}

}  // namespace sast
