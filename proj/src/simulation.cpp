#include "sast/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "sast/baselines.hpp"

namespace sast {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void check_pi_value(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("pi pattern value must lie in [0,1]");
  }
}

}  // namespace

PiPattern PiPattern::constant(double pi) {
  check_pi_value(pi);
  PiPattern p;
  p.fn_ = [pi](std::int64_t, std::int64_t) { return pi; };
  return p;
}

PiPattern PiPattern::linear(double pi_lo, double pi_hi) {
  check_pi_value(pi_lo);
  check_pi_value(pi_hi);
  PiPattern p;
  p.fn_ = [pi_lo, pi_hi](std::int64_t t, std::int64_t m) {
    if (m <= 1) return pi_lo;
    const double frac =
        static_cast<double>(t - 1) / static_cast<double>(m - 1);
    return pi_lo + (pi_hi - pi_lo) * frac;
  };
  return p;
}

PiPattern PiPattern::sine() {
  PiPattern p;
  p.fn_ = [](std::int64_t t, std::int64_t m) {
    return (std::sin(kTwoPi * static_cast<double>(t) /
                     static_cast<double>(m)) +
            1.0) /
           4.0;
  };
  return p;
}

PiPattern PiPattern::blocks(double base, std::vector<BlockSegment> segments) {
  check_pi_value(base);
  std::sort(segments.begin(), segments.end(),
            [](const BlockSegment& a, const BlockSegment& b) {
              return a.lo < b.lo;
            });
  for (std::size_t i = 0; i < segments.size(); ++i) {
    check_pi_value(segments[i].value);
    if (segments[i].hi <= segments[i].lo) {
      throw std::invalid_argument("block segment must satisfy lo < hi");
    }
    if (i > 0 && segments[i].lo < segments[i - 1].hi) {
      throw std::invalid_argument("block segments overlap");
    }
  }
  PiPattern p;
  p.fn_ = [base, segments = std::move(segments)](std::int64_t t,
                                                 std::int64_t) {
    for (const BlockSegment& s : segments) {
      if (t > s.lo && t <= s.hi) return s.value;  // half-open (lo, hi]
    }
    return base;
  };
  return p;
}

PiPattern PiPattern::custom(
    std::function<double(std::int64_t, std::int64_t)> fn) {
  if (!fn) throw std::invalid_argument("custom pattern function is unset");
  PiPattern p;
  p.fn_ = std::move(fn);
  return p;
}

double PiPattern::value(std::int64_t t, std::int64_t m) const {
  const double v = fn_(t, m);
  check_pi_value(v);
  return v;
}

std::vector<std::int64_t> SimConfig::resolved_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  std::vector<std::int64_t> cps;
  for (std::int64_t t = 1500; t <= m; t += 500) cps.push_back(t);
  if (cps.empty() || cps.back() != m) cps.push_back(m);
  return cps;
}

void SimConfig::validate() const {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  if (refresh < 1) throw std::invalid_argument("refresh must be >= 1");
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  std::int64_t prev_cp = 0;
  for (std::int64_t cp : checkpoints) {
    if (cp < 1 || cp > m) {
      throw std::invalid_argument("checkpoints must lie in [1, m]");
    }
    if (cp <= prev_cp) {
      throw std::invalid_argument("checkpoints must be strictly increasing");
    }
    prev_cp = cp;
  }
}

std::uint64_t rep_seed(std::uint64_t seed, std::int64_t rep) {
  std::uint64_t z =
      seed + static_cast<std::uint64_t>(rep + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

StreamData generate_stream(const SimConfig& cfg, std::uint64_t stream_seed) {
  cfg.validate();
  const std::int64_t total = cfg.burn_in + cfg.m;
  StreamData data;
  data.theta.resize(static_cast<std::size_t>(total));
  data.x.resize(static_cast<std::size_t>(total));

  std::mt19937_64 rng(stream_seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (std::int64_t i = 0; i < total; ++i) {
    const std::int64_t t_main = i - cfg.burn_in + 1;
    const double pi =
        t_main < 1 ? cfg.pattern.value(1, cfg.m) : cfg.pattern.value(t_main, cfg.m);
    std::bernoulli_distribution signal(pi);
    const bool is_signal = signal(rng);
    data.theta[static_cast<std::size_t>(i)] = is_signal ? 1 : 0;
    data.x[static_cast<std::size_t>(i)] =
        noise(rng) + (is_signal ? cfg.mu : 0.0);
  }
  return data;
}

RepEval evaluate(const std::vector<std::uint8_t>& decisions,
                 const std::vector<std::uint8_t>& theta,
                 const std::vector<std::int64_t>& checkpoints) {
  if (decisions.size() != theta.size()) {
    throw std::invalid_argument("decisions and theta differ in length");
  }
  RepEval eval;
  eval.fdp.reserve(checkpoints.size());
  eval.mdp.reserve(checkpoints.size());

  std::int64_t rejections = 0, false_rejections = 0;
  std::int64_t signals = 0, true_rejections = 0;
  std::size_t next_cp = 0;
  for (std::size_t i = 0; i < decisions.size() && next_cp < checkpoints.size();
       ++i) {
    if (decisions[i]) {
      rejections += 1;
      if (!theta[i]) false_rejections += 1;
      else true_rejections += 1;
    }
    if (theta[i]) signals += 1;
    while (next_cp < checkpoints.size() &&
           static_cast<std::int64_t>(i + 1) == checkpoints[next_cp]) {
      eval.fdp.push_back(static_cast<double>(false_rejections) /
                         static_cast<double>(std::max<std::int64_t>(rejections, 1)));
      eval.mdp.push_back(signals == 0
                             ? 0.0
                             : 1.0 - static_cast<double>(true_rejections) /
                                         static_cast<double>(signals));
      next_cp += 1;
    }
  }
  if (next_cp != checkpoints.size()) {
    throw std::invalid_argument("checkpoint beyond stream length");
  }
  return eval;
}

MethodSpec MethodSpec::parse(const std::string& id) {
  MethodSpec spec;
  spec.id = id;
  if (id == "sast-or") {
    spec.kind = Kind::sast_or;
  } else if (id == "sast-dd") {
    spec.kind = Kind::sast_dd;
  } else if (id == "sast-or-nob") {
    spec.kind = Kind::sast_or_nob;
  } else if (id == "sast-dd-nob") {
    spec.kind = Kind::sast_dd_nob;
  } else if (id == "lond") {
    spec.kind = Kind::lond;
  } else if (id == "lordpp") {
    spec.kind = Kind::lordpp;
  } else if (id == "fixed" || id.rfind("fixed:", 0) == 0) {
    spec.kind = Kind::fixed;
    if (id.size() > 6) {
      try {
        spec.threshold = std::stod(id.substr(6));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad fixed threshold in method id: " + id);
      }
      if (!(spec.threshold > 0.0 && spec.threshold < 1.0)) {
        throw std::invalid_argument("fixed threshold must lie in (0,1)");
      }
    }
  } else {
    throw std::invalid_argument("unknown method id: " + id);
  }
  return spec;
}

RepRun run_method_on_stream(const SimConfig& cfg, const MethodSpec& method,
                            const StreamData& stream) {
  const std::size_t burn = static_cast<std::size_t>(cfg.burn_in);
  const std::size_t m = static_cast<std::size_t>(cfg.m);
  if (stream.x.size() != burn + m) {
    throw std::invalid_argument("stream length does not match config");
  }
  const NullParams null{};  // simulated null is standard normal

  RepRun run;
  run.decisions.assign(m, 0);

  switch (method.kind) {
    case MethodSpec::Kind::sast_or:
    case MethodSpec::Kind::sast_or_nob: {
      MixtureParams params;
      const PiPattern pattern = cfg.pattern;
      const std::int64_t stream_m = cfg.m;
      params.pi = [pattern, stream_m](std::int64_t t) {
        return pattern.value(t, stream_m);
      };
      params.null = null;
      params.alt = AltParams{cfg.mu, 1.0};
      OracleSast engine(cfg.alpha, params, cfg.d,
                        method.kind == MethodSpec::Kind::sast_or);
      run.records.reserve(m);
      for (std::size_t i = 0; i < m; ++i) {
        const DecisionRecord rec = engine.step(stream.x[burn + i]);
        run.decisions[i] = rec.reject ? 1 : 0;
        run.records.push_back(rec);
      }
      break;
    }
    case MethodSpec::Kind::sast_dd:
    case MethodSpec::Kind::sast_dd_nob: {
      DataDrivenConfig dd;
      dd.alpha = cfg.alpha;
      dd.d = cfg.d;
      dd.burn_in = cfg.burn_in;
      dd.refresh = cfg.refresh;
      dd.null = null;
      dd.tau = cfg.tau;
      dd.barrier = method.kind == MethodSpec::Kind::sast_dd;
      DataDrivenSast engine(dd);
      for (std::size_t i = 0; i < burn; ++i) engine.observe(stream.x[i]);
      run.records.reserve(m);
      for (std::size_t i = 0; i < m; ++i) {
        const DecisionRecord rec = engine.step(stream.x[burn + i]);
        run.decisions[i] = rec.reject ? 1 : 0;
        run.records.push_back(rec);
      }
      break;
    }
    case MethodSpec::Kind::lond: {
      BaselineState state;
      const GammaSequence gamma = GammaSequence::inverse_square();
      for (std::size_t i = 0; i < m; ++i) {
        const double p = z_to_pvalue(stream.x[burn + i], null);
        run.decisions[i] = lond_step(state, p, cfg.alpha, gamma) ? 1 : 0;
      }
      break;
    }
    case MethodSpec::Kind::lordpp: {
      BaselineState state;
      const GammaSequence gamma = GammaSequence::inverse_square();
      const double w0 = cfg.alpha / 2.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double p = z_to_pvalue(stream.x[burn + i], null);
        run.decisions[i] =
            lordpp_step(state, p, cfg.alpha, gamma, w0) ? 1 : 0;
      }
      break;
    }
    case MethodSpec::Kind::fixed: {
      for (std::size_t i = 0; i < m; ++i) {
        const double p = z_to_pvalue(stream.x[burn + i], null);
        run.decisions[i] = fixed_threshold_step(p, method.threshold) ? 1 : 0;
      }
      break;
    }
  }
  return run;
}

std::map<std::string, EvalCurve> run_replications(
    const SimConfig& cfg, const std::vector<std::string>& methods,
    unsigned threads) {
  cfg.validate();
  if (methods.empty()) throw std::invalid_argument("methods list is empty");
  std::vector<MethodSpec> specs;
  specs.reserve(methods.size());
  for (const std::string& id : methods) specs.push_back(MethodSpec::parse(id));

  const std::vector<std::int64_t> cps = cfg.resolved_checkpoints();
  const std::size_t n_methods = specs.size();
  const std::size_t n_reps = static_cast<std::size_t>(cfg.reps);

  // results[method][rep] holds that replication's FDP/MDP per checkpoint.
  std::vector<std::vector<RepEval>> results(
      n_methods, std::vector<RepEval>(n_reps));

  const auto worker = [&](std::size_t rep_begin, std::size_t rep_end) {
    for (std::size_t rep = rep_begin; rep < rep_end; ++rep) {
      const StreamData stream =
          generate_stream(cfg, rep_seed(cfg.seed, static_cast<std::int64_t>(rep)));
      const std::vector<std::uint8_t> theta_main(
          stream.theta.begin() + cfg.burn_in, stream.theta.end());
      for (std::size_t mi = 0; mi < n_methods; ++mi) {
        const RepRun run = run_method_on_stream(cfg, specs[mi], stream);
        results[mi][rep] = evaluate(run.decisions, theta_main, cps);
      }
    }
  };

  unsigned n_threads = threads == 0 ? std::thread::hardware_concurrency()
                                    : threads;
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_reps));

  if (n_threads <= 1) {
    worker(0, n_reps);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_reps + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n_reps, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (std::thread& th : pool) th.join();
  }

  std::map<std::string, EvalCurve> curves;
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    EvalCurve curve;
    curve.checkpoints = cps;
    curve.fdr.assign(cps.size(), 0.0);
    curve.mdr.assign(cps.size(), 0.0);
    curve.fdr_stderr.assign(cps.size(), 0.0);
    curve.mdr_stderr.assign(cps.size(), 0.0);
    for (std::size_t c = 0; c < cps.size(); ++c) {
      double mean_fdp = 0.0, mean_mdp = 0.0;
      for (std::size_t rep = 0; rep < n_reps; ++rep) {
        mean_fdp += results[mi][rep].fdp[c];
        mean_mdp += results[mi][rep].mdp[c];
      }
      mean_fdp /= static_cast<double>(n_reps);
      mean_mdp /= static_cast<double>(n_reps);
      double ss_fdp = 0.0, ss_mdp = 0.0;
      for (std::size_t rep = 0; rep < n_reps; ++rep) {
        ss_fdp += (results[mi][rep].fdp[c] - mean_fdp) *
                  (results[mi][rep].fdp[c] - mean_fdp);
        ss_mdp += (results[mi][rep].mdp[c] - mean_mdp) *
                  (results[mi][rep].mdp[c] - mean_mdp);
      }
      curve.fdr[c] = mean_fdp;
      curve.mdr[c] = mean_mdp;
      if (n_reps > 1) {
        const double n = static_cast<double>(n_reps);
        curve.fdr_stderr[c] = std::sqrt(ss_fdp / (n - 1.0) / n);
        curve.mdr_stderr[c] = std::sqrt(ss_mdp / (n - 1.0) / n);
      }
    }
    curves[specs[mi].id] = std::move(curve);
  }
  return curves;
}

}  // namespace sast
