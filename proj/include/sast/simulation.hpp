#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sast/engine.hpp"
#include "sast/estimators.hpp"
#include "sast/model.hpp"

// Stream generation for the simulation settings, online FDR/MDR
// evaluation, and the replication runner.

namespace sast {

struct BlockSegment {
  std::int64_t lo = 0;  // half-open (lo, hi]
  std::int64_t hi = 0;
  double value = 0.0;
};

// Signal-proportion pattern over a stream of length m.
class PiPattern {
 public:
  static PiPattern constant(double pi);
  static PiPattern linear(double pi_lo, double pi_hi);
  static PiPattern sine();  // (sin(2 pi t / m) + 1) / 4
  static PiPattern blocks(double base, std::vector<BlockSegment> segments);
  static PiPattern custom(std::function<double(std::int64_t, std::int64_t)> fn);

  double value(std::int64_t t, std::int64_t m) const;

 private:
  PiPattern() = default;
  std::function<double(std::int64_t, std::int64_t)> fn_;
};

struct SimConfig {
  std::int64_t m = 5000;
  double mu = 3.0;
  double alpha = 0.05;
  PiPattern pattern = PiPattern::constant(0.05);
  std::int64_t reps = 200;
  std::uint64_t seed = 1;
  std::int64_t burn_in = 500;
  std::int64_t refresh = 200;
  std::int64_t d = 1000;
  std::vector<std::int64_t> checkpoints;  // empty: 1500..m step 500
  TauPolicy tau = TauPolicy::bh_adaptive();

  std::vector<std::int64_t> resolved_checkpoints() const;
  void validate() const;
};

// Sub-seed for one replication: a splitmix64 output at stream position
// rep+1 from the master seed, so results are independent of execution
// order.
std::uint64_t rep_seed(std::uint64_t seed, std::int64_t rep);

// theta and x over burn_in + m points; the burn-in prefix uses the
// pattern's t = 1 value.
struct StreamData {
  std::vector<std::uint8_t> theta;
  std::vector<double> x;
};

StreamData generate_stream(const SimConfig& cfg, std::uint64_t stream_seed);

// Per-replication false discovery / missed discovery proportions at each
// checkpoint. Inputs cover the main stream only (length m each).
struct RepEval {
  std::vector<double> fdp;
  std::vector<double> mdp;
};

RepEval evaluate(const std::vector<std::uint8_t>& decisions,
                 const std::vector<std::uint8_t>& theta,
                 const std::vector<std::int64_t>& checkpoints);

// Rule identifiers: sast-or, sast-dd, sast-or-nob, sast-dd-nob (barrier
// disabled), lond, lordpp, fixed or fixed:<threshold>.
struct MethodSpec {
  enum class Kind {
    sast_or,
    sast_dd,
    sast_or_nob,
    sast_dd_nob,
    lond,
    lordpp,
    fixed
  };
  Kind kind = Kind::sast_or;
  double threshold = 0.0001;  // fixed rule only
  std::string id;

  static MethodSpec parse(const std::string& id);
};

// One method on one generated stream. Decision records are populated for
// the SAST variants only.
struct RepRun {
  std::vector<std::uint8_t> decisions;  // length m
  std::vector<DecisionRecord> records;
};

RepRun run_method_on_stream(const SimConfig& cfg, const MethodSpec& method,
                            const StreamData& stream);

// Empirical FDR / MDR at the checkpoints, averaged over replications, with
// Monte-Carlo standard errors.
struct EvalCurve {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> fdr;
  std::vector<double> mdr;
  std::vector<double> fdr_stderr;
  std::vector<double> mdr_stderr;
};

// Runs every method on every replication (shared stream per replication)
// and aggregates. Replications are distributed over `threads` workers
// (0 = hardware concurrency); aggregation order is fixed by rep index.
std::map<std::string, EvalCurve> run_replications(
    const SimConfig& cfg, const std::vector<std::string>& methods,
    unsigned threads = 0);

}  // namespace sast
