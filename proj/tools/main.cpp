// Command-line front end: batch simulation, strict line-by-line streaming
// decisions, and the oracle threshold.
//
// Exit codes: 0 ok, 2 config error, 3 runtime/data error.

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sast/baselines.hpp"
#include "sast/engine.hpp"
#include "sast/model.hpp"
#include "sast/offline.hpp"
#include "sast/simulation.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

template <typename T>
T field_as(const json& j, const std::string& field) {
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + field + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  return field_as<T>(j, field);
}

sast::PiPattern parse_pattern(const json& j) {
  const std::string kind = field_as<std::string>(j, "kind");
  try {
    if (kind == "constant") {
      return sast::PiPattern::constant(field_as<double>(j, "pi"));
    }
    if (kind == "linear") {
      return sast::PiPattern::linear(field_as<double>(j, "lo"),
                                     field_as<double>(j, "hi"));
    }
    if (kind == "sine") {
      return sast::PiPattern::sine();
    }
    if (kind == "block") {
      std::vector<sast::BlockSegment> segments;
      for (const json& seg : field_as<json>(j, "segments")) {
        segments.push_back(sast::BlockSegment{
            field_as<std::int64_t>(seg, "lo"),
            field_as<std::int64_t>(seg, "hi"), field_as<double>(seg, "pi")});
      }
      return sast::PiPattern::blocks(field_as<double>(j, "base"),
                                     std::move(segments));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'pattern': ") + e.what());
  }
  throw ConfigError("field 'pattern.kind': unknown kind '" + kind + "'");
}

sast::TauPolicy parse_tau(const json& j) {
  const std::string mode = field_as<std::string>(j, "mode");
  if (mode == "bh") return sast::TauPolicy::bh_adaptive();
  if (mode == "fixed") {
    return sast::TauPolicy::fixed_tau(field_or<double>(j, "tau", 0.5));
  }
  throw ConfigError("field 'tau.mode': unknown mode '" + mode + "'");
}

struct SimulateJob {
  sast::SimConfig cfg;
  std::vector<std::string> methods;
};

SimulateJob parse_simulate_config(const json& j) {
  static const std::vector<std::string> known{
      "m",       "mu",   "alpha",       "pattern", "reps",    "seed",
      "burn_in", "refresh", "d",        "checkpoints", "tau", "methods"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown field '" + key + "'");
    }
  }
  SimulateJob job;
  job.cfg.m = field_or<std::int64_t>(j, "m", 5000);
  job.cfg.mu = field_or<double>(j, "mu", 3.0);
  job.cfg.alpha = field_or<double>(j, "alpha", 0.05);
  if (j.contains("pattern")) job.cfg.pattern = parse_pattern(j.at("pattern"));
  job.cfg.reps = field_or<std::int64_t>(j, "reps", 200);
  job.cfg.seed = field_or<std::uint64_t>(j, "seed", 1);
  job.cfg.burn_in = field_or<std::int64_t>(j, "burn_in", 500);
  job.cfg.refresh = field_or<std::int64_t>(j, "refresh", 200);
  job.cfg.d = field_or<std::int64_t>(j, "d", 1000);
  job.cfg.checkpoints =
      field_or<std::vector<std::int64_t>>(j, "checkpoints", {});
  if (j.contains("tau")) job.cfg.tau = parse_tau(j.at("tau"));
  job.methods = field_as<std::vector<std::string>>(j, "methods");
  if (job.methods.empty()) throw ConfigError("field 'methods': empty list");
  try {
    job.cfg.validate();
    for (const std::string& id : job.methods) sast::MethodSpec::parse(id);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return job;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override, unsigned threads,
                 int precision) {
  SimulateJob job = parse_simulate_config(parse_json_file(config_path));
  if (seed_override) job.cfg.seed = *seed_override;

  const auto curves = sast::run_replications(job.cfg, job.methods, threads);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot open output file: " + out_path);
    out = &file;
  }
  *out << "method,t,fdr,mdr,stderr_fdr,stderr_mdr\n";
  for (const std::string& id : job.methods) {
    const sast::EvalCurve& c = curves.at(id);
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
      *out << id << ',' << c.checkpoints[i] << ','
           << format_number(c.fdr[i], precision) << ','
           << format_number(c.mdr[i], precision) << ','
           << format_number(c.fdr_stderr[i], precision) << ','
           << format_number(c.mdr_stderr[i], precision) << '\n';
    }
  }
  out->flush();
  return kExitOk;
}

// Reads one line from fd 0 a byte at a time, so no input beyond the
// current line is ever consumed (the streaming contract).
bool read_line_strict(std::string& out) {
  out.clear();
  char ch;
  while (true) {
    const ssize_t n = read(STDIN_FILENO, &ch, 1);
    if (n == 0) return !out.empty();  // EOF: deliver a final unterminated line
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (ch == '\n') return true;
    out.push_back(ch);
  }
}

struct StreamOptions {
  double alpha = 0.05;
  std::string method = "sast-dd";
  double null_mean = 0.0;
  double null_sd = 1.0;
  std::int64_t d = 1000;
  std::int64_t burn_in = 500;
  std::int64_t refresh = 200;
  std::string input = "z";
  std::string tau = "bh";
  double threshold = 0.0001;
  std::string model_path;
  std::uint64_t seed = 1;
  double w0 = -1.0;  // default alpha/2
  std::string gamma_seq = "inverse-square";
  int precision = 6;
};

sast::TauPolicy tau_from_flag(const std::string& flag) {
  if (flag == "bh") return sast::TauPolicy::bh_adaptive();
  if (flag.rfind("fixed:", 0) == 0) {
    try {
      return sast::TauPolicy::fixed_tau(std::stod(flag.substr(6)));
    } catch (const std::exception&) {
      throw ConfigError("bad --tau value: " + flag);
    }
  }
  throw ConfigError("bad --tau value: " + flag + " (use bh or fixed:<v>)");
}

int cmd_stream(const StreamOptions& opt) {
  const sast::NullParams null{opt.null_mean, opt.null_sd};
  const bool input_is_p = opt.input == "p";
  if (opt.input != "z" && opt.input != "p") {
    throw ConfigError("--input must be z or p");
  }

  const sast::GammaSequence gamma = opt.gamma_seq == "log"
                                        ? sast::GammaSequence::log_style()
                                        : sast::GammaSequence::inverse_square();
  const double w0 = opt.w0 > 0.0 ? opt.w0 : opt.alpha / 2.0;

  std::optional<sast::DataDrivenSast> dd;
  std::optional<sast::OracleSast> oracle;
  sast::BaselineState baseline;

  enum class Rule { dd, oracle, lond, lordpp, fixed } rule;
  if (opt.method == "sast-dd") {
    rule = Rule::dd;
    sast::DataDrivenConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.d = opt.d;
    cfg.burn_in = opt.burn_in;
    cfg.refresh = opt.refresh;
    cfg.null = null;
    cfg.tau = tau_from_flag(opt.tau);
    dd.emplace(cfg);
  } else if (opt.method == "sast-or") {
    rule = Rule::oracle;
    if (opt.model_path.empty()) {
      throw ConfigError("sast-or requires --model <json>");
    }
    const json mj = parse_json_file(opt.model_path);
    const double pi = field_as<double>(mj, "pi");
    const double mu = field_as<double>(mj, "mu");
    const double alt_sd = field_or<double>(mj, "alt_sd", 1.0);
    try {
      oracle.emplace(opt.alpha,
                     sast::MixtureParams::constant(
                         pi, null, sast::AltParams{mu, alt_sd}),
                     opt.d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (opt.method == "lond") {
    rule = Rule::lond;
  } else if (opt.method == "lordpp") {
    rule = Rule::lordpp;
  } else if (opt.method == "fixed") {
    rule = Rule::fixed;
  } else {
    throw ConfigError("unknown --method: " + opt.method);
  }

  std::mt19937_64 coin_rng(opt.seed);
  std::bernoulli_distribution coin(0.5);

  const auto emit = [&](const std::string& index, const std::string& value,
                        double clfdr, double barrier, const char* decision) {
    std::cout << index << ',' << value << ','
              << format_number(clfdr, opt.precision) << ','
              << format_number(barrier, opt.precision) << ',' << decision
              << '\n';
    std::cout.flush();
  };
  const auto emit_error = [&]() {
    std::cout << ",,,,error\n";
    std::cout.flush();
  };

  std::string line;
  while (read_line_strict(line)) {
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      emit_error();
      continue;
    }
    const std::string index = line.substr(0, comma);
    const std::string value_text = line.substr(comma + 1);
    double value;
    try {
      std::size_t used = 0;
      value = std::stod(value_text, &used);
      while (used < value_text.size() &&
             std::isspace(static_cast<unsigned char>(value_text[used]))) {
        ++used;
      }
      if (used != value_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      emit_error();
      continue;
    }

    try {
      double z, p;
      if (input_is_p) {
        if (!(value > 0.0 && value <= 1.0)) {
          emit_error();
          continue;
        }
        p = value;
        z = sast::p_to_z_randomized(value, coin(coin_rng));
      } else {
        z = value;
        p = sast::z_to_pvalue(value, null);
      }

      switch (rule) {
        case Rule::dd: {
          if (!dd->ready()) {
            dd->observe(z);
            break;  // burn-in lines produce no output
          }
          const sast::DecisionRecord rec = dd->step(z);
          emit(index, value_text, rec.clfdr_used, rec.barrier,
               rec.reject ? "reject" : "accept");
          break;
        }
        case Rule::oracle: {
          const sast::DecisionRecord rec = oracle->step(z);
          emit(index, value_text, rec.clfdr_used, rec.barrier,
               rec.reject ? "reject" : "accept");
          break;
        }
        case Rule::lond: {
          const double level = sast::lond_level(baseline, opt.alpha, gamma);
          const bool rej = sast::lond_step(baseline, p, opt.alpha, gamma);
          emit(index, value_text, p, level, rej ? "reject" : "accept");
          break;
        }
        case Rule::lordpp: {
          const double level =
              sast::lordpp_level(baseline, opt.alpha, gamma, w0);
          const bool rej =
              sast::lordpp_step(baseline, p, opt.alpha, gamma, w0);
          emit(index, value_text, p, level, rej ? "reject" : "accept");
          break;
        }
        case Rule::fixed: {
          const bool rej = sast::fixed_threshold_step(p, opt.threshold);
          emit(index, value_text, p, opt.threshold,
               rej ? "reject" : "accept");
          break;
        }
      }
    } catch (const std::invalid_argument&) {
      emit_error();
    }
  }
  return kExitOk;
}

int cmd_gamma_or(double pi, double mu, double alpha, std::int64_t samples,
                 std::uint64_t seed, double null_mean, double null_sd,
                 double alt_sd) {
  const sast::GammaOrResult r = sast::oracle_threshold_gamma(
      pi, sast::NullParams{null_mean, null_sd}, sast::AltParams{mu, alt_sd},
      alpha, samples, seed);
  std::printf("gamma_or %.4f\n", r.gamma);
  std::printf("stderr %.6g\n", r.std_error);
  std::printf("samples %lld\n", static_cast<long long>(r.samples));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-adaptive sequential testing for online FDR control"};
  app.require_subcommand(1);

  // simulate
  std::string config_path, out_path;
  std::uint64_t seed_override = 0;
  unsigned threads = 0;
  int precision = 6;
  CLI::App* sim = app.add_subcommand("simulate", "Run replicated experiments");
  sim->add_option("config", config_path, "JSON config file")->required();
  sim->add_option("--out", out_path, "Output CSV path (default: stdout)");
  sim->add_option("--seed", seed_override, "Master seed override");
  sim->add_option("--threads", threads, "Worker threads (0 = hardware)");
  sim->add_option("--precision", precision, "Significant digits (default 6)");

  // stream
  StreamOptions sopt;
  CLI::App* st = app.add_subcommand(
      "stream", "Line-by-line decisions: index,value -> "
                "index,value,clfdr,barrier,decision");
  st->add_option("--alpha", sopt.alpha, "FDR level");
  st->add_option("--method", sopt.method,
                 "sast-dd|sast-or|lond|lordpp|fixed");
  st->add_option("--null-mean", sopt.null_mean, "Null mean");
  st->add_option("--null-sd", sopt.null_sd, "Null sd");
  st->add_option("--d", sopt.d, "Window length");
  st->add_option("--burn-in", sopt.burn_in, "Burn-in size (sast-dd)");
  st->add_option("--refresh", sopt.refresh, "Estimator refresh cadence");
  st->add_option("--input", sopt.input, "Input value type: z|p");
  st->add_option("--tau", sopt.tau, "Screening threshold: bh|fixed:<v>");
  st->add_option("--threshold", sopt.threshold, "Fixed-rule threshold");
  st->add_option("--model", sopt.model_path, "Model JSON for sast-or");
  st->add_option("--seed", sopt.seed, "Seed for p-to-z sign coins");
  st->add_option("--w0", sopt.w0, "LORD++ initial wealth (default alpha/2)");
  st->add_option("--gamma-seq", sopt.gamma_seq,
                 "Discount sequence: inverse-square|log");
  st->add_option("--precision", sopt.precision, "Significant digits");

  // gamma-or
  double g_pi = 0.5, g_mu = 3.0, g_alpha = 0.05;
  double g_null_mean = 0.0, g_null_sd = 1.0, g_alt_sd = 1.0;
  std::int64_t g_samples = 1000000;
  std::uint64_t g_seed = 1;
  CLI::App* go = app.add_subcommand("gamma-or",
                                    "Oracle simultaneous-testing threshold");
  go->add_option("--pi", g_pi, "Signal proportion")->required();
  go->add_option("--mu", g_mu, "Signal mean")->required();
  go->add_option("--alpha", g_alpha, "FDR level");
  go->add_option("--samples", g_samples, "Monte Carlo sample count");
  go->add_option("--seed", g_seed, "Monte Carlo seed");
  go->add_option("--null-mean", g_null_mean, "Null mean");
  go->add_option("--null-sd", g_null_sd, "Null sd");
  go->add_option("--alt-sd", g_alt_sd, "Alternative sd");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(config_path, out_path,
                          sim->count("--seed") > 0
                              ? std::optional<std::uint64_t>(seed_override)
                              : std::nullopt,
                          threads, precision);
    }
    if (st->parsed()) {
      return cmd_stream(sopt);
    }
    if (go->parsed()) {
      return cmd_gamma_or(g_pi, g_mu, g_alpha, g_samples, g_seed, g_null_mean,
                          g_null_sd, g_alt_sd);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sast::UndefinedThresholdError& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
