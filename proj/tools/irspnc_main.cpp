#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irspnc/harness.hpp"

namespace {

using irspnc::ExperimentConfig;
using irspnc::InvalidConfig;

std::vector<double> parse_snr_range(const std::string& arg) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : arg) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  try {
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() == 3) {
      const double a = std::stod(parts[0]);
      const double b = std::stod(parts[1]);
      const double step = std::stod(parts[2]);
      if (!(step > 0.0) || b < a) throw InvalidConfig("--snr-db: need A <= B and STEP > 0");
      std::vector<double> out;
      for (double x = a; x <= b + 1e-9 * std::abs(step); x += step) out.push_back(x);
      return out;
    }
  } catch (const std::invalid_argument&) {
  }
  throw InvalidConfig("--snr-db expects VALUE or A:B:STEP, got: " + arg);
}

std::vector<int> parse_m_list(const std::string& arg) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&]() {
    try {
      out.push_back(std::stoi(cur));
    } catch (const std::exception&) {
      throw InvalidConfig("--m expects an integer or comma list, got: " + cur);
    }
    cur.clear();
  };
  for (char c : arg) {
    if (c == ',') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

void print_summary(const irspnc::CurveSet& curve) {
  for (const auto& sc : curve.series) {
    std::printf("series %s\n", sc.name.c_str());
    for (const auto& p : sc.points) {
      std::printf("  x=%g  th=%.6g  mc=%.6g (%lld/%lld errors%s)  used=%d skipped=%d\n",
                  p.x, p.th_ber, p.mc_ber, p.mc_errors, p.mc_trials,
                  p.mc_errors < 100 ? ", low-count" : "", p.n_used, p.n_skipped);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS-assisted physical-layer network coding link simulator"};
  app.get_formatter()->column_width(34);

  std::string experiment;
  app.add_option("experiment", experiment,
                 "ber-relay-vs-snr | ber-vs-m | ber-d1-vs-snr | single | replay")
      ->required();
  std::string manifest_path;
  app.add_option("manifest", manifest_path, "manifest path (replay only)");

  std::string m_arg, snr_arg, phase_mode, scheme, beamformer, noise_conv, gamma, out_dir;
  int trials = -1, realizations = -1, threads = -1;
  uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--m", m_arg, "IRS element count (comma list for ber-vs-m)");
  app.add_option("--snr-db", snr_arg, "SNR in dB: VALUE or A:B:STEP");
  app.add_option("--phase-mode", phase_mode, "optimal|quantized|random|none");
  app.add_option("--scheme", scheme, "pnc|nnc");
  app.add_option("--trials", trials, "symbol trials per realization");
  app.add_option("--realizations", realizations, "channel realizations per point");
  app.add_option("--seed", seed, "master RNG seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--beamformer", beamformer, "true-mmse|paper-eq8");
  app.add_option("--noise-convention", noise_conv, "real-part|complex");
  app.add_option("--gamma", gamma, "rank-1 penalty weight: auto or a positive value");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);

    ExperimentConfig cfg;
    if (experiment == "replay") {
      if (manifest_path.empty()) throw InvalidConfig("replay requires a manifest path");
      cfg = irspnc::read_manifest(manifest_path);
    } else {
      cfg = ExperimentConfig::defaults_for(irspnc::parse_experiment(experiment));
    }

    if (!m_arg.empty()) cfg.m_list = parse_m_list(m_arg);
    if (!snr_arg.empty()) cfg.snr_db = parse_snr_range(snr_arg);
    if (!phase_mode.empty() || !scheme.empty()) {
      irspnc::Series s;
      s.scheme = scheme.empty() ? irspnc::Scheme::Pnc : irspnc::parse_scheme(scheme);
      s.mode = phase_mode.empty() ? irspnc::PhaseMode::Optimal
                                  : irspnc::parse_phase_mode(phase_mode);
      cfg.series = {s};
    }
    if (trials > 0) cfg.trials_per_realization = trials;
    if (realizations > 0) cfg.n_realizations = realizations;
    if (seed_set) cfg.seed = seed;
    if (!beamformer.empty()) cfg.beamformer = irspnc::parse_beamformer_rule(beamformer);
    if (!noise_conv.empty()) cfg.noise_convention = irspnc::parse_noise_convention(noise_conv);
    if (!gamma.empty()) {
      if (gamma == "auto") {
        cfg.solver.gamma = -1.0;
      } else {
        try {
          cfg.solver.gamma = std::stod(gamma);
        } catch (const std::exception&) {
          throw InvalidConfig("--gamma expects auto or a number, got: " + gamma);
        }
        if (!(cfg.solver.gamma > 0.0)) throw InvalidConfig("--gamma must be positive");
      }
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads > 0) cfg.threads = threads;

    const irspnc::CurveSet curve = irspnc::run_experiment(cfg);
    irspnc::write_curve(curve, cfg.output_dir);
    print_summary(curve);
    const double skip = curve.skip_rate();
    std::printf("wrote %zu series to %s (skip rate %.3g)\n", curve.series.size(),
                cfg.output_dir.c_str(), skip);
    if (skip > 0.10) {
      std::fprintf(stderr, "error: solver failed on %.1f%% of realizations (> 10%%)\n",
                   100.0 * skip);
      return 3;
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const InvalidConfig& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
