#include "irspnc/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "irspnc/detect.hpp"
#include "irspnc/model.hpp"
#include "irspnc/numerics.hpp"

namespace irspnc {

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::BerRelayVsSnr: return "ber-relay-vs-snr";
    case Experiment::BerVsM: return "ber-vs-m";
    case Experiment::BerD1VsSnr: return "ber-d1-vs-snr";
    case Experiment::Single: return "single";
  }
  throw std::logic_error("bad experiment");
}

std::string to_string(PhaseMode m) {
  switch (m) {
    case PhaseMode::Optimal: return "optimal";
    case PhaseMode::Quantized: return "quantized";
    case PhaseMode::Random: return "random";
    case PhaseMode::None: return "none";
  }
  throw std::logic_error("bad phase mode");
}

std::string to_string(Scheme s) { return s == Scheme::Pnc ? "pnc" : "nnc"; }

std::string to_string(BeamformerRule r) {
  return r == BeamformerRule::TrueMmse ? "true-mmse" : "paper-eq8";
}

std::string to_string(NoiseConvention c) {
  return c == NoiseConvention::RealPart ? "real-part" : "complex";
}

Experiment parse_experiment(const std::string& s) {
  if (s == "ber-relay-vs-snr") return Experiment::BerRelayVsSnr;
  if (s == "ber-vs-m") return Experiment::BerVsM;
  if (s == "ber-d1-vs-snr") return Experiment::BerD1VsSnr;
  if (s == "single") return Experiment::Single;
  throw InvalidConfig("unknown experiment: " + s);
}

PhaseMode parse_phase_mode(const std::string& s) {
  if (s == "optimal") return PhaseMode::Optimal;
  if (s == "quantized") return PhaseMode::Quantized;
  if (s == "random") return PhaseMode::Random;
  if (s == "none") return PhaseMode::None;
  throw InvalidConfig("unknown phase mode: " + s);
}

Scheme parse_scheme(const std::string& s) {
  if (s == "pnc") return Scheme::Pnc;
  if (s == "nnc") return Scheme::Nnc;
  throw InvalidConfig("unknown scheme: " + s);
}

BeamformerRule parse_beamformer_rule(const std::string& s) {
  if (s == "true-mmse") return BeamformerRule::TrueMmse;
  if (s == "paper-eq8") return BeamformerRule::PaperEq8;
  throw InvalidConfig("unknown beamformer rule: " + s);
}

NoiseConvention parse_noise_convention(const std::string& s) {
  if (s == "real-part") return NoiseConvention::RealPart;
  if (s == "complex") return NoiseConvention::Complex;
  throw InvalidConfig("unknown noise convention: " + s);
}

std::string Series::name() const {
  std::string n = to_string(mode);
  if (scheme == Scheme::Nnc) n = "nnc-" + n;
  return n;
}

void ExperimentConfig::validate() const {
  if (trials_per_realization < 1) throw InvalidConfig("trials_per_realization must be >= 1");
  if (n_realizations < 1) throw InvalidConfig("n_realizations must be >= 1");
  if (threads < 1) throw InvalidConfig("threads must be >= 1");
  if (series.empty()) throw InvalidConfig("no series configured");
  if (m_list.empty()) throw InvalidConfig("m_list is empty");
  for (int m : m_list)
    if (m < 1) throw InvalidConfig("m must be >= 1");
  if (snr_db.empty()) throw InvalidConfig("snr_db is empty");
  for (double s : snr_db)
    if (!std::isfinite(s)) throw InvalidConfig("snr_db values must be finite");
}

ExperimentConfig ExperimentConfig::defaults_for(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::BerRelayVsSnr:
      cfg.snr_db.clear();
      for (double s = -30.0; s <= 20.0 + 1e-9; s += 5.0) cfg.snr_db.push_back(s);
      cfg.m_list = {32};
      cfg.series = {{Scheme::Pnc, PhaseMode::Optimal},
                    {Scheme::Pnc, PhaseMode::Quantized},
                    {Scheme::Pnc, PhaseMode::Random}};
      cfg.trials_per_realization = 10000;
      break;
    case Experiment::BerVsM:
      cfg.snr_db = {-15.0};
      cfg.m_list = {8, 16, 32, 64};
      cfg.series = {{Scheme::Pnc, PhaseMode::Optimal},
                    {Scheme::Pnc, PhaseMode::Random},
                    {Scheme::Pnc, PhaseMode::None}};
      cfg.trials_per_realization = 10000;
      break;
    case Experiment::BerD1VsSnr:
      cfg.snr_db.clear();
      for (double s = -10.0; s <= 20.0 + 1e-9; s += 2.5) cfg.snr_db.push_back(s);
      cfg.m_list = {32};
      cfg.series = {{Scheme::Nnc, PhaseMode::None},
                    {Scheme::Pnc, PhaseMode::None},
                    {Scheme::Pnc, PhaseMode::Random},
                    {Scheme::Pnc, PhaseMode::Quantized},
                    {Scheme::Pnc, PhaseMode::Optimal}};
      cfg.trials_per_realization = 100000;
      break;
    case Experiment::Single:
      cfg.snr_db = {0.0};
      cfg.m_list = {32};
      cfg.series = {{Scheme::Pnc, PhaseMode::Optimal}};
      cfg.n_realizations = 1;
      cfg.trials_per_realization = 10000;
      break;
  }
  return cfg;
}

double CurveSet::skip_rate() const {
  long long skipped = 0, total = 0;
  for (const auto& sc : series) {
    for (const auto& p : sc.points) {
      skipped += p.n_skipped;
      total += p.n_skipped + p.n_used;
    }
  }
  return total > 0 ? static_cast<double>(skipped) / static_cast<double>(total) : 0.0;
}

namespace {

constexpr uint64_t kStreamChannel = 0;
constexpr uint64_t kStreamPhases = 1;
constexpr uint64_t kStreamTrials = 2;

struct RealizationCell {
  bool skipped = false;
  double th_relay = 0.0;
  double th_d1 = 0.0;
  long long err_relay = 0;
  long long err_d1 = 0;
  long long trials = 0;
};

double nnc_relay_analytic(const CMat& h, const SystemParams& params, NoiseConvention conv) {
  const Beamformer g = mmse_beamformer(h, params, BeamformerRule::PaperEq8);
  const CMat w = g.g * h;
  const auto [v1, v2] = stream_noise_variances(g, params.noise_var);
  const double s1 = std::sqrt(detection_variance(v1, conv));
  const double s2 = std::sqrt(detection_variance(v2, conv));
  const double a = params.amplitude();
  double sum = 0.0;
  for (double sgn1 : {1.0, -1.0}) {
    for (double sgn2 : {1.0, -1.0}) {
      Eigen::Vector2cd x(sgn1 * a, sgn2 * a);
      Eigen::Vector2cd mu = w * x;
      const double p1 = q_function(sgn1 * mu[0].real() / s1);
      const double p2 = q_function(sgn2 * mu[1].real() / s2);
      sum += p1 * (1.0 - p2) + p2 * (1.0 - p1);
    }
  }
  return sum / 4.0;
}

// Substreams are keyed by realization only (not by sweep point), so all
// points of a sweep share channel draws and noise variates: common random
// numbers sharpen gain and monotonicity comparisons.
void compute_realization(const ExperimentConfig& cfg, const SystemParams& params,
                         int realization, bool want_d1,
                         std::vector<std::vector<RealizationCell>>& cells) {
  Rng rng_ch(substream_seed(cfg.seed, {static_cast<uint64_t>(realization), kStreamChannel}));
  const ChannelRealization ch = gen_channels(params, rng_ch);
  const double a = params.amplitude();
  const double sigma2 = params.noise_var;

  bool need_opt = false;
  for (const Series& s : cfg.series) {
    if (s.scheme == Scheme::Pnc &&
        (s.mode == PhaseMode::Optimal || s.mode == PhaseMode::Quantized)) {
      need_opt = true;
    }
  }
  std::optional<AlternatingResult> opt;
  bool opt_failed = false;
  if (need_opt) {
    try {
      opt = alternating_optimize(ch, params, cfg.solver, cfg.beamformer);
    } catch (const std::exception&) {
      opt_failed = true;
    }
  }

  for (size_t si = 0; si < cfg.series.size(); ++si) {
    const Series& series = cfg.series[si];
    RealizationCell& cell = cells[si][realization];
    const bool uses_opt = series.scheme == Scheme::Pnc &&
                          (series.mode == PhaseMode::Optimal || series.mode == PhaseMode::Quantized);
    if (uses_opt && opt_failed) {
      cell.skipped = true;
      continue;
    }
    try {
      CMat h;
      if (series.mode == PhaseMode::None) {
        h = ch.h_ur;
      } else {
        PhaseProfile v;
        switch (series.mode) {
          case PhaseMode::Optimal:
            v = opt->v;
            break;
          case PhaseMode::Quantized:
            v = quantize_phases(opt->v);
            break;
          case PhaseMode::Random: {
            Rng rng_ph(substream_seed(cfg.seed, {static_cast<uint64_t>(realization),
                                                 kStreamPhases, si}));
            v = random_phases(params.m_elements, rng_ph);
            break;
          }
          default:
            break;
        }
        h = effective_channel(ch, v);
      }

      // Detection-side quantities. The detector and the closed-form BER both
      // model stream i as y_i = x~_i + noise; the beamformer output is
      // y = B x~ + G n with B = G H D^-1, so each stream is normalized by its
      // diagonal gain B_ii (the relay knows G and H), and the effective
      // per-stream variance is the full residual power: thermal noise plus
      // cross-stream leakage 2P|B_ij|^2 (E[x~_j^2] = 2P). Without the gain
      // normalization the MMSE shrinkage at low SNR breaks the unit-gain
      // model; without the leakage term the model ignores the interference
      // that dominates errors when the channel is poorly equalized.
      Beamformer g_pnc;
      double dv1 = 0.0, dv2 = 0.0;
      Complex bg1{1.0, 0.0}, bg2{1.0, 0.0};
      if (series.scheme == Scheme::Pnc) {
        g_pnc = (series.mode == PhaseMode::Optimal && opt) ? opt->g
                                                           : mmse_beamformer(h, params, cfg.beamformer);
        const CMat b = g_pnc.g * h * (0.5 * sum_difference_matrix().cast<Complex>());
        bg1 = b(0, 0);
        bg2 = b(1, 1);
        const double ag1 = std::max(std::abs(bg1), 1e-150);
        const double ag2 = std::max(std::abs(bg2), 1e-150);
        const auto [v1, v2] = stream_noise_variances(g_pnc, sigma2);
        // Leakage reaches the real decision statistic as Re(B_ij/B_ii)·x~_j,
        // so under the real-part convention its variance is 2P·Re(c)^2 exactly
        // (the complex convention uses the literal power 2P·|c|^2).
        const Complex c1 = b(0, 1) / (std::abs(bg1) > 1e-150 ? bg1 : Complex{1e-150, 0.0});
        const Complex c2 = b(1, 0) / (std::abs(bg2) > 1e-150 ? bg2 : Complex{1e-150, 0.0});
        const bool re = cfg.noise_convention == NoiseConvention::RealPart;
        const double leak1 =
            2.0 * params.p_tx * (re ? c1.real() * c1.real() : std::norm(c1));
        const double leak2 =
            2.0 * params.p_tx * (re ? c2.real() * c2.real() : std::norm(c2));
        dv1 = detection_variance(v1, cfg.noise_convention) / (ag1 * ag1) + leak1;
        dv2 = detection_variance(v2, cfg.noise_convention) / (ag2 * ag2) + leak2;
        cell.th_relay = sigma2 > 0.0 ? relay_xor_ber(std::sqrt(dv1), std::sqrt(dv2), a) : 0.0;
      } else {
        cell.th_relay = sigma2 > 0.0 ? nnc_relay_analytic(h, params, cfg.noise_convention) : 0.0;
      }

      if (want_d1) {
        if (sigma2 > 0.0) {
          LinkBerSet bers;
          bers.p_xor_relay = cell.th_relay;
          bers.p_s1_d1 =
              link_ber(detection_variance(sigma2 / std::norm(ch.h_s1_d1), cfg.noise_convention), a);
          bers.p_r_d1 = link_ber(
              detection_variance(sigma2 / ch.h_r_d1.squaredNorm(), cfg.noise_convention), a);
          cell.th_d1 = d1_ber_combine(bers);
        } else {
          cell.th_d1 = 0.0;
        }
      }

      // Monte Carlo over symbol trials on this realization.
      Beamformer g_nnc;
      if (series.scheme == Scheme::Nnc) {
        g_nnc = mmse_beamformer(h, params, BeamformerRule::PaperEq8);
      }
      const CMat& gmat = series.scheme == Scheme::Pnc ? g_pnc.g : g_nnc.g;
      // y = G H x + G n; the signal part takes only four values.
      Eigen::Vector2cd y_sig[2][2];
      for (int b1 = 0; b1 < 2; ++b1) {
        for (int b2 = 0; b2 < 2; ++b2) {
          Eigen::Vector2cd x(a * (1.0 - 2.0 * b1), a * (1.0 - 2.0 * b2));
          y_sig[b1][b2] = gmat * (h * x);
        }
      }
      const double sigma = std::sqrt(sigma2);

      Rng rng_mc(substream_seed(cfg.seed, {static_cast<uint64_t>(realization),
                                           kStreamTrials, si}));
      cell.trials = cfg.trials_per_realization;
      for (long long t = 0; t < cell.trials; ++t) {
        const int b1 = rng_mc.bit();
        const int b2 = rng_mc.bit();
        const int true_xor = (b1 != b2) ? 1 : -1;
        Eigen::Vector2cd n(params.noise_mean + sigma * rng_mc.cnormal(),
                           params.noise_mean + sigma * rng_mc.cnormal());
        const Eigen::Vector2cd y = y_sig[b1][b2] + gmat * n;

        int xor_hat;
        if (series.scheme == Scheme::Pnc) {
          if (sigma2 > 0.0) {
            const Eigen::Vector2cd y_norm(
                y[0] / (std::abs(bg1) > 1e-150 ? bg1 : Complex{1e-150, 0.0}),
                y[1] / (std::abs(bg2) > 1e-150 ? bg2 : Complex{1e-150, 0.0}));
            RelayObservation obs{y_norm, dv1, dv2, a};
            xor_hat = decide_xor(exact_llr_xor(obs));
          } else {
            // Noiseless: the stream nearer zero carries the sum.
            xor_hat = std::abs(y[1].real()) >= std::abs(y[0].real()) ? 1 : -1;
          }
        } else {
          const int x1 = y[0].real() >= 0.0 ? 1 : -1;
          const int x2 = y[1].real() >= 0.0 ? 1 : -1;
          xor_hat = -x1 * x2;
        }
        if (xor_hat != true_xor) ++cell.err_relay;

        if (want_d1) {
          const LinkObservation obs_r = dest_link_transmit(
              a * xor_hat, ch.h_r_d1, sigma2, cfg.noise_convention, rng_mc);
          const int xor_d1 = decide_bpsk(obs_r);
          const double x1_sym = 1.0 - 2.0 * b1;
          const LinkObservation obs_s = dest_link_transmit(
              a * x1_sym, ch.h_s1_d1, sigma2, cfg.noise_convention, rng_mc);
          const int x1_hat = decide_bpsk(obs_s);
          const int x2_hat = xor_combine(x1_hat, xor_d1);
          const int true_x2 = (b2 == 0) ? 1 : -1;
          if (x2_hat != true_x2) ++cell.err_d1;
        }
      }
    } catch (const std::exception&) {
      cell.skipped = true;
    }
  }
}

CurvePoint aggregate(const std::vector<RealizationCell>& cells, double x, bool d1) {
  CurvePoint pt;
  pt.x = x;
  std::vector<double> th, mc;
  for (const RealizationCell& c : cells) {
    if (c.skipped) {
      ++pt.n_skipped;
      continue;
    }
    th.push_back(d1 ? c.th_d1 : c.th_relay);
    const long long err = d1 ? c.err_d1 : c.err_relay;
    mc.push_back(static_cast<double>(err) / static_cast<double>(c.trials));
    pt.mc_errors += err;
    pt.mc_trials += c.trials;
    ++pt.n_used;
  }
  auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
    mean = 0.0;
    se = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= v.size();
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / (v.size() - 1) / v.size());
    }
  };
  mean_se(th, pt.th_ber, pt.th_se);
  mean_se(mc, pt.mc_ber, pt.mc_se);
  return pt;
}

}  // namespace

CurveSet run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool want_d1 =
      cfg.experiment == Experiment::BerD1VsSnr || cfg.experiment == Experiment::Single;
  const bool sweep_m = cfg.experiment == Experiment::BerVsM;

  struct Point {
    double x;
    SystemParams params;
  };
  std::vector<Point> points;
  auto noise_var_for = [&](double snr) {
    return cfg.noise_var_override >= 0.0 ? cfg.noise_var_override
                                         : std::pow(10.0, -snr / 10.0);
  };
  if (sweep_m) {
    for (int m : cfg.m_list) {
      SystemParams p;
      p.m_elements = m;
      p.noise_var = noise_var_for(cfg.snr_db.front());
      points.push_back({static_cast<double>(m), p});
    }
  } else {
    for (double snr : cfg.snr_db) {
      SystemParams p;
      p.m_elements = cfg.m_list.front();
      p.noise_var = noise_var_for(snr);
      points.push_back({snr, p});
    }
  }

  CurveSet out;
  out.config = cfg;
  const size_t n_series = cfg.series.size();
  std::vector<std::vector<std::vector<RealizationCell>>> all(points.size());

  for (size_t pi = 0; pi < points.size(); ++pi) {
    auto& cells = all[pi];
    cells.assign(n_series, std::vector<RealizationCell>(cfg.n_realizations));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= cfg.n_realizations) return;
        try {
          compute_realization(cfg, points[pi].params, r, want_d1, cells);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    const int n_threads = std::min(cfg.threads, cfg.n_realizations);
    if (n_threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
  }

  for (size_t si = 0; si < n_series; ++si) {
    const std::string base = cfg.series[si].name();
    if (cfg.experiment == Experiment::Single) {
      SeriesCurve relay{base + "_relay", {}};
      SeriesCurve d1{base + "_d1", {}};
      for (size_t pi = 0; pi < points.size(); ++pi) {
        relay.points.push_back(aggregate(all[pi][si], points[pi].x, false));
        d1.points.push_back(aggregate(all[pi][si], points[pi].x, true));
      }
      out.series.push_back(std::move(relay));
      out.series.push_back(std::move(d1));
    } else {
      SeriesCurve sc{base, {}};
      for (size_t pi = 0; pi < points.size(); ++pi) {
        sc.points.push_back(aggregate(all[pi][si], points[pi].x, want_d1));
      }
      out.series.push_back(std::move(sc));
    }
  }
  return out;
}

namespace {

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = to_string(cfg.experiment);
  j["snr_db"] = cfg.snr_db;
  j["m_list"] = cfg.m_list;
  nlohmann::json series = nlohmann::json::array();
  for (const Series& s : cfg.series) {
    series.push_back({{"scheme", to_string(s.scheme)}, {"phase_mode", to_string(s.mode)}});
  }
  j["series"] = series;
  j["trials_per_realization"] = cfg.trials_per_realization;
  j["n_realizations"] = cfg.n_realizations;
  j["seed"] = cfg.seed;
  j["beamformer"] = to_string(cfg.beamformer);
  j["noise_convention"] = to_string(cfg.noise_convention);
  j["solver"] = {{"gamma", cfg.solver.gamma},
                 {"delta", cfg.solver.delta},
                 {"iter_max", cfg.solver.iter_max},
                 {"sdp_tol", cfg.solver.sdp_tol},
                 {"sdp_iter_max", cfg.solver.sdp_iter_max},
                 {"outer_iter_max", cfg.solver.outer_iter_max},
                 {"gamma_lo_scale", cfg.solver.gamma_lo_scale},
                 {"gamma_hi_scale", cfg.solver.gamma_hi_scale},
                 {"rank_gap_rel", cfg.solver.rank_gap_rel}};
  j["output_dir"] = cfg.output_dir;
  j["threads"] = cfg.threads;
  j["noise_var_override"] = cfg.noise_var_override;
  return j;
}

}  // namespace

void write_curve(const CurveSet& curve, const std::string& dir) {
  if (curve.series.empty()) throw std::invalid_argument("write_curve: empty curve set");
  std::filesystem::create_directories(dir);
  const std::string exp = to_string(curve.config.experiment);
  char buf[64];
  for (const SeriesCurve& sc : curve.series) {
    {
      std::ofstream th(dir + "/" + exp + "_" + sc.name + "_th.dat", std::ios::binary);
      for (const CurvePoint& p : sc.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p.x, p.th_ber);
        th << buf;
      }
    }
    {
      std::ofstream mc(dir + "/" + exp + "_" + sc.name + "_mc.dat", std::ios::binary);
      for (const CurvePoint& p : sc.points) {
        const int flag = p.mc_errors < 100 ? 1 : 0;
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", p.x, p.mc_ber, flag);
        mc << buf;
      }
    }
  }
  std::ofstream manifest(dir + "/" + exp + "_manifest.json", std::ios::binary);
  manifest << config_to_json(curve.config).dump(2) << "\n";
}

ExperimentConfig read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open manifest: " + path);
  nlohmann::json j;
  in >> j;
  ExperimentConfig cfg;
  cfg.experiment = parse_experiment(j.at("experiment").get<std::string>());
  cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
  cfg.m_list = j.at("m_list").get<std::vector<int>>();
  cfg.series.clear();
  for (const auto& s : j.at("series")) {
    cfg.series.push_back({parse_scheme(s.at("scheme").get<std::string>()),
                          parse_phase_mode(s.at("phase_mode").get<std::string>())});
  }
  cfg.trials_per_realization = j.at("trials_per_realization").get<int>();
  cfg.n_realizations = j.at("n_realizations").get<int>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.beamformer = parse_beamformer_rule(j.at("beamformer").get<std::string>());
  cfg.noise_convention = parse_noise_convention(j.at("noise_convention").get<std::string>());
  const auto& s = j.at("solver");
  cfg.solver.gamma = s.at("gamma").get<double>();
  cfg.solver.delta = s.at("delta").get<double>();
  cfg.solver.iter_max = s.at("iter_max").get<int>();
  cfg.solver.sdp_tol = s.at("sdp_tol").get<double>();
  cfg.solver.sdp_iter_max = s.at("sdp_iter_max").get<int>();
  cfg.solver.outer_iter_max = s.at("outer_iter_max").get<int>();
  cfg.solver.gamma_lo_scale = s.at("gamma_lo_scale").get<double>();
  cfg.solver.gamma_hi_scale = s.at("gamma_hi_scale").get<double>();
  cfg.solver.rank_gap_rel = s.at("rank_gap_rel").get<double>();
  cfg.output_dir = j.at("output_dir").get<std::string>();
  cfg.threads = j.at("threads").get<int>();
  cfg.noise_var_override = j.value("noise_var_override", -1.0);
  return cfg;
}

}  // namespace irspnc
