#pragma once

#include <string>
#include <vector>

#include "irspnc/analysis.hpp"
#include "irspnc/irsopt.hpp"
#include "irspnc/types.hpp"

namespace irspnc {

enum class Experiment { BerRelayVsSnr, BerVsM, BerD1VsSnr, Single };
enum class PhaseMode { Optimal, Quantized, Random, None };
enum class Scheme { Pnc, Nnc };

std::string to_string(Experiment e);
std::string to_string(PhaseMode m);
std::string to_string(Scheme s);
std::string to_string(BeamformerRule r);
std::string to_string(NoiseConvention c);
Experiment parse_experiment(const std::string& s);
PhaseMode parse_phase_mode(const std::string& s);
Scheme parse_scheme(const std::string& s);
BeamformerRule parse_beamformer_rule(const std::string& s);
NoiseConvention parse_noise_convention(const std::string& s);

struct Series {
  Scheme scheme = Scheme::Pnc;
  PhaseMode mode = PhaseMode::Optimal;
  std::string name() const;
};

struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Single;
  std::vector<double> snr_db{0.0};
  std::vector<int> m_list{32};
  std::vector<Series> series;
  int trials_per_realization = 10000;
  int n_realizations = 200;
  uint64_t seed = 1;
  BeamformerRule beamformer = BeamformerRule::TrueMmse;
  NoiseConvention noise_convention = NoiseConvention::RealPart;
  SolverConfig solver;
  std::string output_dir = ".";
  int threads = 1;
  // Overrides the SNR-derived noise variance when >= 0 (e.g. exactly 0 for
  // the noiseless sanity case, which has no finite-dB representation).
  double noise_var_override = -1.0;

  void validate() const;
  /// Figure-style defaults: sweep grids and series sets per experiment.
  static ExperimentConfig defaults_for(Experiment e);
};

struct CurvePoint {
  double x = 0.0;
  double th_ber = 0.0;
  double th_se = 0.0;
  double mc_ber = 0.0;
  double mc_se = 0.0;
  long long mc_errors = 0;
  long long mc_trials = 0;
  int n_skipped = 0;
  int n_used = 0;
};

struct SeriesCurve {
  std::string name;
  std::vector<CurvePoint> points;
};

struct CurveSet {
  ExperimentConfig config;
  std::vector<SeriesCurve> series;

  /// Fraction of skipped (non-converged) realizations over all points.
  double skip_rate() const;
};

/// Runs the configured experiment. Deterministic given (config, seed),
/// independent of the thread count.
CurveSet run_experiment(const ExperimentConfig& cfg);

/// Writes one whitespace-separated .dat table per series (theory: `x y`;
/// Monte Carlo: `x y flag`, flag = 1 when fewer than 100 errors were seen)
/// plus a JSON run manifest. Files land in `dir`.
void write_curve(const CurveSet& curve, const std::string& dir);

/// Reads a run manifest back into a config (for byte-identical replay).
ExperimentConfig read_manifest(const std::string& path);

}  // namespace irspnc
