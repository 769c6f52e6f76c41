#pragma once

#include <vector>

#include "irspnc/beamform.hpp"
#include "irspnc/rng.hpp"
#include "irspnc/types.hpp"

namespace irspnc {

/// (M+1)x(M+1) Hermitian PSD matrix with unit diagonal from matrix lifting.
struct LiftedMatrix {
  CMat v_mat;

  static LiftedMatrix lift(const PhaseProfile& v);
  bool feasible(double tol = 1e-8) const;
};

struct SolverConfig {
  double gamma = -1.0;       // < 0 selects the penalty weight automatically
  double delta = 1e-4;       // CCP / alternating-loop convergence threshold
  int iter_max = 50;         // CCP iteration cap
  double sdp_tol = 1e-6;     // ADMM primal/dual residual tolerance
  int sdp_iter_max = 50000;  // ADMM iteration cap
  int outer_iter_max = 200;  // alternating-loop cap; slow creep near
                             // convergence can take ~100 iterations
  double gamma_lo_scale = 1e-3;  // gamma search range, times ||A||_F
  double gamma_hi_scale = 1e3;
  double rank_gap_rel = 1e-3;    // rank-1 criterion: tr(V) - lambda1 <= rel * tr(V)
};

struct NonConvergence : std::runtime_error {
  NonConvergence(const std::string& what, CMat last, double primal, double dual)
      : std::runtime_error(what), last_iterate(std::move(last)),
        primal_residual(primal), dual_residual(dual) {}
  CMat last_iterate;
  double primal_residual;
  double dual_residual;
};

struct RangeExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// tr(A V) + gamma (tr(V) - lambda1(V)); the exact penalized objective.
double penalized_objective(const LiftedObjective& obj, double gamma, const LiftedMatrix& v);

/// Reusable ADMM iterates (split variable, scaled dual, penalty). Passing the
/// state of a previous solve of a nearby problem cuts the iteration count by
/// an order of magnitude; correctness does not depend on it.
struct AdmmState {
  CMat z, u;
  double rho = -1.0;
};

/// One convex subproblem of the CCP: minimize tr(A V) + gamma (tr V - tr(V u1 u1^H))
/// over unit-diagonal PSD V, where u1 is the top eigenvector of v_prev.
/// Solved by ADMM; v_prev also warm-starts the iteration.
LiftedMatrix solve_inner_sdp(const LiftedObjective& obj, double gamma,
                             const LiftedMatrix& v_prev, const SolverConfig& cfg,
                             AdmmState* state = nullptr);

struct CcpTrace {
  std::vector<double> penalized_objectives;  // value after each inner solve
  int iterations = 0;
  bool converged = false;
};

/// Penalized convex-concave loop for the IRS phase problem at fixed G.
LiftedMatrix ccp_optimize(const LiftedObjective& obj, const SolverConfig& cfg,
                          const PhaseProfile& v_init, CcpTrace* trace = nullptr,
                          AdmmState* state = nullptr);

/// First M entries of the last column of V, projected to unit modulus.
/// Zero entries map to phase 0.
PhaseProfile extract_phases(const LiftedMatrix& v);

/// Smallest penalty weight (within a factor 2) whose CCP output meets the
/// rank-1 gap criterion; bisection over [lo, hi] * ||A||_F.
double choose_gamma(const LiftedObjective& obj, const SolverConfig& cfg);

struct AlternatingResult {
  PhaseProfile v;
  Beamformer g;
  double mse = 0.0;
  double gamma = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  std::vector<double> mse_history;  // mse_exact after each G update
};

/// Alternating loop: MMSE beamformer update, then CCP phase update, until
/// ||v_{k+1}-v_k||^2 + ||G_{k+1}-G_k||^2_F < delta. On hitting the outer cap
/// the best iterate found is returned with converged = false.
AlternatingResult alternating_optimize(const ChannelRealization& ch, const SystemParams& params,
                                       const SolverConfig& cfg,
                                       BeamformerRule rule = BeamformerRule::TrueMmse);

/// Map each phase to the nearer of {0, pi}; exact ties go to 0.
PhaseProfile quantize_phases(const PhaseProfile& v);

/// Phases i.i.d. uniform on [0, 2pi).
PhaseProfile random_phases(int m, Rng& rng);

}  // namespace irspnc
