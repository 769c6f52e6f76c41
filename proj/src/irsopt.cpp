#include "irspnc/irsopt.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "irspnc/model.hpp"
#include "irspnc/numerics.hpp"

namespace irspnc {

LiftedMatrix LiftedMatrix::lift(const PhaseProfile& v) {
  const Eigen::Index m = v.v.size();
  CVec w(m + 1);
  w.head(m) = v.v;
  w[m] = 1.0;
  LiftedMatrix out;
  out.v_mat = w * w.adjoint();
  return out;
}

bool LiftedMatrix::feasible(double tol) const {
  for (Eigen::Index k = 0; k < v_mat.rows(); ++k) {
    if (std::abs(v_mat(k, k) - 1.0) > tol) return false;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(v_mat, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

namespace {

CMat project_psd(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  RVec lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

double top_eigenvalue(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

CVec top_eigenvector(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  return es.eigenvectors().col(a.rows() - 1);
}

double linear_objective(const CMat& c, const CMat& v) {
  return (c * v).trace().real();
}

/// Rescale to exact unit diagonal; a congruence, so PSD is preserved.
CMat normalize_diagonal(const CMat& z) {
  const Eigen::Index n = z.rows();
  RVec d(n);
  for (Eigen::Index k = 0; k < n; ++k) d[k] = std::max(z(k, k).real(), 1e-12);
  RVec dinv = d.cwiseSqrt().cwiseInverse();
  CMat out = dinv.asDiagonal() * z * dinv.asDiagonal();
  out = 0.5 * (out + out.adjoint());
  for (Eigen::Index k = 0; k < n; ++k) out(k, k) = 1.0;
  return out;
}

}  // namespace

double penalized_objective(const LiftedObjective& obj, double gamma, const LiftedMatrix& v) {
  const double tr = v.v_mat.trace().real();
  return (obj.a * v.v_mat).trace().real() + gamma * (tr - top_eigenvalue(v.v_mat));
}

LiftedMatrix solve_inner_sdp(const LiftedObjective& obj, double gamma,
                             const LiftedMatrix& v_prev, const SolverConfig& cfg,
                             AdmmState* state) {
  const Eigen::Index n = obj.a.rows();
  if (v_prev.v_mat.rows() != n) throw std::invalid_argument("solve_inner_sdp: dimension mismatch");

  const CVec u1 = top_eigenvector(v_prev.v_mat);
  CMat c = obj.a + gamma * (CMat::Identity(n, n) - (u1 * u1.adjoint()));
  c = 0.5 * (c + c.adjoint());

  // ADMM on min tr(C X) s.t. diag(X) = 1 (X-block), X PSD (Z-block).
  double rho = std::max(c.norm() / static_cast<double>(n), 1e-6);
  CMat z = v_prev.v_mat;
  CMat u = CMat::Zero(n, n);
  const bool warm = state != nullptr && state->z.rows() == n && state->rho > 0.0;
  if (warm) {
    z = state->z;
    u = state->u;
    rho = state->rho;
  }
  CMat x = z;
  const double tol = cfg.sdp_tol;
  double primal = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  bool ok = false;

  for (int it = 0; it < cfg.sdp_iter_max; ++it) {
    x = z - u - c / rho;
    for (Eigen::Index k = 0; k < n; ++k) x(k, k) = 1.0;
    CMat z_old = std::move(z);
    z = project_psd(x + u);
    u += x - z;

    primal = (x - z).norm();
    dual = rho * (z - z_old).norm();
    const double eps_pri = tol * n + tol * std::max(x.norm(), z.norm());
    const double eps_dual = tol * n + tol * (rho * u).norm();
    if (primal <= eps_pri && dual <= eps_dual) {
      ok = true;
      break;
    }
    if ((it + 1) % 10 == 0) {
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        u *= 0.5;
      } else if (dual > 10.0 * primal) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }
  if (!ok) {
    throw NonConvergence("solve_inner_sdp: ADMM residuals above tolerance", z, primal, dual);
  }
  if (state != nullptr) {
    state->z = z;
    state->u = u;
    state->rho = rho;
  }

  LiftedMatrix out;
  out.v_mat = normalize_diagonal(z);
  // The previous iterate is feasible for the linearized problem; never return
  // anything worse than it.
  if (linear_objective(c, out.v_mat) > linear_objective(c, v_prev.v_mat)) {
    out.v_mat = v_prev.v_mat;
  }
  return out;
}

LiftedMatrix ccp_optimize(const LiftedObjective& obj, const SolverConfig& cfg,
                          const PhaseProfile& v_init, CcpTrace* trace, AdmmState* state) {
  SolverConfig local = cfg;
  if (local.gamma < 0.0) local.gamma = choose_gamma(obj, cfg);

  AdmmState local_state;
  if (state == nullptr) state = &local_state;
  LiftedMatrix v_iter = LiftedMatrix::lift(v_init);
  if (trace) {
    trace->penalized_objectives.clear();
    trace->iterations = 0;
    trace->converged = false;
  }
  for (int iter = 1; iter <= local.iter_max; ++iter) {
    LiftedMatrix v_prev = v_iter;
    v_iter = solve_inner_sdp(obj, local.gamma, v_prev, local, state);
    if (trace) {
      trace->penalized_objectives.push_back(penalized_objective(obj, local.gamma, v_iter));
      trace->iterations = iter;
    }
    if ((v_iter.v_mat - v_prev.v_mat).squaredNorm() <= local.delta) {
      if (trace) trace->converged = true;
      break;
    }
  }
  return v_iter;
}

PhaseProfile extract_phases(const LiftedMatrix& v) {
  const Eigen::Index m = v.v_mat.rows() - 1;
  PhaseProfile out;
  out.v.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Complex z = v.v_mat(k, m);
    const double mag = std::abs(z);
    out.v[k] = (mag == 0.0) ? Complex{1.0, 0.0} : z / mag;
  }
  return out;
}

double choose_gamma(const LiftedObjective& obj, const SolverConfig& cfg) {
  const double anorm = obj.a.norm();
  const double scale = anorm > 0.0 ? anorm : 1.0;
  double lo = cfg.gamma_lo_scale * scale;
  double hi = cfg.gamma_hi_scale * scale;
  const int m = static_cast<int>(obj.a.rows()) - 1;

  auto rank_ok = [&](double gamma) {
    SolverConfig local = cfg;
    local.gamma = gamma;
    LiftedMatrix v = ccp_optimize(obj, local, PhaseProfile::all_ones(m));
    const double tr = v.v_mat.trace().real();
    return tr - top_eigenvalue(v.v_mat) <= cfg.rank_gap_rel * tr;
  };

  if (rank_ok(lo)) return lo;
  if (!rank_ok(hi)) {
    throw RangeExhausted("choose_gamma: rank-1 criterion unmet at the top of the gamma range");
  }
  while (hi / lo > 2.0) {
    const double mid = std::sqrt(lo * hi);
    if (rank_ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

AlternatingResult alternating_optimize(const ChannelRealization& ch, const SystemParams& params,
                                       const SolverConfig& cfg, BeamformerRule rule) {
  params.validate();
  const int m = static_cast<int>(ch.h_ir.cols());

  AlternatingResult res;
  PhaseProfile v = PhaseProfile::all_ones(m);
  Beamformer g_prev;
  double gamma = cfg.gamma;
  double best_mse = std::numeric_limits<double>::infinity();
  PhaseProfile best_v = v;
  Beamformer best_g;
  AdmmState admm;  // carried across outer iterations; the SDPs change slowly

  for (int k = 1; k <= cfg.outer_iter_max; ++k) {
    res.outer_iterations = k;
    CMat h = effective_channel(ch, v);
    Beamformer g = mmse_beamformer(h, params, rule);
    const double mse = mse_exact(g, h, params);
    res.mse_history.push_back(mse);
    if (mse < best_mse) {
      best_mse = mse;
      best_v = v;
      best_g = g;
    }

    LiftedObjective obj = assemble_lifted_objective(g, ch, params);
    if (gamma < 0.0) gamma = choose_gamma(obj, cfg);
    SolverConfig local = cfg;
    local.gamma = gamma;
    LiftedMatrix v_mat = ccp_optimize(obj, local, v, nullptr, &admm);
    PhaseProfile v_next = extract_phases(v_mat);

    // Polish the CCP output with exact per-element coordinate descent,
    // refreshing the closed-form beamformer between sweeps. At fixed G the
    // MSE is c0 + w^H A w with w = [v; 1], so each unit-modulus coordinate
    // has a closed-form minimizer; every step lowers the exact MSE. This
    // removes the slow creep of the bare G <-> v alternation (the per-block
    // optima are strongly coupled) at negligible cost per outer iteration.
    auto pair_mse = [&](const PhaseProfile& vp) {
      const CMat hp = effective_channel(ch, vp);
      const Beamformer gp = mmse_beamformer(hp, params, rule);
      return mse_exact(gp, hp, params);
    };
    {
      CVec w(m + 1);
      w.head(m) = v_next.v;
      w[m] = Complex{1.0, 0.0};
      for (int sweep = 0; sweep < 500; ++sweep) {
        PhaseProfile vs;
        vs.v = w.head(m);
        const CMat hs = effective_channel(ch, vs);
        const Beamformer gs = mmse_beamformer(hs, params, rule);
        const LiftedObjective po = assemble_lifted_objective(gs, ch, params);
        const CVec w_old = w;
        CVec aw = po.a * w;
        double step = 0.0;
        for (int i = 0; i < m; ++i) {
          const Complex b = aw[i] - po.a(i, i) * w[i];
          const double mag = std::abs(b);
          if (mag == 0.0) continue;
          const Complex w_new = -b / mag;
          const Complex d = w_new - w[i];
          if (d != Complex{0.0, 0.0}) {
            aw += po.a.col(i) * d;
            step += std::norm(d);
            w[i] = w_new;
          }
        }
        if (step < 1e-18) break;
        // The sweep direction changes slowly near a stationary point, so try
        // jumping ahead by powers of two along it; keep jumps only while the
        // exact MSE keeps dropping. Each probe is a closed-form G update.
        PhaseProfile v_cur;
        v_cur.v = w.head(m);
        double best = pair_mse(v_cur);
        RVec dth(m);
        for (int i = 0; i < m; ++i) dth[i] = std::arg(w[i] * std::conj(w_old[i]));
        for (double beta : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) {
          PhaseProfile vt;
          vt.v.resize(m);
          for (int i = 0; i < m; ++i) vt.v[i] = w_old[i] * std::polar(1.0, beta * dth[i]);
          const double mse_t = pair_mse(vt);
          if (mse_t < best) {
            best = mse_t;
            w.head(m) = vt.v;
          } else {
            break;
          }
        }
      }
      PhaseProfile v_pol;
      v_pol.v = w.head(m);
      if (pair_mse(v_pol) < pair_mse(v_next)) v_next = std::move(v_pol);
    }

    double diff = (v_next.v - v.v).squaredNorm();
    if (k > 1) {
      diff += (g.g - g_prev.g).squaredNorm();
    } else {
      diff = std::numeric_limits<double>::infinity();
    }
    v = std::move(v_next);
    g_prev = g;
    if (diff < cfg.delta) {
      res.converged = true;
      break;
    }
  }

  // Final pair for the last phase profile.
  CMat h = effective_channel(ch, v);
  Beamformer g = mmse_beamformer(h, params, rule);
  const double mse = mse_exact(g, h, params);
  res.gamma = gamma;
  if (res.converged || mse <= best_mse) {
    res.v = v;
    res.g = g;
    res.mse = mse;
  } else {
    res.v = best_v;
    res.g = best_g;
    res.mse = best_mse;
  }
  return res;
}

PhaseProfile quantize_phases(const PhaseProfile& v) {
  PhaseProfile out;
  out.v.resize(v.v.size());
  for (Eigen::Index k = 0; k < v.v.size(); ++k) {
    // Nearer of {0, pi} in angular distance; Re = 0 is the tie, mapped to 0.
    // The tolerance absorbs rounding in e.g. polar(1, 3*pi/2).
    const double re = v.v[k].real();
    out.v[k] = (re >= 0.0 || std::abs(re) <= 1e-12) ? Complex{1.0, 0.0} : Complex{-1.0, 0.0};
  }
  return out;
}

PhaseProfile random_phases(int m, Rng& rng) {
  PhaseProfile out;
  out.v.resize(m);
  for (int k = 0; k < m; ++k) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    out.v[k] = std::polar(1.0, theta);
  }
  return out;
}

}  // namespace irspnc
