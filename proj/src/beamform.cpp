#include "irspnc/beamform.hpp"

#include "irspnc/model.hpp"

namespace irspnc {

Beamformer mmse_beamformer(const CMat& h, const SystemParams& params, BeamformerRule rule) {
  const double p = params.p_tx;
  const double s2 = params.noise_var;
  const Eigen::Index nr = h.rows();
  CMat reg = p * (h * h.adjoint()) + s2 * CMat::Identity(nr, nr);
  Eigen::FullPivLU<CMat> lu(reg);
  if (!lu.isInvertible()) {
    throw SingularSystem("mmse_beamformer: P H H^H + s^2 I is singular (noiseless rank-deficient channel)");
  }
  CMat right = p * h.adjoint() * lu.inverse();
  Beamformer g;
  if (rule == BeamformerRule::TrueMmse) {
    g.g = sum_difference_matrix().cast<Complex>() * right;
  } else {
    g.g = right;
  }
  return g;
}

double mse_exact(const Beamformer& g, const CMat& h, const SystemParams& params) {
  const double p = params.p_tx;
  const double s2 = params.noise_var;
  const Eigen::Index nr = h.rows();
  const CMat d = sum_difference_matrix().cast<Complex>();
  CMat cov = p * (h * h.adjoint()) + s2 * CMat::Identity(nr, nr);
  const double quad = (g.g * cov * g.g.adjoint()).trace().real();
  const double cross = (g.g * (p * h * d.transpose())).trace().real();
  return quad - 2.0 * cross + 2.0 * p * SystemParams::n_sources;
}

std::pair<double, double> stream_noise_variances(const Beamformer& g, double noise_var) {
  CMat gg = g.g * g.g.adjoint();
  return {gg(0, 0).real() * noise_var, gg(1, 1).real() * noise_var};
}

LiftedObjective assemble_lifted_objective(const Beamformer& g, const ChannelRealization& ch,
                                          const SystemParams& params) {
  const int m = static_cast<int>(ch.h_ir.cols());
  const int ns = SystemParams::n_sources;
  const int nr = SystemParams::n_relay_antennas;
  if (ch.h_ui.rows() != m || g.g.rows() != ns || g.g.cols() != nr) {
    throw std::invalid_argument("assemble_lifted_objective: dimension mismatch");
  }
  const double p = params.p_tx;

  // c[j][i] = [phi^{ji}, h^ur_{ji}] so that b^{ji} = c[j][i] * [v; 1].
  std::vector<std::vector<CRowVec>> c(nr, std::vector<CRowVec>(ns));
  for (int j = 0; j < nr; ++j) {
    for (int i = 0; i < ns; ++i) {
      CRowVec row(m + 1);
      row.head(m) = ch.h_ir.row(j).cwiseProduct(ch.h_ui.col(i).transpose());
      row[m] = ch.h_ur(j, i);
      c[j][i] = row;
    }
  }

  CMat a = CMat::Zero(m + 1, m + 1);
  const CMat ghg = g.g.adjoint() * g.g;  // (G^H G)_{j,j'}
  for (int ip = 0; ip < ns; ++ip) {
    for (int j = 0; j < nr; ++j) {
      for (int jp = 0; jp < nr; ++jp) {
        a.noalias() += (p * ghg(j, jp)) * (c[j][ip].adjoint() * c[jp][ip]);
      }
    }
  }
  CVec e_last = CVec::Zero(m + 1);
  e_last[m] = 1.0;
  for (int i = 0; i < ns; ++i) {
    const double sgn = (i == 0) ? 1.0 : -1.0;  // (-1)^{i+1} with i counted from 1
    for (int j = 0; j < nr; ++j) {
      const Complex q = g.g(0, j) + sgn * g.g(1, j);
      a.noalias() -= p * q * (e_last * c[j][i]);
      a.noalias() -= p * std::conj(q) * (c[j][i].adjoint() * e_last.transpose());
    }
  }

  LiftedObjective obj;
  obj.a = 0.5 * (a + a.adjoint());
  const auto [s1, s2] = stream_noise_variances(g, params.noise_var);
  obj.c0 = 2.0 * p * ns + s1 + s2;
  return obj;
}

}  // namespace irspnc
