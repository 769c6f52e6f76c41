#pragma once

#include <utility>

#include "irspnc/types.hpp"

namespace irspnc {

/// Linear receiver applied to the relay's received vector.
struct Beamformer {
  CMat g;  // Ns x Nr
};

/// Which closed form to use for the relay beamformer. TrueMmse is the exact
/// minimizer of the MSE objective, G* = P D H^H (P H H^H + s^2 I)^-1.
/// PaperEq8 omits the sum-difference factor D (it equals D^-1 G*); kept for
/// side-by-side comparison.
enum class BeamformerRule { TrueMmse, PaperEq8 };

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Beamformer mmse_beamformer(const CMat& h, const SystemParams& params,
                           BeamformerRule rule = BeamformerRule::TrueMmse);

/// MSE between G r and the sum-difference target:
/// tr(G (P H H^H + s^2 I) G^H) - 2 Re tr(G P H D^H) + 2 P Ns.
double mse_exact(const Beamformer& g, const CMat& h, const SystemParams& params);

/// Complex noise variance per output stream: diag(G G^H) * sigma^2.
std::pair<double, double> stream_noise_variances(const Beamformer& g, double noise_var);

/// MSE written as tr(a V(v)) + c0 over the lifted matrix V(v) = [v;1][v^H 1].
/// a is Hermitian; c0 carries the v-independent constants 2 P Ns + sum sigma_i^2.
struct LiftedObjective {
  CMat a;      // (M+1) x (M+1) Hermitian
  double c0 = 0.0;
};

LiftedObjective assemble_lifted_objective(const Beamformer& g, const ChannelRealization& ch,
                                          const SystemParams& params);

}  // namespace irspnc
