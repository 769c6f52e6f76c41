#pragma once

#include "irspnc/beamform.hpp"
#include "irspnc/rng.hpp"
#include "irspnc/types.hpp"

namespace irspnc {

/// Post-beamforming observation at the relay. stream_var1/2 are the noise
/// variances as seen by the detector (already convention-adjusted).
struct RelayObservation {
  Eigen::Vector2cd y;
  double stream_var1 = 1.0;
  double stream_var2 = 1.0;
  double amplitude = 1.0;
};

RelayObservation make_relay_observation(const Eigen::Vector2cd& y, const Beamformer& g,
                                        const SystemParams& params, NoiseConvention conv);

/// Exact two-stream XOR LLR:
/// L = 2a^2 (1/s1^2 - 1/s2^2) + log cosh(2a Re(y2)/s2^2) - log cosh(2a Re(y1)/s1^2).
double exact_llr_xor(const RelayObservation& obs);

/// Soft-minimum approximation of the XOR LLR.
double approx_llr_xor(const RelayObservation& obs);

/// +1 iff L >= 0.
int decide_xor(double llr);

/// Real decision statistic on a destination link after transmit-side channel
/// inversion: y = amplitude * sym + real noise with the stated variance.
struct LinkObservation {
  double y = 0.0;
  double noise_var = 1.0;
  double amplitude = 1.0;
};

struct ZeroChannel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scalar link (S1 -> D1): post-inversion complex noise variance sigma^2/|h|^2.
LinkObservation dest_link_transmit(double sym, Complex h, double noise_var,
                                   NoiseConvention conv, Rng& rng);

/// Vector link (relay -> D1): post-inversion complex noise variance sigma^2/||h||^2.
LinkObservation dest_link_transmit(double sym, const CRowVec& h, double noise_var,
                                   NoiseConvention conv, Rng& rng);

/// +1 iff y >= 0.
int decide_bpsk(const LinkObservation& obs);

/// x2_hat = -x1_hat * xor_hat (XOR symbol is +1 exactly when symbols differ).
int xor_combine(int x1_hat, int xor_hat);

/// Naive network-coding relay: MMSE estimate of x itself, per-stream sign
/// detection, then XOR of the two estimates.
int nnc_relay_detect(const Eigen::Vector2cd& r, const CMat& h, const SystemParams& params);

}  // namespace irspnc
