#pragma once

#include <functional>
#include <optional>

#include "irspnc/types.hpp"

namespace irspnc {

struct LinkBerSet {
  double p_xor_relay = 0.0;  // P(xor estimate wrong at the relay)
  double p_s1_d1 = 0.0;      // direct link S1 -> D1
  double p_r_d1 = 0.0;       // relay broadcast -> D1
};

/// Closed-form instantaneous XOR BER at the relay (Q-product approximation of
/// the soft-min detector). sigma1/sigma2 are the detector's per-stream noise
/// standard deviations; the literal formula assumes a = 1 and generalizes by
/// the substitution sigma -> sigma / a. Clamped to [0, 1].
double relay_xor_ber(double sigma1, double sigma2, double amplitude);

/// BPSK link BER after channel inversion: Q(a / sigma_link).
double link_ber(double noise_var, double amplitude);

/// Probability that an odd number of the three links is in error.
double d1_ber_combine(const LinkBerSet& bers);

struct ErgodicStats {
  double mean = 0.0;
  double std_error = 0.0;
  int n_used = 0;
  int n_skipped = 0;
};

/// Mean and standard error of a per-realization instantaneous BER across
/// channel realizations. The callback returns nullopt to skip a realization
/// (e.g. optimizer non-convergence); skips are counted, never hidden.
ErgodicStats ergodic_ber(int n_realizations,
                         const std::function<std::optional<double>(int)>& instantaneous);

}  // namespace irspnc
