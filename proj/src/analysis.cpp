#include "irspnc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "irspnc/numerics.hpp"

namespace irspnc {

double relay_xor_ber(double sigma1, double sigma2, double amplitude) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw std::invalid_argument("relay_xor_ber: sigma must be > 0");
  const double s1 = sigma1 / amplitude;
  const double s2 = sigma2 / amplitude;
  const double r21 = (s2 * s2) / (s1 * s1);
  const double r12 = (s1 * s1) / (s2 * s2);
  const double p =
      0.5 * (q_function(-2.0 / s2) + q_function(-2.0 / s1)) * q_function(std::sqrt(1.0 + r21) / s2) +
      q_function(2.0 / s2) * q_function((-3.0 + r21) / (s2 * std::sqrt(1.0 + r21))) +
      q_function(2.0 / s1) * q_function((-3.0 + r12) / (s1 * std::sqrt(1.0 + r12)));
  return std::clamp(p, 0.0, 1.0);
}

double link_ber(double noise_var, double amplitude) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("link_ber: noise_var must be > 0");
  return q_function(amplitude / std::sqrt(noise_var));
}

double d1_ber_combine(const LinkBerSet& bers) {
  const double p = bers.p_s1_d1;
  const double q = bers.p_r_d1;
  const double s = bers.p_xor_relay;
  return p * (1.0 - q) * (1.0 - s) + p * q * s + (1.0 - p) * q * (1.0 - s) +
         (1.0 - p) * (1.0 - q) * s;
}

namespace {

ErgodicStats stats_from(const std::vector<double>& values, int n_skipped) {
  ErgodicStats stats;
  stats.n_used = static_cast<int>(values.size());
  stats.n_skipped = n_skipped;
  if (values.empty()) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    const double var = ss / (values.size() - 1);
    stats.std_error = std::sqrt(var / values.size());
  }
  return stats;
}

}  // namespace

ErgodicStats ergodic_ber(int n_realizations,
                         const std::function<std::optional<double>(int)>& instantaneous) {
  if (n_realizations < 1) throw std::invalid_argument("ergodic_ber: n_realizations must be >= 1");
  std::vector<double> values;
  values.reserve(n_realizations);
  int skipped = 0;
  for (int i = 0; i < n_realizations; ++i) {
    if (auto v = instantaneous(i)) {
      values.push_back(*v);
    } else {
      ++skipped;
    }
  }
  return stats_from(values, skipped);
}

}  // namespace irspnc
