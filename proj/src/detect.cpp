#include "irspnc/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace irspnc {

namespace {

// log(cosh(z)) without overflow: |z| + log1p(exp(-2|z|)) - log 2.
double log_cosh(double z) {
  const double az = std::abs(z);
  return az + std::log1p(std::exp(-2.0 * az)) - std::numbers::ln2;
}

}  // namespace

RelayObservation make_relay_observation(const Eigen::Vector2cd& y, const Beamformer& g,
                                        const SystemParams& params, NoiseConvention conv) {
  const auto [v1, v2] = stream_noise_variances(g, params.noise_var);
  RelayObservation obs;
  obs.y = y;
  obs.stream_var1 = detection_variance(v1, conv);
  obs.stream_var2 = detection_variance(v2, conv);
  obs.amplitude = params.amplitude();
  return obs;
}

double exact_llr_xor(const RelayObservation& obs) {
  const double a = obs.amplitude;
  const double y1 = obs.y[0].real();
  const double y2 = obs.y[1].real();
  return 2.0 * a * a * (1.0 / obs.stream_var1 - 1.0 / obs.stream_var2) +
         log_cosh(2.0 * a * y2 / obs.stream_var2) - log_cosh(2.0 * a * y1 / obs.stream_var1);
}

double approx_llr_xor(const RelayObservation& obs) {
  const double a = obs.amplitude;
  const double vars[2] = {obs.stream_var1, obs.stream_var2};
  double llr = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double y = obs.y[i].real();
    double m = std::numeric_limits<double>::infinity();
    for (double xt : {-2.0 * a, 2.0 * a}) {
      m = std::min(m, (-2.0 * y * xt + xt * xt) / (2.0 * vars[i]));
    }
    llr += (i == 0 ? 1.0 : -1.0) * m;
  }
  return llr;
}

int decide_xor(double llr) { return llr >= 0.0 ? 1 : -1; }

namespace {

LinkObservation inverted_link(double sym, double gain_sq, double noise_var,
                              NoiseConvention conv, Rng& rng) {
  if (gain_sq < 1e-24) throw ZeroChannel("dest_link_transmit: channel gain below 1e-12");
  const double complex_var = noise_var / gain_sq;
  LinkObservation obs;
  obs.noise_var = detection_variance(complex_var, conv);
  obs.amplitude = std::abs(sym);
  obs.y = sym + std::sqrt(obs.noise_var) * rng.normal();
  return obs;
}

}  // namespace

LinkObservation dest_link_transmit(double sym, Complex h, double noise_var,
                                   NoiseConvention conv, Rng& rng) {
  return inverted_link(sym, std::norm(h), noise_var, conv, rng);
}

LinkObservation dest_link_transmit(double sym, const CRowVec& h, double noise_var,
                                   NoiseConvention conv, Rng& rng) {
  return inverted_link(sym, h.squaredNorm(), noise_var, conv, rng);
}

int decide_bpsk(const LinkObservation& obs) { return obs.y >= 0.0 ? 1 : -1; }

int xor_combine(int x1_hat, int xor_hat) { return -x1_hat * xor_hat; }

int nnc_relay_detect(const Eigen::Vector2cd& r, const CMat& h, const SystemParams& params) {
  const Beamformer g = mmse_beamformer(h, params, BeamformerRule::PaperEq8);
  const Eigen::Vector2cd y = g.g * r;
  const int x1 = y[0].real() >= 0.0 ? 1 : -1;
  const int x2 = y[1].real() >= 0.0 ? 1 : -1;
  return -x1 * x2;
}

}  // namespace irspnc
