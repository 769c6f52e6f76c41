#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irspnc/detect.hpp"
#include "irspnc/model.hpp"

using namespace irspnc;

namespace {

RelayObservation obs_of(double y1, double y2, double v1, double v2, double a = 1.0) {
  RelayObservation o;
  o.y = Eigen::Vector2cd(Complex(y1, 0.0), Complex(y2, 0.0));
  o.stream_var1 = v1;
  o.stream_var2 = v2;
  o.amplitude = a;
  return o;
}

double log_gauss(double y, double mean, double var) {
  return -0.5 * (y - mean) * (y - mean) / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

// Four-hypothesis enumeration with the same per-stream independence
// assumption as the closed form.
double enum_llr(const RelayObservation& o) {
  const double a = o.amplitude;
  const double y1 = o.y[0].real(), y2 = o.y[1].real();
  // x_xor = +1: x~1 = 0, x~2 = +-2a equally likely.
  const double lp = log_gauss(y1, 0.0, o.stream_var1) +
                    std::log(0.5 * std::exp(log_gauss(y2, 2 * a, o.stream_var2)) +
                             0.5 * std::exp(log_gauss(y2, -2 * a, o.stream_var2)));
  const double lm = log_gauss(y2, 0.0, o.stream_var2) +
                    std::log(0.5 * std::exp(log_gauss(y1, 2 * a, o.stream_var1)) +
                             0.5 * std::exp(log_gauss(y1, -2 * a, o.stream_var1)));
  return lp - lm;
}

}  // namespace

TEST_CASE("exact_llr_xor symmetric null observation") {
  CHECK(exact_llr_xor(obs_of(0.0, 0.0, 0.7, 0.7)) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("exact_llr_xor diverges with a dominant second stream") {
  double prev = exact_llr_xor(obs_of(0.0, 1.0, 0.5, 0.5));
  for (double y2 : {5.0, 50.0, 500.0}) {
    const double cur = exact_llr_xor(obs_of(0.0, y2, 0.5, 0.5));
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK(prev > 100.0);
  CHECK(decide_xor(prev) == 1);
}

TEST_CASE("exact_llr_xor equals the four-hypothesis enumeration") {
  Rng rng(70);
  for (int i = 0; i < 1000; ++i) {
    const double a = 0.5 + rng.uniform();
    const RelayObservation o = obs_of(4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5),
                                      0.1 + rng.uniform(), 0.1 + rng.uniform(), a);
    const double l = exact_llr_xor(o);
    const double ref = enum_llr(o);
    CHECK(l == doctest::Approx(ref).epsilon(1e-9));
    CHECK(decide_xor(l) == decide_xor(ref));
  }
}

TEST_CASE("exact_llr_xor is antisymmetric under stream swap") {
  Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    const double y1 = 3.0 * (rng.uniform() - 0.5), y2 = 3.0 * (rng.uniform() - 0.5);
    const double v1 = 0.2 + rng.uniform(), v2 = 0.2 + rng.uniform();
    CHECK(exact_llr_xor(obs_of(y1, y2, v1, v2)) ==
          doctest::Approx(-exact_llr_xor(obs_of(y2, y1, v2, v1))).epsilon(1e-12));
  }
}

TEST_CASE("noiseless observations are always decided correctly") {
  Rng rng(72);
  const double a = 1.3;
  for (int b1 : {0, 1}) {
    for (int b2 : {0, 1}) {
      const SymbolPair s = SymbolPair::from_bits(b1, b2, a);
      for (int i = 0; i < 20; ++i) {
        const double v1 = 0.05 + 3.0 * rng.uniform();
        const double v2 = 0.05 + 3.0 * rng.uniform();
        const RelayObservation o = obs_of(s.x1 + s.x2, s.x1 - s.x2, v1, v2, a);
        CHECK(decide_xor(exact_llr_xor(o)) == static_cast<int>(s.xor_symbol));
      }
    }
  }
}

TEST_CASE("approx_llr_xor symmetric cancellation") {
  CHECK(approx_llr_xor(obs_of(0.0, 0.0, 0.9, 0.9)) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("soft-min error is at most log 2 per stream") {
  Rng rng(73);
  for (int i = 0; i < 1000; ++i) {
    const RelayObservation o = obs_of(6.0 * (rng.uniform() - 0.5), 6.0 * (rng.uniform() - 0.5),
                                      0.1 + rng.uniform(), 0.1 + rng.uniform(),
                                      0.5 + rng.uniform());
    // Literal two-term log-sum-exp bound, per stream.
    for (int stream = 0; stream < 2; ++stream) {
      const double y = o.y[stream].real();
      const double var = stream == 0 ? o.stream_var1 : o.stream_var2;
      const double zp = (-2.0 * y * 2.0 * o.amplitude + 4.0 * o.amplitude * o.amplitude) / (2.0 * var);
      const double zm = (2.0 * y * 2.0 * o.amplitude + 4.0 * o.amplitude * o.amplitude) / (2.0 * var);
      const double zmin = std::min(zp, zm);
      const double lse = -zmin + std::log1p(std::exp(-(std::max(zp, zm) - zmin)));
      CHECK(std::abs(lse + zmin) <= std::numbers::ln2 + 1e-12);
    }
    CHECK(std::abs(approx_llr_xor(o) - exact_llr_xor(o)) <= 2.0 * std::numbers::ln2 + 1e-12);
  }
}

TEST_CASE("approx and exact decisions agree >= 99% at 0 dB") {
  Rng rng(74);
  const double a = 1.0, var = 0.5;  // real-part variance of CN(0,1) noise
  int agree = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const SymbolPair s = SymbolPair::from_bits(rng.bit(), rng.bit(), a);
    const RelayObservation o = obs_of(s.x1 + s.x2 + std::sqrt(var) * rng.normal(),
                                      s.x1 - s.x2 + std::sqrt(var) * rng.normal(), var, var, a);
    if (decide_xor(approx_llr_xor(o)) == decide_xor(exact_llr_xor(o))) ++agree;
  }
  CHECK(static_cast<double>(agree) / n >= 0.99);
}

TEST_CASE("decide_xor tie and sign rules") {
  CHECK(decide_xor(0.0) == 1);
  CHECK(decide_xor(-3.2) == -1);
  CHECK(decide_xor(1e-15) == 1);
}

TEST_CASE("make_relay_observation applies the noise convention") {
  SystemParams p;
  p.noise_var = 0.8;
  Beamformer g;
  g.g = CMat::Identity(2, 2);
  const Eigen::Vector2cd y(Complex(0.1, 0.0), Complex(-0.2, 0.0));
  const RelayObservation real_part = make_relay_observation(y, g, p, NoiseConvention::RealPart);
  CHECK(real_part.stream_var1 == doctest::Approx(0.4));
  const RelayObservation complex_conv = make_relay_observation(y, g, p, NoiseConvention::Complex);
  CHECK(complex_conv.stream_var1 == doctest::Approx(0.8));
}

TEST_CASE("dest_link_transmit noiseless and gain formula") {
  Rng rng(75);
  const LinkObservation o = dest_link_transmit(1.4, Complex(0.3, -0.4), 0.0,
                                               NoiseConvention::Complex, rng);
  CHECK(o.y == 1.4);

  const LinkObservation o2 = dest_link_transmit(1.0, Complex(2.0, 0.0), 0.36,
                                                NoiseConvention::Complex, rng);
  CHECK(o2.noise_var == doctest::Approx(0.36 / 4.0));
  const LinkObservation o3 = dest_link_transmit(1.0, Complex(2.0, 0.0), 0.36,
                                                NoiseConvention::RealPart, rng);
  CHECK(o3.noise_var == doctest::Approx(0.36 / 8.0));
}

TEST_CASE("dest_link_transmit empirical variance matches") {
  Rng rng(76);
  const Complex h(0.8, -0.6);
  const double s2 = 0.5;
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  double var_stated = 0.0;
  for (int i = 0; i < n; ++i) {
    const LinkObservation o = dest_link_transmit(1.0, h, s2, NoiseConvention::RealPart, rng);
    const double e = o.y - 1.0;
    sum += e;
    sumsq += e * e;
    var_stated = o.noise_var;
  }
  const double mean = sum / n;
  CHECK(sumsq / n - mean * mean == doctest::Approx(var_stated).epsilon(0.02));
}

TEST_CASE("dest_link_transmit rejects a vanishing channel") {
  Rng rng(77);
  CHECK_THROWS_AS(dest_link_transmit(1.0, Complex(0.0, 0.0), 1.0, NoiseConvention::RealPart, rng),
                  ZeroChannel);
}

TEST_CASE("decide_bpsk") {
  LinkObservation o;
  o.y = 0.7;
  CHECK(decide_bpsk(o) == 1);
  o.y = -0.7;
  CHECK(decide_bpsk(o) == -1);
  o.y = 0.0;
  CHECK(decide_bpsk(o) == 1);
}

TEST_CASE("xor_combine convention and round trip") {
  CHECK(xor_combine(1, 1) == -1);
  CHECK(xor_combine(1, -1) == 1);
  for (int b1 : {0, 1}) {
    for (int b2 : {0, 1}) {
      const SymbolPair s = SymbolPair::from_bits(b1, b2, 1.0);
      const int x1 = s.x1 > 0 ? 1 : -1;
      const int x2 = s.x2 > 0 ? 1 : -1;
      CHECK(xor_combine(x1, static_cast<int>(s.xor_symbol)) == x2);
    }
  }
}

TEST_CASE("nnc_relay_detect noiseless identity channel") {
  SystemParams p;
  p.noise_var = 1.0;
  const CMat h = CMat::Identity(2, 2);
  const double a = p.amplitude();
  CHECK(nnc_relay_detect(Eigen::Vector2cd(a, -a), h, p) == 1);
  CHECK(nnc_relay_detect(Eigen::Vector2cd(a, a), h, p) == -1);
}

TEST_CASE("nnc_relay_detect at 30 dB has error rate < 1e-3") {
  SystemParams p;
  p.noise_var = 1e-3;
  Rng rng(78);
  const ChannelRealization ch = gen_channels(p, rng);
  const CMat h = ch.h_ur;
  const double a = p.amplitude();
  int errors = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const SymbolPair s = SymbolPair::from_bits(rng.bit(), rng.bit(), a);
    CVec x(2);
    x << Complex(s.x1, 0.0), Complex(s.x2, 0.0);
    const CVec r = relay_receive(h, x, p, rng);
    if (nnc_relay_detect(r, h, p) != static_cast<int>(s.xor_symbol)) ++errors;
  }
  CHECK(static_cast<double>(errors) / n < 1e-3);
}

TEST_CASE("all-noiseless end-to-end chain recovers x2") {
  SystemParams p;
  p.noise_var = 0.0;
  Rng rng(79);
  const ChannelRealization ch = gen_channels(p, rng);
  const double a = p.amplitude();
  for (int b1 : {0, 1}) {
    for (int b2 : {0, 1}) {
      const SymbolPair s = SymbolPair::from_bits(b1, b2, a);
      // Relay sees the noiseless sum/difference directly.
      const RelayObservation o = obs_of(s.x1 + s.x2, s.x1 - s.x2, 0.3, 0.7, a);
      const int xor_hat = decide_xor(exact_llr_xor(o));
      const LinkObservation broadcast =
          dest_link_transmit(a * xor_hat, ch.h_r_d1, 0.0, NoiseConvention::RealPart, rng);
      const int xor_d1 = decide_bpsk(broadcast);
      const LinkObservation direct =
          dest_link_transmit(s.x1, ch.h_s1_d1, 0.0, NoiseConvention::RealPart, rng);
      const int x1_hat = decide_bpsk(direct);
      CHECK(xor_combine(x1_hat, xor_d1) == (s.x2 > 0 ? 1 : -1));
    }
  }
}
