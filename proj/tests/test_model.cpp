#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "irspnc/model.hpp"

using namespace irspnc;

namespace {

SystemParams make_params(int m) {
  SystemParams p;
  p.m_elements = m;
  return p;
}

}  // namespace

TEST_CASE("gen_channels is deterministic for a fixed seed") {
  const SystemParams p = make_params(6);
  Rng r1(42), r2(42);
  const ChannelRealization a = gen_channels(p, r1);
  const ChannelRealization b = gen_channels(p, r2);
  CHECK(a.h_ir == b.h_ir);
  CHECK(a.h_ui == b.h_ui);
  CHECK(a.h_ur == b.h_ur);
  CHECK(a.h_s1_d1 == b.h_s1_d1);
  CHECK(a.h_r_d1 == b.h_r_d1);
}

TEST_CASE("gen_channels entries are CN(0,1) statistically") {
  const SystemParams p = make_params(250);  // 2*250 + 250*2 + 4 entries per draw
  Rng rng(7);
  std::vector<Complex> samples;
  while (samples.size() < 100000) {
    const ChannelRealization ch = gen_channels(p, rng);
    for (const CMat* m : {&ch.h_ir, &ch.h_ui, &ch.h_ur}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) samples.push_back((*m)(i));
    }
  }
  Complex mean = 0.0;
  double var = 0.0;
  for (Complex z : samples) mean += z;
  mean /= static_cast<double>(samples.size());
  for (Complex z : samples) var += std::norm(z - mean);
  var /= static_cast<double>(samples.size());
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gen_channels shapes at M=1") {
  Rng rng(1);
  const ChannelRealization ch = gen_channels(make_params(1), rng);
  CHECK(ch.h_ir.rows() == 2);
  CHECK(ch.h_ir.cols() == 1);
  CHECK(ch.h_ui.rows() == 1);
  CHECK(ch.h_ui.cols() == 2);
  CHECK(ch.h_ur.rows() == 2);
  CHECK(ch.h_ur.cols() == 2);
  CHECK(ch.h_r_d1.cols() == 2);
}

TEST_CASE("effective_channel reduces to h_ur when the IRS path vanishes") {
  Rng rng(3);
  ChannelRealization ch = gen_channels(make_params(4), rng);
  ch.h_ir.setZero();
  const CMat h = effective_channel(ch, PhaseProfile::all_ones(4));
  CHECK((h - ch.h_ur).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effective_channel hand case: M=1, all-ones channels") {
  ChannelRealization ch;
  ch.h_ir = CMat::Ones(2, 1);
  ch.h_ui = CMat::Ones(1, 2);
  ch.h_ur = CMat::Ones(2, 2);
  const CMat h = effective_channel(ch, PhaseProfile::all_ones(1));
  for (Eigen::Index i = 0; i < h.size(); ++i) CHECK(h(i) == Complex(2.0, 0.0));
}

TEST_CASE("effective_channel matches brute-force summation") {
  const int m = 5;
  Rng rng(11);
  const ChannelRealization ch = gen_channels(make_params(m), rng);
  PhaseProfile v;
  v.v.resize(m);
  for (int k = 0; k < m; ++k) v.v[k] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
  CMat ref = ch.h_ur;
  for (int k = 0; k < m; ++k) ref += ch.h_ir.col(k) * v.v[k] * ch.h_ui.row(k);
  const CMat h = effective_channel(ch, v);
  CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("effective_channel is linear in v") {
  const int m = 4;
  Rng rng(13);
  const ChannelRealization ch = gen_channels(make_params(m), rng);
  PhaseProfile v1, v2, v3;
  v1.v = CVec::Random(m);
  v2.v = CVec::Random(m);
  const Complex alpha(0.3, -0.7), beta(-1.1, 0.4);
  v3.v = alpha * v1.v + beta * v2.v;
  // Subtract the affine h_ur part, then check additivity.
  const CMat a = effective_channel(ch, v1) - ch.h_ur;
  const CMat b = effective_channel(ch, v2) - ch.h_ur;
  const CMat c = effective_channel(ch, v3) - ch.h_ur;
  CHECK((c - (alpha * a + beta * b)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("effective_channel rejects mismatched dimensions") {
  Rng rng(5);
  const ChannelRealization ch = gen_channels(make_params(4), rng);
  CHECK_THROWS(effective_channel(ch, PhaseProfile::all_ones(3)));
}

TEST_CASE("sum-difference matrix") {
  const Eigen::Matrix2d d = sum_difference_matrix();
  Eigen::Vector2d x(1.5, -0.25);
  const Eigen::Vector2d y = d * x;
  CHECK(y[0] == 1.25);
  CHECK(y[1] == 1.75);
  CHECK((d * d - 2.0 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  const double a = 0.7;
  const Eigen::Vector2d eq = d * Eigen::Vector2d(a, a);
  CHECK(eq[0] == 2.0 * a);
  CHECK(eq[1] == 0.0);
}

TEST_CASE("relay_receive noiseless is exact") {
  SystemParams p = make_params(2);
  p.noise_var = 0.0;
  Rng rng(9);
  const ChannelRealization ch = gen_channels(p, rng);
  const CMat h = effective_channel(ch, PhaseProfile::all_ones(2));
  CVec x(2);
  x << Complex(1.0, 0.0), Complex(-1.0, 0.0);
  const CVec r = relay_receive(h, x, p, rng);
  CHECK((r - h * x).cwiseAbs().maxCoeff() == 0.0);

  const CMat id = CMat::Identity(2, 2);
  const CVec r2 = relay_receive(id, x, p, rng);
  CHECK(r2[0] == Complex(1.0, 0.0));
  CHECK(r2[1] == Complex(-1.0, 0.0));
}

TEST_CASE("relay_receive noise covariance is sigma^2 I") {
  SystemParams p = make_params(1);
  p.noise_var = 0.6;
  const CMat h = CMat::Zero(2, 2);
  const CVec x = CVec::Zero(2);
  Rng rng(17);
  const int n = 100000;
  Eigen::Matrix2cd cov = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < n; ++i) {
    const CVec r = relay_receive(h, x, p, rng);
    cov += r * r.adjoint();
  }
  cov /= static_cast<double>(n);
  CHECK(cov(0, 0).real() == doctest::Approx(p.noise_var).epsilon(0.02));
  CHECK(cov(1, 1).real() == doctest::Approx(p.noise_var).epsilon(0.02));
  CHECK(std::abs(cov(0, 1)) < 0.02);
}

TEST_CASE("xor symbol equals -sign(x1) sign(x2)") {
  for (int b1 : {0, 1}) {
    for (int b2 : {0, 1}) {
      const SymbolPair s = SymbolPair::from_bits(b1, b2, 1.7);
      const double sgn = (s.x1 > 0 ? 1.0 : -1.0) * (s.x2 > 0 ? 1.0 : -1.0);
      CHECK(s.xor_symbol == -sgn);
      CHECK(((b1 != b2) == (s.xor_symbol == 1.0)));
    }
  }
}
