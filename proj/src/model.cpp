#include "irspnc/model.hpp"

namespace irspnc {

namespace {

CMat draw_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMat m(rows, cols);
  // Column-major fill; the draw order is part of the determinism contract.
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.cnormal();
  return m;
}

}  // namespace

ChannelRealization gen_channels(const SystemParams& params, Rng& rng) {
  params.validate();
  const int m = params.m_elements;
  const int ns = SystemParams::n_sources;
  const int nr = SystemParams::n_relay_antennas;
  ChannelRealization ch;
  ch.h_ir = draw_matrix(nr, m, rng);
  ch.h_ui = draw_matrix(m, ns, rng);
  ch.h_ur = draw_matrix(nr, ns, rng);
  ch.h_s1_d1 = rng.cnormal();
  ch.h_r_d1 = draw_matrix(1, nr, rng);
  return ch;
}

CMat effective_channel(const ChannelRealization& ch, const PhaseProfile& v) {
  if (ch.h_ir.cols() != v.v.size() || ch.h_ui.rows() != v.v.size() ||
      ch.h_ir.rows() != ch.h_ur.rows() || ch.h_ui.cols() != ch.h_ur.cols()) {
    throw std::invalid_argument("effective_channel: dimension mismatch");
  }
  return ch.h_ir * v.v.asDiagonal() * ch.h_ui + ch.h_ur;
}

Eigen::Matrix2d sum_difference_matrix() {
  Eigen::Matrix2d d;
  d << 1.0, 1.0, 1.0, -1.0;
  return d;
}

CVec relay_receive(const CMat& h, const CVec& x, const SystemParams& params, Rng& rng) {
  CVec r = h * x;
  const double sigma = std::sqrt(params.noise_var);
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    r[j] += params.noise_mean + sigma * rng.cnormal();
  }
  return r;
}

}  // namespace irspnc
