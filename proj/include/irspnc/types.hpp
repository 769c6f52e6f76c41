#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace irspnc {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRowVec = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// How the variance of a complex noise process maps onto the real-valued
/// decision channel. RealPart uses the variance of Re(n) (half the complex
/// variance), so analytic BER and Monte Carlo agree by construction.
/// Complex uses the complex variance directly, reproducing the literal
/// textbook formulas.
enum class NoiseConvention { RealPart, Complex };

inline double detection_variance(double complex_var, NoiseConvention conv) {
  return conv == NoiseConvention::RealPart ? 0.5 * complex_var : complex_var;
}

struct SystemParams {
  double p_tx = 1.0;
  double noise_var = 1.0;
  Complex noise_mean{0.0, 0.0};
  int m_elements = 32;
  static constexpr int n_sources = 2;
  static constexpr int n_relay_antennas = 2;

  // Per-source BPSK amplitude; unit symbol power is assumed, so a^2 = P.
  double amplitude() const { return std::sqrt(p_tx); }

  void validate() const {
    if (!(p_tx > 0.0)) throw std::invalid_argument("p_tx must be > 0");
    if (!(noise_var >= 0.0)) throw std::invalid_argument("noise_var must be >= 0");
    if (m_elements < 1) throw std::invalid_argument("m_elements must be >= 1");
  }
};

/// One draw of all fading links in the butterfly network.
struct ChannelRealization {
  CMat h_ir;        // Nr x M, IRS -> relay
  CMat h_ui;        // M x Ns, sources -> IRS
  CMat h_ur;        // Nr x Ns, sources -> relay (direct)
  Complex h_s1_d1;  // S1 -> D1
  CRowVec h_r_d1;   // 1 x Nr, relay -> D1
};

/// Unit-modulus IRS configuration, v_m = exp(j theta_m).
struct PhaseProfile {
  CVec v;

  bool unit_modulus(double tol = 1e-12) const {
    for (Eigen::Index m = 0; m < v.size(); ++m) {
      if (std::abs(std::abs(v[m]) - 1.0) > tol) return false;
    }
    return true;
  }

  static PhaseProfile all_ones(int m) {
    PhaseProfile p;
    p.v = CVec::Ones(m);
    return p;
  }
};

/// BPSK bit pair with the symbol-domain XOR. Mapping: bit 0 -> +a,
/// bit 1 -> -a; the XOR symbol is +1 exactly when the two bits differ.
struct SymbolPair {
  int b1 = 0, b2 = 0;
  double x1 = 0.0, x2 = 0.0;
  double xor_symbol = -1.0;

  static SymbolPair from_bits(int b1, int b2, double amplitude) {
    SymbolPair s;
    s.b1 = b1;
    s.b2 = b2;
    s.x1 = amplitude * (1.0 - 2.0 * b1);
    s.x2 = amplitude * (1.0 - 2.0 * b2);
    s.xor_symbol = (b1 != b2) ? 1.0 : -1.0;
    return s;
  }
};

}  // namespace irspnc
