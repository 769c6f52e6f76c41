#include "irspnc/numerics.hpp"

#include <cmath>
#include <numbers>

namespace irspnc {

EigResult hermitian_eig(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eig: matrix not square");
  if (!is_hermitian(a)) throw std::invalid_argument("hermitian_eig: matrix not Hermitian");

  Eigen::SelfAdjointEigenSolver<CMat> solver(0.5 * (a + a.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw EigFailure("hermitian_eig: eigen-iteration did not converge");
  }
  const Eigen::Index n = a.rows();
  EigResult res;
  res.eigenvalues.resize(n);
  res.eigenvectors.resize(n, n);
  // Eigen sorts ascending; flip to descending.
  for (Eigen::Index i = 0; i < n; ++i) {
    res.eigenvalues[i] = solver.eigenvalues()[n - 1 - i];
    res.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return res;
}

CMat psd_project(const CMat& a) {
  const EigResult e = hermitian_eig(a);
  RVec lam = e.eigenvalues.cwiseMax(0.0);
  CMat out = e.eigenvectors * lam.asDiagonal() * e.eigenvectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

double q_function(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

}  // namespace irspnc
