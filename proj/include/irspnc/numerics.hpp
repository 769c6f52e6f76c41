#pragma once

#include <Eigen/Dense>

#include "irspnc/types.hpp"

namespace irspnc {

struct EigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_hermitian(const CMat& a, double tol = 1e-10) {
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

struct EigResult {
  RVec eigenvalues;  // sorted descending
  CMat eigenvectors; // columns match eigenvalues; unitary
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
/// For PSD input the largest eigenvalue equals the largest singular value.
EigResult hermitian_eig(const CMat& a);

/// Frobenius-nearest PSD matrix: clamp negative eigenvalues to zero.
CMat psd_project(const CMat& a);

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double q_function(double x);

}  // namespace irspnc
