#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "tanglescope/error.hpp"

namespace tanglescope {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct JacobiOptions {
  int max_sweeps = 100;
  // Relative asymmetry tolerated on input, against max(1, max|a_ij|).
  double symmetry_tol = 1e-12;
  // Converged when max off-diagonal <= offdiag_rel_tol * max|diagonal|.
  double offdiag_rel_tol = 1e-12;
};

/// Unsorted eigen-decomposition as produced by the rotation scheme.
struct JacobiResult {
  Vector values;
  Matrix vectors;  // column k pairs with values[k]
  int sweeps = 0;
};

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double max_offdiagonal(const Matrix& a) {
  double off = 0.0;
  for (Eigen::Index j = 1; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) off = std::max(off, std::abs(a(i, j)));
  return off;
}

inline void require_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("matrix is not square");
  if (a.rows() == 0) throw std::invalid_argument("matrix is empty");
  const double scale = std::max(1.0, max_abs(a));
  for (Eigen::Index j = 1; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (!(std::abs(a(i, j) - a(j, i)) <= rel_tol * scale))
        throw std::invalid_argument("matrix is not symmetric at (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix. Pivots are
/// visited in row-major order (p < q) every sweep, so the result is a pure
/// function of the input bits.
inline JacobiResult jacobi_eigen(const Matrix& input,
                                 const JacobiOptions& options = {}) {
  require_symmetric(input, options.symmetry_tol);
  const Eigen::Index n = input.rows();
  Matrix a = (input + input.transpose()) * 0.5;
  Matrix v = Matrix::Identity(n, n);

  for (int sweep = 0;; ++sweep) {
    const double diag_scale = a.diagonal().cwiseAbs().maxCoeff();
    if (max_offdiagonal(a) <= options.offdiag_rel_tol * diag_scale)
      return {a.diagonal(), v, sweep};
    if (sweep == options.max_sweeps)
      throw NumericalError("Jacobi iteration did not converge after " +
                           std::to_string(options.max_sweeps) + " sweeps");

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace tanglescope
