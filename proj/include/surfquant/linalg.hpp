#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace surfquant {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

struct SymmetricEigen {
  Vec values;   // ascending
  Mat vectors;  // column k belongs to values[k]
};

/// Cyclic Jacobi rotations for a small dense symmetric matrix. Only the
/// upper triangle is read. Eigenvalues come back in ascending order.
SymmetricEigen jacobi_eigen(const Mat& a, double tolerance = 1e-15, int max_sweeps = 64);

/// Orthonormal basis of the complement of a unit vector, as the columns of
/// an n x (n-1) matrix, taken from the Householder reflector that maps the
/// vector onto its largest coordinate axis.
Mat householder_complement(const Vec& unit);

/// max |a_ij|.
double max_abs(const Mat& a);

}  // namespace surfquant
