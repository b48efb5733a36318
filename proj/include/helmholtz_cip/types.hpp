#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace helmholtz_cip {

using Complex = std::complex<double>;
using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;
using ComplexVec2 = Eigen::Matrix<Complex, 2, 1>;

using RealSparse = Eigen::SparseMatrix<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex imag_unit{0.0, 1.0};

}  // namespace helmholtz_cip
