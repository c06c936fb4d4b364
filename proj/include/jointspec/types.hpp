#pragma once

#include <complex>

#include <Eigen/Dense>

namespace jointspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A point x = (x_1, ..., x_n) of C^n; its length matches the tuple size.
using PencilPoint = Eigen::VectorXcd;

/// Direction x^ = (x_2, ..., x_n) transverse to the first coordinate.
using Direction = Eigen::VectorXcd;

}  // namespace jointspec
