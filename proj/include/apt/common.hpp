#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace apt {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using CSpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// Bad user configuration (CFL, missing keys, out-of-range values).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Object used in the wrong state (double preprocessing, scaled vs unscaled).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

// A numerical contract was violated (non-Hermitian input, failed self-check).
struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested operation is outside the supported model class.
struct Unsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace apt
