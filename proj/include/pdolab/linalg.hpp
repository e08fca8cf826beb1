// linalg.hpp — shared dense linear-algebra helpers: Kronecker products,
// partial traces, subsystem embedding/permutation, Haar-random matrices.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <span>
#include <vector>

namespace pdolab {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);

// Product of dimensions, with overflow left to the caller (desk scale only).
long total_dim(std::span<const int> dims);

// Trace over the subsystems not listed in `keep`. The result's subsystem
// order follows `keep` as given, so keep={1,0} also transposes the factors.
Matrix partial_trace_dense(const Matrix& m, std::span<const int> dims,
                           std::span<const int> keep);

// Reorder tensor factors: subsystem i of the result is subsystem perm[i] of m.
Matrix permute_subsystems(const Matrix& m, std::span<const int> dims,
                          std::span<const int> perm);

// Lift an operator acting on `positions` (in the operator's factor order)
// to the full space, identity elsewhere.
Matrix embed_operator(const Matrix& op, std::span<const int> positions,
                      std::span<const int> dims);

bool is_hermitian(const Matrix& m, double tol);

// |M| = sqrt(M^dag M) for Hermitian M, via eigendecomposition.
Matrix hermitian_abs(const Matrix& m);

// Eigenvalues of a Hermitian matrix, descending.
RealVector hermitian_eigenvalues(const Matrix& m);

double trace_norm(const Matrix& m);   // sum of singular values (Hermitian: sum |eig|)
double max_abs(const Matrix& m);

Matrix random_unitary(int d, std::mt19937_64& rng);
Matrix random_density(int d, std::mt19937_64& rng);
Matrix random_hermitian(int d, std::mt19937_64& rng);

// Row-major multi-index helpers over an arbitrary shape.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> shape);

  std::size_t size() const { return size_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }

  std::size_t flatten(std::span<const int> tuple) const;
  void unflatten(std::size_t flat, std::span<int> tuple) const;
  std::vector<int> unflatten(std::size_t flat) const;

 private:
  std::vector<int> shape_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

}  // namespace pdolab
