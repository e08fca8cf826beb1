// operator_basis.hpp — generalized Pauli (Gell-Mann-type) Hermitian operator
// bases normalized so trace(sigma_mu sigma_nu) = d * delta_{mu nu}.

#pragma once

#include "pdolab/linalg.hpp"

#include <vector>

namespace pdolab {

// Ordered basis {sigma_0 = I, sigma_1, ..., sigma_{d^2-1}} of d x d Hermitian
// matrices. For d = 2 this is exactly {I, X, Y, Z}. For d > 2, the identity is
// followed by the generalized Gell-Mann families in fixed order: symmetric
// (j<k lexicographic), antisymmetric (j<k lexicographic), diagonal (l=1..d-1),
// each scaled by sqrt(d/2) so that trace(sigma_mu^2) = d.
struct OperatorBasis {
  int dim = 0;
  std::vector<Matrix> ops;

  int count() const { return static_cast<int>(ops.size()); }
};

OperatorBasis make_basis(int d);

// Shared immutable cache; safe for concurrent readers.
const OperatorBasis& cached_basis(int d);

// Largest absolute violation of each basis invariant.
struct BasisReport {
  double identity_dev = 0.0;       // |sigma_0 - I|
  double trace_dev = 0.0;          // |tr sigma_j|, j >= 1
  double orthogonality_dev = 0.0;  // |tr(sigma_mu sigma_nu) - d delta|
  double hermiticity_dev = 0.0;    // |sigma - sigma^dag|

  double max_dev() const;
  bool ok(double tol = 1e-12) const { return max_dev() <= tol; }
};

BasisReport check_basis(const OperatorBasis& b);

// Spectral data of one basis element, used for measurement branching and
// separable expansions. Projectors are rank-1 (eigenvector projectors).
struct OpEigensystem {
  RealVector values;            // descending
  std::vector<Vector> vectors;  // unit eigenvectors, aligned with values
};

OpEigensystem eigensystem(const Matrix& hermitian_op);

}  // namespace pdolab
