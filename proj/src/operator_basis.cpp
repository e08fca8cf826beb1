#include "pdolab/operator_basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pdolab {

OperatorBasis make_basis(int d) {
  if (d < 2) throw std::invalid_argument("make_basis: local dimension must be >= 2");

  OperatorBasis b;
  b.dim = d;
  b.ops.reserve(static_cast<std::size_t>(d) * d);
  b.ops.push_back(Matrix::Identity(d, d));

  const double scale = std::sqrt(d / 2.0);  // standard Gell-Mann have tr(sigma^2) = 2

  // symmetric family: scale * (E_jk + E_kj), j < k
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = scale;
      m(k, j) = scale;
      b.ops.push_back(m);
    }
  // antisymmetric family: scale * (-i E_jk + i E_kj), j < k
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Matrix m = Matrix::Zero(d, d);
      m(j, k) = Cplx(0.0, -scale);
      m(k, j) = Cplx(0.0, scale);
      b.ops.push_back(m);
    }
  // diagonal family: scale * sqrt(2/(l(l+1))) * (sum_{j<l} E_jj - l E_ll)
  for (int l = 1; l < d; ++l) {
    Matrix m = Matrix::Zero(d, d);
    const double f = scale * std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
    for (int j = 0; j < l; ++j) m(j, j) = f;
    m(l, l) = -f * l;
    b.ops.push_back(m);
  }
  return b;
}

const OperatorBasis& cached_basis(int d) {
  static std::mutex mu;
  static std::map<int, OperatorBasis> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, make_basis(d)).first;
  return it->second;
}

double BasisReport::max_dev() const {
  return std::max({identity_dev, trace_dev, orthogonality_dev, hermiticity_dev});
}

BasisReport check_basis(const OperatorBasis& b) {
  BasisReport r;
  const int d = b.dim;
  const Matrix id = Matrix::Identity(d, d);
  if (!b.ops.empty()) r.identity_dev = max_abs(b.ops[0] - id);
  for (std::size_t j = 1; j < b.ops.size(); ++j)
    r.trace_dev = std::max(r.trace_dev, std::abs(b.ops[j].trace()));
  for (std::size_t mu = 0; mu < b.ops.size(); ++mu) {
    r.hermiticity_dev = std::max(r.hermiticity_dev, max_abs(b.ops[mu] - b.ops[mu].adjoint()));
    for (std::size_t nu = 0; nu < b.ops.size(); ++nu) {
      Cplx g = (b.ops[mu] * b.ops[nu]).trace();
      double target = (mu == nu) ? static_cast<double>(d) : 0.0;
      r.orthogonality_dev = std::max(r.orthogonality_dev, std::abs(g - target));
    }
  }
  return r;
}

OpEigensystem eigensystem(const Matrix& hermitian_op) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_op);
  const int d = static_cast<int>(hermitian_op.rows());
  OpEigensystem out;
  out.values.resize(d);
  out.vectors.resize(d);
  for (int i = 0; i < d; ++i) {
    out.values[i] = es.eigenvalues()[d - 1 - i];
    out.vectors[i] = es.eigenvectors().col(d - 1 - i);
  }
  return out;
}

}  // namespace pdolab
