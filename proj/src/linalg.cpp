#include "pdolab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

namespace pdolab {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Matrix kron_all(std::span<const Matrix> factors) {
  if (factors.empty()) return Matrix::Identity(1, 1);
  Matrix r = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) r = kron(r, factors[k]);
  return r;
}

long total_dim(std::span<const int> dims) {
  long d = 1;
  for (int di : dims) d *= di;
  return d;
}

Matrix partial_trace_dense(const Matrix& m, std::span<const int> dims,
                           std::span<const int> keep) {
  const int n = static_cast<int>(dims.size());
  const long full = total_dim(dims);
  if (m.rows() != full || m.cols() != full)
    throw std::invalid_argument("partial_trace_dense: dims mismatch matrix size");

  std::vector<char> kept(n, 0);
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::invalid_argument("partial_trace_dense: bad subsystem index");
    if (kept[k]) throw std::invalid_argument("partial_trace_dense: duplicate subsystem index");
    kept[k] = 1;
  }
  std::vector<int> traced;
  for (int i = 0; i < n; ++i)
    if (!kept[i]) traced.push_back(i);

  long dim_keep = 1;
  for (int k : keep) dim_keep *= dims[k];
  long dim_traced = 1;
  for (int t : traced) dim_traced *= dims[t];

  // strides of each subsystem in the full row-major index
  std::vector<long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  Matrix out = Matrix::Zero(dim_keep, dim_keep);
  std::vector<int> kd(keep.size()), td(traced.size());
  for (long r = 0; r < dim_keep; ++r) {
    long tmp = r;
    for (int i = static_cast<int>(keep.size()) - 1; i >= 0; --i) {
      kd[i] = static_cast<int>(tmp % dims[keep[i]]);
      tmp /= dims[keep[i]];
    }
    for (long c = 0; c < dim_keep; ++c) {
      long tmpc = c;
      std::vector<int> cd(keep.size());
      for (int i = static_cast<int>(keep.size()) - 1; i >= 0; --i) {
        cd[i] = static_cast<int>(tmpc % dims[keep[i]]);
        tmpc /= dims[keep[i]];
      }
      Cplx sum = 0.0;
      for (long t = 0; t < dim_traced; ++t) {
        long tt = t;
        for (int i = static_cast<int>(traced.size()) - 1; i >= 0; --i) {
          td[i] = static_cast<int>(tt % dims[traced[i]]);
          tt /= dims[traced[i]];
        }
        long row = 0, col = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) {
          row += kd[i] * stride[keep[i]];
          col += cd[i] * stride[keep[i]];
        }
        for (std::size_t i = 0; i < traced.size(); ++i) {
          row += td[i] * stride[traced[i]];
          col += td[i] * stride[traced[i]];
        }
        sum += m(row, col);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

Matrix permute_subsystems(const Matrix& m, std::span<const int> dims,
                          std::span<const int> perm) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permute_subsystems: perm size mismatch");
  const long full = total_dim(dims);

  std::vector<long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  // map: full index in new order -> full index in old order
  std::vector<long> map(full);
  std::vector<int> digits(n);
  for (long x = 0; x < full; ++x) {
    long tmp = x;
    for (int i = n - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(tmp % dims[perm[i]]);
      tmp /= dims[perm[i]];
    }
    long old = 0;
    for (int i = 0; i < n; ++i) old += digits[i] * stride[perm[i]];
    map[x] = old;
  }
  Matrix out(full, full);
  for (long r = 0; r < full; ++r)
    for (long c = 0; c < full; ++c) out(r, c) = m(map[r], map[c]);
  return out;
}

Matrix embed_operator(const Matrix& op, std::span<const int> positions,
                      std::span<const int> dims) {
  const int n = static_cast<int>(dims.size());
  long dop = 1;
  for (int p : positions) {
    if (p < 0 || p >= n) throw std::invalid_argument("embed_operator: bad position");
    dop *= dims[p];
  }
  if (op.rows() != dop || op.cols() != dop)
    throw std::invalid_argument("embed_operator: operator size mismatch");

  std::vector<Matrix> factors;
  factors.reserve(n);
  std::vector<int> order;  // positions first, then the rest
  order.assign(positions.begin(), positions.end());
  std::vector<char> used(n, 0);
  for (int p : positions) used[p] = 1;
  long drest = 1;
  for (int i = 0; i < n; ++i)
    if (!used[i]) {
      order.push_back(i);
      drest *= dims[i];
    }

  Matrix big = kron(op, Matrix::Identity(drest, drest));
  // big lives on subsystems in `order`; permute back to natural order
  std::vector<int> order_dims(n);
  for (int i = 0; i < n; ++i) order_dims[i] = dims[order[i]];
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[order[i]] = i;
  return permute_subsystems(big, order_dims, inv);
}

bool is_hermitian(const Matrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix hermitian_abs(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd abs_vals = es.eigenvalues().cwiseAbs();
  return es.eigenvectors() * abs_vals.asDiagonal() * es.eigenvectors().adjoint();
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  RealVector v = es.eigenvalues();
  std::reverse(v.begin(), v.end());
  return v;
}

double trace_norm(const Matrix& m) {
  if (is_hermitian(m, 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double max_abs(const Matrix& m) {
  return m.cwiseAbs().maxCoeff();
}

Matrix random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix phases so the distribution is Haar
  for (int j = 0; j < d; ++j) {
    Cplx rjj = r(j, j);
    Cplx phase = std::abs(rjj) > 0 ? rjj / std::abs(rjj) : Cplx(1.0);
    q.col(j) *= phase;
  }
  return q;
}

Matrix random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Cplx(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

Matrix random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Cplx(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

MultiIndex::MultiIndex(std::vector<int> shape) : shape_(std::move(shape)) {
  strides_.assign(shape_.size(), 1);
  for (int i = static_cast<int>(shape_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * shape_[i + 1];
  for (int s : shape_) size_ *= s;
}

std::size_t MultiIndex::flatten(std::span<const int> tuple) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < shape_.size(); ++i) flat += tuple[i] * strides_[i];
  return flat;
}

void MultiIndex::unflatten(std::size_t flat, std::span<int> tuple) const {
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    tuple[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
}

std::vector<int> MultiIndex::unflatten(std::size_t flat) const {
  std::vector<int> t(shape_.size());
  unflatten(flat, t);
  return t;
}

}  // namespace pdolab
