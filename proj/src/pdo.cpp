#include "pdolab/pdo.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace pdolab {

namespace {

std::vector<int> tensor_shape(std::span<const int> dims) {
  std::vector<int> shape(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) shape[i] = dims[i] * dims[i];
  return shape;
}

void check_labels(const std::vector<int>& dims, const std::vector<std::string>& labels) {
  if (labels.size() != dims.size())
    throw std::invalid_argument("Pdo: label count must match event count");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size())
    throw std::invalid_argument("Pdo: event labels must be unique");
}

}  // namespace

std::vector<std::string> default_labels(int n) {
  std::vector<std::string> v(n);
  for (int i = 0; i < n; ++i) v[i] = "e" + std::to_string(i);
  return v;
}

Pdo::Pdo(std::vector<int> dims_in, std::vector<std::string> labels_in)
    : dims(std::move(dims_in)), labels(std::move(labels_in)) {
  for (int d : dims)
    if (d < 2) throw std::invalid_argument("Pdo: local dimensions must be >= 2");
  if (total_dim(dims) > 1024)  // dense desk-scale cap, 2^10 per matrix side
    throw std::invalid_argument("Pdo: total dimension exceeds the dense-storage cap");
  if (labels.empty()) labels = default_labels(events());
  check_labels(dims, labels);
  tensor.assign(MultiIndex(tensor_shape(dims)).size(), 0.0);
  tensor[0] = 1.0;
}

MultiIndex Pdo::indexer() const { return MultiIndex(tensor_shape(dims)); }

double Pdo::entry_bound() const {
  double b = 1.0;
  for (int d : dims) b *= std::sqrt(static_cast<double>(d));
  return b;
}

double& Pdo::at(std::span<const int> tuple) { return tensor[indexer().flatten(tuple)]; }
double Pdo::at(std::span<const int> tuple) const { return tensor[indexer().flatten(tuple)]; }

int Pdo::event_index(const std::string& label) const {
  for (int i = 0; i < events(); ++i)
    if (labels[i] == label) return i;
  return -1;
}

Matrix to_matrix(const Pdo& p) {
  std::vector<OperatorBasis> bases;
  bases.reserve(p.dims.size());
  for (int d : p.dims) bases.push_back(cached_basis(d));
  return to_matrix(p, bases);
}

Matrix to_matrix(const Pdo& p, std::span<const OperatorBasis> bases) {
  if (bases.size() != p.dims.size())
    throw std::invalid_argument("to_matrix: basis count mismatch");
  for (std::size_t i = 0; i < bases.size(); ++i)
    if (bases[i].dim != p.dims[i])
      throw std::invalid_argument("to_matrix: basis dimension mismatch");

  const long full = p.matrix_dim();
  const MultiIndex idx = p.indexer();
  Matrix m = Matrix::Zero(full, full);
  std::vector<int> tuple(p.events());
  std::vector<Matrix> factors(p.events());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double w = p.tensor[t];
    if (w == 0.0) continue;
    idx.unflatten(t, tuple);
    for (int i = 0; i < p.events(); ++i) factors[i] = bases[i].ops[tuple[i]];
    m += w * kron_all(factors);
  }
  return m / static_cast<double>(full);
}

Pdo from_matrix(const Matrix& m, std::vector<int> dims,
                std::vector<std::string> labels, double tol) {
  const long full = total_dim(dims);
  if (m.rows() != full || m.cols() != full)
    throw std::invalid_argument("from_matrix: matrix size does not match dims");
  if (!is_hermitian(m, tol))
    throw std::invalid_argument("from_matrix: matrix is not Hermitian");
  if (std::abs(m.trace() - Cplx(1.0)) > tol)
    throw std::invalid_argument("from_matrix: matrix is not trace-one");

  Pdo p(std::move(dims), std::move(labels));
  const MultiIndex idx = p.indexer();
  std::vector<int> tuple(p.events());
  std::vector<Matrix> factors(p.events());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    idx.unflatten(t, tuple);
    for (int i = 0; i < p.events(); ++i) factors[i] = cached_basis(p.dims[i]).ops[tuple[i]];
    p.tensor[t] = (m * kron_all(factors)).trace().real();
  }
  return p;
}

Pdo partial_trace(const Pdo& p, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::set<int> seen;
  for (int k : keep) {
    if (k < 0 || k >= p.events()) throw std::invalid_argument("partial_trace: unknown event index");
    if (!seen.insert(k).second) throw std::invalid_argument("partial_trace: duplicate event");
  }
  std::vector<int> new_dims;
  std::vector<std::string> new_labels;
  for (int k : keep) {
    new_dims.push_back(p.dims[k]);
    new_labels.push_back(p.labels[k]);
  }
  Pdo out(new_dims, new_labels);
  const MultiIndex src = p.indexer();
  const MultiIndex dst = out.indexer();
  std::vector<int> dst_tuple(out.events()), src_tuple(p.events(), 0);
  for (std::size_t t = 0; t < dst.size(); ++t) {
    dst.unflatten(t, dst_tuple);
    std::fill(src_tuple.begin(), src_tuple.end(), 0);
    for (std::size_t i = 0; i < keep.size(); ++i) src_tuple[keep[i]] = dst_tuple[i];
    out.tensor[t] = p.tensor[src.flatten(src_tuple)];
  }
  return out;
}

Pdo partial_trace(const Pdo& p, std::span<const std::string> keep) {
  std::vector<int> idx;
  idx.reserve(keep.size());
  for (const auto& label : keep) {
    int i = p.event_index(label);
    if (i < 0) throw std::invalid_argument("partial_trace: unknown event label '" + label + "'");
    idx.push_back(i);
  }
  return partial_trace(p, idx);
}

double compatibility_deviation(const Pdo& p, const Pdo& q,
                               std::span<const std::string> overlap) {
  if (overlap.empty()) return 0.0;
  Pdo rp = partial_trace(p, overlap);
  Pdo rq = partial_trace(q, overlap);
  if (rp.dims != rq.dims)
    throw std::invalid_argument("compatibility: overlap dimensions differ");
  double dev = 0.0;
  for (std::size_t i = 0; i < rp.tensor.size(); ++i)
    dev = std::max(dev, std::abs(rp.tensor[i] - rq.tensor[i]));
  return dev;
}

bool compatible(const Pdo& p, const Pdo& q,
                std::span<const std::string> overlap, double tol) {
  return compatibility_deviation(p, q, overlap) <= tol;
}

Spectrum spectrum(const Pdo& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(to_matrix(p));
  const long n = p.matrix_dim();
  Spectrum s;
  s.values.resize(n);
  s.vectors.resize(n, n);
  for (long i = 0; i < n; ++i) {
    s.values[i] = es.eigenvalues()[n - 1 - i];
    s.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return s;
}

double causality_C(const Pdo& p) {
  return (spectrum(p).values.cwiseAbs().sum() - 1.0) / 2.0;
}

double causality_F(const Pdo& p) {
  return std::log2(spectrum(p).values.cwiseAbs().sum());
}

bool is_positive(const Pdo& p, double tol) {
  return spectrum(p).values.minCoeff() >= -tol;
}

PdoValidation validate(const Pdo& p, double tol) {
  PdoValidation v;
  v.trace_dev = std::abs(p.tensor[0] - 1.0);
  v.trace_ok = v.trace_dev <= tol;

  const double bound = p.entry_bound();
  for (double t : p.tensor) v.bound_excess = std::max(v.bound_excess, std::abs(t) - bound);
  v.bound_excess = std::max(v.bound_excess, 0.0);
  v.bound_ok = v.bound_excess <= tol;

  v.min_marginal_eigenvalue = 0.0;
  for (int e = 0; e < p.events(); ++e) {
    const int keep[] = {e};
    Pdo single = partial_trace(p, std::span<const int>(keep));
    double mn = spectrum(single).values.minCoeff();
    if (e == 0 || mn < v.min_marginal_eigenvalue) v.min_marginal_eigenvalue = mn;
  }
  v.positivity_ok = v.min_marginal_eigenvalue >= -tol;
  return v;
}

Matrix SeparableExpansion::reassemble() const {
  const MultiIndex idx = weights.indexer();
  const int n = weights.variables();
  long full = 1;
  for (const auto& states : local_states) full *= states.front().size();
  Matrix m = Matrix::Zero(full, full);
  std::vector<int> tuple(n);
  std::vector<Matrix> factors(n);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double w = weights.weights[t];
    if (w == 0.0) continue;
    idx.unflatten(t, tuple);
    for (int i = 0; i < n; ++i) {
      const Vector& v = local_states[i][tuple[i]];
      factors[i] = v * v.adjoint();
    }
    m += w * kron_all(factors);
  }
  return m;
}

SeparableExpansion separable_expansion(const Pdo& p) {
  const int n = p.events();
  // per event: rank-1 eigen pairs of every basis operator
  std::vector<std::vector<OpEigensystem>> eig(n);
  for (int i = 0; i < n; ++i) {
    const OperatorBasis& b = cached_basis(p.dims[i]);
    eig[i].reserve(b.ops.size());
    for (const Matrix& op : b.ops) eig[i].push_back(eigensystem(op));
  }

  SeparableExpansion se;
  std::vector<int> shape(n);
  se.local_states.resize(n);
  for (int i = 0; i < n; ++i) {
    const int d = p.dims[i];
    shape[i] = d * d * d;  // (mu, k) flattened as mu * d + k
    se.local_states[i].resize(shape[i]);
    for (int mu = 0; mu < d * d; ++mu)
      for (int k = 0; k < d; ++k) se.local_states[i][mu * d + k] = eig[i][mu].vectors[k];
  }

  const MultiIndex src = p.indexer();
  const MultiIndex dst = MultiIndex(shape);
  std::vector<double> weights(dst.size(), 0.0);
  const double inv_full = 1.0 / static_cast<double>(p.matrix_dim());
  std::vector<int> mu(n), out(n);

  // enumerate (mu-tuple, k-tuple) pairs; weight = T[mu] * prod lambda / prod d
  std::vector<int> kk(n, 0);
  for (std::size_t t = 0; t < src.size(); ++t) {
    const double base = p.tensor[t] * inv_full;
    if (base == 0.0) continue;
    src.unflatten(t, mu);
    std::fill(kk.begin(), kk.end(), 0);
    while (true) {
      double w = base;
      for (int i = 0; i < n; ++i) w *= eig[i][mu[i]].values[kk[i]];
      if (w != 0.0) {
        for (int i = 0; i < n; ++i) out[i] = mu[i] * p.dims[i] + kk[i];
        weights[dst.flatten(out)] += w;
      }
      int pos = n - 1;
      while (pos >= 0 && ++kk[pos] == p.dims[pos]) kk[pos--] = 0;
      if (pos < 0) break;
    }
  }
  se.weights = QuasiDistribution(shape, std::move(weights));
  return se;
}

Matrix Purification::reconstruct(long system_dim) const {
  const long anc = state_vector.size() / system_dim;
  Matrix dense = state_vector * state_vector.adjoint();
  std::vector<int> dims = {static_cast<int>(system_dim), static_cast<int>(anc)};
  const int keep[] = {0};
  Matrix reduced = partial_trace_dense(dense, dims, std::span<const int>(keep));
  return sign_unitary * reduced;
}

Purification purify(const Pdo& p) {
  Spectrum s = spectrum(p);
  const long n = p.matrix_dim();
  Purification out;
  out.state_vector = Vector::Zero(n * n);
  out.sign_unitary = Matrix::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    const double lam = s.values[i];
    const double sign = (std::abs(lam) < 1e-12) ? 1.0 : (lam < 0 ? -1.0 : 1.0);
    // |psi_i> x |e_i> with |e_i> the i-th ancilla basis vector
    for (long r = 0; r < n; ++r) out.state_vector[r * n + i] += std::sqrt(std::abs(lam)) * s.vectors(r, i);
    out.sign_unitary += sign * (s.vectors.col(i) * s.vectors.col(i).adjoint());
  }
  return out;
}

Pdo tensor_product(const Pdo& p, const Pdo& q) {
  for (const auto& label : q.labels)
    if (p.event_index(label) >= 0)
      throw std::invalid_argument("tensor_product: duplicate event label '" + label + "'");
  std::vector<int> dims = p.dims;
  dims.insert(dims.end(), q.dims.begin(), q.dims.end());
  std::vector<std::string> labels = p.labels;
  labels.insert(labels.end(), q.labels.begin(), q.labels.end());
  Pdo out(dims, labels);
  const std::size_t qn = q.tensor.size();
  for (std::size_t i = 0; i < p.tensor.size(); ++i)
    for (std::size_t j = 0; j < qn; ++j) out.tensor[i * qn + j] = p.tensor[i] * q.tensor[j];
  return out;
}

Pdo relabeled(const Pdo& p, std::vector<std::string> labels) {
  Pdo out = p;
  check_labels(out.dims, labels);
  out.labels = std::move(labels);
  return out;
}

Pdo mix(std::span<const Pdo> pdos, std::span<const double> weights) {
  if (pdos.empty() || pdos.size() != weights.size())
    throw std::invalid_argument("mix: need matching nonempty pdos and weights");
  Pdo out = pdos[0];
  for (double& t : out.tensor) t *= weights[0];
  for (std::size_t k = 1; k < pdos.size(); ++k) {
    if (pdos[k].dims != out.dims)
      throw std::invalid_argument("mix: dimension mismatch");
    for (std::size_t i = 0; i < out.tensor.size(); ++i)
      out.tensor[i] += weights[k] * pdos[k].tensor[i];
  }
  return out;
}

}  // namespace pdolab
