// helpers.hpp — shared fixtures and generators for the test suites.

#pragma once

#include "pdolab/circuit.hpp"
#include "pdolab/pdo.hpp"
#include "pdolab/pseudo_channel.hpp"

#include <random>
#include <vector>

namespace pdolab::testing {

// exact fixture tensors, no floating-point construction involved

inline Pdo singlet_pdo() {
  Pdo p({2, 2}, {"A", "B"});
  p.tensor = {1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1};
  return p;
}

inline Pdo temporal_bell_pdo() {
  Pdo p({2, 2}, {"t1", "t2"});
  p.tensor = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  return p;
}

inline Matrix singlet_matrix() {
  Matrix m = Matrix::Zero(4, 4);
  m(1, 1) = 0.5;
  m(2, 2) = 0.5;
  m(1, 2) = -0.5;
  m(2, 1) = -0.5;
  return m;
}

inline Pdo ghz_pdo() {
  Vector v = Vector::Zero(8);
  v[0] = 1.0 / std::sqrt(2.0);
  v[7] = 1.0 / std::sqrt(2.0);
  return from_matrix(v * v.adjoint(), {2, 2, 2}, {"A", "B", "C"});
}

inline CircuitSpec singlet_circuit() {
  CircuitSpec spec;
  spec.wire_dims = {2, 2};
  spec.rho0 = singlet_matrix();
  spec.events = {{0, 1}, {1, 1}};
  return spec;
}

inline CircuitSpec temporal_identity_circuit(const Matrix& rho) {
  CircuitSpec spec;
  spec.wire_dims = {2};
  spec.rho0 = rho;
  spec.intervals.push_back({{{0}}, {KrausChannel{{Matrix::Identity(2, 2)}}}});
  spec.events = {{0, 1}, {0, 2}};
  return spec;
}

// random CPTP Kraus set via a Haar isometry split into blocks
inline KrausChannel random_cptp(int d, int n_kraus, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(d * n_kraus, d);
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) a(i, j) = Cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = Matrix(qr.householderQ()).leftCols(d);
  KrausChannel ch;
  for (int k = 0; k < n_kraus; ++k) ch.ops.push_back(q.middleRows(k * d, d));
  return ch;
}

// random HPTP channel: a CPTP core plus a (+t, C), (-t, UC) signed pair
inline PseudoChannel random_hptp(int d, std::mt19937_64& rng) {
  KrausChannel core = random_cptp(d, 2, rng);
  std::vector<WeightedKraus> ks;
  for (const auto& op : core.ops) ks.push_back({1.0, op});
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix c(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) c(i, j) = Cplx(g(rng), g(rng));
  Matrix u = random_unitary(d, rng);
  std::uniform_real_distribution<double> w(0.2, 1.0);
  double t = w(rng);
  ks.push_back({t, c});
  ks.push_back({-t, u * c});
  return PseudoChannel({d}, {d}, std::move(ks));
}

// valid PDO from a random one-wire circuit with n sequential qubit events
inline Pdo random_temporal_pdo(int n_events, std::mt19937_64& rng) {
  CircuitSpec spec;
  spec.wire_dims = {2};
  spec.rho0 = random_density(2, rng);
  for (int i = 0; i + 1 < n_events; ++i)
    spec.intervals.push_back({{{0}}, {random_cptp(2, 2, rng)}});
  for (int i = 0; i < n_events; ++i) spec.events.push_back({0, i + 1});
  BuildOptions opts;
  opts.max_events = n_events;
  return build_pdo(spec, opts);
}

// full-rank variant: blends toward the maximally mixed tensor
inline Pdo random_full_rank_pdo(int n_events, std::mt19937_64& rng) {
  Pdo p = random_temporal_pdo(n_events, rng);
  Pdo mixed(p.dims, p.labels);
  const Pdo pdos[] = {p, mixed};
  const double weights[] = {0.9, 0.1};
  return mix(pdos, weights);
}

// arbitrary Herm_1 correlation tensor (no positivity structure)
inline Pdo random_tensor_pdo(std::vector<int> dims, std::mt19937_64& rng,
                             double scale = 0.8) {
  Pdo p(std::move(dims));
  std::uniform_real_distribution<double> u(-scale, scale);
  for (std::size_t t = 1; t < p.tensor.size(); ++t) p.tensor[t] = u(rng);
  return p;
}

// independent dense partial trace used as an oracle: digit arithmetic only,
// no shared code with the library implementation
inline Matrix oracle_partial_trace(const Matrix& m, const std::vector<int>& dims,
                                   const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> drop;
  for (int i = 0; i < n; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end()) drop.push_back(i);

  long dk = 1, dd = 1;
  for (int k : keep) dk *= dims[k];
  for (int d : drop) dd *= dims[d];

  auto index_of = [&](const std::vector<int>& digs) {
    long x = 0;
    for (int i = 0; i < n; ++i) x = x * dims[i] + digs[i];
    return x;
  };

  Matrix out = Matrix::Zero(dk, dk);
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c) {
      // decompose r, c over the kept subsystems in `keep` order
      std::vector<int> rk(keep.size()), ck(keep.size());
      long rr = r, cc = c;
      for (int i = static_cast<int>(keep.size()) - 1; i >= 0; --i) {
        rk[i] = static_cast<int>(rr % dims[keep[i]]);
        rr /= dims[keep[i]];
        ck[i] = static_cast<int>(cc % dims[keep[i]]);
        cc /= dims[keep[i]];
      }
      Cplx sum = 0.0;
      for (long t = 0; t < dd; ++t) {
        std::vector<int> td(drop.size());
        long tt = t;
        for (int i = static_cast<int>(drop.size()) - 1; i >= 0; --i) {
          td[i] = static_cast<int>(tt % dims[drop[i]]);
          tt /= dims[drop[i]];
        }
        std::vector<int> rd(n), cd(n);
        for (std::size_t i = 0; i < keep.size(); ++i) {
          rd[keep[i]] = rk[i];
          cd[keep[i]] = ck[i];
        }
        for (std::size_t i = 0; i < drop.size(); ++i) {
          rd[drop[i]] = td[i];
          cd[drop[i]] = td[i];
        }
        sum += m(index_of(rd), index_of(cd));
      }
      out(r, c) = sum;
    }
  return out;
}

inline double tensor_dev(const Pdo& a, const Pdo& b) {
  double dev = 0.0;
  for (std::size_t i = 0; i < a.tensor.size(); ++i)
    dev = std::max(dev, std::abs(a.tensor[i] - b.tensor[i]));
  return dev;
}

}  // namespace pdolab::testing
