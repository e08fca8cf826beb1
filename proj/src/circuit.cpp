#include "pdolab/circuit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace pdolab {

namespace {

constexpr double kEigGroupTol = 1e-12;

// Lueders decomposition: eigenvalues grouped into eigenspace projectors.
struct Outcome {
  double value;
  Matrix projector;
};

std::vector<Outcome> lueders_outcomes(const Matrix& op) {
  OpEigensystem es = eigensystem(op);
  std::vector<Outcome> out;
  int i = 0;
  const int d = static_cast<int>(es.values.size());
  while (i < d) {
    int j = i;
    Matrix proj = Matrix::Zero(d, d);
    while (j < d && std::abs(es.values[j] - es.values[i]) <= kEigGroupTol) {
      proj += es.vectors[j] * es.vectors[j].adjoint();
      ++j;
    }
    out.push_back({es.values[i], proj});
    i = j;
  }
  return out;
}

Matrix apply_interval(const Matrix& rho, const IntervalChannel& ch,
                      std::span<const int> dims) {
  Matrix out = rho;
  for (std::size_t g = 0; g < ch.partition.size(); ++g) {
    Matrix next = Matrix::Zero(out.rows(), out.cols());
    for (const Matrix& k : ch.kraus[g].ops) {
      Matrix kk = embed_operator(k, ch.partition[g], dims);
      next += kk * out * kk.adjoint();
    }
    out = next;
  }
  return out;
}

}  // namespace

bool CircuitCheck::ok(double tol) const {
  return events_ok && rho_trace_dev <= tol && rho_hermiticity_dev <= tol &&
         rho_min_eigenvalue >= -tol && kraus_completeness_dev <= tol;
}

CircuitCheck check_circuit(const CircuitSpec& spec) {
  CircuitCheck c;
  const long full = total_dim(spec.wire_dims);
  if (spec.rho0.rows() != full || spec.rho0.cols() != full)
    throw std::invalid_argument("circuit: rho0 size does not match wire dims");

  c.rho_trace_dev = std::abs(spec.rho0.trace() - Cplx(1.0));
  c.rho_hermiticity_dev = max_abs(spec.rho0 - spec.rho0.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(spec.rho0, Eigen::EigenvaluesOnly);
  c.rho_min_eigenvalue = es.eigenvalues().minCoeff();

  for (const auto& interval : spec.intervals) {
    if (interval.partition.size() != interval.kraus.size())
      throw std::invalid_argument("circuit: one Kraus set required per partition group");
    std::set<int> seen;
    for (std::size_t g = 0; g < interval.partition.size(); ++g) {
      long dg = 1;
      for (int w : interval.partition[g]) {
        if (w < 0 || w >= spec.wires())
          throw std::invalid_argument("circuit: partition wire out of range");
        if (!seen.insert(w).second)
          throw std::invalid_argument("circuit: wire repeats in partition");
        dg *= spec.wire_dims[w];
      }
      Matrix comp = Matrix::Zero(dg, dg);
      for (const Matrix& k : interval.kraus[g].ops) {
        if (k.rows() != dg || k.cols() != dg)
          throw std::invalid_argument("circuit: Kraus operator size mismatch");
        comp += k.adjoint() * k;
      }
      c.kraus_completeness_dev =
          std::max(c.kraus_completeness_dev, max_abs(comp - Matrix::Identity(dg, dg)));
    }
  }

  std::set<std::pair<int, int>> marks;
  for (const auto& e : spec.events) {
    if (e.wire < 0 || e.wire >= spec.wires() || e.time < 1 || e.time > spec.instants())
      c.events_ok = false;
    else if (!marks.insert({e.wire, e.time}).second)
      c.events_ok = false;  // duplicate (wire, instant)
  }
  return c;
}

void require_valid(const CircuitSpec& spec, double tol) {
  CircuitCheck c = check_circuit(spec);
  if (!c.ok(tol)) throw std::invalid_argument("circuit: specification fails validation");
}

double correlator(const CircuitSpec& spec, std::span<const int> paulis) {
  if (paulis.size() != spec.events.size())
    throw std::invalid_argument("correlator: one basis index required per event");
  for (std::size_t e = 0; e < spec.events.size(); ++e) {
    const int d = spec.wire_dims[spec.events[e].wire];
    if (paulis[e] < 0 || paulis[e] >= d * d)
      throw std::invalid_argument("correlator: basis index out of range");
  }

  // events grouped by instant, preserving list order
  std::map<int, std::vector<std::size_t>> by_instant;
  for (std::size_t e = 0; e < spec.events.size(); ++e)
    by_instant[spec.events[e].time].push_back(e);

  struct Branch {
    Matrix rho;
    double value;
  };
  std::vector<Branch> branches{{spec.rho0, 1.0}};

  for (int t = 1; t <= spec.instants(); ++t) {
    auto it = by_instant.find(t);
    if (it != by_instant.end()) {
      for (std::size_t e : it->second) {
        const int mu = paulis[e];
        if (mu == 0) continue;
        const int wire = spec.events[e].wire;
        const OperatorBasis& basis = cached_basis(spec.wire_dims[wire]);
        const int pos[] = {wire};
        std::vector<Outcome> outcomes = lueders_outcomes(basis.ops[mu]);
        std::vector<Branch> next;
        next.reserve(branches.size() * outcomes.size());
        for (const Branch& b : branches)
          for (const Outcome& o : outcomes) {
            Matrix proj = embed_operator(o.projector, std::span<const int>(pos),
                                         spec.wire_dims);
            next.push_back({proj * b.rho * proj, b.value * o.value});
          }
        branches = std::move(next);
      }
    }
    if (t < spec.instants())
      for (Branch& b : branches)
        b.rho = apply_interval(b.rho, spec.intervals[t - 1], spec.wire_dims);
  }

  double total = 0.0;
  for (const Branch& b : branches) total += b.value * b.rho.trace().real();
  return total;
}

Pdo build_pdo(const CircuitSpec& spec, const BuildOptions& opts) {
  require_valid(spec);
  if (static_cast<int>(spec.events.size()) > opts.max_events)
    throw std::invalid_argument("build_pdo: event count exceeds the configured cap");
  if (spec.events.empty()) throw std::invalid_argument("build_pdo: no events");

  std::vector<int> dims;
  std::vector<std::string> labels;
  for (const auto& e : spec.events) {
    dims.push_back(spec.wire_dims[e.wire]);
    labels.push_back("w" + std::to_string(e.wire) + "t" + std::to_string(e.time));
  }
  Pdo p(dims, labels);
  const MultiIndex idx = p.indexer();
  std::vector<int> tuple(p.events());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    idx.unflatten(t, tuple);
    p.tensor[t] = correlator(spec, tuple);
  }
  return p;
}

Pdo temporal_two_event(const Matrix& rho, const KrausChannel& channel) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw std::invalid_argument("temporal_two_event: closed form is the two-event qubit case");
  for (const Matrix& k : channel.ops)
    if (k.rows() != 2 || k.cols() != 2)
      throw std::invalid_argument("temporal_two_event: channel dimension mismatch");

  const OperatorBasis& b = cached_basis(2);
  Matrix swap = Matrix::Zero(4, 4);
  for (const Matrix& s : b.ops) swap += kron(s, s) / 2.0;

  Matrix a = kron(rho, Matrix::Identity(2, 2) / 2.0);
  Matrix anti = a * swap + swap * a;

  Matrix out = Matrix::Zero(4, 4);
  for (const Matrix& k : channel.ops) {
    Matrix kk = kron(Matrix::Identity(2, 2), k);
    out += kk * anti * kk.adjoint();
  }
  return from_matrix(out, {2, 2}, {"t1", "t2"});
}

}  // namespace pdolab
