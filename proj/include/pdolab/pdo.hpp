// pdo.hpp — pseudo-density operators stored as real correlation tensors over
// generalized Pauli product bases: conversions, partial trace, compatibility,
// spectra, causality monotones, quasi-probability expansion and purification.

#pragma once

#include "pdolab/linalg.hpp"
#include "pdolab/operator_basis.hpp"
#include "pdolab/quasi.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdolab {

// A space-time state over an ordered event set. Entry T[mu_1..mu_n] is the
// correlator of the basis string sigma_{mu_1} x ... x sigma_{mu_n}; the
// operator it induces is (1 / prod d_i) * sum_mu T[mu] sigma_{mu_1} x ... .
// T[0,...,0] = 1 encodes unit trace.
struct Pdo {
  std::vector<int> dims;            // local dimension per event
  std::vector<std::string> labels;  // unique event identifiers
  std::vector<double> tensor;       // row-major over (d_i^2) indices

  Pdo() = default;
  // zero-correlation (maximally mixed) state with T[0..0] = 1
  explicit Pdo(std::vector<int> dims_in, std::vector<std::string> labels_in = {});

  int events() const { return static_cast<int>(dims.size()); }
  MultiIndex indexer() const;
  long matrix_dim() const { return total_dim(dims); }
  double entry_bound() const;  // prod_i sqrt(d_i)

  double& at(std::span<const int> tuple);
  double at(std::span<const int> tuple) const;

  int event_index(const std::string& label) const;  // -1 when absent
};

// generated labels "e0", "e1", ... used when none are supplied
std::vector<std::string> default_labels(int n);

Matrix to_matrix(const Pdo& p);
Matrix to_matrix(const Pdo& p, std::span<const OperatorBasis> bases);

Pdo from_matrix(const Matrix& m, std::vector<int> dims,
                std::vector<std::string> labels = {}, double tol = 1e-10);

// Keep the listed events (result event order follows `keep`); all traced
// indices are pinned to zero at the tensor level.
Pdo partial_trace(const Pdo& p, std::span<const std::string> keep);
Pdo partial_trace(const Pdo& p, std::span<const int> keep);

bool compatible(const Pdo& p, const Pdo& q,
                std::span<const std::string> overlap, double tol = 1e-9);
// deviation variant: max entrywise difference of the two overlap reductions
double compatibility_deviation(const Pdo& p, const Pdo& q,
                               std::span<const std::string> overlap);

struct Spectrum {
  RealVector values;  // descending, sums to one
  Matrix vectors;     // orthonormal columns aligned with values
};

Spectrum spectrum(const Pdo& p);

double causality_C(const Pdo& p);  // (|R|_1 - 1) / 2
double causality_F(const Pdo& p);  // log2 |R|_1

bool is_positive(const Pdo& p, double tol = 1e-9);

struct PdoValidation {
  double trace_dev = 0.0;              // |T[0..0] - 1|
  double bound_excess = 0.0;           // max(|T| - prod sqrt(d_i), 0)
  double min_marginal_eigenvalue = 0;  // over single-event reductions
  bool trace_ok = false;
  bool bound_ok = false;
  bool positivity_ok = false;
  bool ok() const { return trace_ok && bound_ok && positivity_ok; }
};

PdoValidation validate(const Pdo& p, double tol = 1e-10);

// Quasi-probabilistic mixture of pure product states, built constructively
// from rank-1 eigenprojectors of the basis operators. Per event, local
// outcome index o = mu * d + k selects eigenvector k of sigma_mu; the term
// weight is (1 / prod d_i) * T[mu] * prod_i lambda_{mu_i k_i}.
struct SeparableExpansion {
  QuasiDistribution weights;                     // shape = {d_i^3} per event
  std::vector<std::vector<Vector>> local_states; // [event][local outcome]

  Matrix reassemble() const;
};

SeparableExpansion separable_expansion(const Pdo& p);

// |Psi> = sum_i sqrt|lambda_i| |psi_i> x |e_i> together with the sign unitary
// U = sum_i sign(lambda_i) |psi_i><psi_i| (sign(0) := +1), so that
// U Tr_anc |Psi><Psi| = R and |Psi|^2 = |R|_1.
struct Purification {
  Vector state_vector;  // on system x ancilla (ancilla dim = system dim)
  Matrix sign_unitary;

  double norm_squared() const { return state_vector.squaredNorm(); }
  Matrix reconstruct(long system_dim) const;
};

Purification purify(const Pdo& p);

// tensor product; labels must be disjoint
Pdo tensor_product(const Pdo& p, const Pdo& q);
Pdo relabeled(const Pdo& p, std::vector<std::string> labels);

// probabilistic mixture sum_i w_i p_i (same dims and labels)
Pdo mix(std::span<const Pdo> pdos, std::span<const double> weights);

}  // namespace pdolab
