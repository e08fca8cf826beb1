// entropy.hpp — space-time entropies over quasi-probability spectra,
// causality-aware identities, relative entropy, and the inequality suite.
// All logarithms are base 2.

#pragma once

#include "pdolab/pdo.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace pdolab {

// -sum |lambda_i| log2 |lambda_i| with 0 log 0 := 0
double entropy_of_values(const RealVector& values);
double entropy(const Pdo& p);

// Shannon entropy of a probability vector, base 2
double shannon(const RealVector& p);

// (1/(1-alpha)) log2 sum |lambda_i|^alpha, alpha > 0, alpha != 1
double renyi(const Pdo& p, double alpha);

struct ConditionalMutual {
  double conditional = 0.0;  // S(A|B) = S(AB) - S(B)
  double mutual = 0.0;       // I(A:B) = S(A) + S(B) - S(AB)
};

ConditionalMutual conditional_mutual(const Pdo& joint,
                                     std::span<const std::string> part_a);

// Tr(|R1| log2 |R1|) - Tr(|R1| log2 |R2|); a singular |R2| is regularized to
// |R2| + eps I.
double relative_entropy(const Pdo& p, const Pdo& q, double eps = 1e-12);

// Residual of the trace-norm lower bound on the relative entropy,
// S(R1||R2) - 2(C(R1) - C(R2)) / ln 2; nonnegative up to rounding. The
// linear trace term carries the 1/ln 2 because the bound is derived from
// Klein's inequality in natural log.
double klein_residual(const Pdo& p, const Pdo& q, double eps = 1e-12);

// |S(lambda) - (2C+1)(H(p_vec) - F)|
double entropy_identity_residual(const Pdo& p);

struct EntropyReport {
  double S = 0.0;
  double C = 0.0;
  double F = 0.0;
  std::vector<std::pair<double, double>> renyi;  // (alpha, value)
  RealVector p_vec;                              // |lambda| / |R|_1, spectrum order
  double identity_residual = 0.0;
};

EntropyReport entropy_report(const Pdo& p, std::span<const double> alphas = {});

// Weak subadditivity residual for a bipartition of the events:
// S(R_A) + S(R_B) - S(R_AB) - Delta - Tr(|R_AB| - |R_A| x |R_B|) / ln 2,
// with Delta = Tr[(|R_AB| - |R_A| x |R_B|) log2(|R_A| x |R_B|)].
// Marginals are regularized by eps inside the logarithm.
double subadditivity_residual(const Pdo& p, std::span<const std::string> part_a,
                              double eps = 1e-12);

struct InequalityReport {
  double unitary_invariance_dev = 0.0;   // equality, <= 1e-9 expected
  double weak_additivity_dev = 0.0;      // equality, <= 1e-9 expected
  double weak_concavity_residual = 0.0;  // inequality, >= -1e-8 expected
  double weak_subadditivity_residual = 0.0;
  double klein_residual = 0.0;
};

// Evaluates the suite on (p, q): unitary invariance of S(p) under a seeded
// Haar unitary, weak additivity of p x q, weak concavity of the alpha-mixture
// of |p| and |q| (same dims required), weak subadditivity of p split at its
// first event, and the Klein bound for (p, q).
InequalityReport check_inequalities(const Pdo& p, const Pdo& q, double mix_alpha,
                                    std::uint64_t seed = 0);

}  // namespace pdolab
