// marginal.hpp — the constructive Herm_1 marginal solver and its constraint
// filters: positivity search, polytope membership, symmetric extension,
// polygamy construction, and symmetry checking.

#pragma once

#include "pdolab/marginal_types.hpp"
#include "pdolab/pseudo_channel.hpp"

#include <cstdint>
#include <optional>

namespace pdolab {

SolutionFamily solve_herm1(const MarginalScenario& s);

// Max entrywise deviation between reductions of the base point (or of an
// explicit candidate) and the scenario parts.
double reduce_check(const SolutionFamily& f, const MarginalScenario& s);
double reduce_check(const Pdo& candidate, const MarginalScenario& s);

struct PositiveSearchOptions {
  int starts = 64;
  int iterations = 500;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int threads = 1;
};

struct PositiveSearchResult {
  std::optional<Pdo> found;      // empty means "not found under budget"
  double best_min_eigenvalue = 0.0;
};

// Multi-start projected subgradient ascent on the smallest eigenvalue over
// the free entries. An empty result is a search outcome, not a proof.
PositiveSearchResult filter_positive(const SolutionFamily& f,
                                     const PositiveSearchOptions& opts = {});

struct HalfSpace {
  Matrix op;           // Hermitian
  double offset = 0.0;
};

bool in_halfspaces(const Pdo& p, std::span<const HalfSpace> halves,
                   double tol = 1e-10);

// Convex-hull membership by dense two-phase simplex feasibility over the
// vectorized tensors (Bland's rule, feasibility tolerance `tol`).
bool in_hull(const Pdo& p, std::span<const Pdo> vertices, double tol = 1e-9);

// n-event symmetric extension of a two-event state via its separable
// expansion: every {A, B_i} reduction reproduces the input.
Pdo symmetric_extension(const Pdo& w, int total_events);

// Singlet polygamy construction over qubit events {A, B_1..B_n}:
// (1/2^{n+1}) (I - sum_i Omega_i + Xi) with Omega_i the A-B_i singlet
// coupling. Xi (full tensor over the n+1 events) may only be supported on
// tuples with at least two nonzero non-A indices. Defaults to zero.
Pdo polygamy_extension(int n, const std::vector<double>* xi = nullptr);

// Xi that also couples every B_i-B_j pair by the singlet tensor, making all
// pairwise reductions (including B_i B_j) the singlet.
std::vector<double> pairwise_singlet_xi(int n);

struct SymmetryReport {
  bool global_symmetric = false;
  bool parts_symmetric = false;
  double max_global_deviation = 0.0;
  double max_part_deviation = 0.0;
  bool ok() const { return global_symmetric && parts_symmetric; }
};

// Verifies that each channel fixes the global Pdo, then that the
// corresponding marginal channels fix every part.
SymmetryReport check_symmetry(const MarginalScenario& s, const Pdo& global,
                              std::span<const PseudoChannel> group_channels,
                              double tol = 1e-9);

}  // namespace pdolab
