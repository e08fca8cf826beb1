// classical.hpp — quasi-probability marginal problems: compatibility graphs,
// chordality, the clique-tree extension solver, and the embedding into
// classical space-time states.

#pragma once

#include "pdolab/pdo.hpp"
#include "pdolab/quasi.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdolab {

// Sum out all variables not in `keep`; the result's variable order follows
// `keep` as given.
QuasiDistribution marginalize(const QuasiDistribution& q, std::span<const int> keep);

struct CompatibilityGraph {
  int n_vars = 0;
  std::vector<std::vector<int>> hyperedges;
};

void validate_graph(const CompatibilityGraph& g);

struct ChordalityResult {
  bool chordal = false;
  std::vector<int> elimination_order;  // perfect elimination ordering when chordal
};

// Expands hyperedges to cliques, runs maximum-cardinality search, and checks
// that the reversed visit order is a perfect elimination ordering.
ChordalityResult is_chordal(const CompatibilityGraph& g);

struct NotChordalError : std::runtime_error {
  NotChordalError() : std::runtime_error("marginal scenario graph is not chordal") {}
};
struct NotDecomposableError : std::runtime_error {
  NotDecomposableError()
      : std::runtime_error(
            "hyperedges admit no running-intersection ordering; clique "
            "marginals are not determined by the scenario") {}
};
struct ZeroSeparatorError : std::runtime_error {
  explicit ZeroSeparatorError(const std::string& what) : std::runtime_error(what) {}
};
struct IncompatibleDistributionsError : std::runtime_error {
  double deviation;
  IncompatibleDistributionsError(int a, int b, double dev)
      : std::runtime_error("incompatible distributions " + std::to_string(a) +
                           " and " + std::to_string(b) + ": deviation " +
                           std::to_string(dev)),
        deviation(dev) {}
};

// Orders the hyperedges along a clique tree with the running-intersection
// property and extends sequentially by the conditional-product rule. Parts
// are aligned with g.hyperedges (axes in listed hyperedge-variable order).
// The returned joint is over all variables in ascending index order.
QuasiDistribution solve_chordal(const CompatibilityGraph& g,
                                std::span<const int> shape,
                                std::span<const QuasiDistribution> parts,
                                double compat_tol = 1e-10);

// W = sum_a p(a) prod_i |v_{a_i}><v_{a_i}| as a Pdo. Projector sets must be
// complete rank-1 orthonormal families, one per variable.
Pdo embed_classical_state(const QuasiDistribution& q,
                          const std::vector<std::vector<Vector>>& projectors,
                          std::vector<std::string> labels = {},
                          double tol = 1e-10);

struct LuSearchOptions {
  int starts = 40;
  int iterations = 250;
  std::uint64_t seed = 0;
  double tol = 1e-6;
};

struct LuEquivalenceResult {
  bool equivalent = false;
  double residual = 0.0;  // best |(xU) W1 (xU)^dag - W2| found
};

// Heuristic: spectra comparison plus a seeded search over local unitaries.
// A negative answer means "not found under budget", never a proof.
LuEquivalenceResult local_unitary_equivalent(const Pdo& w1, const Pdo& w2,
                                             const LuSearchOptions& opts = {});

}  // namespace pdolab
