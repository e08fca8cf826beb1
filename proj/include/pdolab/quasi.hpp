// quasi.hpp — real-valued (possibly negative) normalized weight vectors over
// discrete outcome grids. Shared currency of spectra, separable expansions and
// the classical marginal solver.

#pragma once

#include "pdolab/linalg.hpp"

#include <vector>

namespace pdolab {

struct QuasiDistribution {
  std::vector<int> shape;       // per-variable cardinalities
  std::vector<double> weights;  // row-major, sums to one

  QuasiDistribution() = default;
  QuasiDistribution(std::vector<int> shape_in, std::vector<double> weights_in);

  std::size_t size() const { return weights.size(); }
  int variables() const { return static_cast<int>(shape.size()); }
  double total() const;
  double min_weight() const;
  bool normalized(double tol = 1e-9) const;

  MultiIndex indexer() const { return MultiIndex(shape); }
};

// Uniform distribution over the grid.
QuasiDistribution uniform_distribution(std::vector<int> shape);

}  // namespace pdolab
