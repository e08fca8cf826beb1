#include "pdolab/quasi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pdolab {

QuasiDistribution::QuasiDistribution(std::vector<int> shape_in,
                                     std::vector<double> weights_in)
    : shape(std::move(shape_in)), weights(std::move(weights_in)) {
  std::size_t expect = 1;
  for (int s : shape) {
    if (s < 1) throw std::invalid_argument("QuasiDistribution: cardinalities must be >= 1");
    expect *= s;
  }
  if (weights.size() != expect)
    throw std::invalid_argument("QuasiDistribution: weight count does not match shape");
}

double QuasiDistribution::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double QuasiDistribution::min_weight() const {
  return *std::min_element(weights.begin(), weights.end());
}

bool QuasiDistribution::normalized(double tol) const {
  return std::abs(total() - 1.0) <= tol;
}

QuasiDistribution uniform_distribution(std::vector<int> shape) {
  std::size_t n = 1;
  for (int s : shape) n *= s;
  return QuasiDistribution(std::move(shape), std::vector<double>(n, 1.0 / n));
}

}  // namespace pdolab
