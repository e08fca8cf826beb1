// marginal_types.hpp — marginal scenarios over event sets and the Herm_1
// solution families produced by the constructive solver.

#pragma once

#include "pdolab/pdo.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace pdolab {

struct EventSet {
  std::vector<std::string> labels;
  std::vector<int> dims;

  int count() const { return static_cast<int>(labels.size()); }
  int index_of(const std::string& label) const;
};

struct ScenarioPart {
  std::vector<std::string> events;  // subset of the global event set
  Pdo pdo;
};

struct IncompatiblePartsError : std::runtime_error {
  int part_a, part_b;
  double deviation;
  IncompatiblePartsError(int a, int b, double dev)
      : std::runtime_error("incompatible parts " + std::to_string(a) + " and " +
                           std::to_string(b) + ": overlap deviation " +
                           std::to_string(dev)),
        part_a(a), part_b(b), deviation(dev) {}
};

// A family of event subsets with reduced Pdos. Construction normalizes the
// family (parts contained in another part are dropped) and verifies pairwise
// compatibility on overlaps, throwing IncompatiblePartsError otherwise.
class MarginalScenario {
 public:
  static MarginalScenario create(std::vector<ScenarioPart> parts,
                                 double compat_tol = 1e-9);
  // explicit global event order (must cover exactly the union of the parts)
  static MarginalScenario create(std::vector<ScenarioPart> parts,
                                 double compat_tol,
                                 const std::vector<std::string>& event_order);

  const EventSet& global_events() const { return global_; }
  const std::vector<ScenarioPart>& parts() const { return parts_; }
  double compat_tol() const { return compat_tol_; }

 private:
  MarginalScenario() = default;
  EventSet global_;
  std::vector<ScenarioPart> parts_;
  double compat_tol_ = 1e-9;
};

// The Theorem-1 solution family: index tuples whose support lies inside some
// part are fixed by that part; all other tuples are free, zero at the base
// point. Any assignment of the free entries still reduces onto every part.
struct SolutionFamily {
  EventSet events;
  std::vector<double> base_point;             // full tensor, free entries 0
  std::vector<char> fixed_mask;               // per flat tensor index
  std::vector<std::vector<int>> free_indices; // tuples, ascending flat order
  std::vector<std::size_t> free_flat;

  std::size_t free_count() const { return free_flat.size(); }
  Pdo base_pdo() const;
  Pdo completed(std::span<const double> free_values) const;
};

}  // namespace pdolab
