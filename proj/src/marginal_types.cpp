#include "pdolab/marginal_types.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pdolab {

int EventSet::index_of(const std::string& label) const {
  for (int i = 0; i < count(); ++i)
    if (labels[i] == label) return i;
  return -1;
}

MarginalScenario MarginalScenario::create(std::vector<ScenarioPart> parts,
                                          double compat_tol,
                                          const std::vector<std::string>& event_order) {
  MarginalScenario s = create(std::move(parts), compat_tol);
  if (event_order.size() != s.global_.labels.size())
    throw std::invalid_argument("MarginalScenario: event order must cover the union");
  EventSet reordered;
  for (const auto& label : event_order) {
    int i = s.global_.index_of(label);
    if (i < 0)
      throw std::invalid_argument("MarginalScenario: unknown event '" + label +
                                  "' in explicit order");
    reordered.labels.push_back(label);
    reordered.dims.push_back(s.global_.dims[i]);
  }
  s.global_ = std::move(reordered);
  return s;
}

MarginalScenario MarginalScenario::create(std::vector<ScenarioPart> parts,
                                          double compat_tol) {
  if (parts.empty()) throw std::invalid_argument("MarginalScenario: no parts");

  for (auto& part : parts) {
    if (part.events.empty()) part.events = part.pdo.labels;
    if (part.events != part.pdo.labels)
      throw std::invalid_argument(
          "MarginalScenario: part event list must match its Pdo labels");
  }

  // union of events in order of first appearance, with consistent dims
  EventSet global;
  std::map<std::string, int> dim_of;
  for (const auto& part : parts)
    for (int i = 0; i < part.pdo.events(); ++i) {
      const std::string& label = part.events[i];
      auto it = dim_of.find(label);
      if (it == dim_of.end()) {
        dim_of[label] = part.pdo.dims[i];
        global.labels.push_back(label);
        global.dims.push_back(part.pdo.dims[i]);
      } else if (it->second != part.pdo.dims[i]) {
        throw std::invalid_argument("MarginalScenario: event '" + label +
                                    "' has inconsistent dimensions");
      }
    }

  // pairwise compatibility on overlaps
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      std::vector<std::string> overlap;
      for (const auto& label : parts[i].events)
        if (std::find(parts[j].events.begin(), parts[j].events.end(), label) !=
            parts[j].events.end())
          overlap.push_back(label);
      if (overlap.empty()) continue;
      double dev = compatibility_deviation(parts[i].pdo, parts[j].pdo, overlap);
      if (dev > compat_tol)
        throw IncompatiblePartsError(static_cast<int>(i), static_cast<int>(j), dev);
    }

  // drop parts contained in another part
  std::vector<std::set<std::string>> sets;
  for (const auto& part : parts) sets.emplace_back(part.events.begin(), part.events.end());
  std::vector<ScenarioPart> kept;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    bool contained = false;
    for (std::size_t j = 0; j < parts.size() && !contained; ++j) {
      if (j == i) continue;
      bool subset = std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(),
                                  sets[i].end());
      if (subset && (sets[i] != sets[j] || j < i)) contained = true;
    }
    if (!contained) kept.push_back(std::move(parts[i]));
  }

  MarginalScenario s;
  s.global_ = std::move(global);
  s.parts_ = std::move(kept);
  s.compat_tol_ = compat_tol;
  return s;
}

Pdo SolutionFamily::base_pdo() const {
  Pdo p(events.dims, events.labels);
  p.tensor = base_point;
  return p;
}

Pdo SolutionFamily::completed(std::span<const double> free_values) const {
  if (free_values.size() != free_flat.size())
    throw std::invalid_argument("SolutionFamily: free value count mismatch");
  Pdo p = base_pdo();
  for (std::size_t k = 0; k < free_flat.size(); ++k)
    p.tensor[free_flat[k]] = free_values[k];
  return p;
}

}  // namespace pdolab
