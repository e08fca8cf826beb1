#include "pdolab/classical.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace pdolab {

QuasiDistribution marginalize(const QuasiDistribution& q, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("marginalize: keep set is empty");
  std::set<int> seen;
  for (int k : keep) {
    if (k < 0 || k >= q.variables())
      throw std::invalid_argument("marginalize: unknown variable");
    if (!seen.insert(k).second) throw std::invalid_argument("marginalize: duplicate variable");
  }
  std::vector<int> new_shape;
  for (int k : keep) new_shape.push_back(q.shape[k]);
  const MultiIndex src = q.indexer();
  const MultiIndex dst{new_shape};
  std::vector<double> weights(dst.size(), 0.0);
  std::vector<int> tuple(q.variables()), out(keep.size());
  for (std::size_t t = 0; t < src.size(); ++t) {
    src.unflatten(t, tuple);
    for (std::size_t i = 0; i < keep.size(); ++i) out[i] = tuple[keep[i]];
    weights[dst.flatten(out)] += q.weights[t];
  }
  return QuasiDistribution(new_shape, std::move(weights));
}

void validate_graph(const CompatibilityGraph& g) {
  std::vector<char> covered(g.n_vars, 0);
  for (const auto& edge : g.hyperedges) {
    if (edge.empty()) throw std::invalid_argument("graph: empty hyperedge");
    std::set<int> seen;
    for (int v : edge) {
      if (v < 0 || v >= g.n_vars) throw std::invalid_argument("graph: vertex out of range");
      if (!seen.insert(v).second) throw std::invalid_argument("graph: repeated vertex in edge");
      covered[v] = 1;
    }
  }
  for (int v = 0; v < g.n_vars; ++v)
    if (!covered[v])
      throw std::invalid_argument("graph: vertex " + std::to_string(v) +
                                  " appears in no hyperedge");
}

ChordalityResult is_chordal(const CompatibilityGraph& g) {
  validate_graph(g);
  const int n = g.n_vars;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& edge : g.hyperedges)
    for (std::size_t i = 0; i < edge.size(); ++i)
      for (std::size_t j = i + 1; j < edge.size(); ++j)
        adj[edge[i]][edge[j]] = adj[edge[j]][edge[i]] = 1;

  // maximum cardinality search; ties resolved by smallest vertex id
  std::vector<int> weight(n, 0), visit_order;
  std::vector<char> visited(n, 0);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v)
      if (!visited[v] && (best < 0 || weight[v] > weight[best])) best = v;
    visited[best] = 1;
    visit_order.push_back(best);
    for (int v = 0; v < n; ++v)
      if (!visited[v] && adj[best][v]) ++weight[v];
  }

  // elimination order = reversed visit order; verify it is perfect
  ChordalityResult result;
  result.elimination_order.assign(visit_order.rbegin(), visit_order.rend());
  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[result.elimination_order[i]] = i;

  for (int i = 0; i < n; ++i) {
    const int v = result.elimination_order[i];
    std::vector<int> later;
    for (int u = 0; u < n; ++u)
      if (adj[v][u] && position[u] > i) later.push_back(u);
    for (std::size_t a = 0; a < later.size(); ++a)
      for (std::size_t b = a + 1; b < later.size(); ++b)
        if (!adj[later[a]][later[b]]) return result;  // chordal stays false
  }
  result.chordal = true;
  return result;
}

namespace {

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> sa(a.begin(), a.end());
  std::vector<int> out;
  for (int v : b)
    if (sa.count(v)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

// greedy GYO ear removal; returns a running-intersection order, or empty
std::vector<int> rip_order(const std::vector<std::vector<int>>& edges) {
  std::vector<int> remaining(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) remaining[i] = static_cast<int>(i);
  std::vector<int> stack;
  while (remaining.size() > 1) {
    int ear = -1;
    for (std::size_t c = 0; c < remaining.size() && ear < 0; ++c) {
      const int e = remaining[c];
      std::set<int> shared;
      for (std::size_t o = 0; o < remaining.size(); ++o) {
        if (remaining[o] == e) continue;
        for (int v : edges[e])
          if (std::find(edges[remaining[o]].begin(), edges[remaining[o]].end(), v) !=
              edges[remaining[o]].end())
            shared.insert(v);
      }
      for (std::size_t o = 0; o < remaining.size() && ear < 0; ++o) {
        if (remaining[o] == e) continue;
        std::set<int> other(edges[remaining[o]].begin(), edges[remaining[o]].end());
        if (std::includes(other.begin(), other.end(), shared.begin(), shared.end()))
          ear = e;
      }
    }
    if (ear < 0) return {};
    stack.push_back(ear);
    remaining.erase(std::find(remaining.begin(), remaining.end(), ear));
  }
  stack.push_back(remaining[0]);
  std::reverse(stack.begin(), stack.end());
  return stack;
}

}  // namespace

QuasiDistribution solve_chordal(const CompatibilityGraph& g,
                                std::span<const int> shape,
                                std::span<const QuasiDistribution> parts,
                                double compat_tol) {
  validate_graph(g);
  if (static_cast<int>(shape.size()) != g.n_vars)
    throw std::invalid_argument("solve_chordal: shape size mismatch");
  if (parts.size() != g.hyperedges.size())
    throw std::invalid_argument("solve_chordal: one distribution required per hyperedge");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& edge = g.hyperedges[i];
    if (parts[i].variables() != static_cast<int>(edge.size()))
      throw std::invalid_argument("solve_chordal: part arity mismatch");
    for (std::size_t j = 0; j < edge.size(); ++j)
      if (parts[i].shape[j] != shape[edge[j]])
        throw std::invalid_argument("solve_chordal: part cardinality mismatch");
  }
  if (!is_chordal(g).chordal) throw NotChordalError();

  // pairwise compatibility on overlaps (ascending variable order)
  auto part_marginal = [&](std::size_t pi, const std::vector<int>& vars) {
    std::vector<int> axes;
    for (int v : vars) {
      auto it = std::find(g.hyperedges[pi].begin(), g.hyperedges[pi].end(), v);
      axes.push_back(static_cast<int>(it - g.hyperedges[pi].begin()));
    }
    return marginalize(parts[pi], axes);
  };
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      std::vector<int> overlap = sorted_intersection(g.hyperedges[i], g.hyperedges[j]);
      if (overlap.empty()) continue;
      QuasiDistribution mi = part_marginal(i, overlap);
      QuasiDistribution mj = part_marginal(j, overlap);
      double dev = 0.0;
      for (std::size_t t = 0; t < mi.weights.size(); ++t)
        dev = std::max(dev, std::abs(mi.weights[t] - mj.weights[t]));
      if (dev > compat_tol)
        throw IncompatibleDistributionsError(static_cast<int>(i), static_cast<int>(j), dev);
    }

  // keep only hyperedges not contained in another
  std::vector<int> kept;
  for (std::size_t i = 0; i < g.hyperedges.size(); ++i) {
    std::set<int> si(g.hyperedges[i].begin(), g.hyperedges[i].end());
    bool contained = false;
    for (std::size_t j = 0; j < g.hyperedges.size() && !contained; ++j) {
      if (j == i) continue;
      std::set<int> sj(g.hyperedges[j].begin(), g.hyperedges[j].end());
      if (std::includes(sj.begin(), sj.end(), si.begin(), si.end()) &&
          (si != sj || j < i))
        contained = true;
    }
    if (!contained) kept.push_back(static_cast<int>(i));
  }

  std::vector<std::vector<int>> edges;
  for (int k : kept) edges.push_back(g.hyperedges[k]);
  std::vector<int> order = rip_order(edges);
  if (order.empty()) throw NotDecomposableError();

  constexpr double kZeroTol = 1e-12;

  // sequential conditional-product extension along the clique order
  std::vector<int> joint_vars;  // ascending
  std::vector<double> joint;    // over joint_vars
  auto joint_shape = [&]() {
    std::vector<int> s;
    for (int v : joint_vars) s.push_back(shape[v]);
    return s;
  };

  for (std::size_t step = 0; step < order.size(); ++step) {
    const std::size_t part_idx = kept[order[step]];
    const std::vector<int>& clique = g.hyperedges[part_idx];

    if (step == 0) {
      std::vector<int> vars(clique.begin(), clique.end());
      std::sort(vars.begin(), vars.end());
      QuasiDistribution first = part_marginal(part_idx, vars);
      joint_vars = vars;
      joint = first.weights;
      continue;
    }

    std::vector<int> sep = sorted_intersection(clique, joint_vars);
    std::vector<int> fresh;
    for (int v : clique)
      if (!std::binary_search(joint_vars.begin(), joint_vars.end(), v)) fresh.push_back(v);
    std::sort(fresh.begin(), fresh.end());

    std::vector<int> clique_sorted = clique;
    std::sort(clique_sorted.begin(), clique_sorted.end());
    QuasiDistribution p_c = part_marginal(part_idx, clique_sorted);
    QuasiDistribution p_s =
        sep.empty() ? QuasiDistribution({1}, {1.0}) : part_marginal(part_idx, sep);

    // zero-separator rule: all dependent clique weights must vanish
    {
      const MultiIndex ci(p_c.shape);
      std::vector<int> ct(clique_sorted.size());
      for (std::size_t t = 0; t < p_c.weights.size(); ++t) {
        if (std::abs(p_c.weights[t]) <= kZeroTol) continue;
        ci.unflatten(t, ct);
        if (sep.empty()) continue;
        std::vector<int> st;
        for (int v : sep) {
          auto it = std::find(clique_sorted.begin(), clique_sorted.end(), v);
          st.push_back(ct[it - clique_sorted.begin()]);
        }
        double sval = p_s.weights[MultiIndex(p_s.shape).flatten(st)];
        if (std::abs(sval) <= kZeroTol)
          throw ZeroSeparatorError(
              "solve_chordal: zero separator weight with nonzero clique weight");
      }
    }

    std::vector<int> new_vars = sorted_union(joint_vars, clique_sorted);
    std::vector<int> new_shape;
    for (int v : new_vars) new_shape.push_back(shape[v]);
    const MultiIndex old_idx(joint_shape());
    const MultiIndex new_idx(new_shape);
    const MultiIndex c_idx(p_c.shape);
    const MultiIndex s_idx(p_s.shape);

    long fresh_card = 1;
    for (int v : fresh) fresh_card *= shape[v];

    std::vector<double> next(new_idx.size(), 0.0);
    std::vector<int> nt(new_vars.size()), ot(joint_vars.size()), ct(clique_sorted.size()),
        st(sep.size());
    for (std::size_t t = 0; t < next.size(); ++t) {
      new_idx.unflatten(t, nt);
      auto value_at = [&](const std::vector<int>& vars, std::vector<int>& out_t) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
          auto it = std::lower_bound(new_vars.begin(), new_vars.end(), vars[i]);
          out_t[i] = nt[it - new_vars.begin()];
        }
      };
      value_at(joint_vars, ot);
      value_at(clique_sorted, ct);
      const double w_old = joint[old_idx.flatten(ot)];
      const double w_c = p_c.weights[c_idx.flatten(ct)];
      double w_s = 1.0;
      if (!sep.empty()) {
        value_at(sep, st);
        w_s = p_s.weights[s_idx.flatten(st)];
      }
      double cond;
      if (std::abs(w_s) <= kZeroTol)
        cond = 1.0 / static_cast<double>(fresh_card);
      else
        cond = w_c / w_s;
      next[t] = w_old * cond;
    }
    joint_vars = std::move(new_vars);
    joint = std::move(next);
  }

  return QuasiDistribution(joint_shape(), std::move(joint));
}

Pdo embed_classical_state(const QuasiDistribution& q,
                          const std::vector<std::vector<Vector>>& projectors,
                          std::vector<std::string> labels, double tol) {
  const int n = q.variables();
  if (static_cast<int>(projectors.size()) != n)
    throw std::invalid_argument("embed_classical_state: one projector set per variable");
  for (int i = 0; i < n; ++i) {
    const int d = q.shape[i];
    if (static_cast<int>(projectors[i].size()) != d)
      throw std::invalid_argument("embed_classical_state: projector set incomplete");
    Matrix completeness = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a) {
      if (projectors[i][a].size() != d)
        throw std::invalid_argument("embed_classical_state: projector dimension mismatch");
      for (int b = 0; b < d; ++b) {
        Cplx ip = projectors[i][a].adjoint() * projectors[i][b];
        double target = a == b ? 1.0 : 0.0;
        if (std::abs(ip - target) > tol)
          throw std::invalid_argument("embed_classical_state: set is not orthonormal");
      }
      completeness += projectors[i][a] * projectors[i][a].adjoint();
    }
    if (max_abs(completeness - Matrix::Identity(d, d)) > tol)
      throw std::invalid_argument("embed_classical_state: projector set incomplete");
  }

  const long full = total_dim(q.shape);
  Matrix w = Matrix::Zero(full, full);
  const MultiIndex idx = q.indexer();
  std::vector<int> tuple(n);
  std::vector<Matrix> factors(n);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double weight = q.weights[t];
    if (weight == 0.0) continue;
    idx.unflatten(t, tuple);
    for (int i = 0; i < n; ++i)
      factors[i] = projectors[i][tuple[i]] * projectors[i][tuple[i]].adjoint();
    w += weight * kron_all(factors);
  }
  return from_matrix(w, q.shape, std::move(labels), 1e-8);
}

namespace {

Matrix local_unitary(const std::vector<Eigen::VectorXd>& theta,
                     const std::vector<Matrix>& warm, std::span<const int> dims) {
  std::vector<Matrix> us(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const OperatorBasis& b = cached_basis(dims[i]);
    Matrix h = Matrix::Zero(dims[i], dims[i]);
    for (int mu = 0; mu < b.count(); ++mu) h += theta[i][mu] * b.ops[mu];
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Matrix expi = Matrix::Zero(dims[i], dims[i]);
    for (int k = 0; k < dims[i]; ++k) {
      Cplx phase = std::exp(Cplx(0.0, es.eigenvalues()[k]));
      expi += phase * (es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint());
    }
    us[i] = expi * warm[i];
  }
  return kron_all(us);
}

}  // namespace

LuEquivalenceResult local_unitary_equivalent(const Pdo& w1, const Pdo& w2,
                                             const LuSearchOptions& opts) {
  if (w1.dims != w2.dims)
    throw std::invalid_argument("local_unitary_equivalent: dimension mismatch");

  LuEquivalenceResult result;
  result.residual = std::numeric_limits<double>::infinity();

  const Matrix m1 = to_matrix(w1);
  const Matrix m2 = to_matrix(w2);

  // invariants first: global and per-event spectra must agree
  RealVector g1 = hermitian_eigenvalues(m1), g2 = hermitian_eigenvalues(m2);
  if ((g1 - g2).cwiseAbs().maxCoeff() > 1e-8) return result;
  const int n = w1.events();
  std::vector<Matrix> warm(n);
  for (int e = 0; e < n; ++e) {
    const int keep[] = {e};
    Matrix r1 = to_matrix(partial_trace(w1, std::span<const int>(keep)));
    Matrix r2 = to_matrix(partial_trace(w2, std::span<const int>(keep)));
    Eigen::SelfAdjointEigenSolver<Matrix> e1(r1), e2(r2);
    if ((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() > 1e-8)
      return result;
    warm[e] = e2.eigenvectors() * e1.eigenvectors().adjoint();
  }

  auto residual_of = [&](const Matrix& u) { return max_abs(u * m1 * u.adjoint() - m2); };

  std::vector<Eigen::VectorXd> theta(n);
  for (int e = 0; e < n; ++e) theta[e] = Eigen::VectorXd::Zero(w1.dims[e] * w1.dims[e]);
  double best = residual_of(local_unitary(theta, warm, w1.dims));
  result.residual = best;
  if (best <= opts.tol) {
    result.equivalent = true;
    return result;
  }

  // seeded multi-start refinement around the warm start
  int total_params = 0;
  for (int e = 0; e < n; ++e) total_params += w1.dims[e] * w1.dims[e];

  for (int s = 0; s < opts.starts; ++s) {
    std::mt19937_64 rng(opts.seed + 0x9E3779B97F4A7C15ULL * (s + 1));
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::vector<Eigen::VectorXd> x(n);
    for (int e = 0; e < n; ++e) {
      x[e] = Eigen::VectorXd::Zero(w1.dims[e] * w1.dims[e]);
      if (s > 0)
        for (int mu = 0; mu < x[e].size(); ++mu) x[e][mu] = u(rng);
    }
    double f = residual_of(local_unitary(x, warm, w1.dims));
    const double h = 1e-4;
    for (int it = 0; it < opts.iterations && f > opts.tol; ++it) {
      // central-difference gradient over all angles
      std::vector<Eigen::VectorXd> grad(n);
      for (int e = 0; e < n; ++e) {
        grad[e] = Eigen::VectorXd::Zero(x[e].size());
        for (int mu = 0; mu < x[e].size(); ++mu) {
          x[e][mu] += h;
          double fp = residual_of(local_unitary(x, warm, w1.dims));
          x[e][mu] -= 2 * h;
          double fm = residual_of(local_unitary(x, warm, w1.dims));
          x[e][mu] += h;
          grad[e][mu] = (fp - fm) / (2 * h);
        }
      }
      double gn = 0.0;
      for (int e = 0; e < n; ++e) gn += grad[e].squaredNorm();
      gn = std::sqrt(gn);
      if (gn < 1e-12) break;
      double step = 0.5;
      bool moved = false;
      while (step > 1e-10) {
        std::vector<Eigen::VectorXd> xn(n);
        for (int e = 0; e < n; ++e) xn[e] = x[e] - step * grad[e];
        double fn = residual_of(local_unitary(xn, warm, w1.dims));
        if (fn < f - 1e-15) {
          x = std::move(xn);
          f = fn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::min(best, f);
    if (best <= opts.tol) break;
  }

  result.residual = best;
  result.equivalent = best <= opts.tol;
  return result;
}

}  // namespace pdolab
