#include "pdolab/marginal.hpp"

#include "pdolab/simplex.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <thread>

namespace pdolab {

namespace {

std::vector<int> part_positions(const EventSet& global, const ScenarioPart& part) {
  std::vector<int> pos;
  pos.reserve(part.events.size());
  for (const auto& label : part.events) {
    int i = global.index_of(label);
    if (i < 0) throw std::invalid_argument("scenario part references unknown event");
    pos.push_back(i);
  }
  return pos;
}

}  // namespace

SolutionFamily solve_herm1(const MarginalScenario& s) {
  SolutionFamily f;
  f.events = s.global_events();

  Pdo shell(f.events.dims, f.events.labels);
  const MultiIndex idx = shell.indexer();
  f.base_point.assign(idx.size(), 0.0);
  f.fixed_mask.assign(idx.size(), 0);

  std::vector<std::vector<int>> positions;
  positions.reserve(s.parts().size());
  for (const auto& part : s.parts()) positions.push_back(part_positions(f.events, part));

  const int n = f.events.count();
  std::vector<int> tuple(n);
  std::vector<int> part_tuple;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    idx.unflatten(t, tuple);
    // support = events with nonzero basis index; fixed iff inside some part
    bool fixed = false;
    for (std::size_t pi = 0; pi < s.parts().size() && !fixed; ++pi) {
      const auto& pos = positions[pi];
      bool inside = true;
      for (int e = 0; e < n && inside; ++e) {
        if (tuple[e] == 0) continue;
        inside = std::find(pos.begin(), pos.end(), e) != pos.end();
      }
      if (!inside) continue;
      part_tuple.assign(pos.size(), 0);
      for (std::size_t j = 0; j < pos.size(); ++j) part_tuple[j] = tuple[pos[j]];
      f.base_point[t] = s.parts()[pi].pdo.at(part_tuple);
      f.fixed_mask[t] = 1;
      fixed = true;
    }
    if (!fixed) {
      f.free_indices.push_back(tuple);
      f.free_flat.push_back(t);
    }
  }
  return f;
}

double reduce_check(const Pdo& candidate, const MarginalScenario& s) {
  double dev = 0.0;
  for (const auto& part : s.parts()) {
    Pdo reduced = partial_trace(candidate, part.events);
    for (std::size_t i = 0; i < reduced.tensor.size(); ++i)
      dev = std::max(dev, std::abs(reduced.tensor[i] - part.pdo.tensor[i]));
  }
  return dev;
}

double reduce_check(const SolutionFamily& f, const MarginalScenario& s) {
  return reduce_check(f.base_pdo(), s);
}

PositiveSearchResult filter_positive(const SolutionFamily& f,
                                     const PositiveSearchOptions& opts) {
  const std::size_t k = f.free_count();
  PositiveSearchResult result;

  Pdo base = f.base_pdo();
  const Matrix m0 = to_matrix(base);
  const long dim = base.matrix_dim();
  const double box = base.entry_bound();

  if (k == 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m0, Eigen::EigenvaluesOnly);
    result.best_min_eigenvalue = es.eigenvalues().minCoeff();
    if (result.best_min_eigenvalue >= -opts.tol) result.found = base;
    return result;
  }

  // direction matrices dR/dx_j
  std::vector<Matrix> cols(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Matrix> factors(base.events());
    for (int e = 0; e < base.events(); ++e)
      factors[e] = cached_basis(base.dims[e]).ops[f.free_indices[j][e]];
    cols[j] = kron_all(factors) / static_cast<double>(dim);
  }

  auto min_eig = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    Matrix m = m0;
    for (std::size_t j = 0; j < k; ++j) m += x[j] * cols[j];
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    double lam = es.eigenvalues().minCoeff();
    if (grad) {
      Eigen::Index which;
      es.eigenvalues().minCoeff(&which);
      Vector v = es.eigenvectors().col(which);
      grad->resize(k);
      for (std::size_t j = 0; j < k; ++j) (*grad)[j] = (v.adjoint() * cols[j] * v).value().real();
    }
    return lam;
  };

  struct StartResult {
    double best = -std::numeric_limits<double>::infinity();
    std::optional<Eigen::VectorXd> winner;
  };
  std::vector<StartResult> per_start(opts.starts);

  auto run_start = [&](int s) {
    std::mt19937_64 rng(opts.seed + 0x9E3779B97F4A7C15ULL * (s + 1));
    std::uniform_real_distribution<double> u(-box / 2.0, box / 2.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
    if (s > 0)
      for (std::size_t j = 0; j < k; ++j) x[j] = u(rng);

    Eigen::VectorXd g;
    double lam = min_eig(x, &g);
    for (int it = 0; it < opts.iterations; ++it) {
      if (lam >= -opts.tol) break;
      double gn = g.norm();
      if (gn < 1e-14) break;
      double step = 1.0;
      bool moved = false;
      while (step > 1e-12) {
        Eigen::VectorXd xn = (x + step * g).cwiseMax(-box).cwiseMin(box);
        double ln = min_eig(xn, nullptr);
        if (ln > lam + 1e-14) {
          x = xn;
          lam = min_eig(x, &g);
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    per_start[s].best = lam;
    if (lam >= -opts.tol) per_start[s].winner = x;
  };

  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    for (int s = 0; s < opts.starts; ++s) run_start(s);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int s = next.fetch_add(1); s < opts.starts; s = next.fetch_add(1)) run_start(s);
      });
    for (auto& th : pool) th.join();
  }

  result.best_min_eigenvalue = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < opts.starts; ++s) {
    result.best_min_eigenvalue = std::max(result.best_min_eigenvalue, per_start[s].best);
    if (!result.found && per_start[s].winner)
      result.found = f.completed(std::vector<double>(per_start[s].winner->data(),
                                                     per_start[s].winner->data() + k));
  }
  return result;
}

bool in_halfspaces(const Pdo& p, std::span<const HalfSpace> halves, double tol) {
  const Matrix m = to_matrix(p);
  for (const auto& h : halves) {
    if (h.op.rows() != m.rows() || h.op.cols() != m.cols())
      throw std::invalid_argument("in_halfspaces: operator dimension mismatch");
    if (!is_hermitian(h.op, 1e-12))
      throw std::invalid_argument("in_halfspaces: operator is not Hermitian");
    if ((m * h.op).trace().real() < h.offset - tol) return false;
  }
  return true;
}

bool in_hull(const Pdo& p, std::span<const Pdo> vertices, double tol) {
  if (vertices.empty()) return false;
  for (const auto& v : vertices)
    if (v.dims != p.dims) throw std::invalid_argument("in_hull: dimension mismatch");

  const std::size_t rows = p.tensor.size();
  const std::size_t cols = vertices.size();
  Eigen::MatrixXd a(rows + 1, cols);
  Eigen::VectorXd b(rows + 1);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) a(r, c) = vertices[c].tensor[r];
    b[r] = p.tensor[r];
  }
  a.row(rows).setOnes();  // explicit normalization row
  b[rows] = 1.0;
  return solve_lp(a, b, Eigen::VectorXd(), tol).feasible;
}

Pdo symmetric_extension(const Pdo& w, int total_events) {
  if (w.events() != 2)
    throw std::invalid_argument("symmetric_extension: input must be a two-event Pdo");
  if (total_events < 2)
    throw std::invalid_argument("symmetric_extension: need at least two events");

  SeparableExpansion se = separable_expansion(w);
  const int copies = total_events - 1;
  const long da = w.dims[0], db = w.dims[1];
  long full = da;
  for (int i = 0; i < copies; ++i) full *= db;

  Matrix m = Matrix::Zero(full, full);
  const MultiIndex idx = se.weights.indexer();
  std::vector<int> tuple(2);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double weight = se.weights.weights[t];
    if (weight == 0.0) continue;
    idx.unflatten(t, tuple);
    const Vector& va = se.local_states[0][tuple[0]];
    const Vector& vb = se.local_states[1][tuple[1]];
    Matrix pa = va * va.adjoint();
    Matrix pb = vb * vb.adjoint();
    Matrix term = pa;
    for (int i = 0; i < copies; ++i) term = kron(term, pb);
    m += weight * term;
  }

  std::vector<int> dims(total_events, static_cast<int>(db));
  dims[0] = static_cast<int>(da);
  std::vector<std::string> labels = {w.labels[0], w.labels[1]};
  for (int i = 2; i < total_events; ++i)
    labels.push_back(w.labels[1] + "_" + std::to_string(i));
  return from_matrix(m, dims, labels, 1e-8);
}

Pdo polygamy_extension(int n, const std::vector<double>* xi) {
  if (n < 1) throw std::invalid_argument("polygamy_extension: need n >= 1 copies");
  std::vector<int> dims(n + 1, 2);
  std::vector<std::string> labels = {"A"};
  for (int i = 1; i <= n; ++i) labels.push_back("B" + std::to_string(i));

  Pdo p(dims, labels);
  const MultiIndex idx = p.indexer();
  std::vector<int> tuple(n + 1, 0);
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= 3; ++k) {
      std::fill(tuple.begin(), tuple.end(), 0);
      tuple[0] = k;
      tuple[i] = k;
      p.tensor[idx.flatten(tuple)] = -1.0;
    }

  if (xi) {
    if (xi->size() != p.tensor.size())
      throw std::invalid_argument("polygamy_extension: Xi tensor size mismatch");
    for (std::size_t t = 0; t < xi->size(); ++t) {
      if ((*xi)[t] == 0.0) continue;
      idx.unflatten(t, tuple);
      int nonzero_b = 0;
      for (int i = 1; i <= n; ++i)
        if (tuple[i] != 0) ++nonzero_b;
      if (nonzero_b < 2)
        throw std::invalid_argument(
            "polygamy_extension: Xi support must have >= 2 nonzero non-A indices");
      p.tensor[t] += (*xi)[t];
    }
  }
  return p;
}

std::vector<double> pairwise_singlet_xi(int n) {
  std::vector<int> dims(n + 1, 2);
  Pdo shell(dims);
  std::vector<double> xi(shell.tensor.size(), 0.0);
  const MultiIndex idx = shell.indexer();
  std::vector<int> tuple(n + 1, 0);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = 1; k <= 3; ++k) {
        std::fill(tuple.begin(), tuple.end(), 0);
        tuple[i] = k;
        tuple[j] = k;
        xi[idx.flatten(tuple)] = -1.0;
      }
  return xi;
}

SymmetryReport check_symmetry(const MarginalScenario& s, const Pdo& global,
                              std::span<const PseudoChannel> group_channels,
                              double tol) {
  SymmetryReport report;
  if (global.dims != s.global_events().dims)
    throw std::invalid_argument("check_symmetry: global Pdo does not match scenario events");

  for (const auto& channel : group_channels)
    if (channel.in_dims() != global.dims || channel.out_dims() != global.dims)
      throw std::invalid_argument("check_symmetry: non-endomorphic channel");

  report.global_symmetric = true;
  for (const auto& channel : group_channels) {
    Pdo mapped = apply(channel, global);
    double dev = 0.0;
    for (std::size_t i = 0; i < mapped.tensor.size(); ++i)
      dev = std::max(dev, std::abs(mapped.tensor[i] - global.tensor[i]));
    report.max_global_deviation = std::max(report.max_global_deviation, dev);
    if (dev > tol) report.global_symmetric = false;
  }
  if (!report.global_symmetric) return report;

  report.parts_symmetric = true;
  for (const auto& part : s.parts()) {
    std::vector<int> pos = part_positions(s.global_events(), part);
    for (const auto& channel : group_channels) {
      PseudoChannel marg = marginal_channel(channel, pos, pos);
      Pdo mapped = apply(marg, part.pdo);
      double dev = 0.0;
      for (std::size_t i = 0; i < mapped.tensor.size(); ++i)
        dev = std::max(dev, std::abs(mapped.tensor[i] - part.pdo.tensor[i]));
      report.max_part_deviation = std::max(report.max_part_deviation, dev);
      if (dev > tol) report.parts_symmetric = false;
    }
  }
  return report;
}

}  // namespace pdolab
