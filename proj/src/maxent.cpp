#include "pdolab/maxent.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace pdolab {

namespace {

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(restart + 1);
}

struct RestartOutcome {
  double entropy = -std::numeric_limits<double>::infinity();
  double objective = -std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  Pdo pdo;
  std::vector<IterRecord> trace;
  bool valid = false;
};

void run_parallel(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  int workers = std::min(threads, count);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- direct ---

MaxEntResult infer_direct(const MaxEntProblem& problem) {
  const SolutionFamily& family = problem.family;
  const std::size_t k = family.free_count();
  const MaxEntOptions& opts = problem.options;

  MaxEntResult result;
  if (k == 0) {
    result.pdo = family.base_pdo();
    result.entropy = entropy(result.pdo);
    result.max_residual = reduce_check(result.pdo, problem.scenario);
    return result;
  }

  // R(x) = M0 + sum x_j C_j over the free entries
  Pdo base = family.base_pdo();
  const Matrix m0 = to_matrix(base);
  const long dim = base.matrix_dim();
  std::vector<Matrix> cols(k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<Matrix> factors(base.events());
    for (int e = 0; e < base.events(); ++e)
      factors[e] = cached_basis(base.dims[e]).ops[family.free_indices[j][e]];
    cols[j] = kron_all(factors) / static_cast<double>(dim);
  }

  auto entropy_at = [&](const Eigen::VectorXd& x) {
    Matrix m = m0;
    for (std::size_t j = 0; j < k; ++j) m += x[j] * cols[j];
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double lam : es.eigenvalues()) {
      double a = std::abs(lam);
      if (a > 1e-300) s -= a * std::log2(a);
    }
    return s;
  };

  const double box = problem.box;
  const double h = opts.gradient_step;
  std::vector<RestartOutcome> outcomes(opts.restarts);

  auto run_restart = [&](int r) {
    std::mt19937_64 rng(restart_seed(opts.seed, r));
    std::uniform_real_distribution<double> u(-box / 2.0, box / 2.0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
    if (!(opts.include_zero_start && r == 0))
      for (std::size_t j = 0; j < k; ++j) x[j] = u(rng);

    double s = entropy_at(x);
    RestartOutcome& out = outcomes[r];
    out.trace.push_back({r, 0, s});

    Eigen::VectorXd g(k), probe = x;
    for (int it = 1; it <= opts.iterations; ++it) {
      for (std::size_t j = 0; j < k; ++j) {
        probe[j] = x[j] + h;
        double sp = entropy_at(probe);
        probe[j] = x[j] - h;
        double sm = entropy_at(probe);
        probe[j] = x[j];
        g[j] = (sp - sm) / (2.0 * h);
      }
      double gn = g.norm();
      if (gn < 1e-10) break;
      double step = 1.0 / std::max(1.0, gn);
      bool moved = false;
      while (step > 1e-13) {
        Eigen::VectorXd xn = (x + step * g).cwiseMax(-box).cwiseMin(box);
        double sn = entropy_at(xn);
        if (sn > s + 1e-14) {  // accepted steps never decrease the objective
          x = xn;
          s = sn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      out.trace.push_back({r, it, s});
      if (!moved) break;
    }
    out.entropy = s;
    out.objective = s;
    out.pdo = family.completed(std::vector<double>(x.data(), x.data() + k));
    out.residual = 0.0;
    out.valid = true;
  };

  run_parallel(opts.restarts, opts.threads, run_restart);

  // best by (entropy desc, restart asc) for determinism
  int best = 0;
  for (int r = 1; r < opts.restarts; ++r)
    if (outcomes[r].entropy > outcomes[best].entropy) best = r;

  result.pdo = outcomes[best].pdo;
  result.entropy = outcomes[best].entropy;
  result.best_restart = best;
  result.max_residual = reduce_check(result.pdo, problem.scenario);
  for (std::size_t j = 0; j < family.free_count(); ++j) {
    double v = result.pdo.tensor[family.free_flat[j]];
    if (std::abs(v) >= box - 1e-9) result.hit_box = true;
  }
  for (const auto& out : outcomes)
    result.trace.insert(result.trace.end(), out.trace.begin(), out.trace.end());
  return result;
}

// ------------------------------------------------------------------- mlp ---

// One hidden layer, tanh everywhere, one-hot inputs per event index. The
// tensor is T_NN(mu)/T_NN(0) clamped into the box, so T[0..0] = 1 exactly.
// Parameter layout: w1 (width x inputs, row-major), b1, w2, b2.
struct Mlp {
  int inputs = 0, width = 0;

  int params() const { return width * inputs + 2 * width + 1; }

  // forward pass over one tuple; optionally records the hidden activations
  double eval(const Eigen::VectorXd& theta, std::span<const int> offsets,
              std::span<const int> tuple, Eigen::VectorXd* hidden = nullptr) const {
    const double* tw1 = theta.data();
    const double* tb1 = tw1 + width * inputs;
    const double* tw2 = tb1 + width;
    const double tb2 = *(tw2 + width);
    double out = 0.0;
    if (hidden) hidden->resize(width);
    for (int h = 0; h < width; ++h) {
      double acc = -tb1[h];
      const double* row = tw1 + h * inputs;
      for (std::size_t e = 0; e < tuple.size(); ++e) acc += row[offsets[e] + tuple[e]];
      double th = std::tanh(acc);
      if (hidden) (*hidden)[h] = th;
      out += tw2[h] * th;
    }
    return std::tanh(out - tb2);
  }

  // accumulate d(loss)/d(theta) given d(loss)/d(output) for one tuple
  void backprop(const Eigen::VectorXd& theta, std::span<const int> offsets,
                std::span<const int> tuple, double output, const Eigen::VectorXd& hidden,
                double upstream, Eigen::VectorXd& grad) const {
    const double* tw2 = theta.data() + width * inputs + width;
    double* gw1 = grad.data();
    double* gb1 = gw1 + width * inputs;
    double* gw2 = gb1 + width;
    double* gb2 = gw2 + width;
    const double dz = upstream * (1.0 - output * output);
    *gb2 += -dz;
    for (int h = 0; h < width; ++h) {
      gw2[h] += dz * hidden[h];
      const double da = dz * tw2[h] * (1.0 - hidden[h] * hidden[h]);
      gb1[h] += -da;
      double* row = gw1 + h * inputs;
      for (std::size_t e = 0; e < tuple.size(); ++e) row[offsets[e] + tuple[e]] += da;
    }
  }
};

MaxEntResult infer_mlp(const MaxEntProblem& problem) {
  for (int d : problem.scenario.global_events().dims)
    if (d != 2)
      throw std::invalid_argument("infer_mlp: the network parameterization covers qubit events");

  const MaxEntOptions& opts = problem.options;
  const EventSet& events = problem.scenario.global_events();
  const int n = events.count();
  constexpr double kLn2Inv = 1.4426950408889634;

  Mlp net;
  net.width = opts.mlp.hidden_width;
  net.inputs = 4 * n;
  const int n_params = net.params();

  std::vector<int> offsets(n);
  for (int e = 0; e < n; ++e) offsets[e] = 4 * e;

  Pdo shell(events.dims, events.labels);
  const MultiIndex idx = shell.indexer();
  const std::size_t n_tuples = idx.size();
  std::vector<std::vector<int>> tuples(n_tuples);
  for (std::size_t t = 0; t < n_tuples; ++t) tuples[t] = idx.unflatten(t);

  // basis strings C_t with R = sum_t T_t C_t, plus the penalty index map:
  // each part pins the global entries whose support lies inside it
  const long dim = shell.matrix_dim();
  std::vector<Matrix> strings(n_tuples);
  for (std::size_t t = 0; t < n_tuples; ++t) {
    std::vector<Matrix> factors(n);
    for (int e = 0; e < n; ++e) factors[e] = cached_basis(2).ops[tuples[t][e]];
    strings[t] = kron_all(factors) / static_cast<double>(dim);
  }
  struct PinnedEntry {
    std::size_t global;
    double target;
  };
  std::vector<PinnedEntry> pinned;
  for (const auto& part : problem.scenario.parts()) {
    std::vector<int> pos;
    for (const auto& label : part.events) pos.push_back(events.index_of(label));
    const MultiIndex part_idx = part.pdo.indexer();
    std::vector<int> pt(part.pdo.events()), gt(n);
    for (std::size_t u = 0; u < part.pdo.tensor.size(); ++u) {
      part_idx.unflatten(u, pt);
      std::fill(gt.begin(), gt.end(), 0);
      for (std::size_t j = 0; j < pos.size(); ++j) gt[pos[j]] = pt[j];
      pinned.push_back({idx.flatten(gt), part.pdo.tensor[u]});
    }
  }

  const double box = problem.box;

  auto tensor_of = [&](const Eigen::VectorXd& theta, std::vector<double>& tensor) {
    const double t0 = net.eval(theta, offsets, tuples[0]);
    if (std::abs(t0) < 1e-9) return false;  // degenerate normalization
    tensor.resize(n_tuples);
    tensor[0] = 1.0;
    for (std::size_t t = 1; t < n_tuples; ++t) {
      double v = net.eval(theta, offsets, tuples[t]) / t0;
      tensor[t] = std::clamp(v, -box, box);
    }
    return true;
  };

  std::vector<RestartOutcome> outcomes(opts.restarts);

  auto run_restart = [&](int r) {
    std::mt19937_64 rng(restart_seed(opts.seed, r));
    // small weights keep the tanh units away from saturation at the start
    std::normal_distribution<double> init(0.0, 0.2);
    Eigen::VectorXd theta(n_params);
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
      for (int i = 0; i < n_params; ++i) theta[i] = init(rng);
      // pull the normalizer to 0.5 so the initial tensor sits inside the box
      theta[n_params - 1] = 0.0;
      double z0 = std::atanh(net.eval(theta, offsets, tuples[0]));
      theta[n_params - 1] = z0 - std::atanh(0.5);
      ok = std::abs(net.eval(theta, offsets, tuples[0])) >= 1e-9;
    }
    RestartOutcome& out = outcomes[r];
    if (!ok) return;  // stays invalid

    std::vector<double> raw(n_tuples), tensor(n_tuples);
    std::vector<Eigen::VectorXd> hidden(n_tuples);
    Eigen::VectorXd grad(n_params);

    // objective L = S(R) - alpha * sum of squared reduction residuals, with
    // exact gradients: one eigendecomposition feeds dS/dT for every entry.
    // with_entropy = false restricts the objective to -res^2 (polish phase).
    auto evaluate = [&](const Eigen::VectorXd& th, double alpha, Eigen::VectorXd* g,
                        double* res2_out, bool with_entropy = true) -> double {
      for (std::size_t t = 0; t < n_tuples; ++t)
        raw[t] = net.eval(th, offsets, tuples[t], g ? &hidden[t] : nullptr);
      const double n0 = raw[0];
      if (std::abs(n0) < 1e-9) return -std::numeric_limits<double>::infinity();
      tensor[0] = 1.0;
      for (std::size_t t = 1; t < n_tuples; ++t)
        tensor[t] = std::clamp(raw[t] / n0, -box, box);

      double s = 0.0;
      std::vector<double> dldt(n_tuples, 0.0);
      if (with_entropy) {
        Matrix m = Matrix::Zero(dim, dim);
        for (std::size_t t = 0; t < n_tuples; ++t) m += tensor[t] * strings[t];
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        for (double lam : es.eigenvalues()) {
          double a = std::abs(lam);
          if (a > 1e-300) s -= a * std::log2(a);
        }
        if (g) {
          // dS/dT_t = tr(M_w C_t), M_w = sum_i w_i v_i v_i^dag
          Matrix mw = Matrix::Zero(dim, dim);
          for (long i = 0; i < es.eigenvalues().size(); ++i) {
            double lam = es.eigenvalues()[i];
            double a = std::max(std::abs(lam), 1e-8);
            double w = -(lam < 0 ? -1.0 : 1.0) * (std::log2(a) + kLn2Inv);
            mw += w * (es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
          }
          for (std::size_t t = 1; t < n_tuples; ++t)
            dldt[t] = (mw * strings[t]).trace().real();
        }
      }
      double res2 = 0.0;
      for (const auto& pin : pinned) {
        double res = tensor[pin.global] - pin.target;
        res2 += res * res;
        if (g && pin.global != 0) dldt[pin.global] -= alpha * 2.0 * res;
      }
      if (g) {
        g->setZero();
        double dl_dn0 = 0.0;
        for (std::size_t t = 1; t < n_tuples; ++t) {
          const double ratio = raw[t] / n0;
          if (std::abs(ratio) >= box) continue;  // clamped: flat
          const double up = dldt[t] / n0;
          net.backprop(th, offsets, tuples[t], raw[t], hidden[t], up, *g);
          dl_dn0 += dldt[t] * (-raw[t] / (n0 * n0));
        }
        net.backprop(th, offsets, tuples[0], raw[0], hidden[0], dl_dn0, *g);
      }
      if (res2_out) *res2_out = res2;
      return with_entropy ? s - alpha * res2 : -alpha * res2;
    };

    const auto& schedule = opts.mlp.penalty_schedule;
    const int rounds = static_cast<int>(schedule.size());
    int iter_count = 0;

    // Adam ascent with fresh moments per penalty round. The first round
    // carries the entropy search, later rounds tighten feasibility. Each
    // round ends on its best iterate, so a diverging tail cannot destroy
    // earlier progress; gradients are norm-clipped for the same reason.
    for (int round = 0; round < rounds; ++round) {
      const double alpha = schedule[round];
      const int per_round =
          rounds == 1 ? opts.iterations
                      : std::max(20, round == 0 ? opts.iterations / 2
                                                : opts.iterations / (2 * (rounds - 1)));
      const double lr =
          opts.mlp.gradient_step * (round <= 1 ? 1.0 : std::pow(0.25, round - 1));
      Eigen::VectorXd m1 = Eigen::VectorXd::Zero(n_params);
      Eigen::VectorXd m2 = Eigen::VectorXd::Zero(n_params);
      double best_f = -std::numeric_limits<double>::infinity();
      Eigen::VectorXd best_theta = theta;
      for (int it = 1; it <= per_round; ++it) {
        double f = evaluate(theta, alpha, &grad, nullptr);
        if (std::isinf(f)) break;
        if (f > best_f) {
          best_f = f;
          best_theta = theta;
        }
        out.trace.push_back({r, iter_count++, f});
        double gn = grad.norm();
        if (gn > 50.0) grad *= 50.0 / gn;
        m1 = 0.9 * m1 + 0.1 * grad;
        m2 = 0.999 * m2 + 0.001 * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(0.9, it);
        const double c2 = 1.0 - std::pow(0.999, it);
        for (int j = 0; j < n_params; ++j)
          theta[j] += lr * (m1[j] / c1) / (std::sqrt(m2[j] / c2) + 1e-8);
      }
      theta = best_theta;
    }

    // feasibility polish: descend the residual alone from the entropy-good
    // point; the parameter motion is tiny so the entropy barely moves
    {
      Eigen::VectorXd m1 = Eigen::VectorXd::Zero(n_params);
      Eigen::VectorXd m2 = Eigen::VectorXd::Zero(n_params);
      const int polish_iters = std::max(100, opts.iterations / 4);
      double best_res = std::numeric_limits<double>::infinity();
      Eigen::VectorXd best_theta = theta;
      for (int it = 1; it <= polish_iters; ++it) {
        double res2 = 0.0;
        double f = evaluate(theta, 1.0, &grad, &res2, false);
        if (std::isinf(f)) break;
        if (res2 < best_res) {
          best_res = res2;
          best_theta = theta;
        }
        out.trace.push_back({r, iter_count++, f});
        if (res2 < 1e-18) break;
        double gn = grad.norm();
        if (gn > 50.0) grad *= 50.0 / gn;
        m1 = 0.9 * m1 + 0.1 * grad;
        m2 = 0.999 * m2 + 0.001 * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(0.9, it);
        const double c2 = 1.0 - std::pow(0.999, it);
        for (int j = 0; j < n_params; ++j)
          theta[j] += 0.01 * (m1[j] / c1) / (std::sqrt(m2[j] / c2) + 1e-8);
      }
      theta = best_theta;
    }

    double res2 = 0.0;
    double final_obj = evaluate(theta, schedule.back(), nullptr, &res2);
    if (std::isinf(final_obj)) return;
    std::vector<double> final_tensor;
    if (!tensor_of(theta, final_tensor)) return;
    out.valid = true;
    out.pdo = Pdo(events.dims, events.labels);
    out.pdo.tensor = std::move(final_tensor);
    out.entropy = entropy(out.pdo);
    out.objective = final_obj;
    out.residual = std::sqrt(res2);
  };

  run_parallel(opts.restarts, opts.threads, run_restart);

  int best = -1;
  const double target = opts.mlp.residual_target;
  for (int r = 0; r < opts.restarts; ++r) {
    if (!outcomes[r].valid) continue;
    if (best < 0) { best = r; continue; }
    const bool r_feasible = outcomes[r].residual <= target;
    const bool b_feasible = outcomes[best].residual <= target;
    if (r_feasible != b_feasible) {
      if (r_feasible) best = r;
    } else if (r_feasible) {
      if (outcomes[r].entropy > outcomes[best].entropy) best = r;
    } else {
      if (outcomes[r].residual < outcomes[best].residual) best = r;
    }
  }
  if (best < 0)
    throw std::runtime_error("infer_mlp: all restarts hit degenerate normalization");

  MaxEntResult result;
  result.pdo = outcomes[best].pdo;
  result.entropy = outcomes[best].entropy;
  result.best_restart = best;
  result.max_residual = reduce_check(result.pdo, problem.scenario);
  for (const auto& out : outcomes)
    result.trace.insert(result.trace.end(), out.trace.begin(), out.trace.end());
  return result;
}

}  // namespace

MaxEntProblem make_problem(MarginalScenario scenario, MaxEntOptions options) {
  MaxEntProblem problem{std::move(scenario), {}, 0.0, std::move(options)};
  problem.family = solve_herm1(problem.scenario);
  double box = 1.0;
  for (int d : problem.scenario.global_events().dims) box *= std::sqrt(static_cast<double>(d));
  problem.box = box;
  return problem;
}

MaxEntResult infer(const MaxEntProblem& problem) {
  return problem.options.parameterization == Parameterization::direct
             ? infer_direct(problem)
             : infer_mlp(problem);
}

GenuineCorrelationResult genuine_correlation(const Pdo& p, int k,
                                             CorrelationNorm norm,
                                             MaxEntOptions options,
                                             bool check_uniqueness) {
  const int n = p.events();
  if (k < 1 || k >= n)
    throw std::invalid_argument("genuine_correlation: order must satisfy 1 <= k < events");

  // all k-subsets in lexicographic order
  std::vector<ScenarioPart> parts;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::vector<std::string> subset;
    for (int i : pick) subset.push_back(p.labels[i]);
    Pdo reduced = partial_trace(p, subset);
    parts.push_back({reduced.labels, reduced});
    int pos = k - 1;
    while (pos >= 0 && pick[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++pick[pos];
    for (int i = pos + 1; i < k; ++i) pick[i] = pick[i - 1] + 1;
  }

  MarginalScenario scenario = MarginalScenario::create(std::move(parts));
  MaxEntProblem problem = make_problem(scenario, options);
  GenuineCorrelationResult out;
  out.inference = infer(problem);

  Matrix diff = to_matrix(p) - to_matrix(out.inference.pdo);
  out.value = (norm == CorrelationNorm::trace)
                  ? trace_norm(diff)
                  : std::sqrt(diff.squaredNorm());
  if (check_uniqueness)
    out.maximizer_nonunique = non_uniqueness_witness(scenario, options).has_value();
  return out;
}

std::optional<std::pair<MaxEntResult, MaxEntResult>> non_uniqueness_witness(
    const MarginalScenario& scenario, MaxEntOptions options, WitnessOptions witness) {
  std::vector<MaxEntResult> results;
  for (int probe = 0; probe < witness.probes; ++probe) {
    MaxEntOptions probe_opts = options;
    probe_opts.seed = options.seed + 1000003ULL * probe;
    probe_opts.include_zero_start = (probe == 0);
    probe_opts.restarts = std::max(1, options.restarts / 4);
    MaxEntProblem problem = make_problem(scenario, probe_opts);
    results.push_back(infer(problem));
  }
  for (std::size_t i = 0; i < results.size(); ++i)
    for (std::size_t j = i + 1; j < results.size(); ++j) {
      if (std::abs(results[i].entropy - results[j].entropy) >= witness.entropy_tol)
        continue;
      double dist = trace_norm(to_matrix(results[i].pdo) - to_matrix(results[j].pdo));
      if (dist > witness.distance_tol)
        return std::make_pair(results[i], results[j]);
    }
  return std::nullopt;
}

}  // namespace pdolab
