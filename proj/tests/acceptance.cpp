// acceptance — end-to-end checks with pinned tolerances, one line each.
// Exit code is the number of failed criteria.

#include "helpers.hpp"
#include "pdolab/json_io.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pdolab;
using namespace pdolab::testing;

namespace {

namespace fs = std::filesystem;

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(PDOLAB_CLI_PATH) + " --quiet " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

// ---------------------------------------------------------------------------
// 1. singlet / temporal-Bell fixtures through the CLI
Check criterion_fixtures() {
  Check c;
  fs::path dir = fs::temp_directory_path() / "pdolab_acceptance";
  fs::create_directories(dir);
  auto file = [&](const char* name) { return (dir / name).string(); };

  write_json_file(file("singlet_circuit.json"), circuit_to_json(singlet_circuit()));
  write_json_file(file("temporal_circuit.json"),
                  circuit_to_json(temporal_identity_circuit(Matrix::Identity(2, 2) / 2.0)));

  c.require(run_cli("gen --circuit " + file("singlet_circuit.json") + " --out " +
                    file("singlet_pdo.json")) == 0,
            "cmd_gen singlet failed");
  c.require(run_cli("gen --circuit " + file("temporal_circuit.json") + " --out " +
                    file("temporal_pdo.json")) == 0,
            "cmd_gen temporal failed");
  if (!c.pass) return c;

  Pdo s = pdo_from_json(read_json_file(file("singlet_pdo.json")));
  Pdo t = pdo_from_json(read_json_file(file("temporal_pdo.json")));
  c.require(tensor_dev(s, relabeled(singlet_pdo(), s.labels)) < 1e-12,
            "singlet tensor deviates beyond 1e-12");
  c.require(tensor_dev(t, relabeled(temporal_bell_pdo(), t.labels)) < 1e-12,
            "temporal-Bell tensor deviates beyond 1e-12");

  Spectrum sp = spectrum(t);
  const double expect[] = {0.5, 0.5, 0.5, -0.5};
  for (int i = 0; i < 4; ++i)
    c.require(std::abs(sp.values[i] - expect[i]) < 1e-10, "temporal-Bell spectrum off");
  return c;
}

// ---------------------------------------------------------------------------
// 2. qubit spectrum formula and the entropy endpoints
Check criterion_spectrum_formula() {
  Check c;
  const OperatorBasis& b = cached_basis(2);
  KrausChannel id{{Matrix::Identity(2, 2)}};
  for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    Pdo p = temporal_two_event((b.ops[0] + r * b.ops[3]) / 2.0, id);
    Spectrum sp = spectrum(p);
    std::vector<double> expect = {-0.5, 0.5, (1 - r) / 2, (1 + r) / 2};
    std::sort(expect.rbegin(), expect.rend());
    for (int i = 0; i < 4; ++i)
      c.require(std::abs(sp.values[i] - expect[i]) < 1e-10,
                "spectrum formula fails at r = " + std::to_string(r));
    if (r == 0.0)
      c.require(std::abs(entropy(p) - 2.0) < 1e-9, "S(r=0) != 2");
    if (r == 1.0)
      c.require(std::abs(entropy(p) - 1.0) < 1e-9, "S(r=1) != 1");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 3. Theorem-1 solver on random compatible scenarios
Check criterion_solver() {
  Check c;
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);  // 2..4 qubit events
    std::vector<int> dims(n, 2);
    Pdo global = random_tensor_pdo(dims, rng);

    // random covering family of proper subsets
    const int n_parts = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<std::string>> subsets;
    std::vector<char> covered(n, 0);
    for (int k = 0; k < n_parts; ++k) {
      std::vector<std::string> subset;
      for (int e = 0; e < n; ++e)
        if (rng() % 2 && static_cast<int>(subset.size()) < n - 1) {
          subset.push_back(global.labels[e]);
          covered[e] = 1;
        }
      if (subset.empty()) {
        int e = static_cast<int>(rng() % n);
        subset.push_back(global.labels[e]);
        covered[e] = 1;
      }
      subsets.push_back(subset);
    }
    for (int e = 0; e < n; ++e)
      if (!covered[e]) subsets.back().push_back(global.labels[e]);

    std::vector<ScenarioPart> parts;
    for (auto& subset : subsets) {
      Pdo reduced = partial_trace(global, subset);
      parts.push_back({reduced.labels, reduced});
    }
    MarginalScenario s = MarginalScenario::create(std::move(parts));
    SolutionFamily f = solve_herm1(s);
    c.require(reduce_check(f, s) < 1e-10, "base point reduce_check over 1e-10");
    for (int k = 0; k < 10; ++k) {
      std::vector<double> values(f.free_count());
      for (auto& v : values) v = u(rng);
      c.require(reduce_check(f.completed(values), s) < 1e-10,
                "completion reduce_check over 1e-10");
    }
  }

  // triangle scenario: exactly 27 free indices
  Pdo global = random_tensor_pdo({2, 2, 2}, rng);
  std::vector<ScenarioPart> parts;
  for (auto pair : {std::pair{0, 1}, {1, 2}, {0, 2}}) {
    std::vector<std::string> subset = {global.labels[pair.first], global.labels[pair.second]};
    Pdo reduced = partial_trace(global, subset);
    parts.push_back({reduced.labels, reduced});
  }
  SolutionFamily triangle = solve_herm1(MarginalScenario::create(std::move(parts)));
  c.require(triangle.free_count() == 27, "triangle free count != 27");
  return c;
}

// ---------------------------------------------------------------------------
// 4. entropy identity, Klein bound, weak additivity, weak subadditivity
Check criterion_entropy() {
  Check c;
  std::mt19937_64 rng(200);

  for (int rep = 0; rep < 500; ++rep) {
    Pdo p = random_temporal_pdo(2 + rep % 2, rng);
    c.require(entropy_identity_residual(p) < 1e-9, "entropy identity residual over 1e-9");
  }
  for (int rep = 0; rep < 200; ++rep) {
    Pdo p = random_full_rank_pdo(2, rng);
    Pdo q = relabeled(random_full_rank_pdo(2, rng), p.labels);
    c.require(klein_residual(p, q) >= -1e-8, "Klein bound residual below -1e-8");
  }
  for (int rep = 0; rep < 100; ++rep) {
    Pdo a = random_temporal_pdo(2, rng);
    Pdo b = relabeled(random_temporal_pdo(2, rng), {"x0", "x1"});
    double lhs = entropy(tensor_product(a, b));
    double rhs =
        (2 * causality_C(b) + 1) * entropy(a) + (2 * causality_C(a) + 1) * entropy(b);
    c.require(std::abs(lhs - rhs) < 1e-9, "weak additivity deviation over 1e-9");
  }
  for (int rep = 0; rep < 200; ++rep) {
    Pdo p = random_full_rank_pdo(2, rng);
    const std::string first[] = {p.labels[0]};
    c.require(subadditivity_residual(p, std::span<const std::string>(first)) >= -1e-8,
              "weak subadditivity residual below -1e-8");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 5. maxent on the disjoint I/2 scenario plus the non-uniqueness witness
Check criterion_maxent() {
  Check c;
  Pdo a({2}, {"A"});
  Pdo b({2}, {"B"});
  MarginalScenario s = MarginalScenario::create({{{"A"}, a}, {{"B"}, b}});

  MaxEntOptions opts;
  opts.restarts = 8;
  opts.iterations = 300;
  MaxEntResult r = infer(make_problem(s, opts));
  c.require(r.entropy >= 2.0 - 1e-3, "achieved entropy below 2 - 1e-3");
  c.require(r.max_residual < 1e-9, "reduction residual over 1e-9");

  auto pair = non_uniqueness_witness(s, opts);
  c.require(pair.has_value(), "no non-uniqueness witness found");
  if (pair) {
    c.require(std::abs(pair->first.entropy - pair->second.entropy) < 1e-6,
              "witness entropy gap over 1e-6");
    c.require(trace_norm(to_matrix(pair->first.pdo) - to_matrix(pair->second.pdo)) > 1e-4,
              "witness states closer than 1e-4");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. separable expansion and purification on random PDOs
Check criterion_expansion() {
  Check c;
  std::mt19937_64 rng(300);
  for (int rep = 0; rep < 200; ++rep) {
    Pdo p = random_temporal_pdo(2 + rep % 2, rng);

    SeparableExpansion se = separable_expansion(p);
    c.require(max_abs(se.reassemble() - to_matrix(p)) < 1e-9,
              "reassembly error over 1e-9");
    c.require(std::abs(se.weights.total() - 1.0) <= 1e-10, "weight sum off by over 1e-10");

    Purification pur = purify(p);
    c.require(max_abs(pur.reconstruct(p.matrix_dim()) - to_matrix(p)) < 1e-9,
              "purification reconstruction over 1e-9");
    double norm1 = spectrum(p).values.cwiseAbs().sum();
    c.require(std::abs(pur.norm_squared() - norm1) <= 1e-10,
              "|Psi|^2 differs from |R|_1 by over 1e-10");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 7. channel duality
Check criterion_channels() {
  Check c;
  std::mt19937_64 rng(400);

  for (int rep = 0; rep < 100; ++rep) {
    PseudoChannel ch = random_hptp(2, rng);
    for (int k = 0; k < 3; ++k) {
      Matrix r = random_hermitian(2, rng);
      c.require(max_abs(ch.apply_matrix(r) - ch.apply_via_choi(r)) < 1e-10,
                "Choi contraction equivalence over 1e-10");
    }
    PseudoChannel back = from_choi(ch.choi(), ch.in_dims(), ch.out_dims());
    Matrix r = random_hermitian(2, rng);
    c.require(max_abs(back.apply_matrix(r) - ch.apply_matrix(r)) < 1e-9,
              "from_choi round trip over 1e-9");
  }

  const int keep[] = {0};
  const int dims2[] = {2, 2};
  for (int rep = 0; rep < 50; ++rep) {
    PseudoChannel prod = tensor_channel(random_hptp(2, rng), random_hptp(2, rng));
    PseudoChannel marg = marginal_channel(prod, keep, keep);
    Matrix r = random_hermitian(4, rng);
    Matrix lhs = partial_trace_dense(prod.apply_matrix(r), dims2, keep);
    Matrix rhs = marg.apply_matrix(partial_trace_dense(r, dims2, keep));
    c.require(max_abs(lhs - rhs) < 1e-9, "marginal channel defining property over 1e-9");
  }

  std::vector<ChannelPart> parts = {{{"a"}, {"b1"}, depolarizing_channel(2)},
                                    {{"a"}, {"b2"}, depolarizing_channel(2)}};
  ChannelMarginalFamily family = solve_channel_marginal(parts);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> values(family.family.free_count());
    for (auto& v : values) v = u(rng);
    c.require(family.materialize(values).tp_deviation() < 1e-10,
              "channel completion TP deviation over 1e-10");
  }

  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1;
  swap(1, 2) = swap(2, 1) = 1;
  bool rejected = false;
  try {
    marginal_channel(unitary_channel(swap, {2, 2}), keep, keep);
  } catch (const NoMarginalChannelError&) {
    rejected = true;
  }
  c.require(rejected, "SWAP-channel marginal was not rejected");
  return c;
}

// ---------------------------------------------------------------------------
// 8. polygamy spectrum + monogamy of the positive filter
Check criterion_polygamy() {
  Check c;

  std::vector<double> xi = pairwise_singlet_xi(2);
  Pdo paired = polygamy_extension(2, &xi);
  Spectrum sp = spectrum(paired);
  for (int i = 0; i < 4; ++i)
    c.require(std::abs(sp.values[i] - 0.5) < 1e-10, "polygamy eigenvalue != 1/2");
  for (int i = 4; i < 8; ++i)
    c.require(std::abs(sp.values[i] + 0.25) < 1e-10, "polygamy eigenvalue != -1/4");

  for (const char* bi : {"B1", "B2"}) {
    const std::string pair[] = {"A", bi};
    Pdo reduced = partial_trace(paired, std::span<const std::string>(pair));
    c.require(tensor_dev(reduced, relabeled(singlet_pdo(), reduced.labels)) < 1e-10,
              "two-event reduction is not the singlet");
  }
  // the plain Xi = 0 operator keeps the same marginals
  Pdo plain = polygamy_extension(2);
  for (const char* bi : {"B1", "B2"}) {
    const std::string pair[] = {"A", bi};
    Pdo reduced = partial_trace(plain, std::span<const std::string>(pair));
    c.require(tensor_dev(reduced, relabeled(singlet_pdo(), reduced.labels)) < 1e-10,
              "Xi = 0 reduction is not the singlet");
  }

  Pdo wab = relabeled(singlet_pdo(), {"A", "B"});
  Pdo wab1 = relabeled(singlet_pdo(), {"A", "B1"});
  MarginalScenario mono = MarginalScenario::create({{{"A", "B"}, wab}, {{"A", "B1"}, wab1}});
  PositiveSearchResult res = filter_positive(solve_herm1(mono));  // default budget
  c.require(!res.found.has_value(), "positive completion found despite monogamy");
  return c;
}

// ---------------------------------------------------------------------------
// 9. classical chordal solver
Check criterion_classical() {
  Check c;
  CompatibilityGraph triangle{3, {{0, 1}, {1, 2}, {0, 2}}};
  CompatibilityGraph chain{3, {{0, 1}, {1, 2}}};
  CompatibilityGraph cycle{4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}};
  c.require(is_chordal(triangle).chordal, "triangle not marked chordal");
  c.require(is_chordal(chain).chordal, "chain not marked chordal");
  c.require(!is_chordal(cycle).chordal, "4-cycle marked chordal");

  std::mt19937_64 rng(500);
  for (int rep = 0; rep < 100; ++rep) {
    // clique-tree instances on 3..5 binary variables, half of them signed
    int n = 3 + static_cast<int>(rng() % 3);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<int>> edges = {{order[0], order[1]}};
    for (int i = 2; i < n; ++i) {
      const auto& host = edges[rng() % edges.size()];
      std::vector<int> clique = {host[rng() % host.size()], order[i]};
      edges.push_back(clique);
    }
    CompatibilityGraph g{n, edges};
    if (!is_chordal(g).chordal) {
      c.require(false, "generated clique tree not chordal");
      continue;
    }

    std::vector<int> shape(n, 2);
    std::size_t total = 1ull << n;
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::vector<double> w(total);
    double sum = 0;
    for (auto& x : w) {
      x = u(rng);
      sum += x;
    }
    for (auto& x : w) x /= sum;
    if (rep % 2 == 1) {
      std::uniform_real_distribution<double> ripple(-0.25 / total, 0.25 / total);
      for (std::size_t t = 0; t + 1 < total; t += 2) {
        double r = ripple(rng);
        w[t] += r;
        w[t + 1] -= r;
      }
      w[0] -= 0.35 / total;
      w[1] += 0.35 / total;
    }
    QuasiDistribution hidden(shape, w);
    std::vector<QuasiDistribution> parts;
    for (const auto& edge : edges) parts.push_back(marginalize(hidden, edge));

    QuasiDistribution joint = solve_chordal(g, shape, parts);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      QuasiDistribution m = marginalize(joint, edges[e]);
      for (std::size_t i = 0; i < m.weights.size(); ++i)
        c.require(std::abs(m.weights[i] - parts[e].weights[i]) < 1e-9,
                  "chordal marginal residual over 1e-9");
    }

    // Thm-4 embedding equivalence on a subset of instances
    if (rep % 10 == 0) {
      std::vector<std::vector<Vector>> projectors;
      for (int v = 0; v < n; ++v) {
        Matrix uu = random_unitary(2, rng);
        projectors.push_back({uu.col(0), uu.col(1)});
      }
      Pdo embedded = embed_classical_state(joint, projectors);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        Pdo reduced = partial_trace(embedded, edges[e]);
        std::vector<std::vector<Vector>> local;
        for (int v : edges[e]) local.push_back(projectors[v]);
        Pdo expect = embed_classical_state(parts[e], local);
        c.require(max_abs(to_matrix(reduced) - to_matrix(expect)) < 1e-9,
                  "embedding equivalence residual over 1e-9");
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 10. partial trace oracle equivalence
Check criterion_partial_trace() {
  Check c;
  std::mt19937_64 rng(600);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 2 + static_cast<int>(rng() % 2);
    std::vector<int> dims(n, 2);
    if (rep % 5 == 0) dims[0] = 3;  // mixed local dimensions too
    Pdo p = random_tensor_pdo(dims, rng);
    std::vector<int> keep;
    for (int e = 0; e < n; ++e)
      if (rng() % 2) keep.push_back(e);
    if (keep.empty()) keep.push_back(static_cast<int>(rng() % n));

    Matrix lhs = to_matrix(partial_trace(p, keep));
    Matrix rhs = oracle_partial_trace(to_matrix(p), p.dims, keep);
    c.require(max_abs(lhs - rhs) < 1e-10, "partial trace deviates from dense oracle");
  }
  return c;
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Check()> run;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "singlet and temporal-Bell fixtures via cmd_gen", 1.0, criterion_fixtures},
      {2, "qubit spectrum formula and entropy endpoints", 1.0, criterion_spectrum_formula},
      {3, "Herm_1 solver on 100 random compatible scenarios", 30.0, criterion_solver},
      {4, "entropy identity, Klein bound, weak additivity/subadditivity", 60.0,
       criterion_entropy},
      {5, "maxent on disjoint I/2 marginals with witness", 60.0, criterion_maxent},
      {6, "separable expansion and purification on 200 random PDOs", 30.0,
       criterion_expansion},
      {7, "channel duality, marginal channels, TP completions", 60.0, criterion_channels},
      {8, "polygamy spectrum and monogamy of the positive filter", 60.0,
       criterion_polygamy},
      {9, "classical chordal solver and embedding equivalence", 30.0, criterion_classical},
      {10, "tensor partial trace equals the dense oracle", 10.0, criterion_partial_trace},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > criterion.budget_s) {
      result.pass = false;
      if (result.detail.empty())
        result.detail = "runtime " + std::to_string(elapsed) + " s over budget";
    }
    std::printf("[%2d] %s  %s (%.2f s)%s%s\n", criterion.id,
                result.pass ? "PASS" : "FAIL", criterion.name.c_str(), elapsed,
                result.detail.empty() ? "" : " — ", result.detail.c_str());
    if (!result.pass) ++failures;
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures;
}
