#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "pdolab/marginal.hpp"

#include <random>

using namespace pdolab;
using namespace pdolab::testing;

namespace {

// scenario built by reducing a hidden global tensor: exactly compatible
MarginalScenario scenario_from_global(const Pdo& global,
                                      const std::vector<std::vector<std::string>>& subsets) {
  std::vector<ScenarioPart> parts;
  for (const auto& subset : subsets) {
    Pdo reduced = partial_trace(global, subset);
    parts.push_back({reduced.labels, reduced});
  }
  return MarginalScenario::create(std::move(parts));
}

MarginalScenario triangle_scenario(std::mt19937_64& rng) {
  Pdo global = random_tensor_pdo({2, 2, 2}, rng);
  return scenario_from_global(global, {{"e0", "e1"}, {"e1", "e2"}, {"e0", "e2"}});
}

}  // namespace

TEST_CASE("triangle scenario has exactly 27 free indices") {
  std::mt19937_64 rng(3);
  MarginalScenario s = triangle_scenario(rng);
  SolutionFamily f = solve_herm1(s);
  CHECK(f.free_count() == 27);
  for (const auto& tuple : f.free_indices)
    for (int mu : tuple) CHECK(mu != 0);
  CHECK(reduce_check(f, s) < 1e-10);

  // determinism: identical scenario, identical family
  std::mt19937_64 rng2(3);
  MarginalScenario s2 = triangle_scenario(rng2);
  SolutionFamily f2 = solve_herm1(s2);
  CHECK(f2.base_point == f.base_point);
  CHECK(f2.free_flat == f.free_flat);
}

TEST_CASE("single covering part leaves nothing free") {
  std::mt19937_64 rng(5);
  Pdo global = random_tensor_pdo({2, 2}, rng);
  MarginalScenario s = scenario_from_global(global, {{"e0", "e1"}});
  SolutionFamily f = solve_herm1(s);
  CHECK(f.free_count() == 0);
  CHECK(tensor_dev(f.base_pdo(), global) < 1e-14);
}

TEST_CASE("disjoint I/2 parts: base point is the product I/4") {
  Pdo a({2}, {"A"});
  Pdo b({2}, {"B"});
  MarginalScenario s = MarginalScenario::create({{{"A"}, a}, {{"B"}, b}});
  SolutionFamily f = solve_herm1(s);
  CHECK(f.free_count() == 9);
  CHECK(max_abs(to_matrix(f.base_pdo()) - Matrix::Identity(4, 4) / 4.0) < 1e-14);
}

TEST_CASE("incompatible parts are rejected with the offending pair") {
  Pdo s12 = relabeled(singlet_pdo(), {"1", "2"});
  Vector v = Vector::Zero(4);
  v[0] = 1.0;
  Pdo pure = from_matrix(v * v.adjoint(), {2, 2}, {"2", "3"});
  try {
    MarginalScenario::create({{{"1", "2"}, s12}, {{"2", "3"}, pure}});
    FAIL("expected IncompatiblePartsError");
  } catch (const IncompatiblePartsError& e) {
    CHECK(e.part_a == 0);
    CHECK(e.part_b == 1);
    CHECK(e.deviation == doctest::Approx(1.0));
  }
}

TEST_CASE("scenario normalization drops contained parts") {
  std::mt19937_64 rng(7);
  Pdo global = random_tensor_pdo({2, 2}, rng);
  const std::string keep[] = {"e0"};
  Pdo reduced = partial_trace(global, std::span<const std::string>(keep));
  MarginalScenario s =
      MarginalScenario::create({{{"e0", "e1"}, global}, {{"e0"}, reduced}});
  CHECK(s.parts().size() == 1);
  CHECK(s.global_events().count() == 2);
}

TEST_CASE("random completions keep reducing onto the parts") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    MarginalScenario s = triangle_scenario(rng);
    SolutionFamily f = solve_herm1(s);
    for (int k = 0; k < 5; ++k) {
      std::vector<double> values(f.free_count());
      for (auto& v : values) v = u(rng);
      CHECK(reduce_check(f.completed(values), s) < 1e-10);
    }
  }
}

TEST_CASE("dimension count: all (n-1)-subsets of n qubit events leave 3^n free") {
  std::mt19937_64 rng(13);
  for (int n : {3, 4}) {
    std::vector<int> dims(n, 2);
    Pdo global = random_tensor_pdo(dims, rng);
    std::vector<std::vector<std::string>> subsets;
    for (int drop = 0; drop < n; ++drop) {
      std::vector<std::string> subset;
      for (int e = 0; e < n; ++e)
        if (e != drop) subset.push_back(global.labels[e]);
      subsets.push_back(subset);
    }
    SolutionFamily f = solve_herm1(scenario_from_global(global, subsets));
    CHECK(f.free_count() == static_cast<std::size_t>(std::pow(3, n)));
  }
}

TEST_CASE("perturbing a fixed entry breaks reduce_check") {
  std::mt19937_64 rng(17);
  MarginalScenario s = triangle_scenario(rng);
  SolutionFamily f = solve_herm1(s);
  Pdo tampered = f.base_pdo();
  // find a fixed entry with support inside the first part
  std::size_t target = 1;
  while (!f.fixed_mask[target]) ++target;
  tampered.tensor[target] += 0.1;
  CHECK(reduce_check(tampered, s) >= 0.1 - 1e-12);
}

TEST_CASE("filter_positive finds easy completions") {
  Pdo a({2}, {"A"});
  Pdo b({2}, {"B"});
  MarginalScenario s = MarginalScenario::create({{{"A"}, a}, {{"B"}, b}});
  SolutionFamily f = solve_herm1(s);
  PositiveSearchOptions opts;
  opts.starts = 4;
  opts.iterations = 50;
  PositiveSearchResult res = filter_positive(f, opts);
  REQUIRE(res.found.has_value());
  CHECK(is_positive(*res.found, 1e-9));
  CHECK(reduce_check(*res.found, s) < 1e-10);

  // three events, I/4 on two overlapping pairs: I/8 works
  Pdo ab({2, 2}, {"A", "B"});
  Pdo bc({2, 2}, {"B", "C"});
  MarginalScenario s3 = MarginalScenario::create({{{"A", "B"}, ab}, {{"B", "C"}, bc}});
  PositiveSearchResult res3 = filter_positive(solve_herm1(s3), opts);
  REQUIRE(res3.found.has_value());
  CHECK(is_positive(*res3.found, 1e-9));
}

TEST_CASE("monogamy: the singlet symmetric-extension scenario stays negative") {
  Pdo wab = relabeled(singlet_pdo(), {"A", "B"});
  Pdo wab1 = relabeled(singlet_pdo(), {"A", "B1"});
  MarginalScenario s = MarginalScenario::create({{{"A", "B"}, wab}, {{"A", "B1"}, wab1}});
  SolutionFamily f = solve_herm1(s);
  CHECK(f.free_count() == 36);

  PositiveSearchOptions opts;  // default budget: 64 starts x 500 iterations
  PositiveSearchResult res = filter_positive(f, opts);
  CHECK_FALSE(res.found.has_value());
  CHECK(res.best_min_eigenvalue < -0.01);
}

TEST_CASE("half-space membership") {
  HalfSpace identity{Matrix::Identity(4, 4), 0.0};
  CHECK(in_halfspaces(singlet_pdo(), std::vector<HalfSpace>{identity}));

  // tr(R_t P_singlet) = -1/2 < 0
  HalfSpace witness{singlet_matrix(), 0.0};
  CHECK_FALSE(in_halfspaces(temporal_bell_pdo(), std::vector<HalfSpace>{witness}));

  HalfSpace direction{Matrix::Identity(4, 4) / 2.0 - singlet_matrix(), 0.0};
  CHECK(in_halfspaces(Pdo({2, 2}), std::vector<HalfSpace>{direction}));  // trace = 1/4

  Matrix skew = Matrix::Zero(4, 4);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(in_halfspaces(Pdo({2, 2}), std::vector<HalfSpace>{{skew, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("hull membership by simplex feasibility") {
  Pdo v1({2, 2});          // I/4
  Pdo v2 = relabeled(singlet_pdo(), v1.labels);
  std::vector<Pdo> vertices = {v1, v2};

  CHECK(in_hull(v1, vertices, 1e-9));
  const Pdo mids[] = {v1, v2};
  const double half[] = {0.5, 0.5};
  Pdo midpoint = mix(mids, half);
  CHECK(in_hull(midpoint, vertices, 1e-9));

  // every hull point has equal XX and YY entries; break that symmetry
  Pdo outside = midpoint;
  outside.tensor[10] += 0.25;  // YY
  outside.tensor[5] -= 0.25;   // XX
  CHECK_FALSE(in_hull(outside, vertices, 1e-9));
}

TEST_CASE("symmetric extension") {
  // |00><00| extends to |000><000|
  Vector v = Vector::Zero(4);
  v[0] = 1.0;
  Pdo w = from_matrix(v * v.adjoint(), {2, 2}, {"A", "B"});
  Pdo ext = symmetric_extension(w, 3);
  Vector vvv = Vector::Zero(8);
  vvv[0] = 1.0;
  CHECK(max_abs(to_matrix(ext) - vvv * vvv.adjoint()) < 1e-9);

  // singlet: all {A, B_i} reductions equal the singlet, global not positive
  Pdo s = relabeled(singlet_pdo(), {"A", "B"});
  Pdo sext = symmetric_extension(s, 3);
  const std::string ab[] = {"A", "B"};
  const std::string ab2[] = {"A", "B_2"};
  CHECK(tensor_dev(partial_trace(sext, std::span<const std::string>(ab)), s) < 1e-9);
  Pdo red2 = partial_trace(sext, std::span<const std::string>(ab2));
  CHECK(tensor_dev(red2, relabeled(s, red2.labels)) < 1e-9);
  CHECK_FALSE(is_positive(sext, 1e-9));

  // temporal Bell reductions survive as well
  Pdo t = relabeled(temporal_bell_pdo(), {"A", "B"});
  Pdo text = symmetric_extension(t, 3);
  CHECK(tensor_dev(partial_trace(text, std::span<const std::string>(ab)), t) < 1e-9);

  // random two-event states: reductions match on every copy
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    Pdo r = relabeled(random_temporal_pdo(2, rng), {"A", "B"});
    Pdo rext = symmetric_extension(r, 4);
    for (const char* b2 : {"B", "B_2", "B_3"}) {
      const std::string pair[] = {"A", b2};
      Pdo reduced = partial_trace(rext, std::span<const std::string>(pair));
      CHECK(tensor_dev(reduced, relabeled(r, reduced.labels)) < 1e-9);
    }
  }
}

TEST_CASE("polygamy construction") {
  // n = 1 is exactly the singlet
  Pdo one = polygamy_extension(1);
  CHECK(tensor_dev(one, relabeled(singlet_pdo(), one.labels)) < 1e-14);

  // n = 2, Xi = 0: reductions are singlets; spectrum {5/8 x2, 1/8 x2, -1/8 x4}
  Pdo two = polygamy_extension(2);
  for (const char* bi : {"B1", "B2"}) {
    const std::string pair[] = {"A", bi};
    Pdo reduced = partial_trace(two, std::span<const std::string>(pair));
    CHECK(tensor_dev(reduced, relabeled(singlet_pdo(), reduced.labels)) < 1e-10);
  }
  Spectrum sp = spectrum(two);
  const double expect_xi0[] = {0.625, 0.625, 0.125, 0.125, -0.125, -0.125, -0.125, -0.125};
  for (int i = 0; i < 8; ++i)
    CHECK(sp.values[i] == doctest::Approx(expect_xi0[i]).epsilon(1e-10));

  // pairwise-singlet Xi also couples B1 B2; eigenvalues {-1/4 x4, 1/2 x4}
  std::vector<double> xi = pairwise_singlet_xi(2);
  Pdo paired = polygamy_extension(2, &xi);
  for (const char* bi : {"B1", "B2"}) {
    const std::string pair[] = {"A", bi};
    Pdo reduced = partial_trace(paired, std::span<const std::string>(pair));
    CHECK(tensor_dev(reduced, relabeled(singlet_pdo(), reduced.labels)) < 1e-10);
  }
  Spectrum sp2 = spectrum(paired);
  for (int i = 0; i < 4; ++i) CHECK(sp2.values[i] == doctest::Approx(0.5).epsilon(1e-10));
  for (int i = 4; i < 8; ++i) CHECK(sp2.values[i] == doctest::Approx(-0.25).epsilon(1e-10));

  // Xi support restriction: a tuple touching only one B index is rejected
  Pdo shell({2, 2, 2});
  std::vector<double> bad(shell.tensor.size(), 0.0);
  const int tuple[] = {0, 1, 0};
  bad[shell.indexer().flatten(tuple)] = 0.3;
  CHECK_THROWS_AS(polygamy_extension(2, &bad), std::invalid_argument);
}

TEST_CASE("symmetry checking") {
  std::mt19937_64 rng(29);

  // the maximally mixed global is invariant under any local conjugation
  Pdo mixed({2, 2}, {"A", "B"});
  const std::string la[] = {"A"};
  const std::string lb[] = {"B"};
  Pdo ra = partial_trace(mixed, std::span<const std::string>(la));
  Pdo rb = partial_trace(mixed, std::span<const std::string>(lb));
  MarginalScenario s = MarginalScenario::create({{{"A"}, ra}, {{"B"}, rb}});
  Matrix u = random_unitary(2, rng);
  PseudoChannel uu = unitary_channel(kron(u, u), {2, 2});
  SymmetryReport rep = check_symmetry(s, mixed, std::vector<PseudoChannel>{uu});
  CHECK(rep.ok());

  // the singlet is U x U invariant
  Pdo singlet = relabeled(singlet_pdo(), {"A", "B"});
  Pdo sa = partial_trace(singlet, std::span<const std::string>(la));
  Pdo sb = partial_trace(singlet, std::span<const std::string>(lb));
  MarginalScenario s2 = MarginalScenario::create({{{"A"}, sa}, {{"B"}, sb}});
  SymmetryReport rep2 = check_symmetry(s2, singlet, std::vector<PseudoChannel>{uu});
  CHECK(rep2.ok());

  // |00><00| is not fixed by X x X conjugation: reported, parts not checked
  Vector v = Vector::Zero(4);
  v[0] = 1.0;
  Pdo zz = from_matrix(v * v.adjoint(), {2, 2}, {"A", "B"});
  Pdo za = partial_trace(zz, std::span<const std::string>(la));
  Pdo zb = partial_trace(zz, std::span<const std::string>(lb));
  MarginalScenario s3 = MarginalScenario::create({{{"A"}, za}, {{"B"}, zb}});
  const OperatorBasis& basis = cached_basis(2);
  PseudoChannel xx = unitary_channel(kron(basis.ops[1], basis.ops[1]), {2, 2});
  SymmetryReport rep3 = check_symmetry(s3, zz, std::vector<PseudoChannel>{xx});
  CHECK_FALSE(rep3.global_symmetric);
  CHECK_FALSE(rep3.ok());

  // wrong arity is a contract violation
  PseudoChannel small = identity_channel({2});
  CHECK_THROWS_AS(check_symmetry(s3, zz, std::vector<PseudoChannel>{small}),
                  std::invalid_argument);
}

TEST_CASE("hull membership implies half-space membership") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    Pdo v1 = relabeled(random_temporal_pdo(2, rng), {"A", "B"});
    Pdo v2 = relabeled(random_temporal_pdo(2, rng), {"A", "B"});
    Pdo v3 = relabeled(random_temporal_pdo(2, rng), {"A", "B"});
    std::vector<Pdo> vertices = {v1, v2, v3};
    double w1 = u(rng), w2 = u(rng) * (1 - w1);
    const Pdo pdos[] = {v1, v2, v3};
    const double weights[] = {w1, w2, 1 - w1 - w2};
    Pdo inside = mix(pdos, weights);
    REQUIRE(in_hull(inside, vertices, 1e-9));

    // half-spaces that contain all vertices must contain the point
    for (int k = 0; k < 5; ++k) {
      Matrix dir = random_hermitian(4, rng);
      double offset = std::numeric_limits<double>::infinity();
      for (const auto& v : vertices)
        offset = std::min(offset, (to_matrix(v) * dir).trace().real());
      CHECK(in_halfspaces(inside, std::vector<HalfSpace>{{dir, offset}}));
    }
  }
}
