// pdolab — command-line front end: circuit generation, marginal solving,
// entropy reports, maximum-entropy inference, channels, classical marginal
// problems, decompositions, purification and Lindbladian dynamics.
//
// Exit codes: 0 ok, 1 usage/parse, 2 incompatible, 3 not found, 4 numeric.

#include "pdolab/json_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace pdolab;

enum ExitCode { kOk = 0, kUsage = 1, kIncompatible = 2, kNotFound = 3, kNumeric = 4 };

struct GlobalOpts {
  std::uint64_t seed = 0;
  double tol = -1.0;  // negative = per-operation default
  bool quiet = false;
};

int thread_cap() {
  if (const char* env = std::getenv("PDOLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void emit(const GlobalOpts& g, const Json& j) {
  if (!g.quiet) std::cout << canonical_dump(j);
}

int cmd_gen(const GlobalOpts& g, const std::string& circuit_path,
            const std::string& out_path, int max_events) {
  CircuitSpec spec = circuit_from_json(read_json_file(circuit_path));
  BuildOptions opts;
  opts.max_events = max_events;
  Pdo p = build_pdo(spec, opts);
  write_json_file(out_path, pdo_to_json(p));
  emit(g, Json{{"out", out_path}, {"validation", validation_to_json(validate(p))}});
  return kOk;
}

int cmd_solve(const GlobalOpts& g, const std::string& scenario_path,
              const std::string& out_path, const std::string& filter,
              const std::string& halfspaces_path, const std::string& vertices_path,
              int starts, int iterations) {
  MarginalScenario scenario = scenario_from_json(read_json_file(scenario_path));
  SolutionFamily family = solve_herm1(scenario);
  Json out = family_to_json(family);
  out["reduce_check"] = reduce_check(family, scenario);

  int code = kOk;
  if (filter == "positive") {
    PositiveSearchOptions popts;
    popts.seed = g.seed;
    popts.starts = starts;
    popts.iterations = iterations;
    if (g.tol > 0) popts.tol = g.tol;
    popts.threads = thread_cap();
    PositiveSearchResult res = filter_positive(family, popts);
    out["filter"] = Json{{"kind", "positive"},
                         {"found", res.found.has_value()},
                         {"best_min_eigenvalue", res.best_min_eigenvalue}};
    if (res.found)
      out["completion"] = pdo_to_json(*res.found);
    else
      code = kNotFound;
  } else if (filter == "halfspaces") {
    std::vector<HalfSpace> halves;
    for (const auto& hj : read_json_file(halfspaces_path))
      halves.push_back({matrix_from_json(hj.at("op")),
                        hj.contains("offset") ? hj.at("offset").get<double>() : 0.0});
    bool member = in_halfspaces(family.base_pdo(), halves);
    out["filter"] = Json{{"kind", "halfspaces"}, {"base_point_member", member}};
    if (!member) code = kNotFound;
  } else if (filter == "hull") {
    std::vector<Pdo> vertices;
    for (const auto& vj : read_json_file(vertices_path)) vertices.push_back(pdo_from_json(vj));
    bool member = in_hull(family.base_pdo(), vertices, g.tol > 0 ? g.tol : 1e-9);
    out["filter"] = Json{{"kind", "hull"}, {"base_point_member", member}};
    if (!member) code = kNotFound;
  }
  write_json_file(out_path, out);
  emit(g, Json{{"out", out_path}, {"free_count", family.free_count()}, {"exit", code}});
  return code;
}

int cmd_entropy(const GlobalOpts& g, const std::string& pdo_path,
                const std::string& out_path, const std::vector<double>& alphas,
                const std::string& sweep, const std::string& csv_path) {
  Json out;
  if (!pdo_path.empty()) {
    Pdo p = pdo_from_json(read_json_file(pdo_path));
    out = entropy_report_to_json(entropy_report(p, alphas));
  }
  if (!sweep.empty()) {
    double lo, hi, step;
    if (std::sscanf(sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
      throw std::invalid_argument("entropy: --sweep wants start:end:step");
    const OperatorBasis& b = cached_basis(2);
    KrausChannel id{{Matrix::Identity(2, 2)}};
    std::string csv = "r,S\n";
    Json curve = Json::array();
    for (double r = lo; r <= hi + 1e-12; r += step) {
      Matrix rho = (b.ops[0] + r * b.ops[3]) / 2.0;
      double s = entropy(temporal_two_event(rho, id));
      curve.push_back(Json::array({r, s}));
      csv += Json(r).dump() + "," + Json(s).dump() + "\n";
    }
    out["sweep"] = curve;
    if (!csv_path.empty()) {
      std::ofstream f(csv_path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open for writing: " + csv_path);
      f << csv;
    }
  }
  if (!out_path.empty()) write_json_file(out_path, out);
  emit(g, out);
  return kOk;
}

int cmd_maxent(const GlobalOpts& g, const std::string& scenario_path,
               const std::string& out_path, const std::string& mode, int restarts,
               int iterations, bool witness) {
  MarginalScenario scenario = scenario_from_json(read_json_file(scenario_path));
  MaxEntOptions opts;
  opts.seed = g.seed;
  opts.restarts = restarts;
  opts.iterations = iterations;
  opts.threads = thread_cap();
  opts.parameterization = (mode == "mlp") ? Parameterization::mlp : Parameterization::direct;

  MaxEntProblem problem = make_problem(scenario, opts);
  MaxEntResult result = infer(problem);
  Json out = maxent_result_to_json(result);

  int code = kOk;
  if (witness) {
    auto pair = non_uniqueness_witness(scenario, opts);
    if (pair) {
      out["witness"] = Json{{"entropy_gap", std::abs(pair->first.entropy - pair->second.entropy)},
                            {"first", pdo_to_json(pair->first.pdo)},
                            {"second", pdo_to_json(pair->second.pdo)}};
    } else {
      out["witness"] = nullptr;
      code = kNotFound;
    }
  }
  write_json_file(out_path, out);
  emit(g, Json{{"out", out_path}, {"entropy", result.entropy}, {"exit", code}});
  return code;
}

int cmd_channel_apply(const GlobalOpts& g, const std::string& channel_path,
                      const std::string& pdo_path, const std::string& out_path) {
  PseudoChannel c = channel_from_json(read_json_file(channel_path));
  Pdo p = pdo_from_json(read_json_file(pdo_path));
  Pdo result = apply(c, p);
  write_json_file(out_path, pdo_to_json(result));
  emit(g, Json{{"out", out_path}});
  return kOk;
}

int cmd_channel_choi(const GlobalOpts& g, const std::string& channel_path,
                     const std::string& out_path) {
  PseudoChannel c = channel_from_json(read_json_file(channel_path));
  write_json_file(out_path, pdo_to_json(choi_pdo(c)));
  emit(g, Json{{"out", out_path}});
  return kOk;
}

int cmd_channel_marginal(const GlobalOpts& g, const std::string& channel_path,
                         const std::string& out_path, std::vector<int> keep_in,
                         std::vector<int> keep_out) {
  PseudoChannel c = channel_from_json(read_json_file(channel_path));
  try {
    PseudoChannel marg = marginal_channel(c, keep_in, keep_out,
                                          g.tol > 0 ? g.tol : 1e-6);
    write_json_file(out_path, channel_to_json(marg));
    emit(g, Json{{"out", out_path}});
    return kOk;
  } catch (const NoMarginalChannelError& e) {
    emit(g, Json{{"error", e.what()}, {"residual", e.residual}});
    return kNotFound;
  }
}

int cmd_channel_solve(const GlobalOpts& g, const std::string& scenario_path,
                      const std::string& out_path) {
  ChannelScenario scenario = channel_scenario_from_json(read_json_file(scenario_path));
  ChannelMarginalFamily family = solve_channel_marginal(scenario.parts);
  Json out = family_to_json(family.family);
  out["in_events"] = family.in_events;
  out["out_events"] = family.out_events;
  out["base_channel"] = channel_to_json(family.base_channel());
  write_json_file(out_path, out);
  emit(g, Json{{"out", out_path}, {"free_count", family.family.free_count()}});
  return kOk;
}

int cmd_classical(const GlobalOpts& g, const std::string& scenario_path,
                  const std::string& out_path, bool chordal_only) {
  ClassicalScenario s = classical_scenario_from_json(read_json_file(scenario_path));
  ChordalityResult chordal = is_chordal(s.graph);
  Json report{{"chordal", chordal.chordal},
              {"elimination_order", chordal.elimination_order}};
  if (chordal_only) {
    if (!out_path.empty()) write_json_file(out_path, report);
    emit(g, report);
    return chordal.chordal ? kOk : kNotFound;
  }
  if (!chordal.chordal) {
    if (!out_path.empty()) write_json_file(out_path, report);
    emit(g, report);
    return kNotFound;
  }
  QuasiDistribution joint = solve_chordal(s.graph, s.shape, s.parts,
                                          g.tol > 0 ? g.tol : 1e-10);
  report["joint"] = quasi_to_json(joint);
  write_json_file(out_path, report);
  emit(g, Json{{"out", out_path}, {"chordal", true}});
  return kOk;
}

int cmd_decompose(const GlobalOpts& g, const std::string& pdo_path,
                  const std::string& out_path) {
  Pdo p = pdo_from_json(read_json_file(pdo_path));
  SeparableExpansion se = separable_expansion(p);
  Json out = expansion_to_json(se);
  out["reassembly_error"] = max_abs(se.reassemble() - to_matrix(p));
  out["weight_total"] = se.weights.total();
  out["min_weight"] = se.weights.min_weight();
  write_json_file(out_path, out);
  emit(g, Json{{"out", out_path}, {"min_weight", se.weights.min_weight()}});
  return kOk;
}

int cmd_purify(const GlobalOpts& g, const std::string& pdo_path,
               const std::string& out_path) {
  Pdo p = pdo_from_json(read_json_file(pdo_path));
  Purification pur = purify(p);
  Json out = purification_to_json(pur);
  out["reconstruction_error"] = max_abs(pur.reconstruct(p.matrix_dim()) - to_matrix(p));
  write_json_file(out_path, out);
  emit(g, Json{{"out", out_path}, {"norm_squared", pur.norm_squared()}});
  return kOk;
}

int cmd_lindblad_evolve(const GlobalOpts& g, const std::string& gen_path,
                        const std::string& pdo_path, const std::string& out_path,
                        double tau, double dt) {
  Lindbladian l = lindbladian_from_json(read_json_file(gen_path));
  Pdo p = pdo_from_json(read_json_file(pdo_path));
  Pdo evolved = evolve(l, p, tau, dt);
  write_json_file(out_path, pdo_to_json(evolved));
  emit(g, Json{{"out", out_path}});
  return kOk;
}

int cmd_lindblad_steady(const GlobalOpts& g, const std::string& gen_path,
                        const std::string& out_path) {
  Lindbladian l = lindbladian_from_json(read_json_file(gen_path));
  try {
    Pdo steady = steady_state(l);
    write_json_file(out_path, pdo_to_json(steady));
    emit(g, Json{{"out", out_path}});
    return kOk;
  } catch (const std::runtime_error& e) {
    emit(g, Json{{"error", e.what()}});
    return kNotFound;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdolab — pseudo-density operator laboratory"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "random seed for all stochastic commands");
  app.add_option("--tol", g.tol, "tolerance override");
  app.add_flag("--quiet", g.quiet, "suppress stdout reports");

  // gen
  auto* gen = app.add_subcommand("gen", "build a PDO from a circuit file");
  gen->fallthrough();
  std::string gen_circuit, gen_out = "pdo.json";
  int gen_max_events = 4;
  gen->add_option("--circuit", gen_circuit, "CircuitSpec JSON")->required();
  gen->add_option("--out", gen_out, "output Pdo JSON");
  gen->add_option("--max-events", gen_max_events, "event cap");

  // solve
  auto* solve = app.add_subcommand("solve", "solve a marginal scenario");
  solve->fallthrough();
  std::string solve_scn, solve_out = "solution.json", solve_filter = "none";
  std::string solve_halfspaces, solve_vertices;
  int solve_starts = 64, solve_iters = 500;
  solve->add_option("--scenario", solve_scn, "scenario JSON")->required();
  solve->add_option("--out", solve_out, "output solution JSON");
  solve->add_option("--filter", solve_filter, "none|positive|halfspaces|hull")
      ->check(CLI::IsMember({"none", "positive", "halfspaces", "hull"}));
  solve->add_option("--halfspaces", solve_halfspaces, "half-space list JSON");
  solve->add_option("--vertices", solve_vertices, "vertex Pdo list JSON");
  solve->add_option("--starts", solve_starts, "positive-filter starts");
  solve->add_option("--iterations", solve_iters, "positive-filter iterations");

  // entropy
  auto* ent = app.add_subcommand("entropy", "entropy report and r-sweep");
  ent->fallthrough();
  std::string ent_pdo, ent_out, ent_sweep, ent_csv;
  std::vector<double> ent_alphas;
  ent->add_option("--pdo", ent_pdo, "input Pdo JSON");
  ent->add_option("--out", ent_out, "output report JSON");
  ent->add_option("--alpha", ent_alphas, "Renyi orders");
  ent->add_option("--sweep", ent_sweep, "start:end:step Bloch-radius sweep");
  ent->add_option("--csv", ent_csv, "sweep CSV path");

  // maxent
  auto* maxent = app.add_subcommand("maxent", "maximum-entropy inference");
  maxent->fallthrough();
  auto* me_infer = maxent->add_subcommand("infer", "infer a global PDO from marginals");
  maxent->require_subcommand(1);
  me_infer->fallthrough();
  std::string me_scn, me_out = "result.json", me_mode = "direct";
  int me_restarts = 8, me_iters = 400;
  bool me_witness = false;
  me_infer->add_option("--scenario", me_scn, "scenario JSON")->required();
  me_infer->add_option("--out", me_out, "output result JSON");
  me_infer->add_option("--mode", me_mode, "direct|mlp")
      ->check(CLI::IsMember({"direct", "mlp"}));
  me_infer->add_option("--restarts", me_restarts, "optimizer restarts");
  auto* me_iter_opt = me_infer->add_option("--iterations", me_iters, "iterations per restart");
  me_infer->add_flag("--witness", me_witness, "search for non-unique maximizers");

  // channel
  auto* channel = app.add_subcommand("channel", "pseudo-channel operations");
  channel->fallthrough();
  channel->require_subcommand(1);
  auto* ch_apply = channel->add_subcommand("apply", "apply a channel to a Pdo");
  ch_apply->fallthrough();
  std::string cha_channel, cha_pdo, cha_out = "out.json";
  ch_apply->add_option("--channel", cha_channel)->required();
  ch_apply->add_option("--pdo", cha_pdo)->required();
  ch_apply->add_option("--out", cha_out);
  auto* ch_choi = channel->add_subcommand("choi", "Choi state of a channel");
  ch_choi->fallthrough();
  std::string chc_channel, chc_out = "choi.json";
  ch_choi->add_option("--channel", chc_channel)->required();
  ch_choi->add_option("--out", chc_out);
  auto* ch_marg = channel->add_subcommand("marginal", "marginal channel");
  ch_marg->fallthrough();
  std::string chm_channel, chm_out = "marginal.json";
  std::vector<int> chm_keep_in, chm_keep_out;
  ch_marg->add_option("--channel", chm_channel)->required();
  ch_marg->add_option("--keep-in", chm_keep_in, "input event indices")->required();
  ch_marg->add_option("--keep-out", chm_keep_out, "output event indices")->required();
  ch_marg->add_option("--out", chm_out);
  auto* ch_solve = channel->add_subcommand("solve-marginal", "channel marginal problem");
  ch_solve->fallthrough();
  std::string chs_scn, chs_out = "channel_family.json";
  ch_solve->add_option("--scenario", chs_scn)->required();
  ch_solve->add_option("--out", chs_out);

  // classical
  auto* classical = app.add_subcommand("classical", "quasi-probability marginals");
  classical->fallthrough();
  std::string cl_scn, cl_out = "joint.json";
  bool cl_chordal_only = false;
  classical->add_option("--scenario", cl_scn, "classical scenario JSON")->required();
  classical->add_option("--out", cl_out, "output JSON");
  classical->add_flag("--chordal-only", cl_chordal_only, "report chordality only");

  // decompose
  auto* decompose = app.add_subcommand("decompose", "separable expansion");
  decompose->fallthrough();
  std::string de_pdo, de_out = "expansion.json";
  decompose->add_option("--pdo", de_pdo)->required();
  decompose->add_option("--out", de_out);

  // purify
  auto* purify_cmd = app.add_subcommand("purify", "space-time purification");
  purify_cmd->fallthrough();
  std::string pu_pdo, pu_out = "purification.json";
  purify_cmd->add_option("--pdo", pu_pdo)->required();
  purify_cmd->add_option("--out", pu_out);

  // lindblad
  auto* lindblad = app.add_subcommand("lindblad", "generator dynamics");
  lindblad->fallthrough();
  lindblad->require_subcommand(1);
  auto* lb_evolve = lindblad->add_subcommand("evolve", "integrate dR/dtau = L(R)");
  lb_evolve->fallthrough();
  std::string lbe_gen, lbe_pdo, lbe_out = "evolved.json";
  double lbe_tau = 1.0, lbe_dt = 1e-3;
  lb_evolve->add_option("--gen", lbe_gen)->required();
  lb_evolve->add_option("--pdo", lbe_pdo)->required();
  lb_evolve->add_option("--tau", lbe_tau)->required();
  lb_evolve->add_option("--dt", lbe_dt);
  lb_evolve->add_option("--out", lbe_out);
  auto* lb_steady = lindblad->add_subcommand("steady", "space-time steady state");
  lb_steady->fallthrough();
  std::string lbs_gen, lbs_out = "steady.json";
  lb_steady->add_option("--gen", lbs_gen)->required();
  lb_steady->add_option("--out", lbs_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(g, gen_circuit, gen_out, gen_max_events);
    if (solve->parsed())
      return cmd_solve(g, solve_scn, solve_out, solve_filter, solve_halfspaces,
                       solve_vertices, solve_starts, solve_iters);
    if (ent->parsed()) return cmd_entropy(g, ent_pdo, ent_out, ent_alphas, ent_sweep, ent_csv);
    if (maxent->parsed() && me_infer->parsed()) {
      if (me_mode == "mlp" && me_iter_opt->count() == 0) me_iters = 2400;
      return cmd_maxent(g, me_scn, me_out, me_mode, me_restarts, me_iters, me_witness);
    }
    if (channel->parsed()) {
      if (ch_apply->parsed()) return cmd_channel_apply(g, cha_channel, cha_pdo, cha_out);
      if (ch_choi->parsed()) return cmd_channel_choi(g, chc_channel, chc_out);
      if (ch_marg->parsed())
        return cmd_channel_marginal(g, chm_channel, chm_out, chm_keep_in, chm_keep_out);
      if (ch_solve->parsed()) return cmd_channel_solve(g, chs_scn, chs_out);
    }
    if (classical->parsed()) return cmd_classical(g, cl_scn, cl_out, cl_chordal_only);
    if (decompose->parsed()) return cmd_decompose(g, de_pdo, de_out);
    if (purify_cmd->parsed()) return cmd_purify(g, pu_pdo, pu_out);
    if (lindblad->parsed()) {
      if (lb_evolve->parsed())
        return cmd_lindblad_evolve(g, lbe_gen, lbe_pdo, lbe_out, lbe_tau, lbe_dt);
      if (lb_steady->parsed()) return cmd_lindblad_steady(g, lbs_gen, lbs_out);
    }
  } catch (const IncompatiblePartsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIncompatible;
  } catch (const IncompatibleDistributionsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIncompatible;
  } catch (const NotChordalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotFound;
  } catch (const NoMarginalChannelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNotFound;
  } catch (const Json::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
