// Command-line front end: decide / boundary / scan2d / witness / decompose /
// gen over the JSON state format. Exit codes: 0 on success (and, for
// boundary-type runs, convergence), 1 on unconverged or internal errors,
// 2 on malformed input, 3 on dimension or spin mismatch.

#include "spinclass/bipartite.hpp"
#include "spinclass/io.hpp"
#include "spinclass/lpsolve.hpp"
#include "spinclass/random.hpp"
#include "spinclass/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace spinclass;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUnconverged = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitBadDimension = 3;

void emit(const json& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw FormatError("cannot open output file: " + out_path);
  out << payload.dump(2) << "\n";
}

json base_payload(const std::string& command, MatrixNorm norm) {
  json j;
  j["version"] = SPINCLASS_VERSION;
  j["command"] = command;
  j["norm"] = norm_name(norm);
  return j;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stoi(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw FormatError("empty integer list");
  return out;
}

// Swap the subsystems of a bipartite matrix (A-major on both sides).
MatrixXcd swap_subsystems(const MatrixXcd& rho, const BipartiteLabel& jj) {
  const int da = jj.a.dim(), db = jj.b.dim();
  MatrixXcd out(da * db, da * db);
  for (int ia = 0; ia < da; ++ia)
    for (int ib = 0; ib < db; ++ib)
      for (int ka = 0; ka < da; ++ka)
        for (int kb = 0; kb < db; ++kb)
          out(ib * da + ia, kb * da + ka) = rho(ia * db + ib, ka * db + kb);
  return out;
}

json mixture_summary(const DeltaMixture& mix, const MatrixXcd& rho,
                     SpinLabel j) {
  json out;
  out["points"] = mixture_to_json(mix);
  out["reconstruction_residual"] =
      (rho_from_mixture(mix, j) - rho).norm();
  return out;
}

int cmd_decide(const std::string& path, int n, bool n_supplied, int refine,
               double tol, const std::string& out_path, bool raw) {
  const StateFile st = read_state_file(path, raw);
  json payload = base_payload("decide", MatrixNorm::kTrace);
  payload["tolerances"] = {{"feasibility", tol}};
  payload["input"] = path;

  if (!st.bipartite) {
    const SpinLabel j = st.spin();
    if (j.twice_j == 1) {
      const DeltaMixture mix = qubit_decompose(st.matrix);
      payload["prep"] = "true";
      payload["method"] = "qubit-analytic";
      payload["certificate"] = mixture_summary(mix, st.matrix, j);
    } else if (j.twice_j == 2) {
      const Spin1Verdict v = spin1_is_prep(st.matrix);
      if (v.p_rep) {
        const DeltaMixture mix = spin1_decompose(st.matrix);
        payload["prep"] = "true";
        payload["method"] = "spin1-analytic";
        payload["certificate"] = mixture_summary(mix, st.matrix, j);
      } else {
        payload["prep"] = "false";
        payload["method"] = "spin1-criterion";
        payload["witness"] = witness_to_json(witness_scan(st.matrix, j));
        payload["z_min"] = v.z_min;
      }
    } else {
      // grid LP with refinement, then witnesses
      DecideResult best;
      SphereGrid grid = fibonacci_grid(n);
      for (int level = 0; level <= refine; ++level) {
        if (level > 0) grow_grid(grid, grid.size() * 2, level);
        best = decide_prep(st.matrix, j, grid, tol);
        if (best.p_rep) break;
      }
      payload["grid_n"] = best.grid_size;
      payload["lp_residual"] = best.residual;
      if (best.p_rep) {
        payload["prep"] = "true";
        payload["method"] = "grid-lp";
        payload["certificate"] =
            mixture_summary(*best.certificate, st.matrix, j);
      } else {
        const WitnessReport w = witness_scan(st.matrix, j);
        if (w.violated) {
          payload["prep"] = "false";
          payload["method"] = "witness";
          payload["witness"] = witness_to_json(w);
        } else {
          payload["prep"] = "unresolved";
          payload["method"] = "grid-lp";
          payload["witness"] = witness_to_json(w);
        }
      }
    }
    emit(payload, out_path);
    return kExitOk;
  }

  // bipartite: PPT necessary check, partial-trace witness, then product LP
  const BipartiteLabel jj = st.labels();
  const PsdReport ppt = ppt_check(st.matrix, jj);
  payload["ppt_min_eigenvalue"] = ppt.min_eigenvalue;
  if (!ppt.positive) {
    payload["prep"] = "false";
    payload["method"] = "ppt";
    emit(payload, out_path);
    return kExitOk;
  }
  MatrixXcd probe = st.matrix;
  BipartiteLabel probe_jj = jj;
  if (jj.b.twice_j != 2 && jj.a.twice_j == 2) {
    probe = swap_subsystems(st.matrix, jj);
    probe_jj = BipartiteLabel(jj.b, jj.a);
  }
  if (probe_jj.b.twice_j == 2) {
    const PartialTraceWitness w = partial_trace_witness(
        probe, probe_jj, MatrixXcd::Identity(probe_jj.a.dim(), probe_jj.a.dim()));
    payload["partial_trace_z_min"] = w.verdict->z_min;
    if (!w.verdict->p_rep) {
      payload["prep"] = "false";
      payload["method"] = "partial-trace-witness";
      emit(payload, out_path);
      return kExitOk;
    }
  }
  // --n counts points per sphere; the LP has n_a * n_b columns, so the
  // bipartite default is far smaller than the single-sphere one.
  const int na = n_supplied ? n : 72;
  ProductGrid grid;
  grid.a = fibonacci_grid(na);
  grid.b = fibonacci_grid(na + na / 20 + 1);
  const BipartiteDecideResult r = bipartite_decide_prep(st.matrix, jj, grid, tol);
  payload["grid_n"] = {r.grid_a, r.grid_b};
  payload["lp_residual"] = r.residual;
  if (r.p_rep) {
    payload["prep"] = "true";
    payload["method"] = "product-grid-lp";
    json cert;
    cert["points"] = mixture_to_json(*r.certificate);
    cert["reconstruction_residual"] =
        (rho_from_product_mixture(*r.certificate, jj) - st.matrix).norm();
    payload["certificate"] = cert;
  } else {
    payload["prep"] = "unresolved";
    payload["method"] = "product-grid-lp";
  }
  emit(payload, out_path);
  return kExitOk;
}

int cmd_boundary(const std::string& path, const std::string& schedule_text,
                 const std::string& norm_text, double tol,
                 const std::string& out_path) {
  const StateFile st = read_state_file(path, /*raw=*/true);
  const MatrixNorm norm = (norm_text == "hs") ? MatrixNorm::kHilbertSchmidt
                                              : MatrixNorm::kTrace;
  if (std::abs(st.matrix.trace()) > 1e-8)
    throw DimensionError("boundary direction must be traceless (got trace != 0)");
  const ScaledFamily family = make_scaled_family(st.matrix, norm);

  json payload = base_payload("boundary", norm);
  payload["input"] = path;
  payload["tolerances"] = {{"refine_rel_tol", tol}};

  bool converged = false;
  if (!st.bipartite) {
    const SpinLabel j = st.spin();
    RefinementSchedule sched;
    if (!schedule_text.empty()) sched.sizes = parse_int_list(schedule_text);
    sched.rel_tol = tol;
    const BoundaryResult b = boundary_kappa(family, j, sched);
    converged = b.converged;
    payload["kappa_e"] = b.kappa_e;
    payload["converged"] = b.converged;
    payload["grid_n"] = b.grid_size;
    payload["inverse_kappa_history"] = b.inverse_kappa_history;
    payload["lp_residual"] = b.residual;
    payload["positivity_kappa"] = positivity_kappa(family);
    payload["mixture"] = mixture_to_json(b.mixture);
    if (j.twice_j == 2) {
      const Spin1Boundary a = spin1_kappa_e(family);
      payload["analytic_kappa_e"] = a.kappa_e;
    }
  } else {
    const BipartiteLabel jj = st.labels();
    BipartiteSchedule sched;
    if (!schedule_text.empty()) {
      sched.sizes.clear();
      for (int na : parse_int_list(schedule_text))
        sched.sizes.push_back({na, na + na / 20 + 1});
    }
    sched.rel_tol = tol;
    const BipartiteBoundaryResult b = bipartite_boundary_kappa(family, jj, sched);
    converged = b.converged;
    payload["kappa_e"] = b.kappa_e;
    payload["converged"] = b.converged;
    payload["grid_n"] = {b.grid_a, b.grid_b};
    payload["inverse_kappa_history"] = b.inverse_kappa_history;
    payload["lp_residual"] = b.residual;
    payload["positivity_kappa"] = positivity_kappa(family);
    payload["ppt_kappa"] = ppt_kappa(family, jj);
    payload["mixture"] = mixture_to_json(b.mixture);
  }
  emit(payload, out_path);
  return converged ? kExitOk : kExitUnconverged;
}

int cmd_scan2d(const std::string& path1, const std::string& path2, int rays,
               const std::string& schedule_text, double tol,
               const std::string& out_path) {
  const StateFile d1 = read_state_file(path1, /*raw=*/true);
  const StateFile d2 = read_state_file(path2, /*raw=*/true);
  if (!d1.bipartite || !d2.bipartite)
    throw DimensionError("scan2d expects bipartite direction files");
  if (d1.twice_j_a != d2.twice_j_a || d1.twice_j_b != d2.twice_j_b)
    throw DimensionError("scan2d directions live on different spins");
  const BipartiteLabel jj = d1.labels();
  BipartiteSchedule sched;
  if (!schedule_text.empty()) {
    sched.sizes.clear();
    for (int na : parse_int_list(schedule_text))
      sched.sizes.push_back({na, na + na / 20 + 1});
  }
  sched.rel_tol = tol;
  const ScanResult scan = scan2d(jj, d1.matrix, d2.matrix, rays, sched);
  if (out_path.empty()) {
    write_scan_csv(scan, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw FormatError("cannot open output file: " + out_path);
    write_scan_csv(scan, out);
  }
  return kExitOk;
}

int cmd_witness(const std::string& path, bool scan, const std::string& out_path,
                bool raw) {
  const StateFile st = read_state_file(path, raw);
  json payload = base_payload("witness", MatrixNorm::kTrace);
  payload["input"] = path;
  payload["tolerances"] = {{"violation", 1e-10}};
  if (!st.bipartite) {
    const SpinLabel j = st.spin();
    if (scan) {
      payload["witness"] = witness_to_json(witness_scan(st.matrix, j));
    } else {
      payload["witness"] = witness_to_json(
          witness_second_moment(st.matrix, Vector3d::UnitZ(), j));
      if (j.twice_j == 3)
        payload["third_moment"] = witness_to_json(
            witness_third_moment_spin32(st.matrix, Vector3d::UnitZ()));
    }
  } else {
    const BipartiteLabel jj = st.labels();
    const PsdReport ppt = ppt_check(st.matrix, jj);
    payload["ppt_min_eigenvalue"] = ppt.min_eigenvalue;
    payload["ppt_positive"] = ppt.positive;
    if (jj.b.twice_j == 2) {
      const PartialTraceWitness w = partial_trace_witness(
          st.matrix, jj, MatrixXcd::Identity(jj.a.dim(), jj.a.dim()));
      payload["partial_trace_z_min"] = w.verdict->z_min;
      payload["partial_trace_p_rep"] = w.verdict->p_rep;
    }
  }
  emit(payload, out_path);
  return kExitOk;
}

int cmd_decompose(const std::string& path, const std::string& out_path,
                  bool raw) {
  const StateFile st = read_state_file(path, raw);
  if (st.bipartite)
    throw DimensionError("decompose handles single spins 1/2 and 1 only");
  const SpinLabel j = st.spin();
  json payload = base_payload("decompose", MatrixNorm::kTrace);
  payload["input"] = path;
  payload["tolerances"] = {{"z_criterion", 1e-10}};
  if (j.twice_j == 1) {
    const DeltaMixture mix = qubit_decompose(st.matrix);
    payload["prep"] = "true";
    payload["certificate"] = mixture_summary(mix, st.matrix, j);
  } else if (j.twice_j == 2) {
    const Spin1Verdict v = spin1_is_prep(st.matrix);
    payload["z_min"] = v.z_min;
    if (!v.p_rep) {
      payload["prep"] = "false";
      payload["witness"] = witness_to_json(witness_scan(st.matrix, j));
    } else {
      const DeltaMixture mix = spin1_decompose(st.matrix);
      payload["prep"] = "true";
      payload["certificate"] = mixture_summary(mix, st.matrix, j);
    }
  } else {
    throw DimensionError("decompose handles spins 1/2 and 1 only");
  }
  emit(payload, out_path);
  return kExitOk;
}

int cmd_gen(const std::string& kind, const std::string& twice_j_text,
            std::uint64_t seed, double theta, double phi, double p,
            const std::string& out_path) {
  json payload;
  if (kind == "random") {
    const std::vector<int> tj = parse_int_list(twice_j_text);
    RandomStream rng(seed);
    if (tj.size() == 1) {
      const SpinLabel j(tj[0]);
      payload = state_to_json(random_density_matrix(j.dim(), rng), j.twice_j);
    } else if (tj.size() == 2) {
      const BipartiteLabel jj{SpinLabel(tj[0]), SpinLabel(tj[1])};
      payload = state_to_json(random_density_matrix(jj.dim(), rng),
                              jj.a.twice_j, jj.b.twice_j);
    } else {
      throw FormatError("twice-j takes one or two integers");
    }
  } else if (kind == "coherent") {
    const std::vector<int> tj = parse_int_list(twice_j_text);
    if (tj.size() != 1) throw FormatError("coherent states are single-spin");
    const SpinLabel j(tj[0]);
    const VectorXcd ket = coherent_ket(j, Direction(theta, phi));
    payload = state_to_json(ket * ket.adjoint(), j.twice_j);
  } else if (kind == "werner") {
    if (p < 0.0 || p > 1.0) throw FormatError("werner weight must be in [0,1]");
    VectorXcd psi = VectorXcd::Zero(4);
    psi(1) = 1.0 / std::sqrt(2.0);
    psi(2) = -1.0 / std::sqrt(2.0);
    const MatrixXcd rho =
        p * (psi * psi.adjoint()) + (1.0 - p) * maximally_mixed(4);
    payload = state_to_json(rho, 1, 1);
  } else {
    throw FormatError("unknown gen kind: " + kind);
  }
  emit(payload, out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classicality of spin states: decide P-representability, "
               "locate classical-set boundaries, evaluate witnesses"};
  app.require_subcommand(1);

  std::string state_path, path2, out_path, schedule_text, norm_text = "trace";
  std::string kind = "random", twice_j_text = "2";
  int n = 800, refine = 2, rays = 64;
  double tol = 1e-4, feas_tol = 1e-8, theta = 0.0, phi = 0.0, p = 1.0;
  std::uint64_t seed = 1;
  bool scan_flag = false, raw = false;

  CLI::App* decide = app.add_subcommand("decide", "decide P-representability");
  decide->add_option("state", state_path)->required();
  decide->add_option("--n", n, "grid size (points per sphere)");
  decide->add_option("--refine", refine, "extra doubling rounds");
  decide->add_option("--tol", feas_tol, "LP feasibility tolerance");
  decide->add_option("--out", out_path);
  decide->add_flag("--raw", raw);

  CLI::App* boundary =
      app.add_subcommand("boundary", "classical-set boundary along a direction");
  boundary->add_option("direction", state_path)->required();
  boundary->add_option("--schedule", schedule_text, "grid sizes, e.g. 250,500,1000");
  boundary->add_option("--norm", norm_text)->check(CLI::IsMember({"trace", "hs"}));
  boundary->add_option("--tol", tol, "relative refinement tolerance");
  boundary->add_option("--out", out_path);

  CLI::App* scan = app.add_subcommand("scan2d", "polar boundary scan of a 2-plane");
  scan->add_option("direction1", state_path)->required();
  scan->add_option("direction2", path2)->required();
  scan->add_option("--rays", rays);
  scan->add_option("--schedule", schedule_text, "per-sphere grid sizes for A");
  scan->add_option("--tol", tol);
  scan->add_option("--out", out_path, "CSV output path");

  CLI::App* witness = app.add_subcommand("witness", "moment witnesses");
  witness->add_option("state", state_path)->required();
  witness->add_flag("--scan", scan_flag, "search all directions");
  witness->add_option("--out", out_path);
  witness->add_flag("--raw", raw);

  CLI::App* decompose =
      app.add_subcommand("decompose", "explicit coherent decomposition");
  decompose->add_option("state", state_path)->required();
  decompose->add_option("--out", out_path);
  decompose->add_flag("--raw", raw);

  CLI::App* gen = app.add_subcommand("gen", "generate test states");
  gen->add_option("--kind", kind)->check(CLI::IsMember({"random", "coherent", "werner"}));
  gen->add_option("--twice-j", twice_j_text, "2j, or 'a,b' for bipartite");
  gen->add_option("--seed", seed);
  gen->add_option("--theta", theta);
  gen->add_option("--phi", phi);
  gen->add_option("--p", p, "werner mixing weight");
  gen->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (decide->parsed())
      return cmd_decide(state_path, n, decide->count("--n") > 0, refine,
                        feas_tol, out_path, raw);
    if (boundary->parsed())
      return cmd_boundary(state_path, schedule_text, norm_text, tol, out_path);
    if (scan->parsed())
      return cmd_scan2d(state_path, path2, rays, schedule_text, tol, out_path);
    if (witness->parsed())
      return cmd_witness(state_path, scan_flag, out_path, raw);
    if (decompose->parsed()) return cmd_decompose(state_path, out_path, raw);
    if (gen->parsed())
      return cmd_gen(kind, twice_j_text, seed, theta, phi, p, out_path);
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadDimension;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnconverged;
  }
  return kExitOk;
}
