#include "hull_lab/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hull_lab/dichotomy.hpp"
#include "hull_lab/grid.hpp"
#include "hull_lab/hull_property.hpp"
#include "hull_lab/monge_ampere.hpp"
#include "hull_lab/parallel.hpp"
#include "hull_lab/singularity.hpp"
#include "hull_lab/transport.hpp"

namespace hull_lab::cli {

namespace {

namespace hp = hull_lab::hull_property;
using nlohmann::ordered_json;

grid::GridDomain domain_from_config(const Config& cfg, const RunOptions& opts) {
  const std::vector<double> box = cfg.numbers("domain.box");
  if (box.size() != 4) throw Error("domain.box must be [x_min, x_max, y_min, y_max]");
  auto scaled = [&](double n) {
    return std::max(3, static_cast<int>(std::lround(n * opts.grid_scale)));
  };
  const int nx = scaled(cfg.number("domain.nx"));
  const int ny = scaled(cfg.number("domain.ny"));
  const std::string mask = cfg.str_or("domain.mask", "all");
  if (mask == "all") return grid::build_grid_box(box[0], box[1], box[2], box[3], nx, ny);
  return grid::build_grid(box[0], box[1], box[2], box[3], nx, ny, grid::Expr::parse(mask));
}

hp::QuasiConvexProbe probe_from_config(const Config& cfg) {
  const std::string kind = cfg.str_or("probe.kind", "linear");
  if (kind == "linear") return hp::QuasiConvexProbe::linear(cfg.numbers("probe.direction"));
  if (kind == "norm") return hp::QuasiConvexProbe::norm_distance(cfg.numbers("probe.center"));
  if (kind == "max_linear") {
    const std::vector<double> flat = cfg.numbers("probe.directions");
    if (flat.size() % 2 != 0) throw Error("probe.directions must hold coordinate pairs");
    std::vector<std::vector<double>> dirs;
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2) dirs.push_back({flat[i], flat[i + 1]});
    return hp::QuasiConvexProbe::max_of_linears(dirs, cfg.numbers("probe.offsets"));
  }
  throw Error("unknown probe.kind '" + kind + "'");
}

double tolerance_from_config(const Config& cfg, const std::string& key,
                             const grid::FieldExpr& f, const grid::GridDomain& dom) {
  if (cfg.has(key)) return cfg.positive(key);
  return hp::default_tolerance(f, dom);
}

std::vector<double> collar_widths_from_config(const Config& cfg, const grid::GridDomain& dom) {
  if (cfg.has("collars.widths")) return cfg.numbers("collars.widths");
  const double d1 = cfg.number_or("collars.width", 0.0);
  const int levels = static_cast<int>(cfg.number_or("collars.levels", 5));
  return hp::default_collar_widths(dom, d1, levels);
}

void write_report(const ordered_json& report, const RunOptions& opts) {
  if (!opts.write_files) return;
  std::filesystem::create_directories(opts.out_dir);
  std::ofstream out(opts.out_dir + "/report.json");
  out << report.dump(2) << "\n";
}

std::string artifact_path(const RunOptions& opts, const std::string& name) {
  return opts.out_dir + "/" + name;
}

}  // namespace

std::string tool_version() { return "0.1.0"; }

RunResult run_experiment(const Config& cfg, const RunOptions& opts) {
  set_sequential(opts.sequential);
  if (opts.write_files) std::filesystem::create_directories(opts.out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string kind = cfg.str("kind");

  ordered_json report;
  report["tool"] = {{"name", "hull-lab"}, {"version", tool_version()}};
  report["kind"] = kind;
  report["config"] = cfg.serialize();

  bool pass = false;

  if (kind == "hull-check") {
    const grid::GridDomain dom = domain_from_config(cfg, opts);
    const grid::FieldExpr f = grid::FieldExpr::parse(cfg.str("fields.f"));
    const double tol = tolerance_from_config(cfg, "tolerance.tol", f, dom);
    const hp::HullPropertyReport rep = hp::check_hull_property(f, dom, tol);
    report["result"] = hp::to_json(rep);
    pass = rep.holds;
  } else if (kind == "hull-like") {
    const grid::GridDomain dom = domain_from_config(cfg, opts);
    const grid::FieldExpr f = grid::FieldExpr::parse(cfg.str("fields.f"));
    const double tol = tolerance_from_config(cfg, "tolerance.tol", f, dom);
    const hp::HullLikeReport rep = hp::check_hull_like_property(
        f, dom, hp::default_probe_family(), collar_widths_from_config(cfg, dom), tol);
    report["result"] = hp::to_json(rep);
    pass = rep.satisfied;
  } else if (kind == "certificate" || kind == "lambda-sweep" || kind == "bifurcation") {
    const grid::GridDomain dom = domain_from_config(cfg, opts);
    const grid::FieldExpr f = grid::FieldExpr::parse(cfg.str("fields.f"));
    const hp::QuasiConvexProbe psi = probe_from_config(cfg);
    const double delta = cfg.number_or("certificate.delta", 10.0 * dom.spacing());
    try {
      const dichotomy::DichotomyCertificate cert =
          dichotomy::build_certificate(f, dom, psi, delta);
      report["certificate"] = dichotomy::to_json(cert);
      if (opts.write_files) {
        std::ofstream out(artifact_path(opts, "certificate.json"));
        out << dichotomy::to_json(cert).dump(2) << "\n";
      }
      pass = true;

      if (kind == "lambda-sweep") {
        const grid::FieldExpr g = grid::FieldExpr::parse(cfg.str("fields.g"));
        const singularity::SingularSweepResult sweep = singularity::singular_sweep(
            g, f, dom, cert.region, cfg.number("sweep.lambda_min"),
            cfg.number("sweep.lambda_max"), static_cast<int>(cfg.number("sweep.steps")),
            cfg.positive("sweep.tol_det"));
        ordered_json sj;
        sj["first_certified"] =
            sweep.first_certified ? ordered_json(*sweep.first_certified) : ordered_json(nullptr);
        sj["tol_det"] = sweep.tol_det;
        sj["samples"] = sweep.samples.size();
        report["sweep"] = sj;
        if (opts.write_files)
          singularity::write_sweep_csv(artifact_path(opts, "sweep.csv"), sweep, dom);
        if (cfg.has("sweep.expect_zero"))
          pass = (sweep.first_certified.has_value() == cfg.boolean_or("sweep.expect_zero", true));
      } else if (kind == "bifurcation") {
        const grid::FieldExpr g = grid::FieldExpr::parse(cfg.str("fields.g"));
        const double lambda = cfg.number("bifurcation.lambda");
        const double r0 = cfg.number("bifurcation.r0");
        const int kmax = static_cast<int>(cfg.number_or("bifurcation.kmax", 4));
        const grid::FieldExpr sum = grid::FieldExpr::vector(
            g.component(0) + grid::Expr::constant(lambda) * f.component(0),
            g.component(1) + grid::Expr::constant(lambda) * f.component(1));
        const double stol = tolerance_from_config(cfg, "bifurcation.support_tol", sum, dom);
        const singularity::BifurcationWitness wit =
            singularity::bifurcation_scan(g, f, dom, cert, lambda, r0, kmax, stol);
        report["witness"] = singularity::to_json(wit);
        if (opts.write_files) {
          std::ofstream out(artifact_path(opts, "witness.json"));
          out << singularity::to_json(wit).dump(2) << "\n";
        }
        pass = !wit.levels.empty();
        for (const auto& lev : wit.levels)
          pass = pass && lev.no_preimage_ok && lev.collision_ok;
        const dichotomy::SupportVerdict verdict =
            dichotomy::verify_supported(g, f, dom, cert, lambda, stol);
        if (opts.write_files)
          dichotomy::write_support_svg(artifact_path(opts, "overlay.svg"), dom, cert, verdict);
      } else if (opts.write_files) {
        // Plain certificate runs still get the overlay against g = 0.
        const grid::FieldExpr zero =
            grid::FieldExpr::vector(grid::Expr::constant(0.0), grid::Expr::constant(0.0));
        const dichotomy::SupportVerdict verdict = dichotomy::verify_supported(
            zero, f, dom, cert, 1.0, 4.0 * dom.spacing() * grid::lipschitz_estimate(f, dom));
        dichotomy::write_support_svg(artifact_path(opts, "overlay.svg"), dom, cert, verdict);
      }
    } catch (const NoCertificateError& e) {
      report["verdict"] = "no-certificate";
      report["detail"] = e.what();
      pass = false;
    }
  } else if (kind == "ma-solve" || kind == "ma-verify") {
    const grid::GridDomain dom = domain_from_config(cfg, opts);
    monge_ampere::MAProblem prob = monge_ampere::make_problem(
        dom, grid::FieldExpr::parse(cfg.str("ma.h")),
        grid::FieldExpr::parse(cfg.str("ma.boundary")));
    const int max_iters = static_cast<int>(cfg.number_or("ma.max_iters", 400000));
    const double tol_res = cfg.number_or("ma.tol_res", 1e-6);
    const monge_ampere::MASolution sol = monge_ampere::solve_ma(prob, max_iters, tol_res);
    report["solve"] = monge_ampere::convergence_trace_json(sol);
    if (opts.write_files) {
      monge_ampere::write_solution_csv(artifact_path(opts, "solution.csv"), sol, prob);
      std::ofstream out(artifact_path(opts, "trace.json"));
      out << monge_ampere::convergence_trace_json(sol).dump(2) << "\n";
    }
    pass = sol.converged;
    if (kind == "ma-verify" && sol.converged) {
      double tol = cfg.number_or("ma.verify_tol", 0.0);
      if (!(tol > 0.0))
        tol = 4.0 * prob.dom.spacing() *
              std::max(1.0, monge_ampere::max_boundary_gradient_norm(sol.u, prob.dom));
      const hp::HullPropertyReport rep = monge_ampere::verify_theorem5(sol, prob, tol);
      report["gradient_hull"] = hp::to_json(rep);
      pass = rep.holds;
    }
  } else if (kind == "transport") {
    const grid::GridDomain dom = domain_from_config(cfg, opts);
    const grid::Expr beta = grid::Expr::parse(cfg.str("transport.beta"));
    const grid::Expr profile = grid::Expr::parse(cfg.str("transport.F"), "t", "");
    if (cfg.boolean_or("transport.counterexample", false)) {
      const double tol = cfg.positive("transport.tol");
      const transport::CounterexampleReport rep =
          transport::counterexample_probe(beta, profile, dom, tol);
      report["counterexample"] = transport::to_json(rep);
      pass = rep.max_principle_failed;  // the probe demonstrates a failure
    } else {
      const grid::Expr alpha = grid::Expr::parse(cfg.str("transport.alpha"));
      const transport::TransportInstance inst =
          transport::make_instance(beta, alpha, profile, dom);
      const double tol =
          cfg.has("transport.tol") ? cfg.positive("transport.tol")
                                   : transport::default_tolerance(inst);
      const transport::MaxPrincipleReport rep = transport::check_max_principle(inst, tol);
      report["max_principle"] = transport::to_json(rep);
      report["jacobian_margin"] = inst.min_jacobian_margin;
      report["chain_rule_residual"] = inst.max_residual;
      pass = rep.passes;
    }
  } else if (kind == "remark1") {
    const double lambda = cfg.number_or("remark1.lambda", 1.0);
    const int samples = static_cast<int>(cfg.number_or("remark1.samples", 1000));
    const singularity::Remark1Report rep = singularity::remark1_case(lambda, samples);
    report["result"] = singularity::to_json(rep);
    pass = rep.injective && std::fabs(rep.hull_violation - lambda) <= 1e-9;
  } else {
    throw Error("unknown experiment kind '" + kind + "'");
  }

  report["pass"] = pass;
  const auto t1 = std::chrono::steady_clock::now();
  report["timing"] = {
      {"wall_ms", std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
  write_report(report, opts);

  RunResult res;
  res.exit_code = pass ? 0 : 1;
  res.report = std::move(report);
  return res;
}

int run_config_file(const std::string& path, const RunOptions& opts) {
  try {
    const Config cfg = Config::parse_file(path);
    return run_experiment(cfg, opts).exit_code;
  } catch (const ConfigParseError& e) {
    std::cerr << "config parse error at line " << e.line << ", column " << e.column << ": "
              << e.what() << "\n";
    return 2;
  } catch (const grid::ExprParseError& e) {
    std::cerr << "expression parse error at column " << e.column << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace hull_lab::cli
