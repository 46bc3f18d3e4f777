// Command-line front end: simulate, check-admissible, elastica,
// verify-identities, mms-convergence.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "elasticflow/elasticflow.hpp"

namespace ef = elasticflow;
namespace fs = std::filesystem;

namespace {

void configure_logging() {
  const char* env = std::getenv("ELASTICFLOW_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::warn);
  spdlog::set_pattern("[%l] %v");
}

/// Exit codes: 0 success, 1 a check failed, 2 + ErrorKind on errors.
int error_exit(const ef::Error& e) {
  std::fprintf(stderr, "error_category=%s\n%s\n", e.category(), e.what());
  return 2 + static_cast<int>(e.kind());
}

struct CommonOptions {
  std::string config;
  std::string initial;
  std::string out = "out";
  std::size_t record_every = 0;
  bool override_admissibility = false;
  bool with_ds6 = false;
  bool prepare = false;

  void add(CLI::App* app) {
    app->add_option("--config", config, "key = value configuration file");
    app->add_option("--initial", initial, "file:PATH or builtin:NAME(args)");
    app->add_option("--out", out, "output directory");
    app->add_option("--record-every", record_every, "steps between diagnostics records");
    app->add_flag("--override-admissibility", override_admissibility, "run even if the initial curve is inadmissible");
    app->add_flag("--with-ds6", with_ds6, "record the sixth-derivative norm (N >= 512)");
    app->add_flag("--prepare", prepare, "reparametrize the initial curve to meet the second-order condition");
  }

  ef::RunConfig resolve() const {
    ef::RunConfig rc = config.empty() ? ef::RunConfig{} : ef::parse_config(config);
    if (!initial.empty()) rc.initial.text = initial;
    if (record_every > 0) rc.flow.record_every = record_every;
    rc.flow.override_admissibility = rc.flow.override_admissibility || override_admissibility;
    rc.flow.with_ds6 = rc.flow.with_ds6 || with_ds6;
    rc.prepare = rc.prepare || prepare;
    rc.flow.validate();
    return rc;
  }
};

ef::DiscreteCurve initial_curve(const ef::RunConfig& rc) {
  auto curve = ef::make_initial(rc.initial, rc.flow.n_grid);
  if (rc.prepare) curve = ef::prepare_initial(curve, rc.flow.mu, rc.flow.rho_min);
  return curve;
}

void write_run(const fs::path& dir, const ef::RunConfig& rc, const ef::FlowResult& result, double wall) {
  fs::create_directories(dir);
  ef::write_atomic(dir / "trajectory.csv", ef::serialize_trajectory(result.records));
  ef::RunManifest m;
  for (const auto& s : result.states) {
    ef::write_curve(dir / ef::snapshot_name(s.step_index), s.curve);
    m.snapshots.push_back(s.step_index);
  }
  m.config = ef::serialize_config(rc);
  m.initial = rc.initial.text;
  m.reason = ef::to_string(result.reason);
  m.detail = result.detail;
  m.restarts = result.restarts;
  m.wall_time = wall;
  ef::write_atomic(dir / ef::kManifestName, ef::serialize_manifest(m));
}

ef::FlowResult simulate(const ef::RunConfig& rc, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto curve = initial_curve(rc);
  spdlog::info("initial {} with N = {}, mu = {}", rc.initial.text, rc.flow.n_grid, rc.flow.mu);
  auto result = ef::run_flow(curve, rc.flow, [](const ef::StepSummary& s) {
    if (s.restarted) spdlog::debug("constant-speed restart at step {}", s.state->step_index);
  });
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run(out, rc, result, wall);
  std::printf("reason=%s\ndetail=%s\nsteps=%zu\ntime=%.17g\nrestarts=%zu\n", ef::to_string(result.reason),
              result.detail.c_str(), result.final_state.step_index, result.final_state.time, result.restarts);
  return result;
}

int cmd_check(const CommonOptions& opt, bool geometric, double tol) {
  const auto rc = opt.resolve();
  const auto curve = initial_curve(rc);
  const auto rep = geometric ? ef::check_geometric_admissibility(curve, rc.flow.mu, rc.flow.rho_min, tol)
                             : ef::check_analytic_admissibility(curve, rc.flow.mu, rc.flow.rho_min, tol);
  std::printf("%-16s %-14s %-14s %-10s %s\n", "condition", "left", "right", "bound", "verdict");
  for (auto c : ef::kAllConditions) {
    const auto& r = rep.residual(c);
    const auto v = rep.verdict(c);
    std::printf("%-16s %-14.6e %-14.6e %-10.3g %s\n", ef::to_string(c), r[0], r[1], rep.tolerance(c),
                v == ef::Verdict::Pass ? "pass" : v == ef::Verdict::Fail ? "FAIL" : "n/a");
  }
  std::printf("note: %s\n", rep.notes.c_str());
  std::printf("overall=%s\n", rep.overall() ? "pass" : "fail");
  return rep.overall() ? 0 : 1;
}

int cmd_elastica(const CommonOptions& opt, int max_iter, double tol) {
  const auto rc = opt.resolve();
  const auto result = simulate(rc, opt.out);
  auto [curve, rep] = ef::newton_refine(result.final_state.curve, rc.flow.mu, max_iter, tol);
  ef::write_curve(fs::path(opt.out) / "elastica.curve", curve);
  std::printf("newton_iterations=%d\nconverged=%s\ninterior_residual=%.6e\n", rep.newton_iterations,
              rep.converged ? "true" : "false", rep.interior_residual);
  for (int e = 0; e < 2; ++e)
    std::printf("boundary_residuals_%d=%.3e,%.3e,%.3e,%.3e\n", e, rep.boundary_residuals[e][0],
                rep.boundary_residuals[e][1], rep.boundary_residuals[e][2], rep.boundary_residuals[e][3]);
  return rep.converged ? 0 : 1;
}

int cmd_verify(const fs::path& dir) {
  auto records = ef::parse_trajectory(ef::read_file(dir / "trajectory.csv"));
  const auto manifest = ef::parse_manifest(ef::read_file(dir / ef::kManifestName));
  const auto rc = ef::parse_config_text(manifest.config);
  // the last row is written at termination and may fall off the cadence
  if (records.size() >= 3) {
    const double d0 = records[1].time - records[0].time;
    const double dl = records.back().time - records[records.size() - 2].time;
    if (std::abs(dl - d0) > 1e-9 * d0) records.pop_back();
  }
  const double diss = ef::verify_dissipation(records);
  std::printf("dissipation_defect=%.6e\n", diss);
  const auto& snaps = manifest.snapshots;
  const double cadence = rc.flow.dt * static_cast<double>(rc.flow.record_every);
  double kt = -1.0;
  for (std::size_t i = 0; i + 2 < snaps.size(); ++i) {
    if (snaps[i + 1] - snaps[i] != rc.flow.record_every || snaps[i + 2] - snaps[i + 1] != rc.flow.record_every)
      continue;
    const auto t0 = static_cast<double>(snaps[i]) * rc.flow.dt;
    std::array<ef::FlowState, 3> s;
    for (std::size_t j = 0; j < 3; ++j)
      s[j] = {t0 + static_cast<double>(j) * cadence, ef::read_curve(dir / ef::snapshot_name(snaps[i + j])),
              snaps[i + j], std::nullopt, {}};
    kt = std::max(kt, ef::verify_curvature_evolution(s, rc.flow));
  }
  if (kt < 0.0) throw ef::Error(ef::ErrorKind::InsufficientRecords, "no three equally spaced snapshots");
  std::printf("curvature_evolution_defect=%.6e\n", kt);
  return 0;
}

int cmd_mms(const ef::MmsStudy& study) {
  const auto r = ef::run_mms_study(study);
  std::printf("%-8s %-12s %-12s\n", "N", "dt", "error");
  for (const auto& s : r.spatial) std::printf("%-8zu %-12.4e %-12.4e\n", s.n, s.dt, s.error);
  std::printf("%-8s %-12s %-12s\n", "N", "dt", "self_diff");
  for (const auto& s : r.temporal) std::printf("%-8zu %-12.4e %-12.4e\n", s.n, s.dt, s.error);
  std::printf("spatial_order=%.4f\ntemporal_order=%.4f\n", r.spatial_order, r.temporal_order);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Elastic flow of open planar curves with ends on the x-axis"};
  app.require_subcommand(1);

  CommonOptions sim_opt, chk_opt, el_opt;
  auto* sim = app.add_subcommand("simulate", "run the flow and write trajectory.csv, snapshots and a manifest");
  sim_opt.add(sim);

  auto* chk = app.add_subcommand("check-admissible", "print the admissibility report; nonzero exit on failure");
  chk_opt.add(chk);
  bool geometric = false;
  double chk_tol = 1e-4;
  chk->add_flag("--geometric", geometric, "geometric conditions only");
  chk->add_option("--tol", chk_tol, "tolerance for every residual");

  auto* el = app.add_subcommand("elastica", "run the flow, then refine the result with Newton");
  el_opt.add(el);
  int max_iter = 6;
  double el_tol = 1e-9;
  el->add_option("--max-iter", max_iter, "Newton iterations");
  el->add_option("--tol", el_tol, "residual tolerance");

  auto* ver = app.add_subcommand("verify-identities", "check the dissipation and curvature identities of a saved run");
  std::string ver_dir = "out";
  ver->add_option("--out", ver_dir, "run directory");

  auto* mms = app.add_subcommand("mms-convergence", "manufactured-solution convergence study");
  ef::MmsStudy study;
  mms->add_option("--t-end", study.t_end, "final time");
  mms->add_option("--mu", study.mu, "length penalty");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*sim) {
      simulate(sim_opt.resolve(), sim_opt.out);
      return 0;
    }
    if (*chk) return cmd_check(chk_opt, geometric, chk_tol);
    if (*el) return cmd_elastica(el_opt, max_iter, el_tol);
    if (*ver) return cmd_verify(ver_dir);
    if (*mms) return cmd_mms(study);
  } catch (const ef::Error& e) {
    return error_exit(e);
  }
  return 0;
}
