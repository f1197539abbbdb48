// Configuration-driven front end: norm, evolve, solve, verify and
// calibrate commands over a single experiment config file.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "halfheat/config.hpp"
#include "halfheat/io.hpp"
#include "halfheat/solver.hpp"
#include "halfheat/verify.hpp"

namespace hh = halfheat;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string preset_name(hh::DataPreset p) {
  switch (p) {
    case hh::DataPreset::Zero: return "zero";
    case hh::DataPreset::Gaussian: return "gaussian";
    case hh::DataPreset::Indicator: return "indicator";
    case hh::DataPreset::Homogeneous: return "homogeneous";
    case hh::DataPreset::BoundaryInverse: return "boundary_inverse";
  }
  return "?";
}

int run_norm(const hh::ConfigFile& cfg, const hh::ExperimentConfig& ec) {
  Timer timer;
  const auto grid = ec.make_grid();
  const hh::LorentzIndex idx{ec.norm_p, ec.norm_r};
  idx.validate();
  double quasi = 0.0, norm = 0.0;
  if (ec.norm_field == "boundary") {
    const auto f = ec.make_boundary_data(grid);
    quasi = hh::quasi_norm_star(f, idx);
    norm = hh::lorentz_norm(f, idx);
  } else if (ec.norm_field == "interior") {
    const auto f = ec.make_initial_data(grid);
    quasi = hh::quasi_norm_star(f, idx);
    norm = hh::lorentz_norm(f, idx);
  } else {
    throw std::runtime_error("norm.field must be interior or boundary, got '" + ec.norm_field +
                             "'");
  }
  const std::string dir = hh::ensure_output_dir(ec);
  hh::CsvWriter csv(dir + "/norm.csv", {"field_id", "p", "r", "quasi_norm_star", "norm"});
  csv.write_row_strings({preset_name(ec.preset) + ":" + ec.norm_field,
                         hh::format_double(ec.norm_p), hh::format_double(ec.norm_r),
                         hh::format_double(quasi), hh::format_double(norm)});
  std::cout << "quasi_norm_star = " << hh::format_double(quasi) << "\n"
            << "norm = " << hh::format_double(norm) << "\n";
  hh::write_manifest(dir + "/manifest.txt", cfg.text(), "norm", timer.seconds());
  return 0;
}

int run_evolve(const hh::ConfigFile& cfg, const hh::ExperimentConfig& ec) {
  Timer timer;
  const auto grid = ec.make_grid();
  const auto u0 = ec.make_initial_data(grid);
  const std::string dir = hh::ensure_output_dir(ec);
  hh::CsvWriter csv(dir + "/evolve.csv",
                    {"t", "interior_weak_p_norm", "boundary_weak_q_norm", "xpq_norm"});
  const double p = ec.solver.p(), q = ec.solver.q();
  for (double t : ec.solver.time_levels) {
    const auto u = hh::heat_semigroup(u0, t);
    const auto b = hh::heat_semigroup_trace(u0, t);
    const double ni = hh::lorentz_norm(u, {p, hh::LorentzIndex::infinity()});
    const double nb = hh::lorentz_norm(b, {q, hh::LorentzIndex::infinity()});
    csv.write_row({t, ni, nb, ni + nb});
  }
  hh::write_manifest(dir + "/manifest.txt", cfg.text(), "evolve", timer.seconds());
  return 0;
}

hh::Solution solve_experiment(const hh::ExperimentConfig& ec, const hh::GridPtr& grid,
                              hh::CalibratedConstants* constants_out = nullptr) {
  const auto u0 = ec.make_initial_data(grid);
  const auto V = hh::evaluate_potential(ec.potential, grid);
  const auto constants = hh::calibrate(grid, ec.solver);
  if (constants_out) *constants_out = constants;
  return hh::picard_solve(u0, V, ec.nonlinearity, ec.solver, constants);
}

int run_solve(const hh::ConfigFile& cfg, const hh::ExperimentConfig& ec) {
  Timer timer;
  const auto grid = ec.make_grid();
  hh::CalibratedConstants constants;
  const auto sol = solve_experiment(ec, grid, &constants);
  const std::string dir = hh::ensure_output_dir(ec);

  const double p = ec.solver.p(), q = ec.solver.q();
  hh::CsvWriter levels(dir + "/solve_levels.csv",
                       {"t", "interior_weak_p_norm", "boundary_weak_q_norm", "xpq_norm"});
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    const double ni =
        hh::lorentz_norm(sol.fields[j].interior, {p, hh::LorentzIndex::infinity()});
    const double nb =
        hh::lorentz_norm(sol.fields[j].boundary, {q, hh::LorentzIndex::infinity()});
    levels.write_row({sol.times[j], ni, nb, ni + nb});
  }

  hh::CsvWriter hist(dir + "/solve_history.csv", {"iteration", "increment", "ratio"});
  const auto rows = hh::contraction_report(sol);
  for (const auto& row : rows)
    hist.write_row({static_cast<double>(row.k), row.increment, row.ratio});

  const char* status = sol.status == hh::Solution::Status::Converged      ? "converged"
                       : sol.status == hh::Solution::Status::Diverged     ? "diverged"
                                                                          : "numerical_failure";
  std::cout << "status = " << status << ", iterations = " << sol.iterations << "\n";
  hh::write_manifest(dir + "/manifest.txt", cfg.text(), "solve", timer.seconds(),
                     {{"status", status},
                      {"iterations", std::to_string(sol.iterations)},
                      {"delta1", hh::format_double(constants.delta1)},
                      {"delta2", hh::format_double(constants.delta2)},
                      {"K", hh::format_double(constants.K)},
                      {"gamma", hh::format_double(sol.admissibility.gamma)},
                      {"eps", hh::format_double(sol.admissibility.eps)}});
  if (sol.status == hh::Solution::Status::Converged) return 0;
  return sol.status == hh::Solution::Status::Diverged ? 2 : 1;
}

int run_calibrate(const hh::ConfigFile& cfg, const hh::ExperimentConfig& ec) {
  Timer timer;
  const auto grid = ec.make_grid();
  const auto constants = hh::calibrate(grid, ec.solver);
  const std::string dir = hh::ensure_output_dir(ec);
  hh::CsvWriter csv(dir + "/calibrate.csv", {"delta1", "delta2", "K"});
  csv.write_row({constants.delta1, constants.delta2, constants.K});
  std::cout << "delta1 = " << hh::format_double(constants.delta1) << "\n"
            << "delta2 = " << hh::format_double(constants.delta2) << "\n"
            << "K = " << hh::format_double(constants.K) << "\n";
  hh::write_manifest(dir + "/manifest.txt", cfg.text(), "calibrate", timer.seconds());
  return 0;
}

std::vector<double> verify_times(const hh::ExperimentConfig& ec) {
  if (!ec.verify_times.empty()) return ec.verify_times;
  std::vector<double> times;
  for (int i = 0; i < 8; ++i) times.push_back(0.5 * std::pow(10.0, i / 7.0));
  return times;
}

int run_verify(const hh::ConfigFile& cfg, const hh::ExperimentConfig& ec,
               const std::string& check) {
  Timer timer;
  const std::string dir = hh::ensure_output_dir(ec);
  const std::string report_path = dir + "/verify_report.csv";
  const bool fresh = !std::filesystem::exists(report_path);
  std::ofstream report(report_path, std::ios::app);
  if (!report) throw std::runtime_error("cannot open report file: " + report_path);
  if (fresh) report << "check,parameters,statistic,threshold,pass\n";

  auto emit = [&](const std::string& params, double statistic, double threshold, bool pass) {
    report << check << ',' << params << ',' << hh::format_double(statistic) << ','
           << hh::format_double(threshold) << ',' << (pass ? "pass" : "fail") << '\n';
    std::cout << check << ": statistic = " << hh::format_double(statistic)
              << ", threshold = " << hh::format_double(threshold) << ", "
              << (pass ? "pass" : "fail") << "\n";
    return pass ? 0 : 2;
  };

  int rc = 0;
  if (check == "trace_decay") {
    const auto grid = ec.make_grid();
    const double deg = -grid->dimension() / ec.verify_d1;
    const auto u0 = hh::sample_field(grid, [&](std::span<const double> x) {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      return ec.amplitude * std::pow(std::sqrt(r2), deg);
    });
    const auto fit = hh::fit_trace_decay(u0, ec.verify_d1, ec.verify_d2,
                                         hh::LorentzIndex::infinity(), verify_times(ec));
    rc = emit("d1=" + hh::format_double(ec.verify_d1) + ";d2=" + hh::format_double(ec.verify_d2) +
                  ";slope=" + hh::format_double(fit.slope) +
                  ";theory=" + hh::format_double(fit.theory),
              fit.deviation, 0.05, fit.deviation <= 0.05);
  } else if (check == "g1_decay") {
    const auto grid = ec.make_grid();
    const auto psi = hh::sample_boundary_field(grid, [&](std::span<const double> x) {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      return ec.amplitude / std::sqrt(r2);
    });
    const auto fb = hh::fit_g1_decay(psi, ec.verify_d1, ec.verify_d2, hh::G1Target::Boundary,
                                     verify_times(ec));
    const auto fi = hh::fit_g1_decay(psi, ec.verify_d1, ec.verify_d2, hh::G1Target::Interior,
                                     verify_times(ec));
    const double worst = std::max(fb.deviation, fi.deviation);
    rc = emit("boundary_slope=" + hh::format_double(fb.slope) +
                  ";interior_slope=" + hh::format_double(fi.slope),
              worst, 0.05, worst <= 0.05);
  } else if (check == "yamazaki") {
    const auto grid = ec.make_grid();
    const auto psi = ec.make_boundary_data(grid);
    const auto rep =
        hh::check_yamazaki_integral(psi, ec.verify_d1, ec.verify_d2, hh::YamazakiKind::G1Boundary);
    rc = emit("empirical_C=" + hh::format_double(rep.empirical_C), rep.integrals.back(),
              0.01, rep.converged);
  } else if (check == "self_similarity") {
    const auto grid = ec.make_grid();
    const auto sol = solve_experiment(ec, grid);
    const auto rep = hh::check_self_similarity(sol, ec.nonlinearity.rho, ec.verify_lambdas);
    rc = emit("compared=" + std::to_string(rep.compared), rep.max_defect, 0.05,
              rep.max_defect <= 0.05);
  } else if (check == "positivity") {
    const auto grid = ec.make_grid();
    const auto sol = solve_experiment(ec, grid);
    const auto rep = hh::check_positivity(sol);
    rc = emit("max=" + hh::format_double(rep.max_value), rep.min_value, 0.0,
              rep.pass);
  } else if (check == "symmetry") {
    const auto grid = ec.make_grid();
    const auto sol = solve_experiment(ec, grid);
    const double rot =
        hh::check_symmetry(sol, hh::GridIsometry::RotateQuarter, hh::Parity::Symmetric);
    rc = emit("isometry=rotate_quarter", rot, 1e-10, rot <= 1e-10);
  } else {
    throw std::runtime_error(
        "unknown check '" + check +
        "' (expected trace_decay, g1_decay, yamazaki, self_similarity, positivity, symmetry)");
  }
  hh::write_manifest(dir + "/manifest.txt", cfg.text(), "verify " + check, timer.seconds());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-space heat equation with singular boundary potentials"};
  app.require_subcommand(1);
  std::string config_path, check_name;

  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("config", config_path, "experiment config file")->required();
    return sub;
  };
  CLI::App* cmd_norm = add("norm", "Lorentz quasi-norm and norm of a configured field");
  CLI::App* cmd_evolve = add("evolve", "free heat evolution of the initial data");
  CLI::App* cmd_solve = add("solve", "Picard iteration for the boundary-coupled problem");
  CLI::App* cmd_verify = add("verify", "run a named verification check");
  cmd_verify->add_option("check", check_name, "check name")->required();
  CLI::App* cmd_calibrate = add("calibrate", "empirical operator-norm constants");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = hh::ConfigFile::parse_file(config_path);
    auto ec = hh::ExperimentConfig::from_config(cfg);
    if (const char* env = std::getenv("HALFHEAT_THREADS")) ec.threads = std::atoi(env);
    if (cmd_norm->parsed()) return run_norm(cfg, ec);
    if (cmd_evolve->parsed()) return run_evolve(cfg, ec);
    if (cmd_solve->parsed()) return run_solve(cfg, ec);
    if (cmd_verify->parsed()) return run_verify(cfg, ec, check_name);
    if (cmd_calibrate->parsed()) return run_calibrate(cfg, ec);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
