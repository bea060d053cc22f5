#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fjmgt/cli/commands.hpp"

namespace {

using namespace fjmgt;
using namespace fjmgt::cli;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin simulator and analytic bounds for the fractionally damped JMGT equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::string> resume;
  auto* simulate_cmd = app.add_subcommand("simulate", "Integrate one configuration and write diagnostics");
  simulate_cmd->add_option("config", config_path, "INI configuration file")->required();
  simulate_cmd->add_option("--output-dir", output_dir, "Output directory (overrides FJMGT_OUTPUT_DIR and the config)");
  simulate_cmd->add_option("--resume", resume, "Continue from a checkpoint file");

  std::string axis = "N0";
  std::vector<double> values;
  std::optional<std::size_t> workers;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one simulation per axis value and write a summary table");
  sweep_cmd->add_option("config", config_path, "INI configuration file")->required();
  sweep_cmd->add_option("--axis", axis, "N0 or a section.key of the config")->capture_default_str();
  sweep_cmd->add_option("--values", values, "Axis values")->required()->delimiter(',');
  sweep_cmd->add_option("--workers", workers, "Parallel runs (overrides FJMGT_WORKERS)");
  sweep_cmd->add_option("--output-dir", output_dir, "Output directory (overrides FJMGT_OUTPUT_DIR and the config)");

  double n0 = 1.0, c0 = 1.0, z0_scale = 1.0, t_max = 0.0;
  std::string profile = "constant";
  std::size_t points = 201;
  std::optional<std::string> curve_path;
  auto* bounds_cmd = app.add_subcommand("bounds", "Existence-time bound T* and the (T, T0) curve");
  bounds_cmd->add_option("--n0", n0, "Initial-data size N0")->capture_default_str();
  bounds_cmd->add_option("--c0", c0, "Constant C0 of the C(T) profile")->capture_default_str();
  bounds_cmd->add_option("--profile", profile, "C(T) profile")
      ->check(CLI::IsMember({"constant", "affine"}))
      ->capture_default_str();
  bounds_cmd->add_option("--z0-scale", z0_scale, "z0 = scale * N0")->capture_default_str();
  bounds_cmd->add_option("--t-max", t_max, "Curve range [0, t_max]; 0 picks 3 T*")->capture_default_str();
  bounds_cmd->add_option("--points", points, "Curve samples")->capture_default_str();
  bounds_cmd->add_option("--curve", curve_path, "Write the curve CSV here (default: stdout)");

  std::string kind = "abel";
  double alpha = 0.5, rate = 1.0, scale = 1.0, delta = 1.0, dt = 0.01;
  std::size_t samples = 100, length = 100;
  std::uint64_t seed = 0;
  std::optional<std::string> report_path;
  auto* kernel_cmd = app.add_subcommand("verify-kernel", "Coercivity of the memory kernel over a seeded corpus");
  kernel_cmd->add_option("--kind", kind, "Kernel kind")
      ->check(CLI::IsMember({"abel", "exponential", "zero"}))
      ->capture_default_str();
  kernel_cmd->add_option("--alpha", alpha, "Abel order in (0, 1)")->capture_default_str();
  kernel_cmd->add_option("--rate", rate, "Exponential rate")->capture_default_str();
  kernel_cmd->add_option("--scale", scale, "Exponential scale")->capture_default_str();
  kernel_cmd->add_option("--delta", delta, "Damping weight")->capture_default_str();
  kernel_cmd->add_option("--samples", samples, "Corpus size")->capture_default_str();
  kernel_cmd->add_option("--length", length, "Signal length in steps")->capture_default_str();
  kernel_cmd->add_option("--dt", dt, "Signal time step")->capture_default_str();
  kernel_cmd->add_option("--seed", seed, "Corpus seed")->capture_default_str();
  kernel_cmd->add_option("--output", report_path, "Write the JSON report here (default: stdout)");

  int dim = 2;
  std::size_t ineq_samples = 200;
  auto* ineq_cmd = app.add_subcommand("verify-inequalities", "Embedding-inequality ratios over a seeded corpus");
  ineq_cmd->add_option("--dim", dim, "Dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  ineq_cmd->add_option("--samples", ineq_samples, "Corpus size")->capture_default_str();
  ineq_cmd->add_option("--seed", seed, "Corpus seed")->capture_default_str();
  ineq_cmd->add_option("--output", report_path, "Write the JSON report here (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*simulate_cmd) {
      const auto config = load_config(config_path);
      const auto outcome = simulate(config, {output_dir, resume});
      std::cout << status_json(outcome) << std::endl;
      return outcome.exit_code;
    }
    if (*sweep_cmd) {
      const auto text = read_text(config_path);
      const auto base = parse_config(text);
      const auto rows = sweep(text, axis, values, resolve_workers(workers));
      const auto dir = resolve_output_directory(base, output_dir);
      std::filesystem::create_directories(dir);
      std::ostringstream table;
      write_sweep(table, axis, rows);
      const auto path = dir + "/" + base.output.name + ".sweep.csv";
      write_text(path, table.str());
      std::cout << table.str();
      return kExitOk;
    }
    if (*bounds_cmd) {
      bounds::BoundsQuery q;
      q.n0 = n0;
      q.c_of_t = profile == "affine" ? bounds::CProfile::affine(c0) : bounds::CProfile::constant(c0);
      q.z0_scale = z0_scale;
      const auto outcome = compute_bounds(q, t_max, points);
      std::ostringstream curve;
      write_bounds_curve(curve, outcome);
      if (curve_path) {
        write_text(*curve_path, curve.str());
        std::cout << bounds_summary(outcome) << std::endl;
      } else {
        std::cout << curve.str();
        std::cerr << bounds_summary(outcome) << std::endl;
      }
      return kExitOk;
    }
    if (*kernel_cmd) {
      kernel::KernelSpec spec = kernel::KernelSpec::zero();
      if (kind == "abel")
        spec = kernel::KernelSpec::abel(alpha, delta);
      else if (kind == "exponential")
        spec = kernel::KernelSpec::exponential(rate, scale, delta);
      const auto summary = kernel::verify_coercivity(spec, samples, seed, length, dt);
      const auto report = kernel_report_json(spec, summary) + "\n";
      if (report_path)
        write_text(*report_path, report);
      else
        std::cout << report;
      return summary.violations == 0 ? kExitOk : kExitValidation;
    }
    if (*ineq_cmd) {
      const auto r = diagnostics::verify_inequalities(ineq_samples, dim, seed);
      const auto report = inequality_report_json(r) + "\n";
      if (report_path)
        write_text(*report_path, report);
      else
        std::cout << report;
      bool finite = true;
      for (const auto& res : r.results) finite = finite && std::isfinite(res.max_ratio);
      return finite ? kExitOk : kExitValidation;
    }
  } catch (const ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "error: " << msg << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
