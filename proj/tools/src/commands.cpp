#include "fjmgt/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace fjmgt::cli {

using json = nlohmann::ordered_json;

namespace {

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json record_json(const diagnostics::DiagnosticsRecord& r) {
  json j;
  j["step"] = r.step;
  j["t"] = r.t;
  j["E"] = r.energy;
  j["E_full"] = r.full_energy;
  j["D_cum"] = r.dissipation;
  j["Q"] = r.indicator;
  j["grad_psi_tt"] = r.norms.grad_psi_tt;
  j["lap_psi"] = r.norms.lap_psi;
  j["lap_psi_t"] = r.norms.lap_psi_t;
  j["psi_ttt"] = r.norms.psi_ttt;
  j["memory_lap_psi_tt"] = r.norms.memory_lap_psi_tt;
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

}  // namespace

std::string resolve_output_directory(const RunConfig& config, const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (auto e = env("FJMGT_OUTPUT_DIR")) return *e;
  return config.output.directory;
}

std::size_t resolve_workers(const std::optional<std::size_t>& flag) {
  if (flag) {
    if (*flag == 0) throw std::invalid_argument("workers must be >= 1");
    return *flag;
  }
  if (auto e = env("FJMGT_WORKERS")) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(*e, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != e->size() || v == 0) throw std::invalid_argument("FJMGT_WORKERS must be a positive integer");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int exit_code(dynamics::Status status) {
  return status == dynamics::Status::BlowupSuspected ? kExitBlowup : kExitOk;
}

void write_records(std::ostream& out, const std::vector<diagnostics::DiagnosticsRecord>& records,
                   OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << diagnostics::csv_header() << '\n';
    for (const auto& r : records) out << diagnostics::csv_row(r) << '\n';
  } else {
    for (const auto& r : records) out << record_json(r).dump() << '\n';
  }
}

SimulateOutcome simulate(const RunConfig& config, const SimulateOptions& options) {
  const auto dir = resolve_output_directory(config, options.output_directory);
  std::filesystem::create_directories(dir);
  auto prepared = prepare(config, dir);

  SimulateOutcome outcome;
  outcome.config_hash = simulation::config_hash(prepared.setup);
  {
    dynamics::ModalState s0;
    s0.xi = prepared.setup.initial.xi;
    s0.xi_t = prepared.setup.initial.xi_t;
    s0.xi_tt = prepared.setup.initial.xi_tt;
    outcome.n0 = diagnostics::initial_data_size(s0, *prepared.basis);
  }

  simulation::Simulation sim(prepared.setup, prepared.basis, prepared.operators);
  if (options.resume_from)
    outcome.result = sim.resume(simulation::load_checkpoint(*options.resume_from));
  else
    outcome.result = sim.run();
  outcome.exit_code = exit_code(outcome.result.status);

  const auto stem = dir + "/" + config.output.name;
  outcome.data_path = stem + (config.output.format == OutputFormat::Csv ? ".csv" : ".ndjson");
  outcome.status_path = stem + ".status.json";
  std::ostringstream data;
  write_records(data, outcome.result.records, config.output.format);
  write_file(outcome.data_path, data.str());
  write_file(outcome.status_path, status_json(outcome) + "\n");
  return outcome;
}

std::string status_json(const SimulateOutcome& o) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "simulate";
  j["status"] = dynamics::to_string(o.result.status);
  j["exit_code"] = o.exit_code;
  j["termination_time"] = o.result.termination_time ? json(*o.result.termination_time) : json(nullptr);
  j["steps"] = o.result.steps;
  j["max_Q"] = o.result.max_indicator;
  j["N0"] = o.n0;
  j["config_hash"] = hex(o.config_hash);
  j["data"] = o.data_path;
  return j.dump();
}

std::vector<SweepRow> sweep(const std::string& config_text, const std::string& axis, const std::vector<double>& values,
                            std::size_t workers) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (workers == 0) throw std::invalid_argument("workers must be >= 1");

  const auto base = parse_config(config_text);
  double base_n0 = 0.0;
  if (axis == "N0") {
    const auto basis = spectral::eigenpairs(spectral::DomainSpec(base.domain_lengths()), base.n_modes);
    const auto init = initial_coefficients(base, basis);
    dynamics::ModalState s0;
    s0.xi = init.xi;
    s0.xi_t = init.xi_t;
    s0.xi_tt = init.xi_tt;
    base_n0 = diagnostics::initial_data_size(s0, basis);
    if (!(base_n0 > 0.0)) throw std::invalid_argument("an N0 sweep needs nonzero initial data");
  }

  std::vector<RunConfig> configs;
  std::vector<std::string> errors;
  for (double v : values) {
    Overrides o;
    if (axis == "N0") {
      if (!(v > 0.0)) {
        errors.push_back("N0 sweep values must be > 0");
        continue;
      }
      o.emplace_back("init.scale", number(base.init.scale * std::sqrt(v / base_n0)));
    } else {
      o.emplace_back(axis, number(v));
    }
    try {
      configs.push_back(parse_config(config_text, o));
    } catch (const ConfigError& e) {
      for (const auto& msg : e.errors()) errors.push_back(axis + " = " + number(v) + ": " + msg);
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));

  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        const auto prepared = prepare(configs[i], configs[i].output.directory);
        auto setup = prepared.setup;
        setup.checkpoint_interval = 0;
        setup.checkpoint_path.clear();
        simulation::Simulation sim(setup, prepared.basis, prepared.operators);
        const auto r = sim.run();
        dynamics::ModalState s0;
        s0.xi = setup.initial.xi;
        s0.xi_t = setup.initial.xi_t;
        s0.xi_tt = setup.initial.xi_tt;
        auto& row = rows[i];
        row.value = values[i];
        row.n0 = diagnostics::initial_data_size(s0, *prepared.basis);
        row.status = r.status;
        row.termination_time = r.termination_time.value_or(r.final_state.t);
        row.max_indicator = r.max_indicator;
        row.final_energy = r.records.back().energy;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(workers, configs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_sweep(std::ostream& out, const std::string& axis, const std::vector<SweepRow>& rows) {
  out << "# fjmgt sweep schema_version=" << kSchemaVersion << " axis=" << axis << '\n';
  out << "value,N0,status,termination_time,max_Q,final_E\n";
  for (const auto& r : rows)
    out << number(r.value) << ',' << number(r.n0) << ',' << dynamics::to_string(r.status) << ','
        << number(r.termination_time) << ',' << number(r.max_indicator) << ',' << number(r.final_energy) << '\n';
}

BoundsOutcome compute_bounds(const bounds::BoundsQuery& query, double t_max, std::size_t points) {
  BoundsOutcome o;
  o.query = query;
  o.t_star = bounds::t_star(query);
  o.t0_at_t_star = bounds::t0(query.n0, query.c_of_t(o.t_star), query.z0_scale);
  if (t_max == 0.0) t_max = 3.0 * o.t_star;
  o.curve = bounds::t0_curve(query, t_max, points);
  return o;
}

void write_bounds_curve(std::ostream& out, const BoundsOutcome& o) {
  out << "# fjmgt bounds schema_version=" << kSchemaVersion << " N0=" << number(o.query.n0)
      << " C=" << o.query.c_of_t.describe() << " z0_scale=" << number(o.query.z0_scale) << '\n';
  out << "T,T0,min_T_T0\n";
  for (const auto& p : o.curve)
    out << number(p.T) << ',' << number(p.T0) << ',' << number(std::min(p.T, p.T0)) << '\n';
}

std::string bounds_summary(const BoundsOutcome& o) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "N0 = %.17g, C = %s, z0 = %.17g, T* = %.6f, T0 at T* = %.6f", o.query.n0,
                o.query.c_of_t.describe().c_str(), o.query.z0(), o.t_star, o.t0_at_t_star);
  return buf;
}

std::string kernel_report_json(const kernel::KernelSpec& spec, const kernel::CoercivitySummary& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "verify-kernel";
  j["kernel"] = {{"kind", kernel::to_string(spec.kind())},
                 {"alpha", spec.alpha()},
                 {"rate", spec.rate()},
                 {"scale", spec.scale()},
                 {"delta", spec.delta()}};
  j["samples"] = s.samples;
  j["seed"] = s.seed;
  j["length"] = s.length;
  j["dt"] = s.dt;
  j["violations"] = s.violations;
  j["vacuous"] = s.vacuous;
  j["min_margin"] = s.min_margin;
  j["min_c_estimate"] = s.min_c_estimate ? json(*s.min_c_estimate) : json(nullptr);
  j["passed"] = s.violations == 0;
  return j.dump();
}

std::string inequality_report_json(const diagnostics::InequalityReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "verify-inequalities";
  j["dim"] = r.dim;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["n_modes"] = r.n_modes;
  json results = json::array();
  for (const auto& res : r.results)
    results.push_back({{"name", res.name},
                       {"max_ratio", res.max_ratio},
                       {"argmax", res.argmax},
                       {"finite", std::isfinite(res.max_ratio)},
                       {"ratios", res.ratios}});
  j["results"] = results;
  return j.dump();
}

}  // namespace fjmgt::cli
