#include "fjmgt/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fjmgt::cli {

namespace pt = boost::property_tree;

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += "; ";
    out += e;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> to_integer(const std::string& s) {
  Int v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  return std::nullopt;
}

const std::set<std::string> kProfiles = {"zero", "sine", "bump", "gaussian", "random"};

// Reads one section, recording malformed values and unknown keys.
class SectionReader {
 public:
  SectionReader(std::string section, std::vector<std::string>& errors) : section_(std::move(section)), errors_(errors) {}

  using Handler = std::function<void(const std::string& value)>;

  void on(const std::string& key, Handler h) { handlers_[key] = std::move(h); }

  void real(const std::string& key, double& target) {
    on(key, [this, key, &target](const std::string& v) {
      if (auto d = to_double(v))
        target = *d;
      else
        bad(key, v, "a number");
    });
  }
  void real(const std::string& key, std::optional<double>& target) {
    on(key, [this, key, &target](const std::string& v) {
      if (auto d = to_double(v))
        target = *d;
      else
        bad(key, v, "a number");
    });
  }
  template <typename Int>
  void integer(const std::string& key, Int& target) {
    on(key, [this, key, &target](const std::string& v) {
      if (auto d = to_integer<Int>(v))
        target = *d;
      else
        bad(key, v, "a nonnegative integer");
    });
  }
  void flag(const std::string& key, bool& target) {
    on(key, [this, key, &target](const std::string& v) {
      if (auto d = to_bool(v))
        target = *d;
      else
        bad(key, v, "true or false");
    });
  }
  void text(const std::string& key, std::string& target) {
    on(key, [&target](const std::string& v) { target = v; });
  }

  // `prefix_handler` receives keys not registered explicitly; returns false when unknown.
  void read(const pt::ptree& tree, const std::function<bool(const std::string&, const std::string&)>& prefix_handler = {}) {
    for (const auto& [key, node] : tree) {
      if (!node.empty()) {
        errors_.push_back("nested key '" + name(key) + "' is not allowed");
        continue;
      }
      const auto value = node.data();
      if (auto it = handlers_.find(key); it != handlers_.end())
        it->second(value);
      else if (!prefix_handler || !prefix_handler(key, value))
        errors_.push_back("unknown key '" + name(key) + "'");
    }
  }

  void bad(const std::string& key, const std::string& value, const std::string& expected) {
    errors_.push_back("key '" + name(key) + "': '" + value + "' is not " + expected);
  }

  std::string name(const std::string& key) const { return section_.empty() ? key : section_ + "." + key; }

 private:
  std::string section_;
  std::vector<std::string>& errors_;
  std::map<std::string, Handler> handlers_;
};

void check(bool ok, std::vector<std::string>& errors, const std::string& message) {
  if (!ok) errors.push_back(message);
}

void validate(const RunConfig& c, std::vector<std::string>& errors) {
  const bool dim_ok = c.dim >= 1 && c.dim <= 3;
  check(dim_ok, errors, "domain dim must be 1, 2 or 3");
  if (!c.lengths.empty()) {
    check(static_cast<int>(c.lengths.size()) == c.dim, errors, "domain lengths must list one length per axis");
    for (double L : c.lengths)
      if (!(L > 0.0) || !std::isfinite(L)) {
        errors.push_back("domain lengths must be > 0");
        break;
      }
  }
  check(c.n_modes >= 1, errors, "n_modes must be >= 1");

  check(c.tau > 0.0 && std::isfinite(c.tau), errors, "tau must be > 0");
  check(c.c > 0.0 && std::isfinite(c.c), errors, "sound speed c must be > 0");
  check(std::isfinite(c.k), errors, "k must be finite");

  try {
    (void)c.kernel();
  } catch (const std::invalid_argument& e) {
    errors.push_back(e.what());
  }

  for (const auto& [index, triple] : c.init.modes) {
    if (index < 1 || index > c.n_modes)
      errors.push_back("init mode_" + std::to_string(index) + " is outside 1.." + std::to_string(c.n_modes));
    for (double v : triple)
      if (!std::isfinite(v)) {
        errors.push_back("init mode_" + std::to_string(index) + " values must be finite");
        break;
      }
  }
  for (std::size_t slot = 0; slot < 3; ++slot) {
    const auto& p = c.init.profiles[slot];
    const std::string key = "init.psi" + std::to_string(slot);
    check(kProfiles.count(p.name) > 0, errors,
          key + ": unknown profile '" + p.name + "' (expected zero|sine|bump|gaussian|random)");
    check(std::isfinite(p.amplitude), errors, key + "_amplitude must be finite");
  }
  check(std::isfinite(c.init.scale), errors, "init scale must be finite");

  const bool dt_ok = c.dt > 0.0 && std::isfinite(c.dt);
  const bool t_end_ok = c.t_end > 0.0 && std::isfinite(c.t_end);
  check(dt_ok, errors, "dt must be > 0");
  check(t_end_ok, errors, "t_end must be > 0");
  check(c.output_stride >= 1, errors, "output_stride must be >= 1");
  if (dt_ok && t_end_ok && c.output_stride >= 1) {
    const double block = c.dt * static_cast<double>(c.output_stride);
    const double q = std::round(c.t_end / block);
    check(q >= 1.0 && std::abs(q * block - c.t_end) <= 1e-12 * std::max(1.0, c.t_end), errors,
          "dt * output_stride must divide t_end");
  }

  if (c.monitor_dimension)
    check(*c.monitor_dimension >= 1 && *c.monitor_dimension <= 3, errors, "monitor dimension must be 1, 2 or 3");
  if (c.cap) check(*c.cap > 0.0, errors, "monitor cap must be > 0");

  check(!c.output.name.empty() && c.output.name.find('/') == std::string::npos, errors,
        "output name must be a nonempty file stem without '/'");
  check(!c.output.directory.empty(), errors, "output directory must be nonempty");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::invalid_argument(join(errors)), errors_(std::move(errors)) {}

std::string to_string(OutputFormat format) { return format == OutputFormat::Csv ? "csv" : "ndjson"; }

std::vector<double> RunConfig::domain_lengths() const {
  if (!lengths.empty()) return lengths;
  return std::vector<double>(static_cast<std::size_t>(std::max(dim, 1)), std::numbers::pi);
}

kernel::KernelSpec RunConfig::kernel() const {
  switch (kernel::kernel_kind_from_string(kernel_kind)) {
    case kernel::KernelKind::Abel: return kernel::KernelSpec::abel(alpha, delta);
    case kernel::KernelKind::Exponential: return kernel::KernelSpec::exponential(rate, kernel_scale, delta);
    case kernel::KernelKind::Zero:
      if (delta != 0.0) throw std::invalid_argument("zero kernel requires delta = 0");
      return kernel::KernelSpec::zero();
  }
  throw std::invalid_argument("unknown kernel kind");
}

dynamics::PhysicalParams RunConfig::params() const {
  dynamics::PhysicalParams p;
  p.tau = tau;
  p.c = c;
  p.k = k;
  p.kernel = kernel();
  return p;
}

RunConfig parse_config(const std::string& text, const Overrides& overrides) {
  pt::ptree tree;
  std::vector<std::string> errors;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }
  for (const auto& [key, value] : overrides) tree.put(key, value);

  RunConfig c;
  bool has_profiles = false;
  std::string format = to_string(c.output.format);
  int monitor_dim = 0;
  bool monitor_dim_set = false;
  std::string lengths_text;
  bool lengths_set = false;

  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      if (section != "seed") {
        errors.push_back("unknown key '" + section + "'");
      } else if (auto v = to_integer<std::uint64_t>(node.data())) {
        c.seed = *v;
      } else {
        errors.push_back("key 'seed': '" + node.data() + "' is not a nonnegative integer");
      }
      continue;
    }
    SectionReader r(section, errors);
    if (section == "domain") {
      r.integer("dim", c.dim);
      r.on("lengths", [&](const std::string& v) {
        lengths_text = v;
        lengths_set = true;
      });
      r.integer("n_modes", c.n_modes);
      r.read(node);
    } else if (section == "physics") {
      r.real("tau", c.tau);
      r.real("c", c.c);
      r.real("k", c.k);
      r.read(node);
    } else if (section == "kernel") {
      r.text("kind", c.kernel_kind);
      r.real("alpha", c.alpha);
      r.real("rate", c.rate);
      r.real("scale", c.kernel_scale);
      r.real("delta", c.delta);
      r.read(node);
    } else if (section == "init") {
      for (std::size_t slot = 0; slot < 3; ++slot) {
        const std::string key = "psi" + std::to_string(slot);
        r.on(key, [&, slot](const std::string& v) {
          c.init.profiles[slot].name = v;
          has_profiles = true;
        });
        r.on(key + "_amplitude", [&, slot, key](const std::string& v) {
          has_profiles = true;
          if (auto d = to_double(v))
            c.init.profiles[slot].amplitude = *d;
          else
            r.bad(key + "_amplitude", v, "a number");
        });
      }
      r.real("scale", c.init.scale);
      r.read(node, [&](const std::string& key, const std::string& value) {
        if (key.rfind("mode_", 0) != 0) return false;
        const auto index = to_integer<std::size_t>(key.substr(5));
        if (!index) return false;
        std::istringstream in(value);
        std::array<double, 3> triple{};
        std::string token;
        std::size_t count = 0;
        bool ok = true;
        while (in >> token) {
          const auto d = to_double(token);
          if (!d || count == 3) {
            ok = false;
            break;
          }
          triple[count++] = *d;
        }
        if (!ok || count != 3)
          r.bad(key, value, "three numbers 'xi xi_t xi_tt'");
        else
          c.init.modes[*index] = triple;
        return true;
      });
    } else if (section == "time") {
      r.real("dt", c.dt);
      r.real("t_end", c.t_end);
      r.integer("output_stride", c.output_stride);
      r.integer("max_steps", c.max_steps);
      r.read(node);
    } else if (section == "monitor") {
      r.on("dimension", [&](const std::string& v) {
        if (auto d = to_integer<int>(v)) {
          monitor_dim = *d;
          monitor_dim_set = true;
        } else {
          r.bad("dimension", v, "an integer");
        }
      });
      r.real("cap", c.cap);
      r.flag("scaled", c.scaled);
      r.read(node);
    } else if (section == "output") {
      r.text("directory", c.output.directory);
      r.text("name", c.output.name);
      r.text("format", format);
      r.integer("checkpoint_interval", c.output.checkpoint_interval);
      r.read(node);
    } else {
      errors.push_back("unknown section '" + section + "'");
    }
  }

  if (lengths_set) {
    std::istringstream in(lengths_text);
    std::string token;
    while (in >> token) {
      if (auto d = to_double(token)) {
        c.lengths.push_back(*d);
      } else {
        errors.push_back("key 'domain.lengths': '" + token + "' is not a number");
        break;
      }
    }
    if (c.lengths.empty()) errors.push_back("domain lengths must list one length per axis");
  }
  if (monitor_dim_set) c.monitor_dimension = monitor_dim;
  if (format == "csv")
    c.output.format = OutputFormat::Csv;
  else if (format == "ndjson")
    c.output.format = OutputFormat::Ndjson;
  else
    errors.push_back("output format must be csv or ndjson");
  if (has_profiles && !c.init.modes.empty())
    errors.push_back("init: give either profiles (psi0, psi1, psi2 and amplitudes) or mode_<i> coefficients, not both");

  validate(c, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

std::string save_config(const RunConfig& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << "\n\n";
  out << "[domain]\n";
  out << "dim = " << c.dim << "\n";
  if (!c.lengths.empty()) {
    out << "lengths =";
    for (double L : c.lengths) out << ' ' << format_double(L);
    out << "\n";
  }
  out << "n_modes = " << c.n_modes << "\n\n";
  out << "[physics]\n";
  out << "tau = " << format_double(c.tau) << "\n";
  out << "c = " << format_double(c.c) << "\n";
  out << "k = " << format_double(c.k) << "\n\n";
  out << "[kernel]\n";
  out << "kind = " << c.kernel_kind << "\n";
  out << "alpha = " << format_double(c.alpha) << "\n";
  out << "rate = " << format_double(c.rate) << "\n";
  out << "scale = " << format_double(c.kernel_scale) << "\n";
  out << "delta = " << format_double(c.delta) << "\n\n";
  out << "[init]\n";
  out << "scale = " << format_double(c.init.scale) << "\n";
  if (c.init.modes.empty()) {
    for (std::size_t slot = 0; slot < 3; ++slot) {
      out << "psi" << slot << " = " << c.init.profiles[slot].name << "\n";
      out << "psi" << slot << "_amplitude = " << format_double(c.init.profiles[slot].amplitude) << "\n";
    }
  } else {
    for (const auto& [index, t] : c.init.modes)
      out << "mode_" << index << " = " << format_double(t[0]) << ' ' << format_double(t[1]) << ' '
          << format_double(t[2]) << "\n";
  }
  out << "\n[time]\n";
  out << "dt = " << format_double(c.dt) << "\n";
  out << "t_end = " << format_double(c.t_end) << "\n";
  out << "output_stride = " << c.output_stride << "\n";
  out << "max_steps = " << c.max_steps << "\n\n";
  out << "[monitor]\n";
  if (c.monitor_dimension) out << "dimension = " << *c.monitor_dimension << "\n";
  if (c.cap) out << "cap = " << format_double(*c.cap) << "\n";
  out << "scaled = " << (c.scaled ? "true" : "false") << "\n\n";
  out << "[output]\n";
  out << "directory = " << c.output.directory << "\n";
  out << "name = " << c.output.name << "\n";
  out << "format = " << to_string(c.output.format) << "\n";
  out << "checkpoint_interval = " << c.output.checkpoint_interval << "\n";
  return out.str();
}

namespace {

spectral::Field profile_field(const std::string& name, const std::vector<double>& lengths) {
  if (name == "sine")
    return [lengths](std::span<const double> x) {
      double v = 1.0;
      for (std::size_t a = 0; a < lengths.size(); ++a) v *= std::sin(std::numbers::pi * x[a] / lengths[a]);
      return v;
    };
  if (name == "bump")
    return [lengths](std::span<const double> x) {
      double v = 1.0;
      for (std::size_t a = 0; a < lengths.size(); ++a) v *= 4.0 * x[a] * (lengths[a] - x[a]) / (lengths[a] * lengths[a]);
      return v;
    };
  if (name == "gaussian")
    return [lengths](std::span<const double> x) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < lengths.size(); ++a) {
        const double u = (x[a] - 0.5 * lengths[a]) / (0.1 * lengths[a]);
        r2 += u * u;
      }
      return std::exp(-r2);
    };
  return [](std::span<const double>) { return 0.0; };
}

std::vector<double> profile_coefficients(const Profile& p, std::size_t slot, const RunConfig& config,
                                         const spectral::SpectralBasis& basis) {
  std::vector<double> coeffs(basis.size(), 0.0);
  if (p.name == "zero") return coeffs;
  if (p.name == "random") {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(slot)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < basis.size(); ++j) coeffs[j] = normal(rng) / std::pow(1.0 + basis.eigenvalue(j), 2.0);
  } else {
    coeffs = spectral::project(profile_field(p.name, config.domain_lengths()), basis);
  }
  for (double& v : coeffs) v *= p.amplitude;
  return coeffs;
}

}  // namespace

spectral::InitialCoefficients initial_coefficients(const RunConfig& config, const spectral::SpectralBasis& basis) {
  spectral::InitialCoefficients init;
  const std::size_t n = basis.size();
  if (!config.init.modes.empty()) {
    init.xi.assign(n, 0.0);
    init.xi_t.assign(n, 0.0);
    init.xi_tt.assign(n, 0.0);
    for (const auto& [index, t] : config.init.modes) {
      if (index < 1 || index > n) throw std::invalid_argument("init mode index outside the basis");
      init.xi[index - 1] = t[0];
      init.xi_t[index - 1] = t[1];
      init.xi_tt[index - 1] = t[2];
    }
  } else {
    init.xi = profile_coefficients(config.init.profiles[0], 0, config, basis);
    init.xi_t = profile_coefficients(config.init.profiles[1], 1, config, basis);
    init.xi_tt = profile_coefficients(config.init.profiles[2], 2, config, basis);
  }
  for (auto* v : {&init.xi, &init.xi_t, &init.xi_tt})
    for (double& x : *v) x *= config.init.scale;
  return init;
}

PreparedRun prepare(const RunConfig& config, const std::string& output_directory) {
  PreparedRun run;
  const spectral::DomainSpec domain(config.domain_lengths());
  run.basis = std::make_shared<const spectral::SpectralBasis>(spectral::eigenpairs(domain, config.n_modes));
  run.operators = std::make_shared<const spectral::AssembledOperators>(spectral::assemble(*run.basis));

  auto& s = run.setup;
  s.domain = domain;
  s.n_modes = config.n_modes;
  s.params = config.params();
  s.initial = initial_coefficients(config, *run.basis);
  s.time.dt = config.dt;
  s.time.t_end = config.t_end;
  s.time.output_stride = config.output_stride;
  s.time.max_steps = config.max_steps;
  s.monitor.dimension = config.monitor_dimension.value_or(config.dim);
  s.monitor.cap = config.cap;
  s.monitor.scaled = config.scaled;
  s.checkpoint_interval = config.output.checkpoint_interval;
  if (s.checkpoint_interval > 0) s.checkpoint_path = output_directory + "/" + config.output.name + ".ckp";
  s.validate();
  return run;
}

}  // namespace fjmgt::cli
