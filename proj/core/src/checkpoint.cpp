#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "fjmgt/simulation.hpp"

namespace fjmgt::simulation {

namespace {

constexpr char kMagic[8] = {'F', 'J', 'M', 'G', 'T', 'C', 'K', 'P'};

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void vec(const std::vector<double>& v) {
    u64(v.size());
    if (!v.empty()) raw(v.data(), v.size() * sizeof(double));
  }

 private:
  std::ofstream& out_;
};

class Reader {
 public:
  explicit Reader(std::ifstream& in) : in_(in) {}
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw CheckpointError("checkpoint file is truncated");
  }
  std::uint32_t u32() { std::uint32_t v; raw(&v, sizeof v); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, sizeof v); return v; }
  double f64() { double v; raw(&v, sizeof v); return v; }
  std::vector<double> vec(std::size_t limit) {
    const auto n = u64();
    if (n > limit) throw CheckpointError("checkpoint vector length is implausible");
    std::vector<double> v(n);
    if (n) raw(v.data(), n * sizeof(double));
    return v;
  }

 private:
  std::ifstream& in_;
};

constexpr std::size_t kMaxLength = std::size_t{1} << 32;

void write_state(Writer& w, const dynamics::ModalState& s) {
  w.f64(s.t);
  w.vec(s.xi);
  w.vec(s.xi_t);
  w.vec(s.xi_tt);
}

dynamics::ModalState read_state(Reader& r) {
  dynamics::ModalState s;
  s.t = r.f64();
  s.xi = r.vec(kMaxLength);
  s.xi_t = r.vec(kMaxLength);
  s.xi_tt = r.vec(kMaxLength);
  return s;
}

void write_record(Writer& w, const diagnostics::DiagnosticsRecord& rec) {
  w.u64(rec.step);
  for (double v : {rec.t, rec.energy, rec.full_energy, rec.dissipation, rec.indicator, rec.norms.grad_psi_tt,
                   rec.norms.lap_psi, rec.norms.lap_psi_t, rec.norms.psi_ttt, rec.norms.memory_lap_psi_tt})
    w.f64(v);
}

diagnostics::DiagnosticsRecord read_record(Reader& r) {
  diagnostics::DiagnosticsRecord rec;
  rec.step = r.u64();
  rec.t = r.f64();
  rec.energy = r.f64();
  rec.full_energy = r.f64();
  rec.dissipation = r.f64();
  rec.indicator = r.f64();
  rec.norms.grad_psi_tt = r.f64();
  rec.norms.lap_psi = r.f64();
  rec.norms.lap_psi_t = r.f64();
  rec.norms.psi_ttt = r.f64();
  rec.norms.memory_lap_psi_tt = r.f64();
  return rec;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint file for writing: " + tmp);
    Writer w(out);
    w.raw(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.u64(cp.config_hash);
    w.u64(cp.snapshot.steps);
    write_state(w, cp.snapshot.state);
    w.vec(cp.snapshot.nonlinear_prev);
    w.vec(cp.snapshot.memory);
    w.u64(cp.snapshot.history.size());
    for (const auto& h : cp.snapshot.history) w.vec(h);
    w.f64(cp.dissipation);
    w.f64(cp.dissipation_last_t);
    w.f64(cp.dissipation_last_rate);
    w.f64(cp.max_indicator);
    w.u64(cp.records.size());
    for (const auto& rec : cp.records) write_record(w, rec);
    if (!out) throw CheckpointError("failed writing checkpoint file: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint file: " + path);
  Reader r(in);
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw CheckpointError("not a checkpoint file: " + path);
  const auto version = r.u32();
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint cp;
  cp.config_hash = r.u64();
  cp.snapshot.steps = r.u64();
  cp.snapshot.state = read_state(r);
  cp.snapshot.nonlinear_prev = r.vec(kMaxLength);
  cp.snapshot.memory = r.vec(kMaxLength);
  const auto levels = r.u64();
  if (levels != cp.snapshot.steps + 1) throw CheckpointError("checkpoint history length is inconsistent");
  cp.snapshot.history.reserve(levels);
  for (std::uint64_t j = 0; j < levels; ++j) cp.snapshot.history.push_back(r.vec(kMaxLength));
  cp.dissipation = r.f64();
  cp.dissipation_last_t = r.f64();
  cp.dissipation_last_rate = r.f64();
  cp.max_indicator = r.f64();
  const auto count = r.u64();
  if (count > levels) throw CheckpointError("checkpoint record count is inconsistent");
  cp.records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) cp.records.push_back(read_record(r));
  return cp;
}

}  // namespace fjmgt::simulation
