#include <array>
#include <cstring>
#include <fstream>

#include "fjmgt/spectral.hpp"

namespace fjmgt::spectral {

namespace {

constexpr std::array<char, 8> kMagic{'F', 'J', 'M', 'G', 'T', 'T', 'N', 'S'};

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

void save_tensor_cache(const std::string& path, const SpectralBasis& basis, const TripleTensor& tensor) {
  if (tensor.size() != basis.size()) throw std::invalid_argument("tensor does not match the basis");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open tensor cache for writing: " + path);
  out.write(kMagic.data(), kMagic.size());
  put(out, kTensorCacheVersion);
  put(out, static_cast<std::uint32_t>(basis.dim()));
  for (double L : basis.domain().lengths()) put(out, L);
  put(out, static_cast<std::uint64_t>(basis.size()));
  const auto data = tensor.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing tensor cache: " + path);
}

std::optional<TripleTensor> load_tensor_cache(const std::string& path, const SpectralBasis& basis) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) return std::nullopt;
  std::uint32_t version = 0;
  std::uint32_t dim = 0;
  if (!get(in, version) || version != kTensorCacheVersion) return std::nullopt;
  if (!get(in, dim) || dim != static_cast<std::uint32_t>(basis.dim())) return std::nullopt;
  for (double L : basis.domain().lengths()) {
    double stored = 0.0;
    if (!get(in, stored) || std::memcmp(&stored, &L, sizeof(double)) != 0) return std::nullopt;
  }
  std::uint64_t n = 0;
  if (!get(in, n) || n != basis.size()) return std::nullopt;
  std::vector<double> data(n * n * n);
  if (!in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double))))
    return std::nullopt;
  return TripleTensor(static_cast<std::size_t>(n), std::move(data));
}

}  // namespace fjmgt::spectral
