#include "mhdp/basis_cache.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "mhdp/errors.hpp"

namespace mhdp {

namespace {

constexpr char kMagic[8] = {'M', 'H', 'D', 'P', 'B', 'A', 'S', '1'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error(ErrorKind::Parse, "truncated basis cache");
  return v;
}

}  // namespace

void save_basis(const StokesBasis& basis, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  const DomainSpec& d = basis.domain();
  out.write(kMagic, sizeof kMagic);
  put(out, d.hash());
  put(out, basis.grid().id);
  put(out, d.length_x);
  put(out, d.wall_gap);
  put<std::int32_t>(out, d.n_x);
  put<std::int32_t>(out, d.n_y);
  put<std::uint64_t>(out, basis.grid().ny());
  put<std::int32_t>(out, static_cast<std::int32_t>(basis.k()));
  for (const StokesMode& m : basis.modes()) {
    put(out, m.lambda);
    put<std::int32_t>(out, m.m);
    put<std::int32_t>(out, m.parity);
    for (Eigen::Index i = 0; i < m.coef.size(); ++i) put(out, m.coef(i));
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path);
}

std::optional<StokesBasis> load_basis(const std::string& path, const DomainSpec& domain, int k) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw Error(ErrorKind::Parse, path + " is not a basis cache");
  const auto hash = get<std::uint64_t>(in);
  const auto grid_id = get<std::uint64_t>(in);
  if (hash != domain.hash()) throw Error(ErrorKind::ConfigMismatch, path + " was built for another domain");
  get<double>(in);
  get<double>(in);
  const int n_x = get<std::int32_t>(in);
  const int n_y = get<std::int32_t>(in);
  const auto ny_grid = get<std::uint64_t>(in);
  const int count = get<std::int32_t>(in);
  if (n_x != domain.n_x || n_y != domain.n_y)
    throw Error(ErrorKind::ConfigMismatch, path + " sizes differ from the domain");
  if (count < k) throw Error(ErrorKind::ConfigMismatch, path + " holds fewer modes than requested");
  std::vector<StokesMode> modes;
  for (int j = 0; j < k; ++j) {
    StokesMode m;
    m.lambda = get<double>(in);
    m.m = get<std::int32_t>(in);
    m.parity = get<std::int32_t>(in);
    m.coef.resize(n_y);
    for (int i = 0; i < n_y; ++i) m.coef(i) = get<double>(in);
    modes.push_back(std::move(m));
  }
  StokesBasis basis = basis_from_modes(domain, std::move(modes));
  if (basis.grid().id != grid_id || basis.grid().ny() != ny_grid)
    throw Error(ErrorKind::ConfigMismatch, path + " grid fingerprint differs");
  return basis;
}

StokesBasis cached_basis(const std::string& path, const DomainSpec& domain, int k) {
  if (path.empty()) return build_basis(domain, k);
  try {
    if (auto b = load_basis(path, domain, k)) return std::move(*b);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ConfigMismatch) throw;
  }
  StokesBasis fresh = build_basis(domain, k);
  save_basis(fresh, path);
  return fresh;
}

}  // namespace mhdp
