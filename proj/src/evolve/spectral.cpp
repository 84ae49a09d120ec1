#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <lapacke.h>

#include "degenlab/error.hpp"
#include "degenlab/evolve.hpp"

namespace degenlab {

namespace {

std::uint64_t fnv1a(const std::vector<double>& a, std::uint64_t h) {
  const auto* p = reinterpret_cast<const unsigned char*>(a.data());
  for (std::size_t i = 0; i < a.size() * sizeof(double); ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

constexpr char kMagic[8] = {'D', 'G', 'L', 'S', 'P', 'E', 'C', '1'};

bool read_cache(const std::filesystem::path& file, std::size_t N, std::vector<double>& w,
                std::vector<double>& z) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  char magic[8];
  std::uint64_t n = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::memcmp(magic, kMagic, 8) != 0 || n != N) return false;
  w.resize(N);
  z.resize(N * N);
  in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(N * sizeof(double)));
  in.read(reinterpret_cast<char*>(z.data()), static_cast<std::streamsize>(N * N * sizeof(double)));
  return static_cast<bool>(in);
}

void write_cache(const std::filesystem::path& file, const std::vector<double>& w,
                 const std::vector<double>& z) {
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) return;
    const std::uint64_t n = w.size();
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(z.data()), static_cast<std::streamsize>(z.size() * sizeof(double)));
    if (!out) return;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
}

std::mutex g_memo_mutex;
std::uint64_t g_memo_key = 0;
std::shared_ptr<const Spectrum> g_memo;

}  // namespace

std::shared_ptr<const Spectrum> Spectrum::compute(const DiscreteOperator& A) {
  if (A.mesh().dimension != 1) throw UnsupportedError("spectral path is limited to 1D operators");
  const std::size_t N = A.size();
  if (N > kSpectralLimit) {
    throw ResourceError("spectral path is limited to " + std::to_string(kSpectralLimit) + " points");
  }
  auto d = A.diagonal();
  auto e = A.off_diagonal_1d();
  const std::uint64_t key = fnv1a(e, fnv1a(d, 1469598103934665603ULL ^ N));
  {
    std::lock_guard<std::mutex> lock(g_memo_mutex);
    if (g_memo && g_memo_key == key) return g_memo;
  }

  auto out = std::make_shared<Spectrum>();
  std::filesystem::path cache_file;
  if (const char* dir = std::getenv("DEGENLAB_CACHE"); dir && *dir) {
    std::ostringstream name;
    name << "spectrum-" << std::hex << key << ".bin";
    cache_file = std::filesystem::path(dir) / name.str();
  }
  bool loaded = !cache_file.empty() && read_cache(cache_file, N, out->eigenvalues_, out->vectors_);
  if (!loaded) {
    out->eigenvalues_.assign(N, 0.0);
    out->vectors_.assign(N * N, 0.0);
    e.push_back(0.0);
    std::vector<lapack_int> isuppz(2 * N);
    lapack_int m = 0;
    lapack_logical tryrac = 1;
    const auto n = static_cast<lapack_int>(N);
    const lapack_int info =
        LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0, 0, &m,
                       out->eigenvalues_.data(), out->vectors_.data(), n, n, isuppz.data(), &tryrac);
    if (info != 0 || m != n) {
      throw SolverError("tridiagonal eigensolver failed (info " + std::to_string(info) + ")", 0.0);
    }
    if (!cache_file.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(cache_file.parent_path(), ec);
      write_cache(cache_file, out->eigenvalues_, out->vectors_);
    }
  }
  std::lock_guard<std::mutex> lock(g_memo_mutex);
  g_memo_key = key;
  g_memo = out;
  return out;
}

}  // namespace degenlab
