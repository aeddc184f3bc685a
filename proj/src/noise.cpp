#include "stheat/noise.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace stheat {

TimeGrid::TimeGrid(double T, std::size_t N) : T_(T), N_(N) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("TimeGrid: T must be positive");
  if (N == 0) throw std::invalid_argument("TimeGrid: N must be >= 1");
}

QSpec::QSpec(std::vector<double> gammas) : gammas_(std::move(gammas)) {
  if (gammas_.empty()) throw std::invalid_argument("QSpec: empty spectrum");
  for (double g : gammas_) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("QSpec: eigenvalues must be finite and nonnegative");
    }
  }
}

QSpec QSpec::power_law(std::size_t J, double rho) {
  std::vector<double> g(J);
  for (std::size_t j = 0; j < J; ++j) g[j] = std::pow(static_cast<double>(j + 1), -rho);
  QSpec q(std::move(g));
  q.decay_ = rho;
  return q;
}

QSpec QSpec::rank_one(std::size_t K, std::size_t index, double gamma) {
  if (index >= K) throw std::invalid_argument("QSpec::rank_one: index out of range");
  std::vector<double> g(K, 0.0);
  g[index] = gamma;
  return QSpec(std::move(g));
}

double QSpec::trace() const noexcept {
  double acc = 0.0;
  for (double g : gammas_) acc += g;
  return acc;
}

QSpec QSpec::resized(std::size_t J) const {
  if (!decay_) throw std::logic_error("QSpec::resized: explicit spectrum cannot be extended");
  return power_law(J, *decay_);
}

NoiseSample::NoiseSample(std::size_t modes, std::size_t N, double h, PathId id)
    : modes_(modes), N_(N), h_(h), id_(id), dW_(modes * N, 0.0), iW_(modes * N, 0.0) {}

bool NoiseSample::operator==(const NoiseSample& other) const {
  return modes_ == other.modes_ && N_ == other.N_ && h_ == other.h_ &&
         id_.seed == other.id_.seed && id_.path == other.id_.path && dW_ == other.dW_ &&
         iW_ == other.iW_;
}

NoiseSample sample_noise(const TimeGrid& grid, const QSpec& q, PathId id) {
  const std::size_t K = q.size();
  const std::size_t N = grid.N();
  const double h = grid.h();
  NoiseSample out(K, N, h, id);
  const CounterRng rng(id.seed);
  const double sqrt_h = std::sqrt(h);
  const double c_iw0 = 0.5 * h * sqrt_h;
  const double c_iw1 = h * sqrt_h / (2.0 * std::sqrt(3.0));
  for (std::size_t j = 0; j < K; ++j) {
    const double sg = std::sqrt(q.gamma(j));
    if (sg == 0.0) continue;
    for (std::size_t n = 0; n < N; ++n) {
      const auto [xi0, xi1] = rng.normals(id.path, static_cast<std::uint32_t>(j),
                                          static_cast<std::uint32_t>(n), Stream::Noise);
      // (dW, iW) = sqrt(gamma) * L (xi0, xi1) with L the Cholesky factor of
      // [[h, h^2/2], [h^2/2, h^3/3]].
      out.set(j, n, sg * sqrt_h * xi0, sg * (c_iw0 * xi0 + c_iw1 * xi1));
    }
  }
  return out;
}

std::vector<double> hs_terms(std::span<const double> psi_diag, const QSpec& q,
                             const EigenBasis& basis, double s) {
  if (psi_diag.size() != q.size()) {
    throw std::invalid_argument("hs_norm_psiQ: psi has " + std::to_string(psi_diag.size()) +
                                " entries, Q has " + std::to_string(q.size()));
  }
  if (q.size() > basis.size()) throw std::invalid_argument("hs_norm_psiQ: basis too small");
  std::vector<double> terms(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double w = s == 0.0 ? 1.0 : std::pow(basis.lambda(j), s);
    terms[j] = w * psi_diag[j] * psi_diag[j] * q.gamma(j);
  }
  return terms;
}

double hs_norm_psiQ(std::span<const double> psi_diag, const QSpec& q, const EigenBasis& basis,
                    double s) {
  double acc = 0.0;
  for (double t : hs_terms(psi_diag, q, basis, s)) acc += t;
  return std::sqrt(acc);
}

double coupling_norm_beta(const QSpec& q, const EigenBasis& basis, double beta) {
  if (beta < 0.0) throw std::invalid_argument("coupling_norm_beta: beta must be >= 0");
  const std::vector<double> ones(q.size(), 1.0);
  return hs_norm_psiQ(ones, q, basis, beta - 1.0);
}

SeriesGrowth series_growth(std::span<const double> terms) {
  const std::size_t J = terms.size();
  if (J < 4) throw std::invalid_argument("series_growth: need at least 4 terms");
  SeriesGrowth g;
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double t = terms[j - 1];
    if (j <= J / 2) g.partial_half += t;
    g.partial_full += t;
    if (j > J / 4 && j <= J / 2) lower += t;
    if (j > J / 2) upper += t;
  }
  if (lower == 0.0) {
    g.block_ratio = upper == 0.0 ? 0.0 : INFINITY;
  } else {
    g.block_ratio = upper / lower;
  }
  g.divergent = g.block_ratio >= 1.0;
  return g;
}

void write_noise_csv(std::ostream& os, const NoiseSample& noise, bool header) {
  if (header) os << "path,j,n,dW,iW\n";
  const auto old_prec = os.precision(17);
  for (std::size_t j = 0; j < noise.modes(); ++j) {
    for (std::size_t n = 0; n < noise.intervals(); ++n) {
      os << noise.id().path << ',' << (j + 1) << ',' << n << ',' << noise.dW(j, n) << ','
         << noise.iW(j, n) << '\n';
    }
  }
  os.precision(old_prec);
}

namespace {

constexpr char kMagic[4] = {'S', 'T', 'H', 'N'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw std::runtime_error("read_noise_binary: truncated stream");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

void write_noise_binary(std::ostream& os, const NoiseSample& noise) {
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kBinaryVersion);
  put<std::uint64_t>(os, noise.modes());
  put<std::uint64_t>(os, noise.intervals());
  put<double>(os, noise.h());
  put<std::uint64_t>(os, noise.id().seed);
  put<std::uint64_t>(os, noise.id().path);
  for (std::size_t n = 0; n < noise.intervals(); ++n) {
    for (std::size_t j = 0; j < noise.modes(); ++j) {
      put<double>(os, noise.dW(j, n));
      put<double>(os, noise.iW(j, n));
    }
  }
}

NoiseSample read_noise_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("read_noise_binary: bad magic");
  }
  if (get<std::uint32_t>(is) != kBinaryVersion) {
    throw std::runtime_error("read_noise_binary: unsupported version");
  }
  const auto K = get<std::uint64_t>(is);
  const auto N = get<std::uint64_t>(is);
  const auto h = get<double>(is);
  PathId id;
  id.seed = get<std::uint64_t>(is);
  id.path = get<std::uint64_t>(is);
  NoiseSample out(K, N, h, id);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t j = 0; j < K; ++j) {
      const double dw = get<double>(is);
      const double iw = get<double>(is);
      out.set(j, n, dw, iw);
    }
  }
  return out;
}

}  // namespace stheat
