#include "drlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "drlab/error.hpp"
#include "drlab/util.hpp"

namespace drlab::kernels {

template <class R>
cplx sample_husimi_qubit(const Eigen::Matrix2cd& rho, double lambda_max, R& rng) {
  // Proposal: equal mixture of e^{-|a|^2}/pi and |a|^2 e^{-|a|^2}/pi, whose density
  // e^{-|a|^2}(1+|a|^2)/(2 pi) bounds the target up to 2 lambda_max.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  std::gamma_distribution<double> gam(2.0, 1.0);
  for (;;) {
    cplx a;
    if (u(rng) < 0.5) {
      const double x = g(rng);
      const double y = g(rng);
      a = cplx(x, y);
    } else {
      const double r = std::sqrt(gam(rng));
      a = std::polar(r, 2.0 * kPi * u(rng));
    }
    const Eigen::Vector2cd v(1.0, a);
    const double q = (v.adjoint() * rho * v)(0, 0).real();
    if (u(rng) * lambda_max * (1.0 + std::norm(a)) <= q) return a;
  }
}

template cplx sample_husimi_qubit<Rng>(const Eigen::Matrix2cd&, double, Rng&);

namespace {

void check_ensemble(const PureEnsemble& ens, const std::vector<double>& n0) {
  if (ens.weights.size() != ens.kets.size() || ens.kets.empty()) throw DimensionError("ensemble layout");
  if (static_cast<int>(n0.size()) != ens.n_modes) throw DimensionError("noise list length");
  for (const auto& k : ens.kets)
    if (k.size() != (Eigen::Index(1) << ens.n_modes)) throw DimensionError("ensemble ket size");
}

// One block of shots with its own RNG stream.
void sample_block(const PureEnsemble& ens, const std::vector<double>& n0, std::int64_t first,
                  std::int64_t count, std::uint64_t seed, std::int64_t block, cplx* out) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(block)));
  std::discrete_distribution<std::size_t> pick(ens.weights.begin(), ens.weights.end());
  std::normal_distribution<double> noise(0.0, 1.0);
  const int n = ens.n_modes;
  CVec psi;
  for (std::int64_t s = 0; s < count; ++s) {
    psi = ens.kets[pick(rng)];
    cplx* row = out + (first + s) * n;
    for (int k = 0; k < n; ++k) {
      const Eigen::Index half = psi.size() / 2;
      Eigen::Matrix2cd rho;
      const auto top = psi.head(half), bot = psi.tail(half);
      rho(0, 0) = top.squaredNorm();
      rho(1, 1) = bot.squaredNorm();
      rho(0, 1) = bot.dot(top);
      rho(1, 0) = std::conj(rho(0, 1));
      rho /= rho.trace().real();
      const double lmax = 0.5 * (1.0 + std::sqrt(std::pow((rho(0, 0) - rho(1, 1)).real(), 2) +
                                                 4.0 * std::norm(rho(0, 1))));
      const cplx a = sample_husimi_qubit(rho, lmax, rng);
      if (k + 1 < n) {
        CVec next = top + std::conj(a) * bot;
        const double nn = next.norm();
        psi = nn > 0 ? CVec(next / nn) : CVec(top);
      }
      const double sd = std::sqrt(0.5 * n0[static_cast<std::size_t>(k)]);
      const double x = noise(rng) * sd;
      const double y = noise(rng) * sd;
      row[k] = a + cplx(x, y);
    }
  }
}

std::int64_t block_count(std::int64_t n_shots) { return (n_shots + kShotBlock - 1) / kShotBlock; }

struct GridPlan {
  int e1 = 2;              // max_exp + 1
  int per_mode = 4;        // e1^2
  std::vector<int> left, right;
  int ga = 1, gb = 1;
};

GridPlan plan_grid(const std::vector<int>& window, int max_exp) {
  if (max_exp < 0 || max_exp > 4) throw DomainError("max_exp out of range");
  GridPlan p;
  p.e1 = max_exp + 1;
  p.per_mode = p.e1 * p.e1;
  const std::size_t half = window.size() / 2;
  p.left.assign(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(half));
  p.right.assign(window.begin() + static_cast<std::ptrdiff_t>(half), window.end());
  for (std::size_t k = 0; k < p.left.size(); ++k) p.ga *= p.per_mode;
  for (std::size_t k = 0; k < p.right.size(); ++k) p.gb *= p.per_mode;
  return p;
}

// Per-shot product table over a list of modes, big-endian digit m*e1+n.
void fill_products(const cplx* shot, const std::vector<int>& modes, const GridPlan& p,
                   std::vector<cplx>& pw, std::vector<cplx>& out) {
  out.assign(1, cplx(1.0));
  for (int m : modes) {
    const cplx s = shot[m];
    const cplx sc = std::conj(s);
    // pw[mm*e1+nn] = conj(s)^mm s^nn
    cplx cm = 1.0;
    for (int mm = 0; mm < p.e1; ++mm) {
      cplx cn = 1.0;
      for (int nn = 0; nn < p.e1; ++nn) {
        pw[static_cast<std::size_t>(mm * p.e1 + nn)] = cm * cn;
        cn *= s;
      }
      cm *= sc;
    }
    std::vector<cplx> next(out.size() * static_cast<std::size_t>(p.per_mode));
    for (std::size_t i = 0; i < out.size(); ++i)
      for (int d = 0; d < p.per_mode; ++d)
        next[i * static_cast<std::size_t>(p.per_mode) + static_cast<std::size_t>(d)] = out[i] * pw[static_cast<std::size_t>(d)];
    out.swap(next);
  }
}

// Sum over shots [lo, hi) into row (ga x gb, row-major) of the result.
void block_sums(const cplx* data, std::int64_t lo, std::int64_t hi, int stride, const GridPlan& p,
                const double* w, cplx* acc) {
  std::vector<cplx> pw(static_cast<std::size_t>(p.per_mode)), ua, ub;
  for (std::int64_t s = lo; s < hi; ++s) {
    const cplx* shot = data + s * stride;
    fill_products(shot, p.left, p, pw, ua);
    fill_products(shot, p.right, p, pw, ub);
    if (w) {
      const double ws = w[s];
      if (ws == 0.0) continue;
      for (auto& x : ua) x *= ws;
    }
    for (int a = 0; a < p.ga; ++a) {
      const cplx xa = ua[static_cast<std::size_t>(a)];
      cplx* row = acc + static_cast<std::ptrdiff_t>(a) * p.gb;
      for (int b = 0; b < p.gb; ++b) row[b] += xa * ub[static_cast<std::size_t>(b)];
    }
  }
}

void check_sums(std::int64_t n_shots, int stride, const std::vector<int>& window, int n_blocks) {
  if (n_blocks < 1 || n_shots < n_blocks) throw DomainError("need at least one shot per block");
  for (int m : window)
    if (m < 0 || m >= stride) throw DimensionError("window mode outside record");
}

inline std::int64_t block_lo(std::int64_t n, int nb, int b) { return n * b / nb; }

}  // namespace

namespace serial {

void sample_heterodyne(const PureEnsemble& ens, const std::vector<double>& n0, std::int64_t n_shots,
                       std::uint64_t seed, cplx* out) {
  check_ensemble(ens, n0);
  const std::int64_t nb = block_count(n_shots);
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t first = b * kShotBlock;
    sample_block(ens, n0, first, std::min(kShotBlock, n_shots - first), seed, b, out);
  }
}

CMat moment_block_sums(const cplx* data, std::int64_t n_shots, int stride, const std::vector<int>& window,
                       int max_exp, int n_blocks, const double* shot_weight) {
  check_sums(n_shots, stride, window, n_blocks);
  const GridPlan p = plan_grid(window, max_exp);
  CMat out = CMat::Zero(n_blocks, static_cast<Eigen::Index>(p.ga) * p.gb);
  std::vector<cplx> acc;
  for (int b = 0; b < n_blocks; ++b) {
    acc.assign(static_cast<std::size_t>(p.ga) * p.gb, cplx(0.0));
    block_sums(data, block_lo(n_shots, n_blocks, b), block_lo(n_shots, n_blocks, b + 1), stride, p,
               shot_weight, acc.data());
    for (std::size_t g = 0; g < acc.size(); ++g) out(b, static_cast<Eigen::Index>(g)) = acc[g];
  }
  return out;
}

}  // namespace serial

namespace omp {

void sample_heterodyne(const PureEnsemble& ens, const std::vector<double>& n0, std::int64_t n_shots,
                       std::uint64_t seed, cplx* out) {
  check_ensemble(ens, n0);
  const std::int64_t nb = block_count(n_shots);
  const int nt = configured_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt > 0 ? nt : omp_get_max_threads())
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t first = b * kShotBlock;
    sample_block(ens, n0, first, std::min(kShotBlock, n_shots - first), seed, b, out);
  }
}

CMat moment_block_sums(const cplx* data, std::int64_t n_shots, int stride, const std::vector<int>& window,
                       int max_exp, int n_blocks, const double* shot_weight) {
  check_sums(n_shots, stride, window, n_blocks);
  const GridPlan p = plan_grid(window, max_exp);
  const Eigen::Index G = static_cast<Eigen::Index>(p.ga) * p.gb;
  CMat out = CMat::Zero(n_blocks, G);
  const int nt = configured_threads();
#pragma omp parallel num_threads(nt > 0 ? nt : omp_get_max_threads())
  {
    std::vector<cplx> acc;
#pragma omp for schedule(dynamic)
    for (int b = 0; b < n_blocks; ++b) {
      acc.assign(static_cast<std::size_t>(G), cplx(0.0));
      block_sums(data, block_lo(n_shots, n_blocks, b), block_lo(n_shots, n_blocks, b + 1), stride, p,
                 shot_weight, acc.data());
      for (Eigen::Index g = 0; g < G; ++g) out(b, g) = acc[static_cast<std::size_t>(g)];
    }
  }
  return out;
}

}  // namespace omp

}  // namespace drlab::kernels
