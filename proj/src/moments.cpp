#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>
#include <sstream>

#include "drlab/error.hpp"
#include "drlab/kernels.hpp"
#include "drlab/tomography.hpp"
#include "drlab/util.hpp"

namespace drlab {

int MomentKey::total_order() const {
  int t = 0;
  for (auto e : exps) t += e;
  return t;
}

bool MomentKey::is_identity() const { return pauli == 0 && total_order() == 0; }

MomentKey MomentKey::conjugate() const {
  MomentKey k = *this;
  for (std::size_t i = 0; i + 1 < k.exps.size(); i += 2) std::swap(k.exps[i], k.exps[i + 1]);
  return k;
}

std::string MomentKey::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i + 1 < exps.size(); i += 2)
    os << '(' << int(exps[i]) << ',' << int(exps[i + 1]) << ')';
  if (pauli) os << ':' << "IXYZ"[pauli];
  return os.str();
}

double MomentTable::conjugate_symmetry_violation() const {
  double worst = 0.0;
  for (const auto& [k, e] : entries) {
    const auto it = entries.find(k.conjugate());
    if (it == entries.end()) continue;
    const double diff = std::abs(e.value - std::conj(it->second.value));
    const double s = std::hypot(e.stddev, it->second.stddev);
    if (diff == 0.0) continue;
    worst = std::max(worst, s > 0 ? diff / s : std::numeric_limits<double>::infinity());
  }
  return worst;
}

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// All exponent tuples on n modes with every entry <= max_exp, big-endian grid order.
std::vector<std::vector<std::uint8_t>> exponent_grid(int n_modes, int max_exp) {
  const int e1 = max_exp + 1;
  const int per = e1 * e1;
  const std::int64_t G = ipow(per, n_modes);
  std::vector<std::vector<std::uint8_t>> out(static_cast<std::size_t>(G));
  for (std::int64_t g = 0; g < G; ++g) {
    std::vector<std::uint8_t> ex(static_cast<std::size_t>(2 * n_modes));
    std::int64_t rem = g;
    for (int k = n_modes - 1; k >= 0; --k) {
      const int d = static_cast<int>(rem % per);
      rem /= per;
      ex[static_cast<std::size_t>(2 * k)] = static_cast<std::uint8_t>(d / e1);
      ex[static_cast<std::size_t>(2 * k + 1)] = static_cast<std::uint8_t>(d % e1);
    }
    out[static_cast<std::size_t>(g)] = std::move(ex);
  }
  return out;
}

// Enumerate sub-tuples (i_k <= m_k, j_k <= n_k) of exps.
template <class F>
void for_each_sub(const std::vector<std::uint8_t>& exps, F&& f) {
  std::vector<std::uint8_t> sub(exps.size(), 0);
  for (;;) {
    f(sub);
    std::size_t k = 0;
    while (k < sub.size()) {
      if (sub[k] < exps[k]) {
        ++sub[k];
        break;
      }
      sub[k] = 0;
      ++k;
    }
    if (k == sub.size()) return;
  }
}

double binom_weight(const std::vector<std::uint8_t>& exps, const std::vector<std::uint8_t>& sub) {
  double w = 1.0;
  for (std::size_t k = 0; k < exps.size(); ++k) w *= binom(exps[k], sub[k]);
  return w;
}

std::vector<std::uint8_t> diff(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::vector<std::uint8_t> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = static_cast<std::uint8_t>(a[k] - b[k]);
  return d;
}

cplx lookup(const MomentMap& m, const MomentKey& k, const char* what) {
  const auto it = m.find(k);
  if (it == m.end()) throw DomainError(std::string(what) + " moment missing: " + k.str());
  return it->second;
}

MomentKey with_exps(std::vector<std::uint8_t> e, std::uint8_t pauli) {
  MomentKey k;
  k.exps = std::move(e);
  k.pauli = pauli;
  return k;
}

}  // namespace

// E[S*^m S^n] = sum_{i<=m, j<=n} C(m,i) C(n,j) <a^dag^i a^j> <h^{m-i} h^dag^{n-j}>, per mode.
MomentMap convolve_moments(const MomentMap& signal, const MomentMap& noise) {
  MomentMap out;
  for (const auto& [k, v] : signal) {
    (void)v;
    cplx acc = 0.0;
    for_each_sub(k.exps, [&](const std::vector<std::uint8_t>& sub) {
      acc += binom_weight(k.exps, sub) * lookup(signal, with_exps(sub, k.pauli), "signal") *
             lookup(noise, with_exps(diff(k.exps, sub), 0), "noise");
    });
    out[k] = acc;
  }
  return out;
}

MomentMap deconvolve_moments(const MomentMap& raw, const MomentMap& noise) {
  MomentMap sig;
  // Map order visits every sub-tuple before the tuple itself.
  for (const auto& [k, r] : raw) {
    cplx acc = r;
    for_each_sub(k.exps, [&](const std::vector<std::uint8_t>& sub) {
      if (sub == k.exps) return;
      acc -= binom_weight(k.exps, sub) * lookup(sig, with_exps(sub, k.pauli), "signal") *
             lookup(noise, with_exps(diff(k.exps, sub), 0), "noise");
    });
    sig[k] = acc / lookup(noise, with_exps(std::vector<std::uint8_t>(k.exps.size(), 0), 0), "noise");
  }
  return sig;
}

MomentMap thermal_noise_moments(const std::vector<double>& n0, int max_exp) {
  MomentMap out;
  for (auto& ex : exponent_grid(static_cast<int>(n0.size()), max_exp)) {
    double v = 1.0;
    for (std::size_t k = 0; k < n0.size(); ++k) {
      const int m = ex[2 * k], n = ex[2 * k + 1];
      if (m != n) {
        v = 0.0;
        break;
      }
      double f = 1.0;
      for (int i = 2; i <= m; ++i) f *= i;
      v *= f * std::pow(1.0 + n0[k], m);
    }
    out[with_exps(ex, 0)] = v;
  }
  return out;
}

namespace {

bool key_allowed(const std::vector<std::uint8_t>& ex, int max_total) {
  int t = 0;
  for (auto e : ex) t += e;
  return max_total < 0 || t <= max_total;
}

// Moment maps from summed block rows (weights = per-block normalizers).
MomentMap to_map(const RVec& counts, const std::vector<Eigen::Index>& pick, const CMat& sums,
                 const std::vector<std::vector<std::uint8_t>>& grid, std::uint8_t pauli) {
  double norm = 0.0;
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(sums.cols());
  for (Eigen::Index b : pick) {
    acc += sums.row(b);
    norm += counts(b);
  }
  if (norm <= 0) throw DomainError("no shots for a qubit basis");
  MomentMap m;
  for (std::size_t g = 0; g < grid.size(); ++g) m[with_exps(grid[g], pauli)] = acc(static_cast<Eigen::Index>(g)) / norm;
  return m;
}

}  // namespace

MomentTable estimate_moments(const HeterodyneData& data, const std::vector<int>& window, const MomentOptions& opt) {
  data.validate();
  // Six modes allow the direct cross-check against the five-mode MPO windows.
  if (window.empty() || window.size() > 6) throw DomainError("moment window must hold 1..6 modes");
  if (opt.max_exp < 1 || opt.max_exp > 2) throw DomainError("max_exp must be 1 or 2");
  if (opt.n_bootstrap < 2) throw DomainError("need at least two bootstrap resamples");
  const auto& sig = data.signal;
  const auto& vac = data.vacuum;
  const std::int64_t ns = sig.shot_count(), nv = vac.shot_count();
  const int nb = static_cast<int>(std::min<std::int64_t>({opt.n_blocks, ns, nv}));
  const bool with_qubit = !sig.qubit_basis.empty();
  const int k = static_cast<int>(window.size());
  const auto grid = exponent_grid(k, opt.max_exp);

  MomentTable t;
  t.window = window;
  t.max_exp = opt.max_exp;
  t.max_total = opt.max_total;
  t.with_qubit = with_qubit;

  // Per Pauli: per-shot weights and per-block normalizers.
  const int n_pauli = with_qubit ? 4 : 1;
  std::vector<CMat> sums(static_cast<std::size_t>(n_pauli));
  std::vector<RVec> counts(static_cast<std::size_t>(n_pauli), RVec::Zero(nb));
  std::vector<double> w(static_cast<std::size_t>(ns));
  for (int p = 0; p < n_pauli; ++p) {
    const char basis = p == 0 ? 0 : "Ixyz"[p];
    for (std::int64_t s = 0; s < ns; ++s)
      w[static_cast<std::size_t>(s)] =
          p == 0 ? 1.0 : (sig.qubit_basis[static_cast<std::size_t>(s)] == basis ? sig.qubit_outcome[static_cast<std::size_t>(s)] : 0.0);
    sums[static_cast<std::size_t>(p)] = kernels::omp::moment_block_sums(sig.samples.data(), ns, sig.n_modes, window,
                                                                        opt.max_exp, nb, p == 0 ? nullptr : w.data());
    for (int b = 0; b < nb; ++b) {
      const std::int64_t lo = ns * b / nb, hi = ns * (b + 1) / nb;
      double c = 0.0;
      for (std::int64_t s = lo; s < hi; ++s)
        c += p == 0 ? 1.0 : (sig.qubit_basis[static_cast<std::size_t>(s)] == basis ? 1.0 : 0.0);
      counts[static_cast<std::size_t>(p)](b) = c;
    }
  }
  const CMat vsums = kernels::omp::moment_block_sums(vac.samples.data(), nv, vac.n_modes, window, opt.max_exp, nb);
  RVec vcounts(nb);
  for (int b = 0; b < nb; ++b) vcounts(b) = static_cast<double>(nv * (b + 1) / nb - nv * b / nb);

  auto evaluate = [&](const std::vector<Eigen::Index>& sp, const std::vector<Eigen::Index>& vp) {
    const MomentMap noise = to_map(vcounts, vp, vsums, grid, 0);
    MomentMap out;
    for (int p = 0; p < n_pauli; ++p) {
      const MomentMap raw = to_map(counts[static_cast<std::size_t>(p)], sp, sums[static_cast<std::size_t>(p)], grid,
                                   static_cast<std::uint8_t>(p));
      for (auto& [key, v] : deconvolve_moments(raw, noise)) out[key] = v;
    }
    return out;
  };

  std::vector<Eigen::Index> all(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) all[static_cast<std::size_t>(b)] = b;
  const MomentMap point = evaluate(all, all);

  // Block bootstrap, resamples independent and seeded per replica.
  std::vector<MomentMap> reps(static_cast<std::size_t>(opt.n_bootstrap));
  const int nt = configured_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt > 0 ? nt : omp_get_max_threads())
  for (int r = 0; r < opt.n_bootstrap; ++r) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    std::uniform_int_distribution<Eigen::Index> pick(0, nb - 1);
    std::vector<Eigen::Index> sp(static_cast<std::size_t>(nb)), vp(static_cast<std::size_t>(nb));
    for (auto& x : sp) x = pick(rng);
    for (auto& x : vp) x = pick(rng);
    reps[static_cast<std::size_t>(r)] = evaluate(sp, vp);
  }

  double largest = 0.0;
  for (const auto& [key, v] : point) {
    if (key.is_identity() || !key_allowed(key.exps, opt.max_total)) continue;
    double s1 = 0;
    for (const auto& rep : reps) s1 += std::norm(rep.at(key) - v);
    MomentEntry e;
    e.value = v;
    e.stddev = std::sqrt(s1 / (opt.n_bootstrap - 1));
    largest = std::max(largest, std::abs(v));
    t.entries[key] = e;
  }
  const double floor = 1e-6 * std::max(largest, 1e-300);
  for (auto& [key, e] : t.entries) e.stddev = std::max(e.stddev, floor);

  // Shot-count adequacy of the highest-order entry per the noise scaling.
  std::vector<double> n0(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    MomentKey kk;
    kk.exps.assign(static_cast<std::size_t>(2 * k), 0);
    kk.exps[static_cast<std::size_t>(2 * i)] = kk.exps[static_cast<std::size_t>(2 * i + 1)] = 1;
    n0[static_cast<std::size_t>(i)] = std::max(0.0, to_map(vcounts, all, vsums, grid, 0).at(kk).real() - 1.0);
  }
  std::vector<int> orders(static_cast<std::size_t>(k), 2 * opt.max_exp);
  const std::int64_t need = sampling_requirement(n0, orders);
  if (ns < need) {
    std::ostringstream os;
    os << "only " << ns << " shots; highest-order moments need about " << need;
    t.warnings.push_back(os.str());
  }
  return t;
}

MomentTable exact_moments(const MultimodeState& rho, const std::vector<int>& window, int max_exp, double stddev) {
  if (max_exp < 1 || max_exp > 2) throw DomainError("max_exp must be 1 or 2");
  const int nm = rho.mode_count();
  const int off = rho.has_qubit() ? 1 : 0;
  if (rho.has_qubit() && rho.dims()[0] != 2) throw DomainError("exact moments need a two-level qubit");
  for (int w : window)
    if (w < 0 || w >= nm) throw DimensionError("window mode out of range");
  // Reduce to qubit + window first; factors are then placed by sorted position.
  std::vector<int> keep;
  if (off) keep.push_back(0);
  for (int w : window) keep.push_back(off + w);
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw DomainError("repeated window mode");
  const CMat r = partial_trace(rho, keep).density();
  const int nsub = static_cast<int>(sorted.size());
  Eigen::Matrix2cd ad;  // a^dag on cutoff 2
  ad << 0, 0, 1, 0;
  const Eigen::Matrix2cd a = ad.adjoint();
  auto power = [&](const Eigen::Matrix2cd& m, int k) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Identity();
    for (int i = 0; i < k; ++i) out = out * m;
    return out;
  };
  MomentTable t;
  t.window = window;
  t.max_exp = max_exp;
  t.max_total = -1;
  t.with_qubit = rho.has_qubit();
  const auto grid = exponent_grid(static_cast<int>(window.size()), max_exp);
  for (int p = 0; p < (t.with_qubit ? 4 : 1); ++p)
    for (const auto& ex : grid) {
      const MomentKey key = with_exps(ex, static_cast<std::uint8_t>(p));
      if (key.is_identity()) continue;
      std::vector<CMat> f;
      if (t.with_qubit) f.push_back(CMat(pauli(p)));
      for (int m = off; m < nsub; ++m) f.push_back(CMat::Identity(2, 2));
      for (std::size_t w = 0; w < window.size(); ++w) {
        const auto pos = std::find(sorted.begin(), sorted.end(), off + window[w]) - sorted.begin();
        f[static_cast<std::size_t>(pos)] = power(ad, ex[2 * w]) * power(a, ex[2 * w + 1]);
      }
      // Tr(rho O) with O built factor by factor.
      const cplx v = (r * kron_all(f)).trace();
      t.entries[key] = {v, stddev};
    }
  return t;
}

std::int64_t sampling_requirement(const std::vector<double>& n0, const std::vector<int>& orders) {
  if (n0.size() != orders.size()) throw DimensionError("N0 and order lists differ in length");
  double v = 1.0;
  for (std::size_t k = 0; k < n0.size(); ++k) {
    if (n0[k] < 0 || orders[k] < 0) throw DomainError("sampling requirement needs nonnegative inputs");
    v *= std::pow(1.0 + n0[k], orders[k]);
  }
  return static_cast<std::int64_t>(std::ceil(v - 1e-9));
}

}  // namespace drlab
