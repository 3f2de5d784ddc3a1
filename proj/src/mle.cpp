#include <cmath>
#include <random>

#include "drlab/error.hpp"
#include "drlab/tomography.hpp"
#include "drlab/util.hpp"

namespace drlab {

namespace {

using Site = Eigen::Matrix4cd;  // G[t][(r,c)] = op_t[c,r]

// Operators a^dag^m a^n with t = 2m+n on a cutoff-2 mode: I, a, a^dag, a^dag a.
Eigen::Matrix2cd mode_op(int t) {
  Eigen::Matrix2cd ad;
  ad << 0, 0, 1, 0;
  const Eigen::Matrix2cd a = ad.adjoint();
  switch (t) {
    case 0: return Eigen::Matrix2cd::Identity();
    case 1: return a;
    case 2: return ad;
    default: return ad * a;
  }
}

Site site_matrix(bool qubit) {
  Site g;
  for (int t = 0; t < 4; ++t) {
    const Eigen::Matrix2cd o = qubit ? pauli(t) : mode_op(t);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) g(t, r * 2 + c) = o(c, r);
  }
  return g;
}

// Linear maps between density matrices and per-site operator coordinates.
struct SiteMap {
  int n = 0;  // sites
  std::vector<Site> g, g_adj, g_inv;

  CVec to_pairs(const CMat& rho) const {
    const Eigen::Index d = rho.rows();
    CVec v(d * d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        Eigen::Index idx = 0;
        for (int s = 0; s < n; ++s) {
          const int sh = n - 1 - s;
          idx = idx * 4 + ((r >> sh) & 1) * 2 + ((c >> sh) & 1);
        }
        v(idx) = rho(r, c);
      }
    return v;
  }
  CMat from_pairs(const CVec& v) const {
    const Eigen::Index d = Eigen::Index(1) << n;
    CMat m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        Eigen::Index idx = 0;
        for (int s = 0; s < n; ++s) {
          const int sh = n - 1 - s;
          idx = idx * 4 + ((r >> sh) & 1) * 2 + ((c >> sh) & 1);
        }
        m(r, c) = v(idx);
      }
    return m;
  }
  static CVec apply(const std::vector<Site>& ms, CVec x) {
    const int n = static_cast<int>(ms.size());
    Eigen::Index right = x.size();
    Eigen::Index left = 1;
    CVec y(x.size());
    for (int s = 0; s < n; ++s) {
      right /= 4;
      for (Eigen::Index l = 0; l < left; ++l)
        for (int t = 0; t < 4; ++t)
          for (Eigen::Index r = 0; r < right; ++r) {
            cplx acc = 0.0;
            for (int u = 0; u < 4; ++u) acc += ms[static_cast<std::size_t>(s)](t, u) * x((l * 4 + u) * right + r);
            y((l * 4 + t) * right + r) = acc;
          }
      x.swap(y);
      left *= 4;
    }
    return x;
  }
  CVec forward(const CMat& rho) const { return apply(g, to_pairs(rho)); }
  CMat adjoint(const CVec& z) const { return from_pairs(apply(g_adj, z)); }
  CMat inverse(const CVec& z) const { return from_pairs(apply(g_inv, z)); }
};

Eigen::Index grid_index(const MomentKey& k, bool qubit) {
  Eigen::Index idx = qubit ? k.pauli : 0;
  for (std::size_t w = 0; w + 1 < k.exps.size(); w += 2) idx = idx * 4 + 2 * k.exps[w] + k.exps[w + 1];
  return idx;
}

}  // namespace

MleResult mle_reconstruct(const MomentTable& table, const MleOptions& opt) {
  const int k = static_cast<int>(table.window.size());
  if (k < 1) throw DimensionError("empty moment window");
  const bool q = table.with_qubit;
  SiteMap map;
  map.n = k + (q ? 1 : 0);
  if (map.n > 7) throw DimensionError("direct reconstruction limited to 7 two-level sites");
  for (int s = 0; s < map.n; ++s) {
    const Site g = site_matrix(q && s == 0);
    map.g.push_back(g);
    map.g_adj.push_back(g.adjoint());
    map.g_inv.push_back(g.inverse());
  }
  const Eigen::Index D = Eigen::Index(1) << map.n;
  const Eigen::Index G = D * D;

  MleResult res;
  RVec w = RVec::Zero(G);
  CVec y = CVec::Zero(G);
  double largest = 0.0;
  for (const auto& [key, e] : table.entries) largest = std::max(largest, std::abs(e.value));
  const double floor = opt.stddev_floor_rel * std::max(largest, 1e-300);
  int used = 0;
  for (const auto& [key, e] : table.entries) {
    bool low = true;
    for (auto x : key.exps) low &= x <= 1;
    if (!low || key.is_identity() || key.n_modes() != k) continue;
    const Eigen::Index i = grid_index(key, q);
    const double sd = std::max(e.stddev, floor);
    w(i) = 1.0 / (sd * sd);
    y(i) = e.value;
    ++used;
  }
  if (used < G - 1) res.warnings.push_back("moment table does not determine every density-matrix element");

  auto objective = [&](const CMat& rho, CVec* resid) {
    const CVec r = map.forward(rho) - y;
    double f = 0.0;
    for (Eigen::Index i = 0; i < G; ++i) f += w(i) * std::norm(r(i));
    if (resid) *resid = r;
    return f;
  };
  auto gradient = [&](const CVec& r) {
    CVec wr = r;
    for (Eigen::Index i = 0; i < G; ++i) wr(i) *= w(i);
    const CMat Y = map.adjoint(wr);
    return CMat(Y + Y.adjoint());
  };

  // Lipschitz constant of the gradient by power iteration on the Hessian.
  Rng rng(12345);
  std::normal_distribution<double> nd;
  CMat x(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    for (Eigen::Index j = 0; j < D; ++j) x(i, j) = cplx(nd(rng), nd(rng));
  x = hermitian_part(x);
  double lip = 1.0;
  for (int it = 0; it < 60; ++it) {
    x /= x.norm();
    CMat hx = gradient(map.forward(x));
    lip = std::abs((x.adjoint() * hx).trace().real());
    x = hx;
  }
  lip = 1.1 * std::max(lip, 1e-300);

  // Linear inversion with unit trace, then projection.
  CVec y0 = y;
  y0(0) = 1.0;
  CMat rho = project_psd_trace(hermitian_part(map.inverse(y0)), 1.0);
  CVec resid;
  double f = objective(rho, &resid);
  res.history.push_back(f);
  CMat yk = rho;
  double tk = 1.0;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    CVec ry;
    objective(yk, &ry);
    CMat next = project_psd_trace(hermitian_part(yk - gradient(ry) / lip), 1.0);
    double fn = objective(next, nullptr);
    if (fn > f) {
      // Monotone restart from the last accepted point.
      tk = 1.0;
      objective(rho, &ry);
      next = project_psd_trace(hermitian_part(rho - gradient(ry) / lip), 1.0);
      fn = objective(next, nullptr);
      if (fn > f) {
        res.converged = true;
        break;
      }
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    yk = next + ((tk - 1.0) / tn) * (next - rho);
    tk = tn;
    const double change = f - fn;
    rho = next;
    f = fn;
    res.history.push_back(f);
    if (change <= opt.rel_tol * std::max(f, 1e-300)) {
      res.converged = true;
      break;
    }
  }
  res.iterations = it;
  res.objective = f;
  if (!res.converged) res.warnings.push_back("iteration cap reached");

  std::vector<int> dims;
  std::vector<SubsystemLabel> labels;
  if (q) {
    dims.push_back(2);
    labels.push_back(SubsystemLabel::qubit());
  }
  for (int m : table.window) {
    dims.push_back(2);
    labels.push_back(SubsystemLabel::mode(m / 2, m % 2 == 0 ? Freq::w2 : Freq::w1));
  }
  res.state = MultimodeState::from_density(dims, labels, hermitian_part(rho));
  return res;
}

}  // namespace drlab
