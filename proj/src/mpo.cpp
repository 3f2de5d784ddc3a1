#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/NonLinearOptimization>

#include "drlab/error.hpp"
#include "drlab/tomography.hpp"
#include "drlab/util.hpp"

namespace drlab {

MpoSiteTensors MpoSiteTensors::chain(int n_sites) {
  if (n_sites < 2) throw DomainError("MPO chain needs at least two sites");
  using E = Entry;
  const E o{0, 0};
  const E I{1, 0}, X{1, 1}, Y{1, 2}, Z{1, 3};
  const E mY{-1, 2}, mZ{-1, 3}, mX{-1, 1};
  MpoSiteTensors t;
  t.n_sites = n_sites;
  t.first = {{I, X, mY, Z}};
  t.even = {{I, o, o, mZ}, {o, X, Y, o}, {o, mY, X, o}, {mZ, o, o, I}};
  t.odd = {{I, o, o, Z}, {Z, o, o, I}, {o, mY, mX, o}, {o, X, mY, o}};
  t.last = {{I}, {X}, {mY}, {mZ}};
  return t;
}

const MpoSiteTensors::Site& MpoSiteTensors::site(int i) const {
  if (i < 1 || i > n_sites) throw DomainError("MPO site index out of range");
  if (i == 1) return first;
  if (i == n_sites) return last;
  return i % 2 == 0 ? even : odd;
}

MpoState MpoState::from_skeleton(const MpoSiteTensors& t) {
  MpoState s;
  for (int i = 1; i <= t.n_sites; ++i) {
    const auto& site = t.site(i);
    const auto dl = static_cast<Eigen::Index>(site.size());
    const auto dr = static_cast<Eigen::Index>(site[0].size());
    std::vector<RMat> c(4, RMat::Zero(dl, dr));
    for (Eigen::Index a = 0; a < dl; ++a)
      for (Eigen::Index b = 0; b < dr; ++b) {
        const auto& e = site[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (e.sign != 0) c[static_cast<std::size_t>(e.pauli)](a, b) = e.sign;
      }
    s.coeff.push_back(std::move(c));
  }
  return s;
}

namespace {

// E_i(O) = sum_P C_i^P Tr(P O).
CMat transfer(const std::vector<RMat>& c, const Eigen::Matrix2cd& o) {
  CMat e = CMat::Zero(c[0].rows(), c[0].cols());
  for (int p = 0; p < 4; ++p) {
    const cplx tr = (pauli(p) * o).trace();
    if (tr != cplx(0.0)) e += tr * c[static_cast<std::size_t>(p)].cast<cplx>();
  }
  return e;
}

}  // namespace

CMat MpoState::densify() const {
  const int n = n_sites();
  if (n < 1 || n > 10) throw DimensionError("densify supports 1..10 sites");
  // X[b] holds the operator accumulated up to the current bond index b.
  std::vector<CMat> x(static_cast<std::size_t>(coeff[0][0].cols()));
  for (Eigen::Index b = 0; b < coeff[0][0].cols(); ++b) {
    CMat acc = CMat::Zero(2, 2);
    for (int p = 0; p < 4; ++p) acc += coeff[0][static_cast<std::size_t>(p)](0, b) * pauli(p);
    x[static_cast<std::size_t>(b)] = acc;
  }
  for (int i = 1; i < n; ++i) {
    const auto& c = coeff[static_cast<std::size_t>(i)];
    const Eigen::Index dl = c[0].rows(), dr = c[0].cols();
    const Eigen::Index d = x[0].rows() * 2;
    std::vector<CMat> nx(static_cast<std::size_t>(dr), CMat::Zero(d, d));
    for (Eigen::Index a = 0; a < dl; ++a)
      for (Eigen::Index b = 0; b < dr; ++b) {
        Eigen::Matrix2cd op = Eigen::Matrix2cd::Zero();
        for (int p = 0; p < 4; ++p) op += c[static_cast<std::size_t>(p)](a, b) * pauli(p);
        if (op.cwiseAbs().maxCoeff() == 0.0) continue;
        nx[static_cast<std::size_t>(b)] += kron(x[static_cast<std::size_t>(a)], op);
      }
    x.swap(nx);
  }
  const cplx tr = x[0].trace();
  if (std::abs(tr) < 1e-300) throw ZeroProbabilityError("MPO has zero trace");
  return hermitian_part(x[0] / tr);
}

cplx MpoState::expectation(const std::vector<Eigen::Matrix2cd>& ops) const {
  if (static_cast<int>(ops.size()) != n_sites()) throw DimensionError("one operator per site");
  CMat num = CMat::Identity(1, 1), den = CMat::Identity(1, 1);
  for (int i = 0; i < n_sites(); ++i) {
    num = num * transfer(coeff[static_cast<std::size_t>(i)], ops[static_cast<std::size_t>(i)]);
    den = den * transfer(coeff[static_cast<std::size_t>(i)], Eigen::Matrix2cd::Identity());
  }
  return num(0, 0) / den(0, 0);
}

namespace {

struct Observation {
  std::vector<Eigen::Matrix2cd> ops;  // per site
  cplx value;
  double sigma;
};

Eigen::Matrix2cd ladder(int m, int n) {
  Eigen::Matrix2cd ad;
  ad << 0, 0, 1, 0;
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Identity();
  for (int k = 0; k < m; ++k) out = out * ad;
  for (int k = 0; k < n; ++k) out = out * ad.adjoint();
  return out;
}

// Per-site correction R (4x4 real, Pauli transfer form) acts on the skeleton coefficients,
// C'^P = sum_Q R(P,Q) C^Q. R is the PTM of a single-mode CPTP map built from four Kraus
// operators, stacked as the isometry V = A (A^dag A)^{-1/2} of a free complex 8x2 matrix A.
constexpr int kKraus = 4;
constexpr int kSiteParams = 2 * 2 * kKraus * 2;  // re/im of A

Eigen::Matrix4d ptm_from_params(const double* t) {
  CMat a(2 * kKraus, 2);
  for (int r = 0; r < 2 * kKraus; ++r)
    for (int c = 0; c < 2; ++c) a(r, c) = cplx(t[2 * (r * 2 + c)], t[2 * (r * 2 + c) + 1]);
  Eigen::SelfAdjointEigenSolver<CMat> es(a.adjoint() * a);
  const CMat inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseMax(1e-300).cwiseInverse().cwiseSqrt().asDiagonal() *
                        es.eigenvectors().adjoint();
  const CMat v = a * inv_sqrt;
  Eigen::Matrix4d r;
  for (int q = 0; q < 4; ++q) {
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int k = 0; k < kKraus; ++k) {
      const Eigen::Matrix2cd kr = v.block(2 * k, 0, 2, 2);
      out += kr * pauli(q) * kr.adjoint();
    }
    for (int p = 0; p < 4; ++p) r(p, q) = 0.5 * (pauli(p) * out).trace().real();
  }
  return r;
}

// Identity channel plus a small fixed admixture so every Kraus direction has a gradient.
Eigen::VectorXd initial_params(int n) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n * kSiteParams);
  for (int i = 0; i < n; ++i) {
    double* t = x.data() + i * kSiteParams;
    t[2 * (0 * 2 + 0)] = t[2 * (1 * 2 + 1)] = 1.0;
    for (int r = 2; r < 2 * kKraus; ++r)
      for (int c = 0; c < 2; ++c) t[2 * (r * 2 + c) + (r + c) % 2] = 0.02 * ((r * 3 + c * 5) % 7 - 3);
  }
  return x;
}

std::vector<Eigen::Matrix4d> corrections_from(const Eigen::VectorXd& x, int n) {
  std::vector<Eigen::Matrix4d> r;
  for (int i = 0; i < n; ++i) r.push_back(ptm_from_params(x.data() + i * kSiteParams));
  return r;
}

void apply_corrections(const MpoState& skel, const std::vector<Eigen::Matrix4d>& r, MpoState& out) {
  for (std::size_t i = 0; i < skel.coeff.size(); ++i)
    for (int p = 0; p < 4; ++p) {
      RMat c = RMat::Zero(skel.coeff[i][0].rows(), skel.coeff[i][0].cols());
      for (int q = 0; q < 4; ++q)
        if (r[i](p, q) != 0.0) c += r[i](p, q) * skel.coeff[i][static_cast<std::size_t>(q)];
      out.coeff[i][static_cast<std::size_t>(p)] = c;
    }
}

struct MpoFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<Observation>* obs;
  MpoState skeleton;
  mutable MpoState work;
  int inputs() const { return skeleton.n_sites() * kSiteParams; }
  static constexpr int kRowParams = 12;  // rows 1..3 of R; row 0 is fixed by trace preservation
  int values() const { return static_cast<int>(2 * obs->size()); }

  void load(const Eigen::VectorXd& x) const { apply_corrections(skeleton, corrections_from(x, skeleton.n_sites()), work); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    load(x);
    const int n = work.n_sites();
    CMat z = CMat::Identity(1, 1);
    for (int i = 0; i < n; ++i) z = z * transfer(work.coeff[static_cast<std::size_t>(i)], Eigen::Matrix2cd::Identity());
    for (std::size_t k = 0; k < obs->size(); ++k) {
      const auto& o = (*obs)[k];
      CMat v = CMat::Identity(1, 1);
      for (int i = 0; i < n; ++i) v = v * transfer(work.coeff[static_cast<std::size_t>(i)], o.ops[static_cast<std::size_t>(i)]);
      const cplx r = (v(0, 0) / z(0, 0) - o.value) / o.sigma;
      f(static_cast<Eigen::Index>(2 * k)) = r.real();
      f(static_cast<Eigen::Index>(2 * k + 1)) = r.imag();
    }
    return 0;
  }

  // d(num)/dR(P,Q) at site i = Tr(P O_i) * (L_i C^Q R_{i+1}); the normalizer is fixed by row 0.
  // The Kraus-parameter Jacobian chains this with a central difference of the 4x4 PTM.
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    load(x);
    const int n = work.n_sites();
    Eigen::MatrixXd jr = Eigen::MatrixXd::Zero(values(), n * kRowParams);
    auto envs = [&](const std::vector<Eigen::Matrix2cd>* ops, std::vector<CMat>& l, std::vector<CMat>& r) {
      std::vector<CMat> t(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        t[static_cast<std::size_t>(i)] = transfer(work.coeff[static_cast<std::size_t>(i)],
                                                  ops ? (*ops)[static_cast<std::size_t>(i)] : Eigen::Matrix2cd::Identity());
      l.assign(static_cast<std::size_t>(n + 1), CMat::Identity(1, 1));
      r.assign(static_cast<std::size_t>(n + 1), CMat::Identity(1, 1));
      for (int i = 0; i < n; ++i) l[static_cast<std::size_t>(i + 1)] = l[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
      for (int i = n - 1; i >= 0; --i) r[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i + 1)];
    };
    std::vector<CMat> zl, zr, l, r;
    envs(nullptr, zl, zr);
    const cplx z = zl[static_cast<std::size_t>(n)](0, 0);
    for (std::size_t k = 0; k < obs->size(); ++k) {
      const auto& o = (*obs)[k];
      envs(&o.ops, l, r);
      for (int i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        std::array<cplx, 4> env;
        for (int q = 0; q < 4; ++q)
          env[static_cast<std::size_t>(q)] = (l[si] * skeleton.coeff[si][static_cast<std::size_t>(q)].cast<cplx>() * r[si + 1])(0, 0);
        for (int p = 1; p < 4; ++p) {
          const cplx tro = (pauli(p) * o.ops[si]).trace();
          for (int q = 0; q < 4; ++q) {
            // Row 0 of R is fixed, so the normalizer does not move with these parameters.
            const cplx d = tro * env[static_cast<std::size_t>(q)] / z / o.sigma;
            const Eigen::Index col = i * kRowParams + (p - 1) * 4 + q;
            jr(static_cast<Eigen::Index>(2 * k), col) = d.real();
            jr(static_cast<Eigen::Index>(2 * k + 1), col) = d.imag();
          }
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXd dr(kRowParams, kSiteParams);
      Eigen::VectorXd xp = x.segment(i * kSiteParams, kSiteParams), xm = xp;
      for (int j = 0; j < kSiteParams; ++j) {
        const double h = 1e-6;
        xp(j) += h;
        xm(j) -= h;
        const Eigen::Matrix4d d = (ptm_from_params(xp.data()) - ptm_from_params(xm.data())) / (2 * h);
        for (int p = 1; p < 4; ++p)
          for (int q = 0; q < 4; ++q) dr((p - 1) * 4 + q, j) = d(p, q);
        xp(j) -= h;
        xm(j) += h;
      }
      jac.middleCols(i * kSiteParams, kSiteParams) = jr.middleCols(i * kRowParams, kRowParams) * dr;
    }
    return 0;
  }
};

}  // namespace

MpoResult mpo_reconstruct(const std::vector<MomentTable>& windows, int n_modes) {
  if (n_modes < 2 || n_modes % 2 != 0) throw DomainError("MPO reconstruction needs an even mode count >= 2");
  const int span = std::min(5, n_modes);
  for (int s = 0; s + span <= n_modes; ++s) {
    bool found = false;
    for (const auto& w : windows) {
      if (static_cast<int>(w.window.size()) != span) continue;
      bool same = true;
      for (int k = 0; k < span; ++k) same &= w.window[static_cast<std::size_t>(k)] == s + k;
      found |= same;
    }
    if (!found) throw DomainError("window coverage gap at mode " + std::to_string(s));
  }
  std::vector<Observation> obs;
  for (const auto& w : windows) {
    if (w.with_qubit) throw DomainError("MPO windows are photon-only");
    for (const auto& [key, e] : w.entries) {
      bool low = true;
      for (auto x : key.exps) low &= x <= 1;
      if (!low || key.is_identity()) continue;
      Observation o;
      o.ops.assign(static_cast<std::size_t>(n_modes), Eigen::Matrix2cd::Identity());
      for (std::size_t k = 0; k < w.window.size(); ++k) {
        const int m = w.window[k];
        if (m < 0 || m >= n_modes) throw DimensionError("window mode out of range");
        o.ops[static_cast<std::size_t>(m)] = ladder(key.exps[2 * k], key.exps[2 * k + 1]);
      }
      o.value = e.value;
      o.sigma = std::max(e.stddev, 1e-9);
      obs.push_back(std::move(o));
    }
  }
  if (obs.empty()) throw DomainError("no usable moments");

  const MpoState start = MpoState::from_skeleton(MpoSiteTensors::chain(n_modes));
  MpoFunctor f{&obs, start, start};
  Eigen::VectorXd x = initial_params(n_modes);
  Eigen::LevenbergMarquardt<MpoFunctor> lm(f);
  lm.parameters.maxfev = 400;
  const auto status = lm.minimize(x);

  MpoResult res;
  res.mpo = start;
  res.corrections = corrections_from(x, n_modes);
  apply_corrections(start, res.corrections, res.mpo);
  Eigen::VectorXd fv(f.values());
  f(x, fv);
  res.objective = fv.squaredNorm();
  res.iterations = static_cast<int>(lm.iter);
  res.converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                  status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall;
  if (n_modes <= 10) {
    const CMat dense = project_psd_trace(res.mpo.densify(), 1.0);
    std::vector<int> dims(static_cast<std::size_t>(n_modes), 2);
    res.state = MultimodeState::from_density(dims, pair_labels(n_modes / 2), dense);
  }
  return res;
}

}  // namespace drlab
