#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "drlab/error.hpp"
#include "drlab/physics.hpp"

namespace drlab {

namespace {

constexpr int kGrid = 2048;
constexpr double kHalfSpan = 200.0;

struct Model {
  int nq, nr, nf;
  int dim() const { return nq * nr * nf; }
  int index(int q, int r, int f) const { return (q * nr + r) * nf + f; }
};

// Qubit b, resonator a, filter f; the sixth-order term contributes alpha_h * C(n,3).
Eigen::MatrixXd hamiltonian(const Model& m, const DeviceParams& p, double wq, double a, double ah) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m.dim(), m.dim());
  for (int q = 0; q < m.nq; ++q)
    for (int r = 0; r < m.nr; ++r)
      for (int f = 0; f < m.nf; ++f) {
        const int i = m.index(q, r, f);
        h(i, i) = wq * q + 0.5 * a * q * (q - 1) + ah / 6.0 * q * (q - 1) * (q - 2) + p.w_r * r + p.w_f * f;
        if (q + 1 < m.nq && r >= 1) {  // g (a b^dag + h.c.)
          const int j = m.index(q + 1, r - 1, f);
          h(i, j) = h(j, i) = p.g * std::sqrt(double(q + 1) * r);
        }
        if (f + 1 < m.nf && r >= 1) {  // J (a f^dag + h.c.)
          const int j = m.index(q, r - 1, f + 1);
          h(i, j) = h(j, i) = p.J * std::sqrt(double(f + 1) * r);
        }
      }
  return h;
}

struct Dressed {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  Eigen::Index state(const Model& m, int q) const {
    Eigen::Index best;
    es.eigenvectors().row(m.index(q, 0, 0)).cwiseAbs().maxCoeff(&best);
    return best;
  }
  double energy(const Model& m, int q) const { return es.eigenvalues()(state(m, q)); }
};

Eigen::Vector3d transitions(const Model& m, const DeviceParams& p, const Eigen::Vector3d& x) {
  Dressed d{Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hamiltonian(m, p, x(0), x(1), x(2)))};
  const double e0 = d.energy(m, 0), e1 = d.energy(m, 1), e2 = d.energy(m, 2), e3 = d.energy(m, 3);
  return {e1 - e0, e2 - e1, e3 - e2};
}

// Bare (w_q, alpha, alpha_h) reproducing the measured dressed transitions.
Eigen::Vector3d solve_bare(const Model& m, const DeviceParams& p) {
  const Eigen::Vector3d target(p.w_ge, p.w_ef, p.w_fh);
  Eigen::Vector3d x(p.w_ge, p.alpha(), p.alpha_h());
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector3d r = transitions(m, p, x) - target;
    if (r.cwiseAbs().maxCoeff() < 1e-9) return x;
    Eigen::Matrix3d jac;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d xp = x;
      xp(k) += 1e-4;
      jac.col(k) = (transitions(m, p, xp) - target - r) / 1e-4;
    }
    x -= jac.partialPivLu().solve(r);
  }
  throw ConvergenceError("system_spectra: bare qubit parameters did not converge");
}

// Most prominent interior local minimum of y, refined by a parabola.
double dip_position(const Waveform& w, const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  const int reach = static_cast<int>(30.0 / w.step);
  double best_prom = -1.0;
  int best = -1;
  for (int k = 1; k + 1 < n; ++k) {
    if (!(y[k] < y[k - 1] && y[k] <= y[k + 1])) continue;
    double left = y[k], right = y[k];
    for (int j = std::max(0, k - reach); j < k; ++j) left = std::max(left, y[j]);
    for (int j = k + 1; j <= std::min(n - 1, k + reach); ++j) right = std::max(right, y[j]);
    const double prom = std::min(left, right) - y[k];
    if (prom > best_prom) {
      best_prom = prom;
      best = k;
    }
  }
  if (best < 0) throw ConvergenceError("system_spectra: no resonator feature in the window");
  const double a = y[best - 1], b = y[best], c = y[best + 1];
  const double den = a - 2 * b + c;
  const double shift = den > 0 ? 0.5 * (a - c) / den : 0.0;
  return w.axis(static_cast<std::size_t>(best)) + shift * w.step;
}

}  // namespace

SpectraResult system_spectra_at(const DeviceParams& p, QubitLevel qs, int nq, int nr, int nf) {
  p.validate();
  if (qs != QubitLevel::g && qs != QubitLevel::e) throw DomainError("system_spectra: qubit state must be g or e");
  if (nq < 4 || nr < 2 || nf < 2) throw DomainError("system_spectra: cutoffs too small");
  const Model m{nq, nr, nf};
  const Eigen::Vector3d bare = solve_bare(m, p);
  const Eigen::MatrixXd h = hamiltonian(m, p, bare(0), bare(1), bare(2));
  Dressed d{Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h)};
  const Eigen::Index s = d.state(m, static_cast<int>(qs));
  const double e0 = d.es.eigenvalues()(s);
  const Eigen::VectorXd psi = d.es.eigenvectors().col(s);

  // v = f^dag psi, evolved with the filter-damped effective Hamiltonian.
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(m.dim());
  CMat heff = h.cast<cplx>();
  for (int q = 0; q < nq; ++q)
    for (int r = 0; r < nr; ++r)
      for (int f = 0; f < nf; ++f) {
        const int i = m.index(q, r, f);
        heff(i, i) -= cplx(0.0, 0.5 * p.kappa_f * f);
        if (f + 1 < nf) v(m.index(q, r, f + 1)) += std::sqrt(double(f + 1)) * psi(i);
      }
  Eigen::ComplexEigenSolver<CMat> ces(heff);
  const CMat& rv = ces.eigenvectors();
  const Eigen::VectorXcd left = v.adjoint() * rv;
  const Eigen::VectorXcd right = rv.partialPivLu().solve(v);

  SpectraResult out;
  out.bare_wq = bare(0);
  out.bare_alpha = bare(1);
  out.bare_alpha_h = bare(2);
  Waveform& w = out.spectrum;
  w.domain = Waveform::Domain::frequency;
  w.start = p.w_r_dressed_g - kHalfSpan;
  w.step = 2.0 * kHalfSpan / (kGrid - 1);
  w.samples.resize(kGrid);
  std::vector<double> power(kGrid);
  // One-sided transform of <f(t) f^dag(0)>: sum_k c_k (-i) / (lambda_k - E - w).
  for (int k = 0; k < kGrid; ++k) {
    const double om = w.axis(static_cast<std::size_t>(k));
    cplx acc = 0.0;
    for (Eigen::Index j = 0; j < rv.cols(); ++j)
      acc += left(j) * right(j) * cplx(0.0, -1.0) / (ces.eigenvalues()(j) - e0 - om);
    w.samples[static_cast<std::size_t>(k)] = acc;
    power[static_cast<std::size_t>(k)] = acc.real();
  }
  out.resonator_feature = dip_position(w, power);
  return out;
}

SpectraResult system_spectra(const DeviceParams& p, QubitLevel qs) {
  SpectraResult r = system_spectra_at(p, qs, 4, 3, 3);
  const SpectraResult hi = system_spectra_at(p, qs, 4, 4, 4);
  r.cutoff_shift = hi.resonator_feature - r.resonator_feature;
  r.converged = std::abs(r.cutoff_shift) <= 0.5;
  return r;
}

}  // namespace drlab
