#include "drlab/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drlab/error.hpp"
#include "drlab/util.hpp"

namespace drlab {

std::string SubsystemLabel::str() const {
  if (kind == Kind::qubit) return "qubit";
  std::ostringstream os;
  os << "mode(" << time_bin << "," << (freq == Freq::w1 ? "w1" : "w2") << ")";
  return os.str();
}

SubsystemLabel SubsystemLabel::parse(const std::string& s) {
  if (s == "qubit") return qubit();
  int bin = 0;
  char f[3] = {0, 0, 0};
  if (std::sscanf(s.c_str(), "mode(%d,%2c)", &bin, f) == 2 && f[0] == 'w' &&
      (f[1] == '1' || f[1] == '2'))
    return mode(bin, f[1] == '1' ? Freq::w1 : Freq::w2);
  throw FormatError("bad subsystem label: " + s);
}

std::vector<SubsystemLabel> pair_labels(int n_logical, bool with_qubit) {
  std::vector<SubsystemLabel> l;
  if (with_qubit) l.push_back(SubsystemLabel::qubit());
  for (int k = 0; k < n_logical; ++k) {
    l.push_back(SubsystemLabel::mode(k, Freq::w2));
    l.push_back(SubsystemLabel::mode(k, Freq::w1));
  }
  return l;
}

namespace {

void check_layout(const std::vector<int>& dims, const std::vector<SubsystemLabel>& labels) {
  if (dims.empty()) throw DimensionError("state needs at least one subsystem");
  if (labels.size() != dims.size()) throw DimensionError("labels/dims length mismatch");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const bool q = labels[k].kind == SubsystemLabel::Kind::qubit;
    if (q && k != 0) throw DimensionError("qubit must be the first subsystem");
    if (q && dims[k] != 2 && dims[k] != 4) throw DimensionError("qubit dimension must be 2 or 4");
    if (!q && dims[k] != 2) throw DimensionError("photon modes have cutoff 2");
  }
  if (dims.size() > 24) throw DimensionError("too many subsystems");
}

}  // namespace

MultimodeState MultimodeState::from_ket(std::vector<int> dims, std::vector<SubsystemLabel> labels,
                                        CVec psi) {
  check_layout(dims, labels);
  MultimodeState s;
  s.dims_ = std::move(dims);
  s.labels_ = std::move(labels);
  s.dim_ = product(s.dims_);
  if (psi.size() != s.dim_) throw DimensionError("ket size does not match dims");
  s.ket_ = std::move(psi);
  s.validate();
  return s;
}

MultimodeState MultimodeState::from_density(std::vector<int> dims,
                                            std::vector<SubsystemLabel> labels, CMat rho,
                                            bool unnormalized) {
  check_layout(dims, labels);
  MultimodeState s;
  s.dims_ = std::move(dims);
  s.labels_ = std::move(labels);
  s.dim_ = product(s.dims_);
  if (rho.rows() != s.dim_ || rho.cols() != s.dim_)
    throw DimensionError("density size does not match dims");
  s.rho_ = std::move(rho);
  s.unnormalized_ = unnormalized;
  s.validate();
  return s;
}

bool MultimodeState::has_qubit() const {
  return labels_.front().kind == SubsystemLabel::Kind::qubit;
}

int MultimodeState::mode_count() const { return n_subsystems() - (has_qubit() ? 1 : 0); }

const CVec& MultimodeState::ket() const {
  if (!ket_) throw Error("state is not stored as a ket");
  return *ket_;
}

CMat MultimodeState::density() const {
  if (rho_) return *rho_;
  if (dim_ > 4096) throw DimensionError("density matrix too large to materialize");
  return (*ket_) * ket_->adjoint();
}

double MultimodeState::trace() const {
  return ket_ ? ket_->squaredNorm() : rho_->trace().real();
}

void MultimodeState::validate() const {
  if (ket_) {
    if (!ket_->allFinite()) throw DomainError("non-finite amplitude");
    if (!unnormalized_ && std::abs(ket_->squaredNorm() - 1.0) > 1e-9)
      throw DomainError("ket not normalized");
    return;
  }
  const CMat& r = *rho_;
  if (!r.allFinite()) throw DomainError("non-finite density entry");
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw DomainError("density not Hermitian");
  if (!unnormalized_ && std::abs(r.trace().real() - 1.0) > 1e-9)
    throw DomainError("density trace differs from 1");
  if (dim_ <= 2048) {
    Eigen::SelfAdjointEigenSolver<CMat> es(r, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) throw DomainError("density has negative eigenvalue");
  }
}

namespace detail {

CVec ideal_emission_ket(int n_rounds, int photon_dim, int x_g, int x_e) {
  const Eigen::Matrix2cd h = hadamard();
  CVec psi(2);
  psi << 1.0, 0.0;
  std::int64_t P = 1;
  for (int r = 0; r < n_rounds; ++r) {
    CVec rot(psi.size());
    for (std::int64_t p = 0; p < P; ++p) {
      rot(p) = h(0, 0) * psi(p) + h(0, 1) * psi(P + p);
      rot(P + p) = h(1, 0) * psi(p) + h(1, 1) * psi(P + p);
    }
    const std::int64_t P2 = P * photon_dim;
    CVec next = CVec::Zero(2 * P2);
    for (std::int64_t p = 0; p < P; ++p) {
      next(p * photon_dim + x_g) = rot(p);
      next(P2 + p * photon_dim + x_e) = rot(P + p);
    }
    psi = std::move(next);
    P = P2;
  }
  return psi;
}

CVec project_emitter_x(const CVec& psi, int sign) {
  const Eigen::Index P = psi.size() / 2;
  const double s = 1.0 / std::sqrt(2.0);
  return s * (psi.head(P) + static_cast<double>(sign) * psi.tail(P));
}

}  // namespace detail

MultimodeState make_ideal_cluster(int n_logical, Branch branch) {
  if (n_logical < 1) throw DomainError("n_logical must be >= 1");
  if (n_logical > 8) throw DimensionError("n_logical above 8");
  if (branch != Branch::plus && branch != Branch::minus) throw DomainError("unknown branch");
  // |g> -> |01> (omega1 occupied), |e> -> |10> (omega2 occupied).
  const CVec full = detail::ideal_emission_ket(n_logical, 4, 1, 2);
  CVec ph = detail::project_emitter_x(full, branch == Branch::plus ? 1 : -1);
  ph /= ph.norm();
  return MultimodeState::from_ket(std::vector<int>(2 * n_logical, 2), pair_labels(n_logical),
                                  canonical_phase(ph));
}

CVec canonical_phase(const CVec& psi) {
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    const double a = std::abs(psi(k));
    if (a > 1e-12) return psi * (std::conj(psi(k)) / a);
  }
  return psi;
}

namespace {

double uhlmann(const CMat& a, const CMat& b) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
  const RVec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMat sa = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> es2(hermitian_part(sa * b * sa), Eigen::EigenvaluesOnly);
  const double f = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return f * f;
}

}  // namespace

double fidelity(const MultimodeState& rho, const MultimodeState& target) {
  if (rho.dims() != target.dims()) throw DimensionError("fidelity: dims mismatch");
  const double nr = rho.trace(), nt = target.trace();
  double f;
  if (target.is_pure() && rho.is_pure()) {
    f = std::norm(target.ket().dot(rho.ket())) / (nr * nt);
  } else if (target.is_pure()) {
    const CVec& t = target.ket();
    f = (t.adjoint() * rho.density() * t)(0, 0).real() / (nr * nt);
  } else if (rho.is_pure()) {
    const CVec& r = rho.ket();
    f = (r.adjoint() * target.density() * r)(0, 0).real() / (nr * nt);
  } else {
    f = uhlmann(rho.density() / nr, target.density() / nt);
  }
  return std::clamp(f, 0.0, 1.0);
}

namespace {

// Physical index of each logical basis state; logical bit 0 -> pair |01>, 1 -> |10>.
std::vector<Eigen::Index> logical_indices(int n_logical) {
  std::vector<Eigen::Index> idx(std::size_t(1) << n_logical);
  for (std::size_t l = 0; l < idx.size(); ++l) {
    Eigen::Index p = 0;
    for (int k = 0; k < n_logical; ++k) {
      const int bit = (l >> (n_logical - 1 - k)) & 1;
      p = p * 4 + (bit ? 2 : 1);
    }
    idx[l] = p;
  }
  return idx;
}

}  // namespace

LogicalProjection project_logical_subspace(const MultimodeState& rho) {
  if (rho.has_qubit()) throw DimensionError("logical projection expects photon modes only");
  const int m = rho.mode_count();
  if (m % 2 != 0) throw DimensionError("odd number of photon modes");
  const int nl = m / 2;
  const auto idx = logical_indices(nl);
  const auto L = static_cast<Eigen::Index>(idx.size());
  std::vector<int> ldims(nl, 2);
  std::vector<SubsystemLabel> llabels;
  for (int k = 0; k < nl; ++k) llabels.push_back(SubsystemLabel::mode(k, Freq::w1));
  const double total = rho.trace();
  if (rho.is_pure()) {
    CVec lk(L);
    for (Eigen::Index a = 0; a < L; ++a) lk(a) = rho.ket()(idx[a]);
    const double p = lk.squaredNorm() / total;
    if (p < 1e-12) throw ZeroProbabilityError("zero trace after logical projection");
    lk /= lk.norm();
    CVec full = CVec::Zero(rho.dim());
    for (Eigen::Index a = 0; a < L; ++a) full(idx[a]) = lk(a);
    return {MultimodeState::from_ket(rho.dims(), rho.labels(), full),
            MultimodeState::from_ket(ldims, llabels, lk), p};
  }
  const CMat r = rho.density();
  CMat lr(L, L);
  for (Eigen::Index a = 0; a < L; ++a)
    for (Eigen::Index b = 0; b < L; ++b) lr(a, b) = r(idx[a], idx[b]);
  const double tr = lr.trace().real();
  const double p = tr / total;
  if (p < 1e-12) throw ZeroProbabilityError("zero trace after logical projection");
  lr /= tr;
  lr = hermitian_part(lr);
  CMat full = CMat::Zero(rho.dim(), rho.dim());
  for (Eigen::Index a = 0; a < L; ++a)
    for (Eigen::Index b = 0; b < L; ++b) full(idx[a], idx[b]) = lr(a, b);
  return {MultimodeState::from_density(rho.dims(), rho.labels(), full),
          MultimodeState::from_density(ldims, llabels, lr), p};
}

MultimodeState partial_trace(const MultimodeState& rho, const std::vector<int>& keep_in) {
  std::vector<int> keep = keep_in;
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  const int ns = rho.n_subsystems();
  if (keep.empty()) throw DimensionError("partial_trace: empty keep set");
  for (int k : keep)
    if (k < 0 || k >= ns) throw DimensionError("partial_trace: index out of range");
  const auto& dims = rho.dims();
  std::vector<bool> kept(ns, false);
  for (int k : keep) kept[k] = true;
  std::vector<int> kdims, tdims;
  std::vector<SubsystemLabel> klabels;
  for (int s = 0; s < ns; ++s) {
    if (kept[s]) {
      kdims.push_back(dims[s]);
      klabels.push_back(rho.labels()[s]);
    } else {
      tdims.push_back(dims[s]);
    }
  }
  const int DK = product(kdims), DT = product(tdims);
  // full index of (kept index, traced index)
  std::vector<Eigen::Index> full(static_cast<std::size_t>(DK) * DT);
  for (int i = 0; i < rho.dim(); ++i) {
    int rem = i, kidx = 0, tidx = 0, kmul = 1, tmul = 1;
    for (int s = ns - 1; s >= 0; --s) {
      const int digit = rem % dims[s];
      rem /= dims[s];
      if (kept[s]) {
        kidx += digit * kmul;
        kmul *= dims[s];
      } else {
        tidx += digit * tmul;
        tmul *= dims[s];
      }
    }
    full[static_cast<std::size_t>(kidx) * DT + tidx] = i;
  }
  CMat out = CMat::Zero(DK, DK);
  if (rho.is_pure()) {
    const CVec& psi = rho.ket();
    for (int t = 0; t < DT; ++t) {
      CVec v(DK);
      for (int a = 0; a < DK; ++a) v(a) = psi(full[static_cast<std::size_t>(a) * DT + t]);
      out.noalias() += v * v.adjoint();
    }
  } else {
    const CMat r = rho.density();
    for (int a = 0; a < DK; ++a)
      for (int b = 0; b < DK; ++b) {
        cplx acc = 0.0;
        for (int t = 0; t < DT; ++t)
          acc += r(full[static_cast<std::size_t>(a) * DT + t], full[static_cast<std::size_t>(b) * DT + t]);
        out(a, b) = acc;
      }
  }
  out = hermitian_part(out);
  // Relabel: a leftover qubit must stay first, which sorting guarantees.
  return MultimodeState::from_density(kdims, klabels, out, rho.unnormalized());
}

MultimodeState apply_local_op(const MultimodeState& s, int site, const CMat& op) {
  if (s.is_pure()) return MultimodeState::from_ket(s.dims(), s.labels(), apply_local(s.ket(), s.dims(), site, op));
  return MultimodeState::from_density(s.dims(), s.labels(),
                                      hermitian_part(apply_local(s.density(), s.dims(), site, op)),
                                      s.unnormalized());
}

}  // namespace drlab
