#include "drlab/util.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <numeric>

#include <omp.h>

#include "drlab/error.hpp"

namespace drlab {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

const Eigen::Matrix2cd& pauli(int k) {
  static const std::array<Eigen::Matrix2cd, 4> p = [] {
    std::array<Eigen::Matrix2cd, 4> a;
    a[0] << 1, 0, 0, 1;
    a[1] << 0, 1, 1, 0;
    a[2] << 0, cplx(0, -1), cplx(0, 1), 0;
    a[3] << 1, 0, 0, -1;
    return a;
  }();
  return p.at(static_cast<std::size_t>(k));
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

int product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

CMat kron(const CMat& a, const CMat& b) {
  CMat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

CMat kron_all(const std::vector<CMat>& ms) {
  CMat r = CMat::Identity(1, 1);
  for (const auto& m : ms) r = kron(r, m);
  return r;
}

namespace {
// Strides for big-endian indexing: left = prod dims before site, right = after.
void split(const std::vector<int>& dims, int site, int& left, int& d, int& right) {
  if (site < 0 || site >= static_cast<int>(dims.size())) throw DimensionError("site out of range");
  left = 1;
  for (int i = 0; i < site; ++i) left *= dims[i];
  d = dims[site];
  right = 1;
  for (std::size_t i = site + 1; i < dims.size(); ++i) right *= dims[i];
}
}  // namespace

CVec apply_local(const CVec& psi, const std::vector<int>& dims, int site, const CMat& op) {
  int l, d, r;
  split(dims, site, l, d, r);
  if (op.rows() != d || op.cols() != d) throw DimensionError("local operator size");
  CVec out = CVec::Zero(psi.size());
  for (int a = 0; a < l; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const cplx c = op(i, j);
        if (c == 0.0) continue;
        for (int b = 0; b < r; ++b) out((a * d + i) * r + b) += c * psi((a * d + j) * r + b);
      }
  return out;
}

CMat apply_local(const CMat& rho, const std::vector<int>& dims, int site, const CMat& op) {
  CMat tmp(rho.rows(), rho.cols());
  for (Eigen::Index c = 0; c < rho.cols(); ++c) tmp.col(c) = apply_local(CVec(rho.col(c)), dims, site, op);
  CMat out(rho.rows(), rho.cols());
  const CMat opc = op.conjugate();
  for (Eigen::Index r = 0; r < rho.rows(); ++r)
    out.row(r) = apply_local(CVec(tmp.row(r).transpose()), dims, site, opc).transpose();
  return out;
}

RVec project_simplex(const RVec& v, double s) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cum += u[k];
    const double t = (cum - s) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

CMat project_psd_trace(const CMat& h, double trace) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h));
  const RVec w = project_simplex(es.eigenvalues(), trace);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_distance(const CMat& a, const CMat& b) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a - b), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

int configured_threads() {
  if (const char* env = std::getenv("DRLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

}  // namespace drlab
