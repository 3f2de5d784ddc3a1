#pragma once

// Independent reference computations used by the tests. Deliberately naive:
// explicit loops over basis states, no shared code with the library.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline int bit(long idx, int q, int n) { return static_cast<int>((idx >> (n - 1 - q)) & 1); }

// prod CZ |+>^n then single-qubit gates, by brute-force amplitude loops.
inline Vec cz_circuit(int n, const std::vector<std::pair<int, int>>& edges,
                      const std::vector<Eigen::Matrix2cd>& gates) {
  const long dim = 1L << n;
  Vec psi(dim);
  for (long k = 0; k < dim; ++k) {
    int parity = 0;
    for (auto [a, b] : edges) parity ^= bit(k, a, n) & bit(k, b, n);
    psi(k) = (parity ? -1.0 : 1.0) / std::sqrt(double(dim));
  }
  for (int q = 0; q < n; ++q) {
    Vec out = Vec::Zero(dim);
    for (long k = 0; k < dim; ++k) {
      const int b = bit(k, q, n);
      const long k0 = k & ~(1L << (n - 1 - q));
      for (int a = 0; a < 2; ++a) out(k0 | (long(a) << (n - 1 - q))) += gates[q](a, b) * psi(k);
    }
    psi = out;
  }
  return psi;
}

inline Eigen::Matrix2cd H() {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}
inline Eigen::Matrix2cd X() {
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  return x;
}
inline Eigen::Matrix2cd Z() {
  Eigen::Matrix2cd z;
  z << 1, 0, 0, -1;
  return z;
}
inline Eigen::Matrix2cd Id() { return Eigen::Matrix2cd::Identity(); }

inline double overlap2(const Vec& a, const Vec& b) { return std::norm(a.dot(b)); }

// Linear cluster on n qubits: prod CZ(k,k+1) |+>^n.
inline Vec linear_cluster(int n) {
  std::vector<std::pair<int, int>> e;
  for (int k = 0; k + 1 < n; ++k) e.push_back({k, k + 1});
  return cz_circuit(n, e, std::vector<Eigen::Matrix2cd>(n, Id()));
}

// Embed an n-qubit logical ket into 2n dual-rail modes: 0 -> |01>, 1 -> |10>.
inline Vec dual_rail_embed(const Vec& logical, int n) {
  Vec out = Vec::Zero(1L << (2 * n));
  for (long k = 0; k < logical.size(); ++k) {
    long idx = 0;
    for (int q = 0; q < n; ++q) idx = (idx << 2) | (bit(k, q, n) ? 2 : 1);
    out(idx) = logical(k);
  }
  return out;
}

// Partial transpose of a 4x4 two-qubit matrix on the second qubit, then negativity.
inline double negativity(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd pt;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) pt(2 * a + b, 2 * c + d) = rho(2 * a + d, 2 * c + b);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt);
  double s = 0;
  for (int k = 0; k < 4; ++k) s += std::max(0.0, -es.eigenvalues()(k));
  return s;
}

}  // namespace oracle
