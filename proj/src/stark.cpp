#include <cmath>

#include <Eigen/Eigenvalues>

#include "drlab/error.hpp"
#include "drlab/physics.hpp"

namespace drlab {

namespace {

void check_pole(double x, const char* what) {
  if (std::abs(x) < 1e-6) throw PoleError(std::string("stark shift pole: ") + what);
}

// Levels whose energy difference is the Raman transition: f - g or h - e.
std::pair<int, int> levels(Transition t) { return t == Transition::f0g1 ? std::pair{0, 2} : std::pair{1, 3}; }

}  // namespace

double stark_shift(Transition t, double omega, double dq, double a) {
  check_pole(dq, "delta_q = 0");
  check_pole(dq + a, "delta_q = -alpha");
  check_pole(dq + 2 * a, "delta_q = -2 alpha");
  const double w2 = omega * omega;
  if (t == Transition::f0g1) return a * (2 * dq + a) / (2 * dq * (dq + a) * (dq + 2 * a)) * w2;
  check_pole(dq + 3 * a, "delta_q = -3 alpha");
  return a * (2 * dq + 3 * a) * (dq - a) / (2 * dq * (dq + a) * (dq + 2 * a) * (dq + 3 * a)) * w2;
}

// Dressed levels are followed by their largest overlap with the bare Fock state.
double stark_shift_oracle(Transition t, double omega, double dq, double a, int levels_n) {
  if (levels_n < 5) throw DomainError("stark oracle needs at least 5 levels");
  const int n = levels_n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = dq * k + 0.5 * a * k * (k - 1);
  for (int k = 1; k < n; ++k) h(k, k - 1) = h(k - 1, k) = 0.5 * omega * std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  auto dressed = [&](int bare) {
    Eigen::Index best;
    es.eigenvectors().row(bare).cwiseAbs().maxCoeff(&best);
    return es.eigenvalues()(best);
  };
  const auto [lo, hi] = levels(t);
  const double bare = h(hi, hi) - h(lo, lo);
  return dressed(hi) - dressed(lo) - bare;
}

}  // namespace drlab
