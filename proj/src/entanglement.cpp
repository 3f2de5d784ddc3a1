#include "drlab/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "drlab/error.hpp"
#include "drlab/util.hpp"

namespace drlab {

char basis_char(MeasBasis b) {
  switch (b) {
    case MeasBasis::Z: return 'Z';
    case MeasBasis::X: return 'X';
    case MeasBasis::Y: return 'Y';
    default: return '-';
  }
}

std::vector<int> MeasurementPlan::kept() const {
  std::vector<int> k;
  for (std::size_t m = 0; m < basis.size(); ++m)
    if (basis[m] == MeasBasis::none) k.push_back(static_cast<int>(m));
  return k;
}

void MeasurementPlan::validate(int n_modes) const {
  if (static_cast<int>(basis.size()) != n_modes) throw DimensionError("plan length differs from mode count");
  if (kept().size() != 2) throw DomainError("plan must keep exactly two subsystems");
}

std::string MeasurementPlan::str() const {
  std::string s;
  for (auto b : basis) s.push_back(basis_char(b));
  return s;
}

MeasurementPlan le_plan_physical(int n_logical, int i, int j) {
  const int n = 2 * n_logical;
  if (n_logical < 1 || i < 0 || j < 0 || i >= n || j >= n || i == j) throw DomainError("invalid LE mode pair");
  if (i > j) std::swap(i, j);
  const int ri = i / 2, rj = j / 2;
  MeasurementPlan p;
  p.basis.assign(static_cast<std::size_t>(n), MeasBasis::X);
  for (int m = 0; m < n; ++m) {
    const int r = m / 2;
    if (r < ri || r > rj) p.basis[static_cast<std::size_t>(m)] = MeasBasis::Z;
  }
  p.basis[static_cast<std::size_t>(i)] = p.basis[static_cast<std::size_t>(j)] = MeasBasis::none;
  return p;
}

MeasurementPlan le_plan_logical(int n_logical, int i, int j) {
  if (n_logical < 2 || i < 0 || j < 0 || i >= n_logical || j >= n_logical || i == j)
    throw DomainError("invalid LE logical pair");
  if (i > j) std::swap(i, j);
  MeasurementPlan p;
  p.basis.assign(static_cast<std::size_t>(n_logical), MeasBasis::Z);
  for (int q = i + 1; q < j; ++q) p.basis[static_cast<std::size_t>(q)] = MeasBasis::X;
  p.basis[static_cast<std::size_t>(i)] = p.basis[static_cast<std::size_t>(j)] = MeasBasis::none;
  return p;
}

double negativity(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd pt;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) pt(2 * a + b, 2 * c + d) = rho(2 * a + d, 2 * c + b);
  pt = 0.5 * (pt + pt.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int k = 0; k < 4; ++k)
    if (es.eigenvalues()(k) < 0) s -= es.eigenvalues()(k);
  return s;
}

namespace {

Eigen::Vector2cd outcome_bra(MeasBasis b, int o) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (b) {
    case MeasBasis::Z: return o == 0 ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
    case MeasBasis::X: return o == 0 ? Eigen::Vector2cd(h, h) : Eigen::Vector2cd(h, -h);
    case MeasBasis::Y: return o == 0 ? Eigen::Vector2cd(h, cplx(0, -h)) : Eigen::Vector2cd(h, cplx(0, h));
    default: throw DomainError("kept subsystem has no outcome");
  }
}

// Contract subsystem `pos` (of n two-level factors) with a bra.
CVec contract_ket(const CVec& psi, int n, int pos, const Eigen::Vector2cd& bra) {
  const Eigen::Index right = Eigen::Index(1) << (n - 1 - pos);
  const Eigen::Index left = psi.size() / (2 * right);
  CVec out(left * right);
  for (Eigen::Index l = 0; l < left; ++l)
    for (Eigen::Index r = 0; r < right; ++r)
      out(l * right + r) = bra(0) * psi((l * 2) * right + r) + bra(1) * psi((l * 2 + 1) * right + r);
  return out;
}

CMat contract_density(const CMat& rho, int n, int pos, const Eigen::Vector2cd& bra) {
  const Eigen::Index right = Eigen::Index(1) << (n - 1 - pos);
  const Eigen::Index left = rho.rows() / (2 * right);
  const Eigen::Index d = left * right;
  CMat out(d, d);
  for (Eigen::Index l1 = 0; l1 < left; ++l1)
    for (Eigen::Index r1 = 0; r1 < right; ++r1)
      for (Eigen::Index l2 = 0; l2 < left; ++l2)
        for (Eigen::Index r2 = 0; r2 < right; ++r2) {
          cplx acc = 0.0;
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
              acc += bra(x) * std::conj(bra(y)) * rho((l1 * 2 + x) * right + r1, (l2 * 2 + y) * right + r2);
          out(l1 * right + r1, l2 * right + r2) = acc;
        }
  return out;
}

struct DenseLe {
  const MeasurementPlan* plan;
  std::vector<int> measured;  // measured in descending order, so positions stay valid
  double neg = 0.0, weight = 0.0;
  long long leaves = 0;

  void run_ket(const CVec& psi, int n, std::size_t depth) {
    if (depth == measured.size()) {
      const Eigen::Vector4cd v = psi;
      const Eigen::Matrix4cd r = v * v.adjoint();
      const double w = r.trace().real();
      ++leaves;
      weight += w;
      if (w >= 1e-12) neg += negativity(r);
      return;
    }
    const int m = measured[depth];
    for (int o = 0; o < 2; ++o) {
      CVec next = contract_ket(psi, n, m, outcome_bra(plan->basis[static_cast<std::size_t>(m)], o));
      if (next.squaredNorm() < 1e-24) continue;
      run_ket(next, n - 1, depth + 1);
    }
  }
  void run_density(const CMat& rho, int n, std::size_t depth) {
    if (depth == measured.size()) {
      const Eigen::Matrix4cd r = rho;
      const double w = r.trace().real();
      ++leaves;
      weight += w;
      if (w >= 1e-12) neg += negativity(r);
      return;
    }
    const int m = measured[depth];
    for (int o = 0; o < 2; ++o) {
      CMat next = contract_density(rho, n, m, outcome_bra(plan->basis[static_cast<std::size_t>(m)], o));
      if (std::abs(next.trace()) < 1e-24) continue;
      run_density(next, n - 1, depth + 1);
    }
  }
};

}  // namespace

LeResult localizable_entanglement(const MultimodeState& rho, const MeasurementPlan& plan) {
  if (rho.has_qubit()) throw DomainError("LE needs a state of two-level photon modes or logical qubits");
  const int n = rho.n_subsystems();
  plan.validate(n);
  DenseLe e{&plan, {}};
  for (int m = n - 1; m >= 0; --m)
    if (plan.basis[static_cast<std::size_t>(m)] != MeasBasis::none) e.measured.push_back(m);
  if (rho.is_pure()) e.run_ket(rho.ket(), n, 0);
  else e.run_density(rho.density(), n, 0);
  const auto k = plan.kept();
  LeResult r;
  r.i = k[0];
  r.j = k[1];
  const double tr = rho.trace();
  r.value = e.neg / tr;
  r.outcome_count = e.leaves;
  r.probability_sum = e.weight / tr;
  return r;
}

LeResult localizable_entanglement(const std::vector<MultimodeState>& ensemble, const MeasurementPlan& plan) {
  if (ensemble.empty()) throw DomainError("empty ensemble");
  double s = 0.0, ss = 0.0;
  LeResult out;
  for (const auto& st : ensemble) {
    const LeResult r = localizable_entanglement(st, plan);
    s += r.value;
    ss += r.value * r.value;
    out = r;
  }
  const double k = static_cast<double>(ensemble.size());
  out.value = s / k;
  out.stderr_ = k > 1 ? std::sqrt(std::max(0.0, (ss - s * s / k) / (k - 1))) : 0.0;
  return out;
}

LeResult le_logical(const MultimodeState& rho_logical, LogicalQubitIndex i, LogicalQubitIndex j) {
  return localizable_entanglement(rho_logical, le_plan_logical(rho_logical.n_subsystems(), i.value, j.value));
}

std::vector<LeMatrixEntry> le_matrix(const MultimodeState& rho) {
  std::vector<LeMatrixEntry> out;
  const int n = rho.mode_count();
  if (rho.has_qubit() || n % 2 != 0) throw DomainError("LE matrix needs dual-rail pairs");
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      const LeResult r = localizable_entanglement(rho, le_plan_physical(n / 2, i, j));
      out.push_back({j, i, false, r.value, r.stderr_});
    }
  if (n >= 4) {
    const auto lp = project_logical_subspace(rho);
    for (int i = 0; i < n / 2; ++i)
      for (int j = i + 1; j < n / 2; ++j) {
        const LeResult r = le_logical(lp.logical, {i}, {j});
        out.push_back({i, j, true, r.value, r.stderr_});
      }
  }
  return out;
}

void write_le_csv(const std::string& path, const std::vector<LeMatrixEntry>& m) {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open " + path);
  f << "row,col,kind,value,stderr\n";
  f.precision(12);
  for (const auto& e : m) f << e.row << ',' << e.col << ',' << (e.logical ? "logical" : "physical") << ',' << e.value << ',' << e.stderr_ << '\n';
}

}  // namespace drlab
