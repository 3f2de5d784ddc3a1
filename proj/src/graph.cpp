#include "drlab/graph.hpp"

#include <cmath>
#include <deque>

#include "drlab/error.hpp"
#include "drlab/util.hpp"

namespace drlab {

namespace clifford {
namespace {

Eigen::Matrix2cd normalize_phase(const Eigen::Matrix2cd& u) {
  for (int k = 0; k < 4; ++k) {
    const cplx c = u(k % 2, k / 2);
    if (std::abs(c) > 1e-9) return u * (std::abs(c) / c);
  }
  return u;
}

const std::vector<Eigen::Matrix2cd>& group() {
  static const std::vector<Eigen::Matrix2cd> g = [] {
    Eigen::Matrix2cd s;
    s << 1, 0, 0, kI;
    const Eigen::Matrix2cd gens[2] = {drlab::hadamard(), s};
    std::vector<Eigen::Matrix2cd> out{Eigen::Matrix2cd::Identity()};
    std::deque<Eigen::Matrix2cd> todo{out.front()};
    while (!todo.empty()) {
      const Eigen::Matrix2cd cur = todo.front();
      todo.pop_front();
      for (const auto& gen : gens) {
        const Eigen::Matrix2cd n = normalize_phase(gen * cur);
        bool seen = false;
        for (const auto& o : out) seen = seen || (o - n).cwiseAbs().maxCoeff() < 1e-9;
        if (!seen) {
          out.push_back(n);
          todo.push_back(n);
        }
      }
    }
    return out;
  }();
  return g;
}

}  // namespace

int count() { return static_cast<int>(group().size()); }

const Eigen::Matrix2cd& matrix(int index) {
  if (index < 0 || index >= count()) throw DomainError("Clifford index out of range");
  return group()[static_cast<std::size_t>(index)];
}

int index_of(const Eigen::Matrix2cd& u) {
  const Eigen::Matrix2cd n = normalize_phase(u);
  const auto& g = group();
  for (std::size_t k = 0; k < g.size(); ++k)
    if ((g[k] - n).cwiseAbs().maxCoeff() < 1e-9) return static_cast<int>(k);
  throw DomainError("matrix is not a single-qubit Clifford");
}

int identity() { return 0; }
int hadamard() { return index_of(drlab::hadamard()); }
int pauli_x() { return index_of(pauli(1)); }
int pauli_z() { return index_of(pauli(3)); }
int phase() {
  Eigen::Matrix2cd s;
  s << 1, 0, 0, kI;
  return index_of(s);
}

}  // namespace clifford

std::string PauliString::str() const {
  std::string s = sign < 0 ? "-" : "+";
  s.append(ops.begin(), ops.end());
  return s;
}

GraphState::GraphState(int n) : n_vertices(n), vop(static_cast<std::size_t>(n), 0) {
  if (n < 0) throw DomainError("negative vertex count");
}

void GraphState::add_edge(int a, int b) {
  if (a == b) throw DomainError("self-loop");
  if (a < 0 || b < 0 || a >= n_vertices || b >= n_vertices) throw DomainError("edge vertex out of range");
  edges.insert({std::min(a, b), std::max(a, b)});
}

bool GraphState::has_edge(int a, int b) const {
  return edges.count({std::min(a, b), std::max(a, b)}) > 0;
}

std::vector<int> GraphState::neighbours(int v) const {
  std::vector<int> n;
  for (const auto& [a, b] : edges) {
    if (a == v) n.push_back(b);
    if (b == v) n.push_back(a);
  }
  return n;
}

void GraphState::validate() const {
  if (static_cast<int>(vop.size()) != n_vertices) throw DimensionError("vop size mismatch");
  for (const auto& [a, b] : edges)
    if (a == b || a < 0 || b >= n_vertices) throw DomainError("invalid edge");
  for (int v : vop)
    if (v < 0 || v >= clifford::count()) throw DomainError("vop outside the Clifford group");
}

GraphState make_comb_graph(int n_logical) {
  if (n_logical < 1) throw DomainError("n_logical must be >= 1");
  GraphState g(2 * n_logical);
  for (int k = 0; k < n_logical; ++k) {
    g.add_edge(2 * k, 2 * k + 1);
    if (k + 1 < n_logical) g.add_edge(2 * k + 1, 2 * k + 3);
  }
  return g;
}

GraphState make_dual_rail_graph(int n_logical) {
  GraphState g = make_comb_graph(n_logical);
  const int h = clifford::hadamard(), x = clifford::pauli_x();
  for (int v = 0; v < g.n_vertices; ++v) g.vop[static_cast<std::size_t>(v)] = (v % 2 == 0) ? h : x;
  return g;
}

MultimodeState graph_to_state(const GraphState& g) {
  g.validate();
  const int n = g.n_vertices;
  if (n < 1 || n > 16) throw DimensionError("graph_to_state supports 1..16 vertices");
  const Eigen::Index D = Eigen::Index(1) << n;
  CVec psi(D);
  const double amp = std::pow(2.0, -0.5 * n);
  for (Eigen::Index x = 0; x < D; ++x) {
    int parity = 0;
    for (const auto& [a, b] : g.edges) parity ^= ((x >> (n - 1 - a)) & 1) & ((x >> (n - 1 - b)) & 1);
    psi(x) = parity ? -amp : amp;
  }
  const std::vector<int> dims(static_cast<std::size_t>(n), 2);
  for (int v = 0; v < n; ++v)
    if (g.vop[static_cast<std::size_t>(v)] != 0)
      psi = apply_local(psi, dims, v, clifford::matrix(g.vop[static_cast<std::size_t>(v)]));
  std::vector<SubsystemLabel> labels;
  for (int v = 0; v < n; ++v) labels.push_back(SubsystemLabel::mode(v / 2, v % 2 == 0 ? Freq::w2 : Freq::w1));
  return MultimodeState::from_ket(dims, labels, psi);
}

namespace {

// U P U^dag as (sign, pauli index).
std::pair<int, int> conjugate_pauli(const Eigen::Matrix2cd& u, int p) {
  const Eigen::Matrix2cd c = u * pauli(p) * u.adjoint();
  for (int q = 0; q < 4; ++q) {
    if ((c - pauli(q)).cwiseAbs().maxCoeff() < 1e-9) return {1, q};
    if ((c + pauli(q)).cwiseAbs().maxCoeff() < 1e-9) return {-1, q};
  }
  throw DomainError("conjugation left the Pauli group");
}

}  // namespace

std::vector<PauliString> stabilizer_generators(const GraphState& g) {
  g.validate();
  static const char names[4] = {'I', 'X', 'Y', 'Z'};
  std::vector<PauliString> out;
  for (int v = 0; v < g.n_vertices; ++v) {
    std::vector<int> ops(static_cast<std::size_t>(g.n_vertices), 0);
    ops[static_cast<std::size_t>(v)] = 1;
    for (int u : g.neighbours(v)) ops[static_cast<std::size_t>(u)] = 3;
    PauliString ps;
    for (int w = 0; w < g.n_vertices; ++w) {
      const auto [s, q] = conjugate_pauli(clifford::matrix(g.vop[static_cast<std::size_t>(w)]),
                                          ops[static_cast<std::size_t>(w)]);
      ps.sign *= s;
      ps.ops.push_back(names[q]);
    }
    out.push_back(ps);
  }
  return out;
}

double pauli_expectation(const MultimodeState& s, const PauliString& p) {
  if (static_cast<int>(p.ops.size()) != s.n_subsystems()) throw DimensionError("Pauli string length");
  auto idx = [](char c) {
    switch (c) {
      case 'I': return 0;
      case 'X': return 1;
      case 'Y': return 2;
      case 'Z': return 3;
    }
    throw DomainError("bad Pauli character");
  };
  auto apply_all = [&](CVec v) {
    for (std::size_t k = 0; k < p.ops.size(); ++k)
      if (p.ops[k] != 'I') v = apply_local(v, s.dims(), static_cast<int>(k), pauli(idx(p.ops[k])));
    return v;
  };
  double val;
  if (s.is_pure()) {
    val = s.ket().dot(apply_all(s.ket())).real();
  } else {
    const CMat r = s.density();
    cplx acc = 0.0;
    for (Eigen::Index c = 0; c < r.cols(); ++c) acc += apply_all(CVec(r.col(c)))(c);
    val = acc.real();
  }
  return p.sign * val / s.trace();
}

}  // namespace drlab
