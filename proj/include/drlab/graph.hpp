#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drlab/states.hpp"

namespace drlab {

// The 24 single-qubit Cliffords modulo phase. Index 0 is the identity.
namespace clifford {
int count();
const Eigen::Matrix2cd& matrix(int index);
int index_of(const Eigen::Matrix2cd& u);  // throws if not Clifford
int identity();
int hadamard();
int pauli_x();
int pauli_z();
int phase();
}  // namespace clifford

struct PauliString {
  std::vector<char> ops;  // 'I','X','Y','Z'
  int sign = 1;
  std::string str() const;
};

struct GraphState {
  int n_vertices = 0;
  std::set<std::pair<int, int>> edges;  // stored with first < second
  std::vector<int> vop;                 // Clifford index per vertex

  explicit GraphState(int n = 0);
  void add_edge(int a, int b);
  bool has_edge(int a, int b) const;
  std::vector<int> neighbours(int v) const;
  void validate() const;
};

GraphState make_comb_graph(int n_logical);

// Comb graph with the vertex operators that turn it into make_ideal_cluster(n, plus):
// Hadamard on omega2 rails (even), Pauli-X on omega1 rails (odd).
GraphState make_dual_rail_graph(int n_logical);

// prod CZ |+>^n followed by the vertex operators. At most 16 vertices.
MultimodeState graph_to_state(const GraphState& g);

// Generators U (X_v prod_{u in N(v)} Z_u) U^dag with U the vertex operators.
std::vector<PauliString> stabilizer_generators(const GraphState& g);

// <psi|P|psi> or Tr(rho P) for a Pauli string on two-level subsystems.
double pauli_expectation(const MultimodeState& s, const PauliString& p);

}  // namespace drlab
