#include <gtest/gtest.h>

#include "drlab/error.hpp"
#include "drlab/graph.hpp"
#include "drlab/json_io.hpp"
#include "drlab/states.hpp"
#include "drlab/util.hpp"
#include "oracle.hpp"

using namespace drlab;

namespace {

CVec two_logical_plus() {
  // (|w1w1> + |w1w2> + |w2w1> - |w2w2>)/2 with w1 = |01>, w2 = |10>
  CVec v = CVec::Zero(16);
  v(0b0101) = 0.5;
  v(0b0110) = 0.5;
  v(0b1001) = 0.5;
  v(0b1010) = -0.5;
  return v;
}

}  // namespace

TEST(IdealCluster, TwoLogicalPlusMatchesClosedForm) {
  const auto s = make_ideal_cluster(2, Branch::plus);
  ASSERT_TRUE(s.is_pure());
  const CVec d = canonical_phase(s.ket()) - two_logical_plus();
  EXPECT_LT(d.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IdealCluster, OneLogicalIsUniform) {
  const auto s = make_ideal_cluster(1, Branch::plus);
  CVec v = CVec::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  EXPECT_LT((canonical_phase(s.ket()) - v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IdealCluster, MatchesLinearClusterOracle) {
  for (int n = 1; n <= 5; ++n) {
    const auto s = make_ideal_cluster(n, Branch::plus);
    const auto ref = oracle::dual_rail_embed(oracle::linear_cluster(n), n);
    EXPECT_NEAR(oracle::overlap2(ref, s.ket()), 1.0, 1e-12) << n;
  }
}

TEST(IdealCluster, MinusBranchIsZCorrected) {
  for (int n : {2, 3}) {
    const auto plus = make_ideal_cluster(n, Branch::plus);
    const auto minus = make_ideal_cluster(n, Branch::minus);
    const auto fixed = apply_local_op(minus, 2 * n - 1, pauli(3));
    EXPECT_NEAR(fidelity(fixed, plus), 1.0, 1e-12);
  }
}

TEST(IdealCluster, RejectsBadSize) {
  EXPECT_THROW(make_ideal_cluster(0, Branch::plus), DomainError);
  EXPECT_THROW(make_ideal_cluster(9, Branch::plus), DimensionError);
}

TEST(CombGraph, Edges) {
  const auto g2 = make_comb_graph(2);
  const std::set<std::pair<int, int>> e2 = {{0, 1}, {1, 3}, {2, 3}};
  EXPECT_EQ(g2.edges, e2);
  EXPECT_EQ(make_comb_graph(1).edges.size(), 1u);
  const auto g4 = make_comb_graph(4);
  EXPECT_EQ(g4.n_vertices, 8);
  EXPECT_EQ(g4.edges.size(), 7u);
}

TEST(CombGraph, BruteForceCircuitAgrees) {
  for (int n = 1; n <= 4; ++n) {
    const auto g = make_dual_rail_graph(n);
    std::vector<std::pair<int, int>> e(g.edges.begin(), g.edges.end());
    std::vector<Eigen::Matrix2cd> gates;
    for (int v = 0; v < 2 * n; ++v) gates.push_back(v % 2 == 0 ? oracle::H() : oracle::X());
    const auto ref = oracle::cz_circuit(2 * n, e, gates);
    EXPECT_NEAR(oracle::overlap2(ref, graph_to_state(g).ket()), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(graph_to_state(g), make_ideal_cluster(n, Branch::plus)), 1.0, 1e-10) << n;
  }
}

TEST(CombGraph, PlainVopsGivePlusStates) {
  GraphState g(3);
  const auto s = graph_to_state(g);
  for (Eigen::Index k = 0; k < s.ket().size(); ++k) EXPECT_NEAR(std::abs(s.ket()(k)), 1.0 / std::sqrt(8.0), 1e-12);
}

TEST(CombGraph, StabilizersHold) {
  for (int n = 1; n <= 3; ++n) {
    const auto g = make_dual_rail_graph(n);
    const auto s = graph_to_state(g);
    for (const auto& p : stabilizer_generators(g)) EXPECT_NEAR(pauli_expectation(s, p), 1.0, 1e-12) << p.str();
    const auto bare = make_comb_graph(n);
    const auto sb = graph_to_state(bare);
    for (const auto& p : stabilizer_generators(bare)) EXPECT_NEAR(pauli_expectation(sb, p), 1.0, 1e-12);
  }
}

TEST(CombGraph, FirstAndThirdHadamardReading) {
  // Hadamards on vertices 0 and 2 alone do not give the logical cluster.
  GraphState g = make_comb_graph(2);
  g.vop = {clifford::hadamard(), clifford::identity(), clifford::hadamard(), clifford::identity()};
  EXPECT_LT(fidelity(graph_to_state(g), make_ideal_cluster(2, Branch::plus)), 0.99);
}

TEST(CombGraph, CliffordGroupSize) {
  EXPECT_EQ(clifford::count(), 24);
  EXPECT_THROW(GraphState(2).add_edge(1, 1), DomainError);
}

TEST(Fidelity, Basics) {
  const auto psi = make_ideal_cluster(2, Branch::plus);
  EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-12);
  const auto mixed = MultimodeState::from_density(psi.dims(), psi.labels(), CMat::Identity(16, 16) / 16.0);
  EXPECT_NEAR(fidelity(mixed, psi), 1.0 / 16.0, 1e-12);
  const auto phased = MultimodeState::from_ket(psi.dims(), psi.labels(), psi.ket() * std::polar(1.0, 0.7));
  EXPECT_NEAR(fidelity(psi, phased), 1.0, 1e-12);
  EXPECT_THROW(fidelity(psi, make_ideal_cluster(1, Branch::plus)), DimensionError);
}

TEST(Fidelity, UhlmannSymmetric) {
  CMat a = CMat::Zero(4, 4), b = CMat::Zero(4, 4);
  a.diagonal() << 0.5, 0.3, 0.2, 0.0;
  b.diagonal() << 0.25, 0.25, 0.25, 0.25;
  const auto sa = MultimodeState::from_density({2, 2}, pair_labels(1), a);
  const auto sb = MultimodeState::from_density({2, 2}, pair_labels(1), b);
  double expect = 0;
  for (int k = 0; k < 4; ++k) expect += std::sqrt(a(k, k).real() * b(k, k).real());
  EXPECT_NEAR(fidelity(sa, sb), expect * expect, 1e-10);
  EXPECT_NEAR(fidelity(sb, sa), expect * expect, 1e-10);
}

TEST(LogicalProjection, IdealIsUnchanged) {
  const auto psi = make_ideal_cluster(2, Branch::plus);
  const auto p = project_logical_subspace(psi);
  EXPECT_NEAR(p.probability, 1.0, 1e-12);
  EXPECT_EQ(p.logical.dim(), 4);
  const CVec ref = oracle::linear_cluster(2);
  EXPECT_NEAR(std::abs(ref.dot(p.logical.density() * ref)), 1.0, 1e-12);
}

TEST(LogicalProjection, LossRaisesFidelity) {
  const auto psi = make_ideal_cluster(2, Branch::plus);
  // Mix in the vacuum on the first pair.
  CMat rho = 0.8 * psi.density();
  CVec vac = CVec::Zero(16);
  vac(0b0001) = 1.0;
  rho += 0.2 * vac * vac.adjoint();
  const auto s = MultimodeState::from_density(psi.dims(), psi.labels(), rho);
  const auto p = project_logical_subspace(s);
  EXPECT_NEAR(p.probability, 0.8, 1e-12);
  EXPECT_GT(fidelity(p.physical, psi), fidelity(s, psi));
  EXPECT_NEAR(p.physical.trace(), 1.0, 1e-12);
}

TEST(LogicalProjection, AllLossThrows) {
  CVec v = CVec::Zero(4);
  v(0) = 1.0;
  EXPECT_THROW(project_logical_subspace(MultimodeState::from_ket({2, 2}, pair_labels(1), v)), ZeroProbabilityError);
}

TEST(PartialTrace, Marginals) {
  const auto psi = make_ideal_cluster(1, Branch::plus);
  const auto m = partial_trace(psi, {1});
  EXPECT_LT((m.density() - CMat::Identity(2, 2) / 2.0).norm(), 1e-12);
  EXPECT_NEAR(m.trace(), 1.0, 1e-12);
  EXPECT_THROW(partial_trace(psi, {5}), DimensionError);
  EXPECT_THROW(partial_trace(psi, {}), DimensionError);

  // Qubit marginal of alpha|g>|01> + beta|e>|10>.
  const double a = 0.6, b = 0.8;
  CVec v = CVec::Zero(8);
  v(0b001) = a;
  v(0b110) = b;
  const auto s = MultimodeState::from_ket({2, 2, 2}, pair_labels(1, true), v);
  const CMat q = partial_trace(s, {0}).density();
  EXPECT_NEAR(q(0, 0).real(), a * a, 1e-12);
  EXPECT_NEAR(q(1, 1).real(), b * b, 1e-12);
  EXPECT_NEAR(std::abs(q(0, 1)), 0.0, 1e-12);
  // Emitter in |g>: photons left in |01>.
  CVec g = CVec::Zero(8);
  g(0b001) = 1.0;
  const CMat ph = partial_trace(MultimodeState::from_ket({2, 2, 2}, pair_labels(1, true), g), {1, 2}).density();
  EXPECT_NEAR(ph(1, 1).real(), 1.0, 1e-12);
}

TEST(StateInvariants, ValidationCatchesBadInput) {
  CMat bad = CMat::Zero(4, 4);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  EXPECT_THROW(MultimodeState::from_density({2, 2}, pair_labels(1), bad).validate(), DomainError);
  CMat nh = CMat::Identity(4, 4) / 4.0;
  nh(0, 1) = 0.1;
  EXPECT_THROW(MultimodeState::from_density({2, 2}, pair_labels(1), nh).validate(), DomainError);
  for (int n = 1; n <= 4; ++n) EXPECT_NO_THROW(make_ideal_cluster(n, Branch::minus).validate());
}

TEST(StateJson, RoundTrip) {
  const auto psi = make_ideal_cluster(2, Branch::plus);
  const auto back = state_from_json(state_to_json(psi));
  EXPECT_EQ(back.dims(), psi.dims());
  EXPECT_EQ(back.labels(), psi.labels());
  EXPECT_NEAR(fidelity(back, psi), 1.0, 1e-12);
  EXPECT_EQ(SubsystemLabel::parse(SubsystemLabel::mode(3, Freq::w2).str()), SubsystemLabel::mode(3, Freq::w2));
  EXPECT_THROW(SubsystemLabel::parse("mode(x"), FormatError);
}
