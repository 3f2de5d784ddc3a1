#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "drlab/channels.hpp"
#include "drlab/error.hpp"
#include "drlab/graph.hpp"
#include "drlab/kernels.hpp"
#include "drlab/tomography.hpp"
#include "drlab/util.hpp"
#include "oracle.hpp"

using namespace drlab;

namespace {

MultimodeState fock1() {
  CVec v = CVec::Zero(2);
  v(1) = 1.0;
  return MultimodeState::from_ket({2}, {SubsystemLabel::mode(0, Freq::w1)}, v);
}

MultimodeState vacuum(int n) {
  CVec v = CVec::Zero(Eigen::Index(1) << n);
  v(0) = 1.0;
  std::vector<SubsystemLabel> l;
  for (int k = 0; k < n; ++k) l.push_back(SubsystemLabel::mode(k / 2, k % 2 ? Freq::w1 : Freq::w2));
  return MultimodeState::from_ket(std::vector<int>(static_cast<std::size_t>(n), 2), l, v);
}

MomentKey key(std::vector<std::uint8_t> e, std::uint8_t p = 0) {
  MomentKey k;
  k.exps = std::move(e);
  k.pauli = p;
  return k;
}

}  // namespace

TEST(Sampling, VacuumVarianceIsHalf) {
  const auto d = synthesize_shots(vacuum(1), NoiseCalibration::uniform(1, 0.0), 200000, 7);
  double sx = 0, sy = 0;
  for (const auto& s : d.signal.samples) {
    sx += s.real() * s.real();
    sy += s.imag() * s.imag();
  }
  const double n = 200000.0;
  // Var of the sample variance of a N(0, 1/2) variable is 2 (1/2)^2 / n.
  const double tol = 3.0 * std::sqrt(0.5 / n);
  EXPECT_NEAR(sx / n, 0.5, tol);
  EXPECT_NEAR(sy / n, 0.5, tol);
}

TEST(Sampling, SinglePhotonNumber) {
  const auto d = synthesize_shots(fock1(), NoiseCalibration::uniform(1, 0.0), 400000, 11);
  double s = 0, v = 0;
  for (const auto& x : d.signal.samples) s += std::norm(x);
  for (const auto& x : d.vacuum.samples) v += std::norm(x);
  // E|S|^2 = <a a^dag> = 2 for |1>, 1 for vacuum; Var|S|^2 for |1> is 4 here.
  EXPECT_NEAR(s / 4e5 - v / 4e5, 1.0, 3.0 * std::sqrt(5.0 / 4e5));
}

TEST(Sampling, HusimiOfQubitMatchesDensity) {
  // Mean of alpha under Q of rho equals <a> = rho_01... check via a coherent-like state.
  Eigen::Matrix2cd rho;
  rho << 0.6, cplx(0.3, 0.2), cplx(0.3, -0.2), 0.4;
  Rng rng(3);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
  cplx mean = 0.0;
  const int n = 400000;
  for (int k = 0; k < n; ++k) mean += kernels::sample_husimi_qubit(rho, es.eigenvalues().maxCoeff(), rng);
  mean /= n;
  // E[alpha] under Q = <a> = Tr(rho a) = rho(1,0).
  EXPECT_NEAR(mean.real(), rho(1, 0).real(), 0.01);
  EXPECT_NEAR(mean.imag(), rho(1, 0).imag(), 0.01);
}

TEST(Sampling, DeterministicAndSerialMatchesOmp) {
  const auto psi = make_ideal_cluster(1, Branch::plus);
  const auto a = synthesize_shots(psi, NoiseCalibration::device(2), 10000, 5);
  const auto b = synthesize_shots(psi, NoiseCalibration::device(2), 10000, 5);
  EXPECT_EQ(a.signal.samples, b.signal.samples);
  kernels::PureEnsemble e{2, {1.0}, {psi.ket()}};
  std::vector<cplx> s1(2 * 10000), s2(2 * 10000);
  kernels::serial::sample_heterodyne(e, {3.5, 2.4}, 10000, 9, s1.data());
  kernels::omp::sample_heterodyne(e, {3.5, 2.4}, 10000, 9, s2.data());
  EXPECT_EQ(s1, s2);
  const CMat m1 = kernels::serial::moment_block_sums(s1.data(), 10000, 2, {0, 1}, 2, 10);
  const CMat m2 = kernels::omp::moment_block_sums(s1.data(), 10000, 2, {0, 1}, 2, 10);
  EXPECT_EQ((m1 - m2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sampling, BlockSumsMatchDirectLoop) {
  std::vector<cplx> data{{1, 2}, {0.5, -1}, {-1, 0.3}, {2, 1}, {0.1, 0.1}, {-0.7, 0.2}};
  const CMat m = kernels::serial::moment_block_sums(data.data(), 3, 2, {1, 0}, 1, 1);
  // Grid digit order: window mode 1 first, then mode 0; digit = m*2+n.
  for (int g = 0; g < 16; ++g) {
    const int d1 = g / 4, d0 = g % 4;
    cplx acc = 0.0;
    for (int s = 0; s < 3; ++s) {
      const cplx a = data[static_cast<std::size_t>(2 * s + 1)], b = data[static_cast<std::size_t>(2 * s)];
      acc += std::pow(std::conj(a), d1 / 2) * std::pow(a, d1 % 2) * std::pow(std::conj(b), d0 / 2) * std::pow(b, d0 % 2);
    }
    EXPECT_NEAR(std::abs(m(0, g) - acc), 0.0, 1e-12);
  }
}

TEST(Sampling, RejectsBadCalibration) {
  EXPECT_THROW(synthesize_shots(vacuum(2), NoiseCalibration::uniform(2, -1.0), 10, 1), DomainError);
  EXPECT_THROW(synthesize_shots(vacuum(2), NoiseCalibration::uniform(3, 1.0), 10, 1), DomainError);
}

TEST(Moments, ConvolutionRoundTripExact) {
  // Random signal table on 3 modes and thermal noise: deconvolve(convolve(x)) == x.
  Rng rng(2);
  std::normal_distribution<double> nd;
  for (double n0 : {0.0, 1.3, 3.5}) {
    MomentMap sig;
    const auto noise = thermal_noise_moments({n0, 2.4, 0.7}, 2);
    for (const auto& [k, v] : noise) {
      (void)v;
      sig[k] = k.total_order() == 0 ? cplx(1.0) : cplx(nd(rng), nd(rng));
    }
    const auto raw = convolve_moments(sig, noise);
    const auto back = deconvolve_moments(raw, noise);
    // Raw moments reach ~1e4 at high N0; the bound is relative to their size.
    for (const auto& [k, v] : sig)
      EXPECT_LT(std::abs(back.at(k) - v), 1e-12 * std::max(1.0, std::abs(raw.at(k)))) << k.str();
  }
}

TEST(Moments, ConvolutionByHand) {
  // One mode: E[S* S] = <a^dag a> + <h h^dag>, E[S*^2 S^2] = A22 + 4 A11 N11 + N22.
  MomentMap sig, noise = thermal_noise_moments({2.0}, 2);
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n) sig[key({std::uint8_t(m), std::uint8_t(n)})] = m == 0 && n == 0 ? 1.0 : 0.0;
  sig[key({1, 1})] = 0.8;
  sig[key({2, 2})] = 0.1;
  const auto raw = convolve_moments(sig, noise);
  EXPECT_NEAR(raw.at(key({1, 1})).real(), 0.8 + 3.0, 1e-12);
  EXPECT_NEAR(raw.at(key({2, 2})).real(), 0.1 + 4 * 0.8 * 3.0 + 2 * 9.0, 1e-12);
}

TEST(Moments, SinglePhotonSignature) {
  const auto d = synthesize_shots(fock1(), NoiseCalibration::uniform(1, 2.4), 1000000, 3);
  MomentOptions o;
  o.max_exp = 2;
  o.n_bootstrap = 40;
  const auto t = estimate_moments(d, {0}, o);
  const auto& n1 = t.entries.at(key({1, 1}));
  const auto& n2 = t.entries.at(key({2, 2}));
  EXPECT_NEAR(n1.value.real(), 1.0, 3 * n1.stddev);
  EXPECT_NEAR(n2.value.real(), 0.0, 3 * n2.stddev);
  EXPECT_LT(t.conjugate_symmetry_violation(), 1e-9);
}

TEST(Moments, VacuumSignalGivesZero) {
  const auto d = synthesize_shots(vacuum(2), NoiseCalibration::device(2), 200000, 4);
  MomentOptions o;
  o.n_bootstrap = 40;
  const auto t = estimate_moments(d, {0, 1}, o);
  EXPECT_EQ(t.entries.size(), 15u);
  for (const auto& [k, e] : t.entries) {
    EXPECT_GT(e.stddev, 0.0);
    EXPECT_LT(std::abs(e.value), 4 * e.stddev * std::sqrt(2.0)) << k.str();
  }
}

TEST(Moments, BootstrapScalesWithShots) {
  const auto psi = make_ideal_cluster(1, Branch::plus);
  MomentOptions o;
  o.n_bootstrap = 60;
  const auto small = estimate_moments(synthesize_shots(psi, NoiseCalibration::device(2), 20000, 8), {0, 1}, o);
  const auto big = estimate_moments(synthesize_shots(psi, NoiseCalibration::device(2), 200000, 8), {0, 1}, o);
  const auto k = key({1, 0, 0, 1});
  const double ratio = small.entries.at(k).stddev / big.entries.at(k).stddev;
  EXPECT_GT(ratio, std::sqrt(10.0) / 2);
  EXPECT_LT(ratio, std::sqrt(10.0) * 2);
}

TEST(Moments, SamplingRequirement) {
  EXPECT_EQ(sampling_requirement({0.0}, {2}), 1);
  EXPECT_EQ(sampling_requirement({2.4, 3.5}, {2, 2}), 235);
  // Three logical qubits: six modes at (3.5, 2.4) with second order each.
  const auto c = NoiseCalibration::device(6);
  const auto n = sampling_requirement(c.n0, std::vector<int>(6, 2));
  EXPECT_GT(n, 1e6);
  EXPECT_LT(n, 1e8);
}

TEST(Mle, ExactMomentsRecoverState) {
  const auto psi = make_ideal_cluster(1, Branch::plus);
  const auto r = mle_reconstruct(exact_moments(psi, {0, 1}, 1));
  EXPECT_GT(fidelity(r.state, psi), 0.999);
  EXPECT_NO_THROW(r.state.validate());
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_LE(r.history[k], r.history[k - 1] * (1 + 1e-12));
}

TEST(Mle, MixedStateAndJointQubit) {
  auto p = NoiseParams{};
  p.loss_w1 = p.loss_w2 = 0.1;
  p.dephase = 0.2;
  const auto ch = noisy_emission_channel(p);
  CMat in = CMat::Constant(2, 2, 0.5);
  const auto joint = MultimodeState::from_density({2, 2, 2}, pair_labels(1, true), ch.apply(in));
  const auto r = mle_reconstruct(exact_moments(joint, {0, 1}, 1));
  EXPECT_LT(trace_distance(r.state.density(), joint.density()), 1e-4);
}

TEST(Mle, SyntheticOneLogicalRoundTrip) {
  const auto psi = make_ideal_cluster(1, Branch::plus);
  const auto d = synthesize_shots(psi, NoiseCalibration::device(2), 1000000, 3);
  MomentOptions o;
  o.n_bootstrap = 30;
  const auto r = mle_reconstruct(estimate_moments(d, {0, 1}, o));
  EXPECT_GE(fidelity(r.state, psi), 0.98);
}

TEST(Mle, SyntheticTwoLogicalRoundTrip) {
  const auto psi = make_ideal_cluster(2, Branch::plus);
  const auto d = synthesize_shots(psi, NoiseCalibration::device(4), 1000000, 21);
  MomentOptions o;
  o.n_bootstrap = 30;
  const auto r = mle_reconstruct(estimate_moments(d, {0, 1, 2, 3}, o));
  EXPECT_GE(fidelity(r.state, psi), 0.98);
}

TEST(ShotFiles, RoundTrip) {
  const auto d = synthesize_joint_shots(
      MultimodeState::from_density({2, 2, 2}, pair_labels(1, true),
                                   ideal_emission_channel().apply(CMat::Constant(2, 2, 0.5))),
      NoiseCalibration::device(2), 500, 3);
  const std::string path = testing::TempDir() + "rec.drshot";
  write_heterodyne(path, d);
  const auto back = read_heterodyne(path);
  EXPECT_EQ(back.signal.samples, d.signal.samples);
  EXPECT_EQ(back.signal.qubit_basis, d.signal.qubit_basis);
  EXPECT_EQ(back.signal.qubit_outcome, d.signal.qubit_outcome);
  EXPECT_EQ(back.vacuum.samples, d.vacuum.samples);
  std::remove((path + ".vac").c_str());
  EXPECT_THROW(read_heterodyne(path), FormatError);
  {
    std::ofstream f(path, std::ios::binary);
    f << "garbage";
  }
  EXPECT_THROW(read_shot_record(path), FormatError);
}

TEST(Mpo, SkeletonIsIdealCluster) {
  for (int n = 1; n <= 4; ++n) {
    const auto mpo = MpoState::from_skeleton(MpoSiteTensors::chain(2 * n));
    const CMat rho = mpo.densify();
    const auto psi = make_ideal_cluster(n, Branch::plus);
    EXPECT_NEAR(std::abs(psi.ket().dot(rho * psi.ket())), 1.0, 1e-12) << n;
  }
  const auto t = MpoSiteTensors::chain(6);
  EXPECT_EQ(t.first.size(), 1u);
  EXPECT_EQ(t.first[0].size(), 4u);
  EXPECT_EQ(t.last.size(), 4u);
  EXPECT_EQ(t.last[0].size(), 1u);
}

TEST(Mpo, ExpectationMatchesDense) {
  const auto mpo = MpoState::from_skeleton(MpoSiteTensors::chain(4));
  const CMat rho = mpo.densify();
  std::vector<Eigen::Matrix2cd> ops{pauli(1), pauli(3), Eigen::Matrix2cd::Identity(), pauli(2)};
  std::vector<CMat> f(ops.begin(), ops.end());
  EXPECT_NEAR(std::abs(mpo.expectation(ops) - (rho * kron_all(f)).trace()), 0.0, 1e-12);
}

TEST(Mpo, ExactWindowsReconstructIdeal) {
  const auto psi = make_ideal_cluster(3, Branch::plus);
  std::vector<MomentTable> w;
  for (int s = 0; s + 5 <= 6; ++s) w.push_back(exact_moments(psi, {s, s + 1, s + 2, s + 3, s + 4}, 1, 1e-3));
  const auto r = mpo_reconstruct(w, 6);
  EXPECT_GT(fidelity(r.state, psi), 0.999);
  const auto g = make_dual_rail_graph(3);
  for (const auto& p : stabilizer_generators(g)) EXPECT_GT(pauli_expectation(r.state, p), 0.99);
}

TEST(Mpo, NoisyExactWindowsClose) {
  auto p = NoiseParams{};
  p.loss_w1 = p.loss_w2 = 0.07;
  p.dephase = 0.23;
  const auto rho = compose_chain(noisy_emission_channel(p), 3, Projection::x_plus);
  std::vector<MomentTable> w;
  for (int s = 0; s + 5 <= 6; ++s) w.push_back(exact_moments(rho, {s, s + 1, s + 2, s + 3, s + 4}, 1, 1e-3));
  const auto r = mpo_reconstruct(w, 6);
  EXPECT_LT(trace_distance(r.state.density(), rho.density()), 0.05);
  EXPECT_THROW(mpo_reconstruct({w[0]}, 6), DomainError);
}

TEST(ProcessTomo, ChoiFitFromExactOutputs) {
  auto p = NoiseParams{};
  p.loss_w1 = p.loss_w2 = 0.07;
  p.dephase = 0.23;
  const auto ch = noisy_emission_channel(p);
  std::vector<CMat> ins, outs;
  for (const auto& l : process_input_labels()) {
    const auto v = process_input_state(l);
    ins.push_back(v * v.adjoint());
    outs.push_back(ch.apply(ins.back()));
  }
  double res = 1.0;
  const auto fit = fit_choi(ins, outs, {2, 2, 2}, &res);
  EXPECT_LT(res, 1e-6);
  EXPECT_LT((fit.choi() - ch.choi()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_THROW(fit_choi({ins[0], ins[1]}, {outs[0], outs[1]}, {2, 2, 2}), DomainError);
}

TEST(ProcessTomo, IdealChannelFromShots) {
  const auto data = synthesize_process_data(ideal_emission_channel(), NoiseCalibration::device(2), 100000, 5);
  MomentOptions o;
  o.n_bootstrap = 20;
  const auto r = process_tomography(data, o);
  EXPECT_GT(r.process_fidelity, 0.95);
  EXPECT_EQ(r.reconstructed.size(), 6u);
}
