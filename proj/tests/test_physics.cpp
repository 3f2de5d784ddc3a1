#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "drlab/channels.hpp"
#include "drlab/error.hpp"
#include "drlab/physics.hpp"

using namespace drlab;

namespace {

const DeviceParams kDev = DeviceParams::preset("paper-device");

Eigen::Vector4cd level(int k) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(k) = 1.0;
  return v;
}

double power(const Waveform& w) {
  double s = 0.0;
  for (const auto& x : w.samples) s += std::norm(x);
  return s * w.step;
}

}  // namespace

TEST(Stark, ZeroDriveGivesZero) {
  EXPECT_EQ(stark_shift(Transition::f0g1, 0.0, 2600.0, -319.0), 0.0);
  EXPECT_EQ(stark_shift(Transition::h0e1, 0.0, 3300.0, -319.0), 0.0);
}

TEST(Stark, PrintedZeroOfH0e1) {
  EXPECT_EQ(stark_shift(Transition::h0e1, 500.0, -319.0, -319.0), 0.0);
}

TEST(Stark, PolesRaise) {
  const double a = -319.0;
  for (double dq : {0.0, -a, -2 * a}) {
    EXPECT_THROW(stark_shift(Transition::f0g1, 100.0, dq, a), PoleError);
    EXPECT_THROW(stark_shift(Transition::h0e1, 100.0, dq, a), PoleError);
  }
  EXPECT_THROW(stark_shift(Transition::h0e1, 100.0, -3 * a, a), PoleError);
  EXPECT_NO_THROW(stark_shift(Transition::f0g1, 100.0, -3 * a, a));
}

// Second-order perturbation theory becomes exact as the drive vanishes.
TEST(Stark, WeakDriveMatchesDiagonalization) {
  for (auto t : {Transition::f0g1, Transition::h0e1})
    for (double dq : {-900.0, 450.0, 2600.0}) {
      const double a = stark_shift(t, 0.05, dq, kDev.alpha());
      const double b = stark_shift_oracle(t, 0.05, dq, kDev.alpha());
      EXPECT_NEAR(a, b, 1e-4 * std::abs(b)) << dq;
    }
}

TEST(Stark, OperatingDrivesWithinFivePercent) {
  const double dq1 = kDev.w_ge - kDev.wd_f0g1;
  const double a1 = stark_shift(Transition::f0g1, kDev.omega_f0g1, dq1, kDev.alpha());
  EXPECT_NEAR(a1, stark_shift_oracle(Transition::f0g1, kDev.omega_f0g1, dq1, kDev.alpha()), 0.05 * std::abs(a1));
  const double dq2 = kDev.w_ge - kDev.wd_h0e1;
  const double a2 = stark_shift(Transition::h0e1, kDev.omega_h0e1, dq2, kDev.alpha());
  EXPECT_NEAR(a2, stark_shift_oracle(Transition::h0e1, kDev.omega_h0e1, dq2, kDev.alpha()), 0.05 * std::abs(a2));
}

TEST(Stark, SweepWithinFivePercent) {
  for (double off = -100.0; off <= 100.0; off += 25.0)
    for (double frac : {0.25, 0.5, 0.75, 1.0}) {
      const double dq1 = kDev.w_ge - kDev.wd_f0g1 + off, w1 = frac * kDev.omega_f0g1;
      const double a1 = stark_shift(Transition::f0g1, w1, dq1, kDev.alpha());
      EXPECT_NEAR(a1, stark_shift_oracle(Transition::f0g1, w1, dq1, kDev.alpha()), 0.05 * std::abs(a1));
      const double dq2 = kDev.w_ge - kDev.wd_h0e1 + off, w2 = frac * kDev.omega_h0e1;
      const double a2 = stark_shift(Transition::h0e1, w2, dq2, kDev.alpha());
      EXPECT_NEAR(a2, stark_shift_oracle(Transition::h0e1, w2, dq2, kDev.alpha()), 0.05 * std::abs(a2));
    }
}

TEST(Device, PresetAndJsonRoundTrip) {
  EXPECT_NO_THROW(kDev.validate());
  EXPECT_LT(kDev.alpha(), 0.0);
  EXPECT_NEAR(kDev.alpha(), -318.9, 1e-9);
  EXPECT_NEAR(kDev.alpha_h(), 1.0 * (7347.6 - 2 * 7702.9 + 8021.8), 1e-9);
  DeviceParams p = kDev;
  p.g = 150.0;
  p.T1_ef = {20.0, 1.0};
  const auto q = device_from_json(device_to_json(p));
  EXPECT_EQ(q.g, 150.0);
  EXPECT_EQ(q.T1_ef.mean, 20.0);
  EXPECT_EQ(q.T1_ef.sd, 1.0);
  EXPECT_EQ(q.w_fh, kDev.w_fh);
  EXPECT_EQ(device_from_json("{\"g\": 100}").g, 100.0);
  EXPECT_THROW(device_from_json("{\"bogus\": 1}"), FormatError);
  EXPECT_THROW(device_from_json("[1,2"), FormatError);
  EXPECT_THROW(device_from_json("{\"w_ef\": 9000}"), DomainError);
  EXPECT_THROW(DeviceParams::preset("nope"), DomainError);
}

TEST(Waveform, ParsevalAndPeak) {
  const auto m = exponential_mode(kDev.gamma_f0g1, -16.0, 1.0, 0.0025, 2048);
  EXPECT_NEAR(power(m), 1.0 - std::exp(-kDev.gamma_f0g1), 1e-2);
  const auto s = m.spectrum(10300.0);
  EXPECT_NEAR(power(s), power(m), 1e-9);
  std::size_t best = 0;
  for (std::size_t k = 0; k < s.samples.size(); ++k)
    if (std::abs(s.samples[k]) > std::abs(s.samples[best])) best = k;
  EXPECT_NEAR(s.axis(best), 10300.0 - 16.0, s.step);
}

TEST(Waveform, OverlapBasics) {
  const auto m = exponential_mode(kDev.gamma_f0g1, 3.0, 1.0, 0.0025, 2048);
  EXPECT_NEAR(std::abs(spectral_overlap(m, m) - 1.0), 0.0, 1e-12);
  const auto n = exponential_mode(kDev.gamma_h0e1, -7.0, 0.8, 0.0025, 2048);
  const cplx a = spectral_overlap(m, n), b = spectral_overlap(n, m);
  EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-12);
  EXPECT_LE(std::abs(a), 1.0);
  Waveform x, y;
  x.samples = {1.0, 1.0, 0.0, 0.0};
  y.samples = {0.0, 0.0, 1.0, 1.0};
  EXPECT_EQ(std::abs(spectral_overlap(x, y)), 0.0);
  Waveform z;
  z.samples = {0.0, 0.0};
  EXPECT_THROW(spectral_overlap(x, z), DomainError);
}

// Discrete sums of the two exponentials are geometric series.
TEST(Waveform, EmittedModeOverlap) {
  const double g1 = kDev.gamma_f0g1, g2 = kDev.gamma_h0e1, dt = 0.0025, dw = kDev.w2 - kDev.w1;
  const int m = 400;
  const auto a = exponential_mode(g1, -0.5 * dw, 1.0, dt, 2048);
  const auto b = exponential_mode(g2, 0.5 * dw, 1.0, dt, 2048);
  const cplx r = std::exp(cplx(-0.5 * (g1 + g2), -2.0 * std::numbers::pi * dw) * dt);
  auto geo = [m](cplx q) { return (1.0 - std::pow(q, m)) / (1.0 - q); };
  const cplx cross = std::sqrt(g1 * g2) * geo(r) * dt;
  const double n1 = std::sqrt(g1 * geo(std::exp(-g1 * dt)).real() * dt);
  const double n2 = std::sqrt(g2 * geo(std::exp(-g2 * dt)).real() * dt);
  const cplx ov = spectral_overlap(a, b);
  EXPECT_NEAR(std::abs(ov - cross / (n1 * n2)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(spectral_overlap(a.spectrum(), b.spectrum()) - ov), 0.0, 1e-12);
  EXPECT_GT(std::abs(ov), 0.03 / 1.5);
  EXPECT_LT(std::abs(ov), 0.03 * 1.5);
}

TEST(Waveform, ResampledOverlap) {
  const auto a = exponential_mode(kDev.gamma_f0g1, 0.0, 1.0, 0.0025, 512);
  const auto b = exponential_mode(kDev.gamma_f0g1, 0.0, 1.0, 0.00125, 1024);
  EXPECT_NEAR(std::abs(spectral_overlap(a, b)), 1.0, 1e-4);
}

TEST(Spectra, DressedResonatorPosition) {
  const auto s = system_spectra(kDev, QubitLevel::g);
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.resonator_feature, kDev.w_r_dressed_g, 2.0);
}

TEST(Spectra, DispersiveShift) {
  const auto g = system_spectra(kDev, QubitLevel::g);
  const auto e = system_spectra(kDev, QubitLevel::e);
  EXPECT_NEAR(g.resonator_feature - e.resonator_feature, kDev.two_chi, 0.1 * kDev.two_chi);
  EXPECT_EQ(g.spectrum.samples.size(), 2048u);
  EXPECT_NEAR(g.spectrum.axis(0), kDev.w_r_dressed_g - 200.0, 1e-9);
  EXPECT_NEAR(g.spectrum.axis(2047), kDev.w_r_dressed_g + 200.0, 1e-9);
}

// Solved bare parameters reproduce the dressed transitions; the shift is near g^2/Delta.
TEST(Spectra, BareParametersAndDispersiveEstimate) {
  const auto s = system_spectra(kDev, QubitLevel::g);
  EXPECT_LT(s.bare_alpha, 0.0);
  EXPECT_GT(s.bare_wq, kDev.w_ge);
  const double delta = kDev.w_r - s.bare_wq;
  const double est = kDev.g * kDev.g / delta;
  EXPECT_NEAR(s.resonator_feature - kDev.w_r, est, 0.2 * est);
}

// With the qubit decoupled the filter response vanishes at the bare resonator.
TEST(Spectra, DecoupledQubit) {
  DeviceParams p = kDev;
  p.g = 0.0;
  const auto g = system_spectra(p, QubitLevel::g);
  const auto e = system_spectra(p, QubitLevel::e);
  EXPECT_NEAR(g.resonator_feature, e.resonator_feature, 1e-9);
  EXPECT_NEAR(g.resonator_feature, p.w_r, 0.05);
  EXPECT_NEAR(g.bare_wq, p.w_ge, 1e-6);
  EXPECT_THROW(system_spectra(p, QubitLevel::f), DomainError);
}

// Qubit decoupled: the response is i / (w - w_f + i k/2 - J^2 / (w - w_r)).
TEST(Spectra, TwoModeResolvent) {
  DeviceParams p = kDev;
  p.g = 0.0;
  const auto s = system_spectra_at(p, QubitLevel::g, 4, 3, 3);
  for (std::size_t k = 0; k < s.spectrum.samples.size(); k += 37) {
    const double w = s.spectrum.axis(k);
    const cplx ref = cplx(0.0, 1.0) / (w - p.w_f + cplx(0.0, 0.5 * p.kappa_f) - p.J * p.J / (w - p.w_r));
    EXPECT_NEAR(std::abs(s.spectrum.samples[k] - ref), 0.0, 1e-10 * std::max(1.0, std::abs(ref))) << w;
  }
}

TEST(Emission, SinglePhotonDecayLaw) {
  EmissionOptions o;
  o.decoherence = false;
  for (double t : {0.7, 1.0, 1.5}) {
    o.duration = t;
    const auto r = emission_simulation(kDev, level(2), o);
    EXPECT_NEAR(r.photons_w1, 1.0 - std::exp(-kDev.gamma_f0g1 * t), 1e-5) << t;
    EXPECT_NEAR(r.photons_w2, 0.0, 1e-12);
  }
  o.duration = 1.0;
  const auto r = emission_simulation(kDev, level(3), o);
  EXPECT_NEAR(r.photons_w2, 1.0 - std::exp(-kDev.gamma_h0e1), 1e-5);
  const auto ref = exponential_mode(kDev.gamma_f0g1, 0.0, 1.0, 0.0025, 400);
  EXPECT_NEAR(r.mode_w1.norm(), 1.0, 1e-12);
  EXPECT_GT(std::abs(spectral_overlap(r.mode_w1, ref)), 0.99999);
}

TEST(Emission, JointStateOfSuperposition) {
  EmissionOptions o;
  o.decoherence = false;
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(2) = v(3) = 1.0 / std::sqrt(2.0);
  const auto r = emission_simulation(kDev, v, o);
  EXPECT_EQ(r.joint.dims(), (std::vector<int>{4, 2, 2}));
  // Target g|01> + e|10> over (emitter, omega2, omega1).
  CVec t = CVec::Zero(16);
  t(0 * 4 + 1) = t(1 * 4 + 2) = 1.0 / std::sqrt(2.0);
  EXPECT_GT(std::abs(t.dot(r.joint.density() * t)), 0.999);
}

TEST(Emission, InvariantsWithDecoherence) {
  Eigen::Vector4cd v;
  v << 0.5, 0.5, 0.5, 0.5;
  const auto r = emission_simulation(kDev, v);
  EXPECT_LT(r.max_trace_drift, 1e-8);
  EXPECT_GE(r.min_eigenvalue, -1e-8);
  EXPECT_NO_THROW(r.joint.validate());
}

TEST(Emission, RejectsShortDuration) {
  EmissionOptions o;
  o.duration = 0.2;
  EXPECT_THROW(emission_simulation(kDev, level(2), o), DomainError);
}

TEST(Emission, TwoComponentSpectrum) {
  EmissionOptions o;
  o.decoherence = false;
  Eigen::Vector4cd v;
  v << 0.5, 0.5, 0.5, 0.5;
  const double wc = 0.5 * (kDev.w1 + kDev.w2);
  const auto mix = emitted_field(kDev, v, o).spectrum(wc);
  const auto blue = emitted_field(kDev, Eigen::Vector4cd(level(0) + level(2)) / std::sqrt(2.0), o).spectrum(wc);
  const auto red = emitted_field(kDev, Eigen::Vector4cd(level(1) + level(3)) / std::sqrt(2.0), o).spectrum(wc);
  double lo = 0, hi = 0;
  for (std::size_t k = 0; k < mix.samples.size(); ++k) (mix.axis(k) < wc ? lo : hi) += std::norm(mix.samples[k]);
  EXPECT_NEAR(lo / hi, 1.0, 0.05);
  const double pm = power(mix), pb = power(blue), pr = power(red);
  double l1 = 0.0;
  for (std::size_t k = 0; k < mix.samples.size(); ++k)
    l1 += std::abs(std::norm(mix.samples[k]) / pm - 0.5 * (std::norm(blue.samples[k]) / pb + std::norm(red.samples[k]) / pr));
  EXPECT_LT(l1 * mix.step, 0.1);
}

TEST(Emission, ZeroDecoherenceIsIdealChannel) {
  EmissionOptions o;
  o.decoherence = false;
  EXPECT_GT(process_fidelity(simulated_emission_channel(kDev, o)), 0.999);
}

TEST(Emission, EfficiencyWithoutDecoherence) {
  EmissionOptions o;
  o.decoherence = false;
  o.duration = 3.0;
  EXPECT_NEAR(photon_generation_efficiency(kDev, Transition::f0g1, o), 1.0, 1e-6);
  EXPECT_NEAR(photon_generation_efficiency(kDev, Transition::h0e1, o), 1.0, 1e-6);
}

TEST(Emission, EfficienciesWithDecoherence) {
  EXPECT_NEAR(photon_generation_efficiency(kDev, Transition::f0g1), 0.969, 0.02);
  EXPECT_NEAR(photon_generation_efficiency(kDev, Transition::h0e1), 0.967, 0.02);
}

TEST(Emission, CoherenceLimit) {
  const auto c = coherence_limit(kDev, 10, 2024);
  EXPECT_EQ(c.fidelities.size(), 10u);
  const auto again = coherence_limit(kDev, 10, 2024);
  EXPECT_EQ(c.fidelities, again.fidelities);
  EXPECT_NEAR(c.mean, 0.894, 0.02);
}
