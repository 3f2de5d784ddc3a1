#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <omp.h>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "drlab/channels.hpp"
#include "drlab/error.hpp"
#include "drlab/physics.hpp"
#include "drlab/util.hpp"

namespace drlab {

namespace {

namespace ode = boost::numeric::odeint;
using State = std::vector<cplx>;

constexpr int kLevels = 4;   // g e f h
constexpr int kDim = 16;     // emitter (x) omega2 cavity (x) omega1 cavity
constexpr int kTable = 20000;
constexpr int kChecks = 100;
constexpr double kFieldDt = 0.0025;  // us
constexpr int kFieldSamples = 2048;

CMat unit(int n, int i, int j) {
  CMat m = CMat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

// Emitter jump operators: the two emission channels first, then T1 ladder and dephasing.
struct EmitterModel {
  CMat l1, l2;
  std::vector<CMat> others;
};

EmitterModel emitter_model(const DeviceParams& p, const EmissionOptions& opt, const DecoherenceDraw& d) {
  EmitterModel m;
  m.l1 = std::sqrt(p.gamma_f0g1) * unit(kLevels, 0, 2);
  m.l2 = std::sqrt(p.gamma_h0e1) * unit(kLevels, 1, 3);
  if (!opt.decoherence) return m;
  const double out[kLevels] = {0.0, 1.0 / d.T1_ge, 1.0 / d.T1_ef, 1.0 / d.T1_fh};
  for (int k = 1; k < kLevels; ++k) m.others.push_back(std::sqrt(out[k]) * unit(kLevels, k - 1, k));
  const double t2[3] = {d.T2_ge, d.T2_ef, d.T2_fh};
  for (int k = 0; k < 3; ++k) {
    // Pure dephasing of k <-> k+1 is what T2 leaves after half the two T1 rates.
    const double gphi = std::max(0.0, 1.0 / t2[k] - 0.5 * (out[k] + out[k + 1]));
    if (gphi == 0.0) continue;
    CMat proj = CMat::Zero(kLevels, kLevels);
    for (int j = k + 1; j < kLevels; ++j) proj(j, j) = 1.0;
    m.others.push_back(std::sqrt(2.0 * gphi) * proj);
  }
  return m;
}

// Column-stacked Liouvillian of the emitter alone.
CMat liouvillian(const EmitterModel& m) {
  const CMat id = CMat::Identity(kLevels, kLevels);
  CMat lv = CMat::Zero(kLevels * kLevels, kLevels * kLevels);
  auto add = [&](const CMat& j) {
    const CMat jj = j.adjoint() * j;
    lv += kron(j.conjugate(), j) - 0.5 * kron(id, jj) - 0.5 * kron(jj.transpose(), id);
  };
  add(m.l1);
  add(m.l2);
  for (const auto& j : m.others) add(j);
  return lv;
}

CVec vec(const CMat& m) { return Eigen::Map<const CVec>(m.data(), m.size()); }
CMat unvec(const CVec& v, int n) { return Eigen::Map<const CMat>(v.data(), n, n); }

// <L(t)> of the emitter on a uniform table, with its running integral of |u|^2.
struct ModeTable {
  double dt = 0.0;
  std::vector<cplx> u;
  std::vector<double> cum;

  cplx value(double t) const {
    const double x = std::clamp(t / dt, 0.0, double(u.size() - 1));
    const auto k = std::min(static_cast<std::size_t>(x), u.size() - 2);
    const double s = x - double(k);
    return (1.0 - s) * u[k] + s * u[k + 1];
  }
  double integral(double t) const {
    const double x = std::clamp(t / dt, 0.0, double(u.size() - 1));
    const auto k = std::min(static_cast<std::size_t>(x), u.size() - 2);
    const double part = (x - double(k)) * dt;
    return cum[k] + 0.5 * part * (std::norm(u[k]) + std::norm(value(t)));
  }
  // Virtual-cavity coupling that absorbs exactly this mode.
  cplx coupling(double t) const {
    const double i = integral(t);
    return i > 0.0 ? -std::conj(value(t)) / std::sqrt(i) : 0.0;
  }
};

ModeTable mode_table(const CMat& lv, const CMat& rho0, const CMat& l, double duration) {
  ModeTable t;
  t.dt = duration / kTable;
  const CMat step = (lv * t.dt).exp();
  CVec r = vec(rho0);
  t.u.resize(kTable + 1);
  t.cum.assign(kTable + 1, 0.0);
  for (int k = 0; k <= kTable; ++k) {
    t.u[static_cast<std::size_t>(k)] = (l * unvec(r, kLevels)).trace();
    if (k > 0)
      t.cum[static_cast<std::size_t>(k)] =
          t.cum[static_cast<std::size_t>(k - 1)] +
          0.5 * t.dt * (std::norm(t.u[static_cast<std::size_t>(k - 1)]) + std::norm(t.u[static_cast<std::size_t>(k)]));
    r = step * r;
  }
  return t;
}

CMat superposition(int a, int b) {
  CVec v = CVec::Zero(kLevels);
  v(a) = v(b) = 1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

// Cascaded emitter plus two absorbing virtual cavities.
class Cascade {
 public:
  Cascade(const DeviceParams& p, const EmissionOptions& opt, const DecoherenceDraw& d) : opt_(opt) {
    if (!(opt.duration > 0.0)) throw DomainError("emission duration must be positive");
    const EmitterModel m = emitter_model(p, opt, d);
    const CMat lv = liouvillian(m);
    // Mode functions from the coherent part of (g+f)/sqrt2 and (e+h)/sqrt2.
    mode1_ = mode_table(lv, superposition(0, 2), m.l1, opt.duration);
    mode2_ = mode_table(lv, superposition(1, 3), m.l2, opt.duration);
    const CMat i2 = CMat::Identity(2, 2), i4 = CMat::Identity(kLevels, kLevels);
    const CMat a = unit(2, 0, 1);
    auto emitter = [&](const CMat& x) { return kron(kron(x, i2), i2); };
    l1_ = emitter(m.l1);
    l2_ = emitter(m.l2);
    c2_ = kron(kron(i4, a), i2);
    c1_ = kron(kron(i4, i2), a);
    static_k_ = CMat::Zero(kDim, kDim);
    for (const auto& j : m.others) {
      others_.push_back(emitter(j));
      static_k_ -= 0.5 * others_.back().adjoint() * others_.back();
    }
  }

  const ModeTable& mode1() const { return mode1_; }
  const ModeTable& mode2() const { return mode2_; }

  void rhs(const State& x, State& dx, double t) const {
    const Eigen::Map<const CMat> rho(x.data(), kDim, kDim);
    Eigen::Map<CMat> d(dx.data(), kDim, kDim);
    const cplx g1 = mode1_.coupling(t), g2 = mode2_.coupling(t);
    const CMat j1 = l1_ + std::conj(g1) * c1_;
    const CMat j2 = l2_ + std::conj(g2) * c2_;
    // Cascaded coupling H = (L2^dag L1 - L1^dag L2) / 2i with L2 = g^* c.
    const CMat h = cplx(0.0, -0.5) * (g1 * c1_.adjoint() * l1_ - std::conj(g1) * l1_.adjoint() * c1_ +
                                     g2 * c2_.adjoint() * l2_ - std::conj(g2) * l2_.adjoint() * c2_);
    const CMat k = static_k_ - cplx(0.0, 1.0) * h - 0.5 * (j1.adjoint() * j1 + j2.adjoint() * j2);
    d.noalias() = k * rho + rho * k.adjoint() + j1 * rho * j1.adjoint() + j2 * rho * j2.adjoint();
    for (const auto& j : others_) d.noalias() += j * rho * j.adjoint();
  }

  struct Run {
    CMat rho;
    double drift = 0.0;
    double min_eig = 0.0;
  };

  // Emitter operator rho0 with both cavities empty. Retries with tighter tolerances on drift.
  Run evolve(const CMat& rho0, bool hermitian) const {
    const double t0 = 1e-9 * opt_.duration;
    double rtol = opt_.rtol, atol = opt_.atol;
    for (int attempt = 0; attempt < 4; ++attempt) {
      CMat full = CMat::Zero(kDim, kDim);
      for (int i = 0; i < kLevels; ++i)
        for (int j = 0; j < kLevels; ++j) full(4 * i, 4 * j) = rho0(i, j);
      const cplx tr0 = full.trace();
      State x(full.data(), full.data() + full.size());
      std::vector<double> times;
      for (int k = 0; k <= kChecks; ++k) times.push_back(t0 + (opt_.duration - t0) * k / kChecks);
      Run run;
      auto observe = [&](const State& s, double) {
        const Eigen::Map<const CMat> r(s.data(), kDim, kDim);
        run.drift = std::max(run.drift, std::abs(r.trace() - tr0));
        if (hermitian) {
          Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
          run.min_eig = std::min(run.min_eig, es.eigenvalues().minCoeff());
        }
      };
      auto f = [this](const State& s, State& ds, double t) { rhs(s, ds, t); };
      ode::integrate_times(ode::make_dense_output(atol, rtol, ode::runge_kutta_dopri5<State>()), f, x, times.begin(),
                           times.end(), 1e-6 * opt_.duration, observe);
      if (run.drift <= 1e-6) {
        run.rho = Eigen::Map<const CMat>(x.data(), kDim, kDim);
        return run;
      }
      rtol *= 0.1;
      atol *= 0.1;
    }
    throw ConvergenceError("emission integration: trace drift persists after step refinement");
  }

 private:
  EmissionOptions opt_;
  ModeTable mode1_, mode2_;
  CMat l1_, l2_, c1_, c2_, static_k_;
  std::vector<CMat> others_;
};

Waveform mode_waveform(const ModeTable& m, double duration) {
  Waveform w;
  const int n = static_cast<int>(std::llround(duration / kFieldDt));
  w.step = duration / n;
  w.samples.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) w.samples[static_cast<std::size_t>(k)] = m.value(k * w.step);
  const double nn = w.norm();
  if (nn > 0.0)
    for (auto& s : w.samples) s /= nn;
  return w;
}

double occupation(const CMat& rho, int which) {
  // which = 0: omega2 cavity, 1: omega1 cavity.
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    if ((i >> (1 - which)) & 1) s += rho(i, i).real();
  return s;
}

DecoherenceDraw resolve(const DeviceParams& p, const DecoherenceDraw* draw) {
  return draw ? *draw : DecoherenceDraw::mean(p);
}

}  // namespace

EmissionResult emission_simulation(const DeviceParams& p, const Eigen::Vector4cd& initial,
                                   const EmissionOptions& opt, const DecoherenceDraw* draw) {
  p.validate();
  const double nrm = initial.norm();
  if (!(nrm > 0.0)) throw DomainError("emission_simulation: zero initial state");
  const double need = 5.0 / std::min(p.gamma_f0g1, p.gamma_h0e1);
  if (opt.duration < need) throw DomainError("emission_simulation: duration shorter than 5 emission lifetimes");
  const Cascade c(p, opt, resolve(p, draw));
  const CVec v = initial / nrm;
  const auto run = c.evolve(v * v.adjoint(), true);
  EmissionResult r;
  r.mode_w1 = mode_waveform(c.mode1(), opt.duration);
  r.mode_w2 = mode_waveform(c.mode2(), opt.duration);
  r.photons_w1 = occupation(run.rho, 1);
  r.photons_w2 = occupation(run.rho, 0);
  r.max_trace_drift = run.drift;
  r.min_eigenvalue = run.min_eig;
  const CMat rho = 0.5 * (run.rho + run.rho.adjoint());
  r.joint = MultimodeState::from_density({kLevels, 2, 2}, pair_labels(1, true), rho / rho.trace().real());
  return r;
}

// Emitter-only evolution is enough for the field expectation values.
Waveform emitted_field(const DeviceParams& p, const Eigen::Vector4cd& initial, const EmissionOptions& opt) {
  p.validate();
  const double nrm = initial.norm();
  if (!(nrm > 0.0)) throw DomainError("emitted_field: zero initial state");
  const EmitterModel m = emitter_model(p, opt, DecoherenceDraw::mean(p));
  const CMat lv = liouvillian(m);
  const CVec v = initial / nrm;
  const int n = static_cast<int>(std::llround(opt.duration / kFieldDt));
  if (n > kFieldSamples) throw DimensionError("emitted_field: duration exceeds the padded grid");
  const CMat step = (lv * kFieldDt).exp();
  CVec r = vec(v * v.adjoint());
  const double wc = 0.5 * (p.w1 + p.w2);
  Waveform w;
  w.step = kFieldDt;
  w.samples.assign(kFieldSamples, cplx(0.0));
  for (int k = 0; k < n; ++k) {
    const double t = k * kFieldDt;
    const CMat rho = unvec(r, kLevels);
    w.samples[static_cast<std::size_t>(k)] =
        (m.l1 * rho).trace() * std::polar(1.0, -2.0 * std::numbers::pi * (p.w1 - wc) * t) +
        (m.l2 * rho).trace() * std::polar(1.0, -2.0 * std::numbers::pi * (p.w2 - wc) * t);
    r = step * r;
  }
  return w;
}

namespace {

struct ChannelRun {
  EmissionChannel channel;
  double eff_w1 = 0.0, eff_w2 = 0.0;
};

// The ideal preparation pulses send g -> f and e -> h before emission.
ChannelRun channel_run(const DeviceParams& p, const EmissionOptions& opt, const DecoherenceDraw& d) {
  const Cascade c(p, opt, d);
  const int prep[2] = {2, 3};
  CMat out[2][2];
  ChannelRun res;
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j) {
      const auto run = c.evolve(unit(kLevels, prep[i], prep[j]), i == j);
      out[i][j] = run.rho;
    }
  out[1][0] = out[0][1].adjoint();
  res.eff_w1 = occupation(out[0][0], 1);
  res.eff_w2 = occupation(out[1][1], 0);
  // Keep the emitter's {g, e} block: indices 0..7 of the emitter-major layout.
  CMat choi = CMat::Zero(16, 16);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) choi.block(8 * i, 8 * j, 8, 8) = out[i][j].topLeftCorner(8, 8);
  res.channel = EmissionChannel(0.5 * (choi + choi.adjoint()), {2, 2, 2}, 1e-2);
  return res;
}

}  // namespace

EmissionChannel simulated_emission_channel(const DeviceParams& p, const EmissionOptions& opt,
                                           const DecoherenceDraw* draw) {
  p.validate();
  return channel_run(p, opt, resolve(p, draw)).channel;
}

double photon_generation_efficiency(const DeviceParams& p, Transition t, const EmissionOptions& opt) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(t == Transition::f0g1 ? 2 : 3) = 1.0;
  const auto r = emission_simulation(p, v, opt);
  return t == Transition::f0g1 ? r.photons_w1 : r.photons_w2;
}

CoherenceLimit coherence_limit(const DeviceParams& p, int draws, std::uint64_t seed) {
  p.validate();
  if (draws < 1) throw DomainError("coherence_limit: need at least one draw");
  // Draws are generated serially so the set does not depend on the thread count.
  std::vector<DecoherenceDraw> ds(static_cast<std::size_t>(draws));
  Rng rng(seed);
  auto sample = [&](const Uncertain& u) {
    std::normal_distribution<double> nd(u.mean, u.sd);
    double x;
    do x = nd(rng);
    while (!(x > 0.0));
    return x;
  };
  for (auto& d : ds)
    d = {sample(p.T1_ge), sample(p.T2_ge), sample(p.T1_ef), sample(p.T2_ef), sample(p.T1_fh), sample(p.T2_fh)};

  CoherenceLimit out;
  out.fidelities.resize(ds.size());
  std::vector<double> e1(ds.size()), e2(ds.size());
  const int nt = configured_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt > 0 ? nt : omp_get_max_threads())
  for (int k = 0; k < draws; ++k) {
    const auto r = channel_run(p, EmissionOptions{}, ds[static_cast<std::size_t>(k)]);
    out.fidelities[static_cast<std::size_t>(k)] = process_fidelity(r.channel);
    e1[static_cast<std::size_t>(k)] = r.eff_w1;
    e2[static_cast<std::size_t>(k)] = r.eff_w2;
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  out.mean = mean(out.fidelities);
  double ss = 0.0;
  for (double f : out.fidelities) ss += (f - out.mean) * (f - out.mean);
  out.sd = draws > 1 ? std::sqrt(ss / (draws - 1)) : 0.0;
  out.eff_f0g1 = mean(e1);
  out.eff_h0e1 = mean(e2);
  return out;
}

}  // namespace drlab
