#include <cmath>
#include <fstream>
#include <numbers>

#include <fftw3.h>

#include "drlab/error.hpp"
#include "drlab/physics.hpp"

namespace drlab {

double Waveform::norm() const {
  double s = 0.0;
  for (const auto& x : samples) s += std::norm(x);
  return std::sqrt(s * step);
}

// Fields follow the e^{-i w t} convention, so the transform uses e^{+i 2 pi f t}
// and a component at offset +nu lands at frequency +nu.
Waveform Waveform::spectrum(double centre_offset_MHz) const {
  if (domain != Domain::time) throw DomainError("spectrum of a frequency-domain waveform");
  const int n = static_cast<int>(samples.size());
  if (n == 0) throw DimensionError("empty waveform");
  std::vector<cplx> buf(samples);
  fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                                    reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  Waveform out;
  out.domain = Domain::frequency;
  out.step = 1.0 / (n * step);
  const int half = n / 2;
  out.start = centre_offset_MHz - half * out.step;
  out.samples.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const int src = (k - half + n) % n;  // fftshift
    const double f = (k - half) * out.step;
    const cplx phase = std::polar(1.0, 2.0 * std::numbers::pi * f * start);
    out.samples[static_cast<std::size_t>(k)] = step * buf[static_cast<std::size_t>(src)] * phase;
  }
  return out;
}

void Waveform::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw FormatError("cannot write " + path);
  f.precision(12);
  f << (domain == Domain::time ? "time_us" : "freq_MHz") << ",re,im,abs\n";
  for (std::size_t k = 0; k < samples.size(); ++k)
    f << axis(k) << ',' << samples[k].real() << ',' << samples[k].imag() << ',' << std::abs(samples[k]) << '\n';
}

Waveform exponential_mode(double gamma, double offset, double duration, double dt, int n) {
  if (!(gamma > 0.0) || !(dt > 0.0) || !(duration > 0.0)) throw DomainError("exponential_mode: bad parameters");
  const int m = static_cast<int>(std::llround(duration / dt));
  if (n < m) throw DimensionError("exponential_mode: padding shorter than the pulse");
  Waveform w;
  w.step = dt;
  w.samples.assign(static_cast<std::size_t>(n), cplx(0.0));
  for (int k = 0; k < m; ++k) {
    const double t = k * dt;
    w.samples[static_cast<std::size_t>(k)] =
        std::sqrt(gamma) * std::exp(-0.5 * gamma * t) * std::polar(1.0, -2.0 * std::numbers::pi * offset * t);
  }
  return w;
}

namespace {

// Linear interpolation of w at x, zero outside its support.
cplx sample_at(const Waveform& w, double x) {
  const double u = (x - w.start) / w.step;
  if (u < 0.0 || u > static_cast<double>(w.samples.size() - 1)) return 0.0;
  const auto k = static_cast<std::size_t>(std::floor(u));
  if (k + 1 >= w.samples.size()) return w.samples.back();
  const double t = u - static_cast<double>(k);
  return (1.0 - t) * w.samples[k] + t * w.samples[k + 1];
}

}  // namespace

cplx spectral_overlap(const Waveform& f1, const Waveform& f2) {
  if (f1.domain != f2.domain) throw DomainError("spectral_overlap: mixed domains");
  const double n1 = f1.norm(), n2 = f2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw DomainError("spectral_overlap: zero-norm input");
  const bool same = f1.samples.size() == f2.samples.size() && std::abs(f1.step - f2.step) <= 1e-12 * f1.step &&
                    std::abs(f1.start - f2.start) <= 1e-12 * std::max(1.0, std::abs(f1.start));
  cplx s = 0.0;
  if (same) {
    for (std::size_t k = 0; k < f1.samples.size(); ++k) s += std::conj(f1.samples[k]) * f2.samples[k];
    return s * f1.step / (n1 * n2);
  }
  // Resample f2 on f1's grid and renormalize there.
  double r2 = 0.0;
  for (std::size_t k = 0; k < f1.samples.size(); ++k) {
    const cplx y = sample_at(f2, f1.axis(k));
    s += std::conj(f1.samples[k]) * y;
    r2 += std::norm(y);
  }
  if (!(r2 > 0.0)) return 0.0;
  return s * f1.step / (n1 * std::sqrt(r2 * f1.step));
}

}  // namespace drlab
