#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "drlab/error.hpp"
#include "drlab/kernels.hpp"
#include "drlab/tomography.hpp"
#include "drlab/util.hpp"

namespace drlab {

void NoiseCalibration::validate(int n_modes) const {
  if (static_cast<int>(n0.size()) != n_modes) throw DomainError("noise calibration: wrong number of modes");
  if (!efficiency.empty() && static_cast<int>(efficiency.size()) != n_modes)
    throw DomainError("noise calibration: wrong number of efficiencies");
  for (double x : n0)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("noise calibration: N0 must be >= 0");
  for (double e : efficiency)
    if (!(e > 0.0 && e <= 1.0)) throw DomainError("noise calibration: efficiency must be in (0, 1]");
}

NoiseCalibration NoiseCalibration::device(int n_modes) {
  NoiseCalibration c;
  for (int k = 0; k < n_modes; ++k) {
    const bool w2 = k % 2 == 0;
    c.n0.push_back(w2 ? 3.5 : 2.4);
    c.efficiency.push_back(w2 ? 0.222 : 0.294);
  }
  return c;
}

NoiseCalibration NoiseCalibration::uniform(int n_modes, double n0) {
  NoiseCalibration c;
  c.n0.assign(static_cast<std::size_t>(n_modes), n0);
  c.efficiency.assign(static_cast<std::size_t>(n_modes), 1.0);
  return c;
}

void ShotRecord::validate() const {
  if (n_modes < 1) throw DimensionError("shot record without modes");
  if (samples.size() % static_cast<std::size_t>(n_modes) != 0) throw DimensionError("ragged shot record");
  for (const auto& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("non-finite shot amplitude");
  const auto n = static_cast<std::size_t>(shot_count());
  if (!qubit_basis.empty() && (qubit_basis.size() != n || qubit_outcome.size() != n))
    throw DimensionError("qubit tags do not cover every shot");
}

void HeterodyneData::validate() const {
  signal.validate();
  vacuum.validate();
  if (signal.n_modes != vacuum.n_modes) throw DimensionError("signal and vacuum mode counts differ");
  if (vacuum.shot_count() < 1) throw DomainError("vacuum record missing");
}

namespace {

kernels::PureEnsemble to_ensemble(const CMat& rho, int n_modes) {
  kernels::PureEnsemble e;
  e.n_modes = n_modes;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(rho));
  const double top = es.eigenvalues().maxCoeff();
  for (Eigen::Index k = 0; k < rho.rows(); ++k) {
    const double w = es.eigenvalues()(k);
    if (w > 1e-12 * top) {
      e.weights.push_back(w);
      e.kets.push_back(es.eigenvectors().col(k));
    }
  }
  return e;
}

ShotRecord sample_record(const kernels::PureEnsemble& ens, const std::vector<double>& n0, std::int64_t n_shots,
                         std::uint64_t seed) {
  ShotRecord r;
  r.n_modes = ens.n_modes;
  r.samples.resize(static_cast<std::size_t>(n_shots * ens.n_modes));
  kernels::omp::sample_heterodyne(ens, n0, n_shots, seed, r.samples.data());
  return r;
}

ShotRecord vacuum_record(int n_modes, const std::vector<double>& n0, std::int64_t n_shots, std::uint64_t seed) {
  kernels::PureEnsemble vac;
  vac.n_modes = n_modes;
  vac.weights = {1.0};
  CVec v = CVec::Zero(Eigen::Index(1) << n_modes);
  v(0) = 1.0;
  vac.kets = {v};
  return sample_record(vac, n0, n_shots, seed);
}

}  // namespace

HeterodyneData synthesize_shots(const MultimodeState& rho, const NoiseCalibration& cal, std::int64_t n_shots,
                                std::uint64_t seed) {
  if (rho.has_qubit()) throw DomainError("synthesize_shots takes photon modes only");
  if (n_shots < 1) throw DomainError("n_shots must be >= 1");
  const int n = rho.mode_count();
  cal.validate(n);
  HeterodyneData d;
  d.signal = sample_record(to_ensemble(rho.density(), n), cal.n0, n_shots, derive_seed(seed, 1));
  d.vacuum = vacuum_record(n, cal.n0, n_shots, derive_seed(seed, 2));
  return d;
}

HeterodyneData synthesize_joint_shots(const MultimodeState& rho, const NoiseCalibration& cal,
                                      std::int64_t n_shots_per_basis, std::uint64_t seed) {
  if (!rho.has_qubit() || rho.dims()[0] != 2) throw DomainError("joint synthesis needs a two-level qubit first");
  if (n_shots_per_basis < 1) throw DomainError("n_shots must be >= 1");
  const int n = rho.mode_count();
  cal.validate(n);
  const CMat r = rho.density();
  const Eigen::Index P = r.rows() / 2;
  HeterodyneData d;
  d.signal.n_modes = n;
  Rng rng(derive_seed(seed, 100));
  const char names[3] = {'x', 'y', 'z'};
  for (int b = 0; b < 3; ++b) {
    const Eigen::Matrix2cd& s = pauli(b + 1);
    // Conditional photon states for outcomes +1 and -1.
    CMat cond[2];
    double prob[2];
    for (int o = 0; o < 2; ++o) {
      const Eigen::Matrix2cd proj = 0.5 * (Eigen::Matrix2cd::Identity() + (o == 0 ? 1.0 : -1.0) * s);
      CMat c = CMat::Zero(P, P);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c += proj(j, i) * r.block(i * P, j * P, P, P);
      prob[o] = std::max(0.0, c.trace().real());
      cond[o] = prob[o] > 0 ? CMat(c / prob[o]) : c;
    }
    std::binomial_distribution<std::int64_t> bin(n_shots_per_basis, prob[0] / (prob[0] + prob[1]));
    const std::int64_t n_plus = bin(rng);
    const std::int64_t counts[2] = {n_plus, n_shots_per_basis - n_plus};
    std::vector<cplx> block;
    std::vector<std::int8_t> outcome;
    for (int o = 0; o < 2; ++o) {
      if (counts[o] == 0) continue;
      const ShotRecord part =
          sample_record(to_ensemble(cond[o], n), cal.n0, counts[o], derive_seed(seed, static_cast<std::uint64_t>(10 + 2 * b + o)));
      block.insert(block.end(), part.samples.begin(), part.samples.end());
      outcome.insert(outcome.end(), static_cast<std::size_t>(counts[o]), static_cast<std::int8_t>(o == 0 ? 1 : -1));
    }
    // Interleave outcomes so that contiguous bootstrap blocks are exchangeable.
    std::vector<std::int64_t> order(static_cast<std::size_t>(n_shots_per_basis));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::int64_t k : order) {
      d.signal.samples.insert(d.signal.samples.end(), block.begin() + k * n, block.begin() + (k + 1) * n);
      d.signal.qubit_basis.push_back(names[b]);
      d.signal.qubit_outcome.push_back(outcome[static_cast<std::size_t>(k)]);
    }
  }
  // Same shuffle idea across bases.
  const std::int64_t total = d.signal.shot_count();
  std::vector<std::int64_t> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  ShotRecord mixed;
  mixed.n_modes = n;
  mixed.samples.reserve(d.signal.samples.size());
  for (std::int64_t k : order) {
    mixed.samples.insert(mixed.samples.end(), d.signal.samples.begin() + k * n, d.signal.samples.begin() + (k + 1) * n);
    mixed.qubit_basis.push_back(d.signal.qubit_basis[static_cast<std::size_t>(k)]);
    mixed.qubit_outcome.push_back(d.signal.qubit_outcome[static_cast<std::size_t>(k)]);
  }
  d.signal = std::move(mixed);
  d.vacuum = vacuum_record(n, cal.n0, total, derive_seed(seed, 2));
  return d;
}

// DRSHOT1: magic (8 bytes incl. NUL), u32 mode count, u64 shot count, then
// shot-major float64 (I, Q) pairs. Qubit tags, when present, follow as an
// optional "QBIT" trailer of (basis char, outcome int8) per shot.
namespace {

constexpr char kMagic[8] = {'D', 'R', 'S', 'H', 'O', 'T', '1', '\0'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw FormatError("shot file truncated");
  return v;
}

}  // namespace

void write_shot_record(const std::string& path, const ShotRecord& rec) {
  rec.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path + " for writing");
  f.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(f, static_cast<std::uint32_t>(rec.n_modes));
  put<std::uint64_t>(f, static_cast<std::uint64_t>(rec.shot_count()));
  for (const auto& s : rec.samples) {
    put<double>(f, s.real());
    put<double>(f, s.imag());
  }
  if (!rec.qubit_basis.empty()) {
    f.write("QBIT", 4);
    for (std::size_t k = 0; k < rec.qubit_basis.size(); ++k) {
      put<char>(f, rec.qubit_basis[k]);
      put<std::int8_t>(f, rec.qubit_outcome[k]);
    }
  }
  if (!f) throw FormatError("write failed: " + path);
}

ShotRecord read_shot_record(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + path);
  char magic[8];
  f.read(magic, sizeof magic);
  if (!f || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw FormatError(path + ": not a DRSHOT1 file");
  ShotRecord r;
  r.n_modes = static_cast<int>(get<std::uint32_t>(f));
  const auto n = get<std::uint64_t>(f);
  if (r.n_modes < 1 || r.n_modes > 64) throw FormatError(path + ": bad mode count");
  r.samples.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(r.n_modes));
  for (auto& s : r.samples) {
    const double re = get<double>(f);
    const double im = get<double>(f);
    s = cplx(re, im);
  }
  char tag[4];
  f.read(tag, 4);
  if (f && std::memcmp(tag, "QBIT", 4) == 0) {
    r.qubit_basis.resize(static_cast<std::size_t>(n));
    r.qubit_outcome.resize(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < n; ++k) {
      r.qubit_basis[k] = get<char>(f);
      r.qubit_outcome[k] = get<std::int8_t>(f);
    }
  }
  r.validate();
  return r;
}

void write_heterodyne(const std::string& path, const HeterodyneData& d) {
  d.validate();
  write_shot_record(path, d.signal);
  write_shot_record(path + ".vac", d.vacuum);
}

HeterodyneData read_heterodyne(const std::string& path) {
  HeterodyneData d;
  d.signal = read_shot_record(path);
  try {
    d.vacuum = read_shot_record(path + ".vac");
  } catch (const FormatError&) {
    throw FormatError("vacuum record missing for " + path);
  }
  d.validate();
  return d;
}

}  // namespace drlab
