#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drlab/channels.hpp"
#include "drlab/states.hpp"

namespace drlab {

struct NoiseCalibration {
  std::vector<double> n0;          // effective noise photons per mode
  std::vector<double> efficiency;  // metadata; records are input-referred
  void validate(int n_modes) const;
  // omega2 rails 3.5, omega1 rails 2.4; efficiencies 0.222 / 0.294.
  static NoiseCalibration device(int n_modes);
  static NoiseCalibration uniform(int n_modes, double n0);
};

// Shot-major complex amplitudes; optional per-shot qubit basis/outcome tags.
struct ShotRecord {
  int n_modes = 0;
  std::vector<cplx> samples;           // n_shots * n_modes
  std::vector<char> qubit_basis;       // 'x','y','z' or empty
  std::vector<std::int8_t> qubit_outcome;  // +1/-1 or empty

  std::int64_t shot_count() const {
    return n_modes == 0 ? 0 : static_cast<std::int64_t>(samples.size()) / n_modes;
  }
  const cplx* shot(std::int64_t k) const { return samples.data() + k * n_modes; }
  void validate() const;
};

struct HeterodyneData {
  ShotRecord signal;
  ShotRecord vacuum;
  void validate() const;
};

// Husimi sampling of rho (photon modes only) plus thermal detection noise.
HeterodyneData synthesize_shots(const MultimodeState& rho, const NoiseCalibration& cal,
                                std::int64_t n_shots, std::uint64_t seed);

// Joint qubit-photon state: qubit measured in x, y and z (n_shots each), photons heterodyned.
HeterodyneData synthesize_joint_shots(const MultimodeState& rho_qubit_modes,
                                      const NoiseCalibration& cal, std::int64_t n_shots_per_basis,
                                      std::uint64_t seed);

// DRSHOT1 files; the vacuum record goes to "<path>.vac".
void write_shot_record(const std::string& path, const ShotRecord& rec);
ShotRecord read_shot_record(const std::string& path);
void write_heterodyne(const std::string& path, const HeterodyneData& d);
HeterodyneData read_heterodyne(const std::string& path);

// Key: per window mode (m, n) exponents of (a^dag)^m a^n, plus a qubit Pauli.
struct MomentKey {
  std::vector<std::uint8_t> exps;  // m0, n0, m1, n1, ...
  std::uint8_t pauli = 0;          // 0 = I, 1..3 = x, y, z
  int n_modes() const { return static_cast<int>(exps.size() / 2); }
  int total_order() const;
  bool is_identity() const;
  MomentKey conjugate() const;  // (m,n) -> (n,m) on every mode
  std::string str() const;
  auto operator<=>(const MomentKey&) const = default;
};

struct MomentEntry {
  cplx value;
  double stddev = 0.0;
};

struct MomentTable {
  std::vector<int> window;  // mode indices in the record
  int max_exp = 1;
  int max_total = 0;
  bool with_qubit = false;
  std::map<MomentKey, MomentEntry> entries;
  std::vector<std::string> warnings;

  // Largest |swap-conjugate mismatch| / combined stddev.
  double conjugate_symmetry_violation() const;
};

struct MomentOptions {
  int max_exp = 1;          // per-mode cap on m and n (<= 2)
  int max_total = -1;       // cap on total order, -1 = none
  int n_bootstrap = 100;
  int n_blocks = 1000;
  std::uint64_t seed = 1;
};

// Noise-deconvolved signal moments on a window of modes, bootstrap stddevs.
MomentTable estimate_moments(const HeterodyneData& data, const std::vector<int>& window,
                             const MomentOptions& opt);

// Exact moments Tr(rho O) of a state on the given window (for oracles / MPO tests).
MomentTable exact_moments(const MultimodeState& rho, const std::vector<int>& window, int max_exp,
                          double stddev = 1e-6);

// Raw-moment convolution with detector noise and its inverse (algebraic, no sampling).
using MomentMap = std::map<MomentKey, cplx>;
MomentMap convolve_moments(const MomentMap& signal, const MomentMap& noise);
MomentMap deconvolve_moments(const MomentMap& raw, const MomentMap& noise);
// Thermal noise moments <h^m (h^dag)^n> = delta_mn m! (1+N0)^m per mode, product over modes.
MomentMap thermal_noise_moments(const std::vector<double>& n0, int max_exp);

struct MleOptions {
  int max_iter = 5000;
  double rel_tol = 1e-8;
  double stddev_floor_rel = 1e-6;
};
struct MleResult {
  MultimodeState state;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // accepted objective values
  std::vector<std::string> warnings;
};
// dims: per window mode (all 2); a qubit factor is prepended when the table has one.
MleResult mle_reconstruct(const MomentTable& moments, const MleOptions& opt = {});

// Fixed operator-valued site matrices of the ideal chain, entries (sign, Pauli).
struct MpoSiteTensors {
  struct Entry {
    int sign = 0;   // 0 means empty
    int pauli = 0;  // 0..3
  };
  using Site = std::vector<std::vector<Entry>>;
  Site first, even, odd, last;
  int n_sites = 0;
  static MpoSiteTensors chain(int n_sites);
  // Sites numbered from 1: site 1 uses first, site N last, interior by parity.
  const Site& site(int i) const;
};

// Real coefficient tensors C[i][pauli] (Dl x Dr) of rho = M / Tr M,
// M = sum over Pauli products weighted by the bond contraction.
struct MpoState {
  std::vector<std::vector<RMat>> coeff;
  static MpoState from_skeleton(const MpoSiteTensors& t);
  int n_sites() const { return static_cast<int>(coeff.size()); }
  CMat densify() const;  // normalized, not projected; n <= 10
  // Tr(rho O) for O a product of single-mode operators (identity elsewhere).
  cplx expectation(const std::vector<Eigen::Matrix2cd>& ops) const;
};

struct MpoResult {
  MpoState mpo;                               // skeleton with the fitted corrections applied
  std::vector<Eigen::Matrix4d> corrections;   // per-site Pauli transfer matrices
  MultimodeState state;  // projected onto density matrices
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};
MpoResult mpo_reconstruct(const std::vector<MomentTable>& windows, int n_modes);

std::int64_t sampling_requirement(const std::vector<double>& n0, const std::vector<int>& orders);

// Six inputs g, e, +, -, +i, -i; each record carries x/y/z qubit outcomes.
struct ProcessTomographyResult {
  EmissionChannel channel;
  double process_fidelity = 0.0;
  double tp_deficit = 0.0;
  double fit_residual = 0.0;
  bool cp_residual_flag = false;
  std::map<std::string, MultimodeState> reconstructed;
};
const std::vector<std::string>& process_input_labels();
Eigen::Vector2cd process_input_state(const std::string& label);
std::map<std::string, HeterodyneData> synthesize_process_data(const EmissionChannel& ch,
                                                              const NoiseCalibration& cal,
                                                              std::int64_t n_shots_per_basis,
                                                              std::uint64_t seed);
ProcessTomographyResult process_tomography(const std::map<std::string, HeterodyneData>& data,
                                           const MomentOptions& opt = {});
// Choi fit from known input/output pairs (PSD, trace 2).
EmissionChannel fit_choi(const std::vector<CMat>& inputs, const std::vector<CMat>& outputs,
                         std::vector<int> out_dims, double* residual = nullptr);

}  // namespace drlab
