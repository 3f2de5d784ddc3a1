#pragma once

#include <string>
#include <vector>

#include "drlab/states.hpp"
#include "drlab/types.hpp"

namespace drlab {

struct NoiseParams {
  double loss_w1 = 0.0;
  double loss_w2 = 0.0;
  double dephase = 0.0;   // phase-damping parameter lambda on the emitter
  double thermal = 0.0;   // per-rail |0> -> |1> excitation probability
  void validate() const;
};

enum class Encoding { dual_rail, single_rail };

// One emission round as a Choi matrix J = sum_ij |i><j| (x) E(|i><j|),
// input = emitter {g,e}, output = emitter (x) emitted modes.
// Dual rail emits (omega2, omega1); single rail emits one mode.
class EmissionChannel {
 public:
  EmissionChannel() = default;
  EmissionChannel(CMat choi, std::vector<int> out_dims, double tp_tolerance = 1e-9);

  static EmissionChannel from_kraus(const std::vector<CMat>& kraus, std::vector<int> out_dims);

  const CMat& choi() const { return choi_; }
  const std::vector<int>& out_dims() const { return out_dims_; }
  int d_in() const { return 2; }
  int d_out() const { return d_out_; }
  int photon_dim() const { return d_out_ / 2; }
  Encoding encoding() const {
    return out_dims_.size() == 3 ? Encoding::dual_rail : Encoding::single_rail;
  }
  double tp_tolerance() const { return tp_tolerance_; }
  // max |Tr_out J - I|; zero for trace-preserving maps.
  double tp_deficit() const;
  double min_choi_eigenvalue() const;
  // Throws unless CP (eig >= -1e-9) and, when require_tp, TP within tolerance.
  void validate(bool require_tp = true) const;

  // Apply to an operator on the input qubit.
  CMat apply(const CMat& rho_in) const;
  // Element J[(i,a),(j,b)].
  cplx element(int i, int a, int j, int b) const { return choi_(i * d_out_ + a, j * d_out_ + b); }

 private:
  CMat choi_;
  std::vector<int> out_dims_;
  int d_out_ = 0;
  double tp_tolerance_ = 1e-9;
};

EmissionChannel ideal_emission_channel();
EmissionChannel noisy_emission_channel(const NoiseParams& p);
EmissionChannel single_rail_channel(const NoiseParams& p);
EmissionChannel ideal_single_rail_channel();

// Isometry of the ideal round as a d_out x 2 matrix.
CMat ideal_isometry(Encoding enc);

// Real matrix R (d_out^2 x 4), R_ab = Tr(P_a E(P_b)) / 2.
struct PauliTransferView {
  RMat matrix;
  std::vector<int> out_dims;
};
PauliTransferView choi_to_ptm(const EmissionChannel& ch);
EmissionChannel ptm_to_choi(const PauliTransferView& ptm);

// Entanglement fidelity <Phi_V|J|Phi_V>/4 against the ideal isometry.
double process_fidelity(const EmissionChannel& ch);
double process_fidelity_ptm(const PauliTransferView& ptm);

// Dense chain: Hadamard then one channel round, n times, then emitter projected
// on |+> or |-> and traced out. n_rounds <= 5 (dual rail) / 10 (single rail).
enum class Projection { x_plus, x_minus };
MultimodeState compose_chain(const EmissionChannel& ch, int n_rounds, Projection proj);
// Same, keeping the emitter (no projection). Used by tests.
MultimodeState compose_chain_unprojected(const EmissionChannel& ch, int n_rounds);

// Ideal state that compose_chain(ideal, n, proj) should produce (ket).
MultimodeState ideal_chain_state(Encoding enc, int n_rounds, Projection proj);

// Exact fidelity of the projected noisy chain with the ideal chain via a
// transfer-operator contraction; any n. logical=true post-selects every pair
// on the dual-rail subspace first.
struct ChainFidelity {
  double fidelity = 0.0;
  double success_probability = 0.0;  // emitter branch (x logical subspace)
};
ChainFidelity chain_fidelity(const EmissionChannel& ch, int n_rounds, bool logical,
                             Projection proj = Projection::x_plus);

struct ScalingRow {
  int n = 0;
  double fidelity = 0.0;
  double stderr_ = 0.0;
  bool extrapolated = false;
};
struct ScalingCurve {
  std::vector<ScalingRow> rows;
  int crossing = 0;           // largest n with all F(m) > 0.5, m <= n
  double fit_slope = 0.0;     // log F = a + b n over exact rows
  double fit_intercept = 0.0;
  double fit_r2 = 0.0;
};
// Exact rows up to min(n_max, 8); beyond that exponential extrapolation, flagged.
ScalingCurve fidelity_scaling_curve(const EmissionChannel& ch, int n_max, bool logical,
                                    int n_exact = 8);
// Spread over an ensemble of channels (e.g. bootstrap replicas); rows give the mean.
ScalingCurve fidelity_scaling_curve(const std::vector<EmissionChannel>& ensemble, int n_max,
                                    bool logical, int n_exact = 8);

// Least-squares calibration of (loss, dephase) against measured chain fidelities.
struct FidelityTarget {
  std::string label;
  int n = 0;
  bool logical = false;
  double value = 0.0;
  double sigma = 0.0;
};
struct CalibrationTargets {
  std::vector<FidelityTarget> fidelities;
  double process_fidelity = 0.867;
  double process_sigma = 0.007;  // <= 0 drops the term
  static CalibrationTargets measured();
};
struct CalibrationResidual {
  std::string label;
  double target = 0.0, sigma = 0.0, model = 0.0;
  double z() const { return (model - target) / sigma; }
};
struct CalibrationReport {
  NoiseParams params;
  double process_fidelity = 0.0;
  double chi2 = 0.0;
  std::vector<CalibrationResidual> residuals;
  bool all_within_2sigma() const;
};
CalibrationReport calibrate_noise(const CalibrationTargets& t);

}  // namespace drlab
