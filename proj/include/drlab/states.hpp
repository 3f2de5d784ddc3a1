#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drlab/types.hpp"

namespace drlab {

enum class QubitLevel { g = 0, e = 1, f = 2, h = 3 };
enum class Freq { w1, w2 };
enum class Branch { plus, minus };

// Tag of one tensor factor. Photon modes carry their time bin and carrier.
struct SubsystemLabel {
  enum class Kind { qubit, mode } kind = Kind::mode;
  int time_bin = 0;
  Freq freq = Freq::w1;

  static SubsystemLabel qubit() { return {Kind::qubit, 0, Freq::w1}; }
  static SubsystemLabel mode(int bin, Freq f) { return {Kind::mode, bin, f}; }
  std::string str() const;
  static SubsystemLabel parse(const std::string& s);
  bool operator==(const SubsystemLabel&) const = default;
};

// Physical mode 2k is the omega2 rail of logical qubit k, mode 2k+1 its omega1 rail.
std::vector<SubsystemLabel> pair_labels(int n_logical, bool with_qubit = false);

struct LogicalQubitIndex {
  int value = 0;
  int omega2_mode() const { return 2 * value; }
  int omega1_mode() const { return 2 * value + 1; }
};

// Qubit (dimension 2 or 4) followed by two-level photon modes, stored either
// as a ket or as a density matrix. Immutable after construction.
class MultimodeState {
 public:
  static MultimodeState from_ket(std::vector<int> dims, std::vector<SubsystemLabel> labels,
                                 CVec psi);
  static MultimodeState from_density(std::vector<int> dims, std::vector<SubsystemLabel> labels,
                                     CMat rho, bool unnormalized = false);

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<SubsystemLabel>& labels() const { return labels_; }
  int dim() const { return dim_; }
  int n_subsystems() const { return static_cast<int>(dims_.size()); }
  bool has_qubit() const;
  int mode_count() const;
  bool is_pure() const { return ket_.has_value(); }
  bool unnormalized() const { return unnormalized_; }

  // Throws unless stored as a ket.
  const CVec& ket() const;
  // Dense density matrix; throws DimensionError above 4096.
  CMat density() const;
  double trace() const;

  // Hermiticity 1e-10, trace 1e-9 (unless unnormalized), eigenvalues >= -1e-9.
  void validate() const;

 private:
  std::vector<int> dims_;
  std::vector<SubsystemLabel> labels_;
  int dim_ = 1;
  std::optional<CVec> ket_;
  std::optional<CMat> rho_;
  bool unnormalized_ = false;
};

MultimodeState make_ideal_cluster(int n_logical, Branch branch);

// <psi|rho|psi> when the target is pure, Uhlmann fidelity otherwise.
double fidelity(const MultimodeState& rho, const MultimodeState& target);

struct LogicalProjection {
  MultimodeState physical;  // projected and renormalized, original dims
  MultimodeState logical;   // same state on n_logical qubits, 0 := omega1
  double probability = 0.0;
};
LogicalProjection project_logical_subspace(const MultimodeState& rho);

MultimodeState partial_trace(const MultimodeState& rho, const std::vector<int>& keep);

// Local operator on one subsystem (ket stays ket).
MultimodeState apply_local_op(const MultimodeState& s, int site, const CMat& op);

// First nonzero amplitude made real-positive.
CVec canonical_phase(const CVec& psi);

}  // namespace drlab

namespace drlab::detail {
// Emitter starts in |g>; each round applies H then the ideal emission map that
// appends one photon register of dimension photon_dim with |g> -> x_g, |e> -> x_e.
// Returns the (emitter, photons) ket before any projection.
CVec ideal_emission_ket(int n_rounds, int photon_dim, int x_g, int x_e);
// <s| on the emitter of a (emitter, rest) ket, s = (1, sign)/sqrt2.
CVec project_emitter_x(const CVec& psi, int sign);
}  // namespace drlab::detail
