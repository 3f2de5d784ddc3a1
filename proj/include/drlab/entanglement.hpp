#pragma once

#include <string>
#include <vector>

#include "drlab/channels.hpp"
#include "drlab/states.hpp"

namespace drlab {

enum class MeasBasis { Z, X, Y, none };
char basis_char(MeasBasis b);

struct MeasurementPlan {
  std::vector<MeasBasis> basis;
  std::vector<int> kept() const;
  void validate(int n_modes) const;
  std::string str() const;
};

struct LeResult {
  int i = 0, j = 0;
  double value = 0.0;
  double stderr_ = 0.0;
  long long outcome_count = 0;
  double probability_sum = 0.0;  // sum of branch weights / independent norm
};

MeasurementPlan le_plan_physical(int n_logical, int i, int j);
MeasurementPlan le_plan_logical(int n_logical, int i, int j);

// Negativity of a (possibly unnormalized) two-qubit operator: sum of |negative
// eigenvalues| of the partial transpose. Homogeneous of degree one.
double negativity(const Eigen::Matrix4cd& rho);

// Dense outcome enumeration on a state of two-level modes.
LeResult localizable_entanglement(const MultimodeState& rho, const MeasurementPlan& plan);
// Mean and spread over an ensemble of states (e.g. bootstrap replicas).
LeResult localizable_entanglement(const std::vector<MultimodeState>& ensemble,
                                  const MeasurementPlan& plan);
LeResult le_logical(const MultimodeState& rho_logical, LogicalQubitIndex i, LogicalQubitIndex j);

enum class LeVariant { physical, logical, single_rail };

// Exact LE of the chain generated by ch (target's rung + 1 rounds), computed by
// branching on measured modes as they are emitted. Mode indices refer to the
// physical chain (logical qubit index for the logical variant).
LeResult le_from_channel(const EmissionChannel& ch, LeVariant variant, int i, int j,
                         bool parallel = true);

struct LeCurvePoint {
  int distance = 0;  // logical distance from qubit I (mode index for single rail)
  int mode = 0;      // target mode / logical index
  double value = 0.0;
  double stderr_ = 0.0;
};
struct LeCurve {
  std::vector<LeCurvePoint> points;
  int threshold_length = 0;
  bool exceeds_range = false;
};
LeCurve le_distance_curve(const EmissionChannel& ch, double threshold, LeVariant variant,
                          int max_distance = 14);

// Triangular LE table of a dense state: physical pairs (lower) and logical pairs (upper).
struct LeMatrixEntry {
  int row = 0, col = 0;
  bool logical = false;
  double value = 0.0, stderr_ = 0.0;
};
std::vector<LeMatrixEntry> le_matrix(const MultimodeState& rho);
void write_le_csv(const std::string& path, const std::vector<LeMatrixEntry>& m);

}  // namespace drlab
