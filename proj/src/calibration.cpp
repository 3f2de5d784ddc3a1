#include <cmath>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "drlab/channels.hpp"

namespace drlab {

CalibrationTargets CalibrationTargets::measured() {
  CalibrationTargets t;
  t.fidelities = {
      {"raw n=2", 2, false, 0.764, 0.008},     {"raw n=3", 3, false, 0.674, 0.021},
      {"raw n=4", 4, false, 0.570, 0.028},     {"logical n=2", 2, true, 0.909, 0.010},
      {"logical n=3", 3, true, 0.768, 0.025},  {"logical n=4", 4, true, 0.678, 0.034},
  };
  return t;
}

bool CalibrationReport::all_within_2sigma() const {
  for (const auto& r : residuals)
    if (std::abs(r.z()) > 2.0) return false;
  return true;
}

namespace {

NoiseParams to_params(double loss, double deph) {
  NoiseParams p;
  p.loss_w1 = p.loss_w2 = std::clamp(loss, 0.0, 0.999);
  p.dephase = std::clamp(deph, 0.0, 0.999);
  return p;
}

std::vector<CalibrationResidual> evaluate(const CalibrationTargets& t, const NoiseParams& p, double* pf) {
  const EmissionChannel ch = noisy_emission_channel(p);
  std::vector<CalibrationResidual> out;
  for (const auto& f : t.fidelities)
    out.push_back({f.label, f.value, f.sigma, chain_fidelity(ch, f.n, f.logical).fidelity});
  const double proc = process_fidelity(ch);
  if (pf) *pf = proc;
  if (t.process_sigma > 0)
    out.push_back({"process fidelity", t.process_fidelity, t.process_sigma, proc});
  return out;
}

struct Functor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  const CalibrationTargets* t;
  int n_values;
  Functor(const CalibrationTargets* targets, int nv) : t(targets), n_values(nv) {}
  int inputs() const { return 2; }
  int values() const { return n_values; }
  int operator()(const InputType& x, ValueType& f) const {
    const auto r = evaluate(*t, to_params(x(0), x(1)), nullptr);
    for (std::size_t k = 0; k < r.size(); ++k) f(static_cast<Eigen::Index>(k)) = r[k].z();
    return 0;
  }
};

}  // namespace

CalibrationReport calibrate_noise(const CalibrationTargets& t) {
  const int nv = static_cast<int>(t.fidelities.size()) + (t.process_sigma > 0 ? 1 : 0);
  Functor f(&t, nv);
  Eigen::NumericalDiff<Functor> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(nd);
  Eigen::VectorXd x(2);
  x << 0.07, 0.12;
  lm.minimize(x);
  CalibrationReport rep;
  rep.params = to_params(x(0), x(1));
  rep.residuals = evaluate(t, rep.params, &rep.process_fidelity);
  for (const auto& r : rep.residuals) rep.chi2 += r.z() * r.z();
  return rep;
}

}  // namespace drlab
