#include <cmath>

#include "drlab/error.hpp"
#include "drlab/tomography.hpp"
#include "drlab/util.hpp"

namespace drlab {

const std::vector<std::string>& process_input_labels() {
  static const std::vector<std::string> l{"g", "e", "+", "-", "+i", "-i"};
  return l;
}

Eigen::Vector2cd process_input_state(const std::string& label) {
  const double h = 1.0 / std::sqrt(2.0);
  if (label == "g") return {1.0, 0.0};
  if (label == "e") return {0.0, 1.0};
  if (label == "+") return {h, h};
  if (label == "-") return {h, -h};
  if (label == "+i") return {h, cplx(0.0, h)};
  if (label == "-i") return {h, cplx(0.0, -h)};
  throw DomainError("unknown process input: " + label);
}

std::map<std::string, HeterodyneData> synthesize_process_data(const EmissionChannel& ch, const NoiseCalibration& cal,
                                                              std::int64_t n_shots_per_basis, std::uint64_t seed) {
  if (ch.encoding() != Encoding::dual_rail) throw DomainError("process tomography expects the dual-rail channel");
  std::map<std::string, HeterodyneData> out;
  std::uint64_t k = 0;
  for (const auto& label : process_input_labels()) {
    const Eigen::Vector2cd v = process_input_state(label);
    const CMat in = v * v.adjoint();
    const auto joint = MultimodeState::from_density({2, 2, 2}, pair_labels(1, true), hermitian_part(ch.apply(in)));
    out[label] = synthesize_joint_shots(joint, cal, n_shots_per_basis, derive_seed(seed, k++));
  }
  return out;
}

EmissionChannel fit_choi(const std::vector<CMat>& inputs, const std::vector<CMat>& outputs, std::vector<int> out_dims,
                         double* residual) {
  if (inputs.size() != outputs.size() || inputs.empty()) throw DimensionError("input/output lists differ");
  const int dout = product(out_dims);
  const Eigen::Index K = static_cast<Eigen::Index>(inputs.size());
  // sigma_k = sum_ij rho_k(i,j) B_ij with B_ij the (i,j) Choi block.
  CMat R(K, 4);
  for (Eigen::Index k = 0; k < K; ++k) {
    if (inputs[static_cast<std::size_t>(k)].rows() != 2 || outputs[static_cast<std::size_t>(k)].rows() != dout)
      throw DimensionError("fit_choi operand shapes");
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) R(k, i * 2 + j) = inputs[static_cast<std::size_t>(k)](i, j);
  }
  Eigen::JacobiSVD<CMat> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.rank() < 4) throw DomainError("input states do not span the qubit operator space");
  const double smax = svd.singularValues()(0);
  const double lip = 2.0 * smax * smax;

  auto blocks_to_choi = [&](const std::vector<CMat>& b) {
    CMat j(2 * dout, 2 * dout);
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < 2; ++l) j.block(i * dout, l * dout, dout, dout) = b[static_cast<std::size_t>(i * 2 + l)];
    return j;
  };
  auto residuals = [&](const CMat& j, std::vector<CMat>& r) {
    double f = 0.0;
    r.assign(static_cast<std::size_t>(K), CMat());
    for (Eigen::Index k = 0; k < K; ++k) {
      CMat e = -outputs[static_cast<std::size_t>(k)];
      for (int i = 0; i < 2; ++i)
        for (int l = 0; l < 2; ++l) e += R(k, i * 2 + l) * j.block(i * dout, l * dout, dout, dout);
      f += e.squaredNorm();
      r[static_cast<std::size_t>(k)] = std::move(e);
    }
    return f;
  };

  // Unconstrained least squares per output entry.
  std::vector<CMat> b(4, CMat::Zero(dout, dout));
  for (int a = 0; a < dout; ++a)
    for (int c = 0; c < dout; ++c) {
      CVec rhs(K);
      for (Eigen::Index k = 0; k < K; ++k) rhs(k) = outputs[static_cast<std::size_t>(k)](a, c);
      const CVec sol = svd.solve(rhs);
      for (int q = 0; q < 4; ++q) b[static_cast<std::size_t>(q)](a, c) = sol(q);
    }
  std::vector<CMat> r;
  CMat j = project_psd_trace(hermitian_part(blocks_to_choi(b)), 2.0);
  double f = residuals(j, r);
  for (int it = 0; it < 3000; ++it) {
    CMat g = CMat::Zero(2 * dout, 2 * dout);
    for (Eigen::Index k = 0; k < K; ++k)
      for (int i = 0; i < 2; ++i)
        for (int l = 0; l < 2; ++l)
          g.block(i * dout, l * dout, dout, dout) += 2.0 * std::conj(R(k, i * 2 + l)) * r[static_cast<std::size_t>(k)];
    const CMat next = project_psd_trace(hermitian_part(j - g / lip), 2.0);
    std::vector<CMat> rn;
    const double fn = residuals(next, rn);
    if (fn > f) break;
    const bool done = f - fn <= 1e-12 * std::max(f, 1e-300);
    j = next;
    f = fn;
    r.swap(rn);
    if (done) break;
  }
  double norm = 0.0;
  for (const auto& o : outputs) norm += o.squaredNorm();
  if (residual) *residual = std::sqrt(f / norm);
  return EmissionChannel(j, std::move(out_dims), 1.0);
}

ProcessTomographyResult process_tomography(const std::map<std::string, HeterodyneData>& data, const MomentOptions& opt) {
  ProcessTomographyResult res;
  std::vector<CMat> ins, outs;
  for (const auto& label : process_input_labels()) {
    const auto it = data.find(label);
    if (it == data.end()) throw DomainError("missing process input " + label);
    if (it->second.signal.qubit_basis.empty()) throw DomainError("input " + label + " lacks qubit outcomes");
    MomentOptions o = opt;
    o.seed = derive_seed(opt.seed, ins.size());
    const MomentTable t = estimate_moments(it->second, {0, 1}, o);
    MleResult m = mle_reconstruct(t);
    const Eigen::Vector2cd v = process_input_state(label);
    ins.push_back(v * v.adjoint());
    outs.push_back(m.state.density());
    res.reconstructed.emplace(label, std::move(m.state));
  }
  double resid = 0.0;
  res.channel = fit_choi(ins, outs, {2, 2, 2}, &resid);
  res.fit_residual = resid;
  // Residual left after forcing complete positivity, relative to the outputs.
  res.cp_residual_flag = resid > 0.05;
  res.process_fidelity = process_fidelity(res.channel);
  res.tp_deficit = res.channel.tp_deficit();
  return res;
}

}  // namespace drlab
