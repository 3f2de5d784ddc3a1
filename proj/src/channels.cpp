#include "drlab/channels.hpp"

#include <cmath>

#include "drlab/error.hpp"
#include "drlab/util.hpp"

namespace drlab {

void NoiseParams::validate() const {
  for (double v : {loss_w1, loss_w2, dephase, thermal})
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("noise probability outside [0,1]");
}

EmissionChannel::EmissionChannel(CMat choi, std::vector<int> out_dims, double tp_tolerance)
    : choi_(std::move(choi)), out_dims_(std::move(out_dims)), tp_tolerance_(tp_tolerance) {
  if (out_dims_.size() != 2 && out_dims_.size() != 3) throw DimensionError("channel output layout");
  for (int d : out_dims_)
    if (d != 2) throw DimensionError("channel output factors must be two-level");
  d_out_ = product(out_dims_);
  if (choi_.rows() != 2 * d_out_ || choi_.cols() != 2 * d_out_) throw DimensionError("Choi size");
}

EmissionChannel EmissionChannel::from_kraus(const std::vector<CMat>& kraus, std::vector<int> out_dims) {
  const int dout = product(out_dims);
  CMat j = CMat::Zero(2 * dout, 2 * dout);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != 2) throw DimensionError("Kraus operator shape");
    CVec v(2 * dout);
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < dout; ++a) v(i * dout + a) = k(a, i);
    j.noalias() += v * v.adjoint();
  }
  return EmissionChannel(hermitian_part(j), std::move(out_dims));
}

double EmissionChannel::tp_deficit() const {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx s = 0.0;
      for (int a = 0; a < d_out_; ++a) s += element(i, a, j, a);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double EmissionChannel::min_choi_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(choi_), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void EmissionChannel::validate(bool require_tp) const {
  if ((choi_ - choi_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw DomainError("Choi not Hermitian");
  if (min_choi_eigenvalue() < -1e-9) throw DomainError("channel is not completely positive");
  if (require_tp && tp_deficit() > tp_tolerance_) throw DomainError("channel is not trace preserving");
}

CMat EmissionChannel::apply(const CMat& rho_in) const {
  if (rho_in.rows() != 2 || rho_in.cols() != 2) throw DimensionError("channel input is a qubit");
  CMat out = CMat::Zero(d_out_, d_out_);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out += rho_in(i, j) * choi_.block(i * d_out_, j * d_out_, d_out_, d_out_);
  return out;
}

CMat ideal_isometry(Encoding enc) {
  if (enc == Encoding::dual_rail) {
    CMat v = CMat::Zero(8, 2);
    v(0 * 4 + 1, 0) = 1.0;  // |g>|01>
    v(1 * 4 + 2, 1) = 1.0;  // |e>|10>
    return v;
  }
  CMat v = CMat::Zero(4, 2);
  v(0 * 2 + 0, 0) = 1.0;  // |g>|0>
  v(1 * 2 + 1, 1) = 1.0;  // |e>|1>
  return v;
}

EmissionChannel ideal_emission_channel() {
  return EmissionChannel::from_kraus({ideal_isometry(Encoding::dual_rail)}, {2, 2, 2});
}

EmissionChannel ideal_single_rail_channel() {
  return EmissionChannel::from_kraus({ideal_isometry(Encoding::single_rail)}, {2, 2});
}

namespace {

std::vector<CMat> amplitude_damping(double p) {
  CMat k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - p);
  k1 << 0, std::sqrt(p), 0, 0;
  return {k0, k1};
}

std::vector<CMat> thermal_excitation(double t) {
  CMat k0(2, 2), k1(2, 2);
  k0 << std::sqrt(1.0 - t), 0, 0, 1;
  k1 << 0, 0, std::sqrt(t), 0;
  return {k0, k1};
}

std::vector<CMat> phase_damping(double l) {
  CMat k0(2, 2), k1(2, 2);
  k0 << 1, 0, 0, std::sqrt(1.0 - l);
  k1 << 0, 0, 0, std::sqrt(l);
  return {k0, k1};
}

// All products of one factor per stage, applied right to left; zero operators dropped.
std::vector<CMat> compose(const std::vector<std::vector<CMat>>& stages, const CMat& first) {
  std::vector<CMat> cur{first};
  for (const auto& st : stages) {
    std::vector<CMat> next;
    for (const auto& a : st)
      for (const auto& c : cur) {
        CMat m = a * c;
        if (m.norm() > 1e-15) next.push_back(std::move(m));
      }
    cur = std::move(next);
  }
  return cur;
}

std::vector<CMat> lift(const std::vector<CMat>& ks, const std::vector<int>& dims, int site) {
  std::vector<CMat> out;
  for (const auto& k : ks) {
    std::vector<CMat> f;
    for (std::size_t s = 0; s < dims.size(); ++s)
      f.push_back(static_cast<int>(s) == site ? k : CMat::Identity(dims[s], dims[s]));
    out.push_back(kron_all(f));
  }
  return out;
}

}  // namespace

EmissionChannel noisy_emission_channel(const NoiseParams& p) {
  p.validate();
  const std::vector<int> dims{2, 2, 2};
  std::vector<std::vector<CMat>> stages;
  if (p.thermal > 0) {
    stages.push_back(lift(thermal_excitation(p.thermal), dims, 1));
    stages.push_back(lift(thermal_excitation(p.thermal), dims, 2));
  }
  stages.push_back(lift(amplitude_damping(p.loss_w2), dims, 1));
  stages.push_back(lift(amplitude_damping(p.loss_w1), dims, 2));
  stages.push_back(lift(phase_damping(p.dephase), dims, 0));
  return EmissionChannel::from_kraus(compose(stages, ideal_isometry(Encoding::dual_rail)), dims);
}

EmissionChannel single_rail_channel(const NoiseParams& p) {
  p.validate();
  const std::vector<int> dims{2, 2};
  std::vector<std::vector<CMat>> stages;
  if (p.thermal > 0) stages.push_back(lift(thermal_excitation(p.thermal), dims, 1));
  stages.push_back(lift(amplitude_damping(p.loss_w1), dims, 1));
  stages.push_back(lift(phase_damping(p.dephase), dims, 0));
  return EmissionChannel::from_kraus(compose(stages, ideal_isometry(Encoding::single_rail)), dims);
}

namespace {

// Pauli string index is big-endian in base 4 over factors.
CMat pauli_string(int index, int n_factors) {
  std::vector<CMat> f;
  int rem = index;
  std::vector<int> digits(static_cast<std::size_t>(n_factors));
  for (int s = n_factors - 1; s >= 0; --s) {
    digits[static_cast<std::size_t>(s)] = rem % 4;
    rem /= 4;
  }
  for (int d : digits) f.push_back(CMat(pauli(d)));
  return kron_all(f);
}

}  // namespace

PauliTransferView choi_to_ptm(const EmissionChannel& ch) {
  const int nf = static_cast<int>(ch.out_dims().size());
  const int na = 1 << (2 * nf);
  PauliTransferView v;
  v.out_dims = ch.out_dims();
  v.matrix.resize(na, 4);
  std::vector<CMat> pa;
  for (int a = 0; a < na; ++a) pa.push_back(pauli_string(a, nf));
  for (int b = 0; b < 4; ++b) {
    const CMat eb = ch.apply(CMat(pauli(b)));
    for (int a = 0; a < na; ++a) v.matrix(a, b) = 0.5 * (pa[static_cast<std::size_t>(a)] * eb).trace().real();
  }
  return v;
}

EmissionChannel ptm_to_choi(const PauliTransferView& ptm) {
  const int nf = static_cast<int>(ptm.out_dims.size());
  const int na = 1 << (2 * nf);
  const int dout = 1 << nf;
  if (ptm.matrix.rows() != na || ptm.matrix.cols() != 4) throw DimensionError("PTM shape");
  std::vector<CMat> eb(4, CMat::Zero(dout, dout));
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < na; ++a)
      if (ptm.matrix(a, b) != 0.0) eb[static_cast<std::size_t>(b)] += (2.0 * ptm.matrix(a, b) / dout) * pauli_string(a, nf);
  CMat j = CMat::Zero(2 * dout, 2 * dout);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      CMat e = CMat::Zero(dout, dout);
      for (int b = 0; b < 4; ++b) e += (0.5 * pauli(b)(k, i)) * eb[static_cast<std::size_t>(b)];
      j.block(i * dout, k * dout, dout, dout) = e;
    }
  return EmissionChannel(hermitian_part(j), ptm.out_dims);
}

double process_fidelity(const EmissionChannel& ch) {
  const CMat v = ideal_isometry(ch.encoding());
  const int dout = ch.d_out();
  CVec phi(2 * dout);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < dout; ++a) phi(i * dout + a) = v(a, i);
  return (phi.adjoint() * ch.choi() * phi)(0, 0).real() / 4.0;
}

double process_fidelity_ptm(const PauliTransferView& ptm) {
  const PauliTransferView ideal = choi_to_ptm(
      ptm.out_dims.size() == 3 ? ideal_emission_channel() : ideal_single_rail_channel());
  const int dout = 1 << static_cast<int>(ptm.out_dims.size());
  return ideal.matrix.cwiseProduct(ptm.matrix).sum() / (2.0 * dout);
}

namespace {

std::vector<SubsystemLabel> chain_labels(Encoding enc, int n_rounds, bool with_qubit) {
  if (enc == Encoding::dual_rail) return pair_labels(n_rounds, with_qubit);
  std::vector<SubsystemLabel> l;
  if (with_qubit) l.push_back(SubsystemLabel::qubit());
  for (int k = 0; k < n_rounds; ++k) l.push_back(SubsystemLabel::mode(k, Freq::w1));
  return l;
}

int rounds_limit(Encoding enc) { return enc == Encoding::dual_rail ? 5 : 10; }

// rho over (emitter, photons); returns the same after H and one channel round.
CMat dense_round(const EmissionChannel& ch, const CMat& rho) {
  const Eigen::Matrix2cd h = hadamard();
  const Eigen::Index P = rho.rows() / 2;
  CMat r(2 * P, 2 * P);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CMat acc = CMat::Zero(P, P);
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) acc += h(a, c) * h(b, d) * rho.block(c * P, d * P, P, P);
      r.block(a * P, b * P, P, P) = acc;
    }
  const int pd = ch.photon_dim();
  const Eigen::Index NP = P * pd;
  CMat out = CMat::Zero(2 * NP, 2 * NP);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CMat blk = CMat::Zero(NP, NP);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          CMat jb(pd, pd);
          for (int x = 0; x < pd; ++x)
            for (int y = 0; y < pd; ++y) jb(x, y) = ch.element(i, a * pd + x, j, b * pd + y);
          if (jb.cwiseAbs().maxCoeff() == 0.0) continue;
          blk += kron(r.block(i * P, j * P, P, P), jb);
        }
      out.block(a * NP, b * NP, NP, NP) = blk;
    }
  return out;
}

}  // namespace

MultimodeState compose_chain_unprojected(const EmissionChannel& ch, int n_rounds) {
  if (n_rounds < 1) throw DomainError("n_rounds must be >= 1");
  if (n_rounds > rounds_limit(ch.encoding())) throw DimensionError("dense chain too large");
  CMat rho = CMat::Zero(2, 2);
  rho(0, 0) = 1.0;
  for (int r = 0; r < n_rounds; ++r) rho = dense_round(ch, rho);
  const int nm = n_rounds * (ch.encoding() == Encoding::dual_rail ? 2 : 1);
  std::vector<int> dims(static_cast<std::size_t>(nm) + 1, 2);
  const double tr = rho.trace().real();
  return MultimodeState::from_density(dims, chain_labels(ch.encoding(), n_rounds, true),
                                      hermitian_part(rho), std::abs(tr - 1.0) > 1e-9);
}

MultimodeState compose_chain(const EmissionChannel& ch, int n_rounds, Projection proj) {
  if (n_rounds < 1) throw DomainError("n_rounds must be >= 1");
  if (n_rounds > rounds_limit(ch.encoding())) throw DimensionError("dense chain too large");
  CMat rho = CMat::Zero(2, 2);
  rho(0, 0) = 1.0;
  for (int r = 0; r < n_rounds; ++r) rho = dense_round(ch, rho);
  const Eigen::Index P = rho.rows() / 2;
  const double sg = proj == Projection::x_plus ? 1.0 : -1.0;
  CMat ph = 0.5 * (rho.block(0, 0, P, P) + rho.block(P, P, P, P) +
                   sg * (rho.block(0, P, P, P) + rho.block(P, 0, P, P)));
  const double p = ph.trace().real();
  if (p < 1e-12) throw ZeroProbabilityError("emitter projection branch has zero probability");
  ph = hermitian_part(ph / p);
  const int nm = n_rounds * (ch.encoding() == Encoding::dual_rail ? 2 : 1);
  return MultimodeState::from_density(std::vector<int>(static_cast<std::size_t>(nm), 2),
                                      chain_labels(ch.encoding(), n_rounds, false), ph);
}

MultimodeState ideal_chain_state(Encoding enc, int n_rounds, Projection proj) {
  if (n_rounds < 1) throw DomainError("n_rounds must be >= 1");
  const bool dual = enc == Encoding::dual_rail;
  const CVec full = dual ? detail::ideal_emission_ket(n_rounds, 4, 1, 2)
                         : detail::ideal_emission_ket(n_rounds, 2, 0, 1);
  CVec ph = detail::project_emitter_x(full, proj == Projection::x_plus ? 1 : -1);
  ph /= ph.norm();
  const int nm = n_rounds * (dual ? 2 : 1);
  return MultimodeState::from_ket(std::vector<int>(static_cast<std::size_t>(nm), 2),
                                  chain_labels(enc, n_rounds, false), canonical_phase(ph));
}

}  // namespace drlab
