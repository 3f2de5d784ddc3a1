#include <algorithm>
#include <cmath>

#include <omp.h>

#include "drlab/entanglement.hpp"
#include "drlab/error.hpp"
#include "drlab/util.hpp"

// Localizable entanglement of a channel-generated chain without materializing it.
// The operator on (emitter, kept outputs) is advanced one round at a time and each
// measured output is projected as soon as it is emitted, so memory stays O(1) in the
// chain length while the outcome tree is walked depth first.
namespace drlab {

namespace {

struct Round {
  // Per outcome: the emitted outputs mapped to the kept space, kn x photon_dim,
  // and the conditioned Choi blocks B[c][c'] = (I (x) W) J_cc' (I (x) W)^dag.
  std::vector<std::array<CMat, 4>> blocks;
  int kn = 1;
};

CMat bra_row(const Eigen::Vector2cd& b) {
  CMat r(1, 2);
  r << b(0), b(1);
  return r;
}

Eigen::Vector2cd plain_bra(MeasBasis b, int o) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (b) {
    case MeasBasis::Z: return o == 0 ? Eigen::Vector2cd(1, 0) : Eigen::Vector2cd(0, 1);
    case MeasBasis::X: return o == 0 ? Eigen::Vector2cd(h, h) : Eigen::Vector2cd(h, -h);
    case MeasBasis::Y: return o == 0 ? Eigen::Vector2cd(h, cplx(0, -h)) : Eigen::Vector2cd(h, cplx(0, h));
    default: return {1, 0};
  }
}

// Output maps for one emitted mode (2 levels).
std::vector<CMat> mode_maps(MeasBasis b) {
  if (b == MeasBasis::none) return {CMat::Identity(2, 2)};
  return {bra_row(plain_bra(b, 0)), bra_row(plain_bra(b, 1))};
}

// Output maps for one dual-rail pair read as a logical qubit (0 := |01>, 1 := |10>).
std::vector<CMat> logical_maps(MeasBasis b) {
  CMat keep = CMat::Zero(2, 4);
  keep(0, 1) = 1.0;
  keep(1, 2) = 1.0;
  if (b == MeasBasis::none) return {keep};
  std::vector<CMat> out;
  for (int o = 0; o < 2; ++o) out.push_back(bra_row(plain_bra(b, o)) * keep);
  return out;
}

Round make_round(const EmissionChannel& ch, const std::vector<CMat>& maps) {
  Round r;
  r.kn = static_cast<int>(maps[0].rows());
  const int pd = ch.photon_dim();
  for (const auto& w : maps) {
    std::array<CMat, 4> b;
    CMat lift = CMat::Zero(2 * w.rows(), 2 * pd);  // I_emitter (x) W
    lift.block(0, 0, w.rows(), pd) = w;
    lift.block(w.rows(), pd, w.rows(), pd) = w;
    for (int c = 0; c < 2; ++c)
      for (int cp = 0; cp < 2; ++cp)
        b[static_cast<std::size_t>(c * 2 + cp)] =
            lift * ch.choi().block(c * 2 * pd, cp * 2 * pd, 2 * pd, 2 * pd) * lift.adjoint();
    r.blocks.push_back(std::move(b));
  }
  return r;
}

// X over (emitter, kept) of size 2K; H on the emitter then one conditioned round.
CMat advance(const CMat& x, const std::array<CMat, 4>& b, int kn) {
  const Eigen::Index K = x.rows() / 2;
  const CMat x00 = x.block(0, 0, K, K), x01 = x.block(0, K, K, K), x10 = x.block(K, 0, K, K), x11 = x.block(K, K, K, K);
  // (H (x) I) X (H (x) I)
  const CMat h00 = 0.5 * (x00 + x01 + x10 + x11);
  const CMat h01 = 0.5 * (x00 - x01 + x10 - x11);
  const CMat h10 = 0.5 * (x00 + x01 - x10 - x11);
  const CMat h11 = 0.5 * (x00 - x01 - x10 + x11);
  const CMat* hx[4] = {&h00, &h01, &h10, &h11};
  const Eigen::Index nk = K * kn;
  CMat out = CMat::Zero(2 * nk, 2 * nk);
  for (int c = 0; c < 4; ++c) {
    const CMat& xc = *hx[c];
    const CMat& bc = b[static_cast<std::size_t>(c)];
    for (int e = 0; e < 2; ++e)
      for (int ep = 0; ep < 2; ++ep) {
        const auto bb = bc.block(e * kn, ep * kn, kn, kn);
        if (bb.cwiseAbs().maxCoeff() == 0.0) continue;
        out.block(e * nk, ep * nk, nk, nk) += kron(xc, bb);
      }
  }
  return out;
}

struct Accum {
  double neg = 0.0, weight = 0.0;
  long long leaves = 0;
};

void finish(const CMat& x, Accum& a) {
  const Eigen::Index K = x.rows() / 2;
  // <+| on the emitter.
  const CMat r = 0.5 * (x.block(0, 0, K, K) + x.block(0, K, K, K) + x.block(K, 0, K, K) + x.block(K, K, K, K));
  const double w = r.trace().real();
  ++a.leaves;
  a.weight += w;
  if (w >= 1e-14) a.neg += negativity(Eigen::Matrix4cd(r));
}

void walk(const std::vector<Round>& rounds, std::size_t depth, const CMat& x, Accum& a) {
  if (depth == rounds.size()) {
    finish(x, a);
    return;
  }
  const Round& r = rounds[depth];
  for (const auto& b : r.blocks) {
    CMat next = advance(x, b, r.kn);
    if (next.trace().real() < 1e-14) continue;
    walk(rounds, depth + 1, next, a);
  }
}

std::vector<Round> build_rounds(const EmissionChannel& ch, LeVariant v, int i, int j) {
  std::vector<Round> rounds;
  if (v == LeVariant::single_rail) {
    if (ch.encoding() != Encoding::single_rail) throw DomainError("single-rail LE needs a single-rail channel");
    const int n = j + 1;
    for (int m = 0; m < n; ++m) {
      MeasBasis b = (m == i || m == j) ? MeasBasis::none : (m > i && m < j ? MeasBasis::X : MeasBasis::Z);
      rounds.push_back(make_round(ch, mode_maps(b)));
    }
    return rounds;
  }
  if (ch.encoding() != Encoding::dual_rail) throw DomainError("dual-rail LE needs a dual-rail channel");
  if (v == LeVariant::logical) {
    const MeasurementPlan p = le_plan_logical(j + 1, i, j);
    for (auto b : p.basis) rounds.push_back(make_round(ch, logical_maps(b)));
    return rounds;
  }
  const int n_logical = j / 2 + 1;
  const MeasurementPlan p = le_plan_physical(n_logical, i, j);
  for (int r = 0; r < n_logical; ++r) {
    // Pair order (omega2, omega1) = modes (2r, 2r+1).
    const auto a = mode_maps(p.basis[static_cast<std::size_t>(2 * r)]);
    const auto b = mode_maps(p.basis[static_cast<std::size_t>(2 * r + 1)]);
    std::vector<CMat> maps;
    for (const auto& x : a)
      for (const auto& y : b) maps.push_back(kron(x, y));
    rounds.push_back(make_round(ch, maps));
  }
  return rounds;
}

}  // namespace

LeResult le_from_channel(const EmissionChannel& ch, LeVariant variant, int i, int j, bool parallel) {
  if (i > j) std::swap(i, j);
  if (i < 0 || i == j) throw DomainError("invalid LE pair");
  const std::vector<Round> rounds = build_rounds(ch, variant, i, j);

  // Enumerate prefixes breadth first until there is enough independent work.
  struct Prefix {
    std::size_t depth;
    CMat x;
  };
  CMat x0 = CMat::Zero(2, 2);
  x0(0, 0) = 1.0;
  std::vector<Prefix> work{{0, x0}};
  const std::size_t target = parallel ? 256 : 1;
  while (work.size() < target) {
    std::vector<Prefix> next;
    bool grew = false;
    for (auto& p : work) {
      if (p.depth == rounds.size()) {
        next.push_back(std::move(p));
        continue;
      }
      const Round& r = rounds[p.depth];
      for (const auto& b : r.blocks) {
        CMat nx = advance(p.x, b, r.kn);
        if (nx.trace().real() < 1e-14) continue;
        next.push_back({p.depth + 1, std::move(nx)});
      }
      grew = true;
    }
    work.swap(next);
    if (!grew) break;
  }
  std::vector<Accum> acc(work.size());
  const int nt = configured_threads();
#pragma omp parallel for schedule(dynamic) if (parallel) num_threads(nt > 0 ? nt : omp_get_max_threads())
  for (std::size_t k = 0; k < work.size(); ++k) walk(rounds, work[k].depth, work[k].x, acc[k]);
  Accum total;
  for (const auto& a : acc) {
    total.neg += a.neg;
    total.weight += a.weight;
    total.leaves += a.leaves;
  }
  LeResult res;
  res.i = i;
  res.j = j;
  if (total.weight < 1e-12) throw ZeroProbabilityError("LE post-selection has zero probability");
  res.value = total.neg / total.weight;
  res.outcome_count = total.leaves;
  // Independent normalizer from the transfer-operator contraction.
  const int n_rounds = static_cast<int>(rounds.size());
  const double indep = chain_fidelity(ch, n_rounds, variant == LeVariant::logical).success_probability;
  res.probability_sum = total.weight / indep;
  return res;
}

LeCurve le_distance_curve(const EmissionChannel& ch, double threshold, LeVariant variant, int max_distance) {
  if (!(threshold > 0.0 && threshold < 0.5)) throw DomainError("threshold must lie in (0, 0.5)");
  LeCurve c;
  c.threshold_length = max_distance + 1;
  c.exceeds_range = true;
  for (int d = variant == LeVariant::physical ? 0 : 1; d <= max_distance; ++d) {
    bool pass = true;
    std::vector<int> targets;
    if (variant == LeVariant::physical) {
      for (int m = 2 * d; m <= 2 * d + 1; ++m)
        if (m != 0) targets.push_back(m);
    } else {
      targets.push_back(d);
    }
    for (int t : targets) {
      const LeResult r = le_from_channel(ch, variant, 0, t);
      c.points.push_back({d, t, r.value, r.stderr_});
      pass &= r.value >= threshold;
    }
    if (!pass) {
      c.threshold_length = d;
      c.exceeds_range = false;
      break;
    }
  }
  return c;
}

}  // namespace drlab
