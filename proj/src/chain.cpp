#include <array>
#include <cmath>

#include "drlab/channels.hpp"
#include "drlab/error.hpp"
#include "drlab/util.hpp"

namespace drlab {

namespace {

// M[b][a][b'][a'] = <phi_a| rho_{b b'} |phi_a'> between the noisy chain (emitter
// index b) and the ideal chain kets (emitter index a). T[b][b'] = Tr rho_{b b'}
// restricted to the allowed photon outcomes.
using Tensor4 = std::array<cplx, 16>;
using Tensor2 = std::array<cplx, 4>;

inline int i4(int b, int a, int bp, int ap) { return ((b * 2 + a) * 2 + bp) * 2 + ap; }

struct ChainContraction {
  Tensor4 m{};
  Tensor2 t{};
};

ChainContraction contract(const EmissionChannel& ch, int n_rounds, bool logical) {
  const int pd = ch.photon_dim();
  const bool dual = ch.encoding() == Encoding::dual_rail;
  const int x_of[2] = {dual ? 1 : 0, dual ? 2 : 1};
  std::vector<int> allowed;
  for (int y = 0; y < pd; ++y)
    if (!logical || y == x_of[0] || y == x_of[1]) allowed.push_back(y);
  const double h = 1.0 / std::sqrt(2.0);
  const double H[2][2] = {{h, h}, {h, -h}};

  ChainContraction s;
  s.m[i4(0, 0, 0, 0)] = 1.0;
  s.t[0] = 1.0;
  for (int r = 0; r < n_rounds; ++r) {
    Tensor4 mp{};
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d)
        for (int cp = 0; cp < 2; ++cp)
          for (int dp = 0; dp < 2; ++dp) {
            cplx acc = 0.0;
            for (int e = 0; e < 2; ++e)
              for (int f = 0; f < 2; ++f)
                for (int ep = 0; ep < 2; ++ep)
                  for (int fp = 0; fp < 2; ++fp)
                    acc += H[c][e] * H[cp][ep] * H[d][f] * H[dp][fp] * s.m[i4(e, f, ep, fp)];
            mp[i4(c, d, cp, dp)] = acc;
          }
    Tensor2 tp{};
    for (int c = 0; c < 2; ++c)
      for (int cp = 0; cp < 2; ++cp) {
        cplx acc = 0.0;
        for (int e = 0; e < 2; ++e)
          for (int ep = 0; ep < 2; ++ep) acc += H[c][e] * H[cp][ep] * s.t[e * 2 + ep];
        tp[c * 2 + cp] = acc;
      }
    Tensor4 mn{};
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a)
        for (int bp = 0; bp < 2; ++bp)
          for (int ap = 0; ap < 2; ++ap) {
            cplx acc = 0.0;
            for (int c = 0; c < 2; ++c)
              for (int cp = 0; cp < 2; ++cp)
                acc += ch.element(c, b * pd + x_of[a], cp, bp * pd + x_of[ap]) * mp[i4(c, a, cp, ap)];
            mn[i4(b, a, bp, ap)] = acc;
          }
    Tensor2 tn{};
    for (int b = 0; b < 2; ++b)
      for (int bp = 0; bp < 2; ++bp) {
        cplx acc = 0.0;
        for (int y : allowed)
          for (int c = 0; c < 2; ++c)
            for (int cp = 0; cp < 2; ++cp) acc += ch.element(c, b * pd + y, cp, bp * pd + y) * tp[c * 2 + cp];
        tn[b * 2 + bp] = acc;
      }
    s.m = mn;
    s.t = tn;
  }
  return s;
}

}  // namespace

ChainFidelity chain_fidelity(const EmissionChannel& ch, int n_rounds, bool logical, Projection proj) {
  if (n_rounds < 1) throw DomainError("n_rounds must be >= 1");
  if (logical && ch.encoding() != Encoding::dual_rail)
    throw DomainError("logical post-selection needs the dual-rail encoding");
  const double h = 1.0 / std::sqrt(2.0);
  const double s[2] = {h, proj == Projection::x_plus ? h : -h};
  const ChainContraction noisy = contract(ch, n_rounds, logical);
  const EmissionChannel ideal =
      ch.encoding() == Encoding::dual_rail ? ideal_emission_channel() : ideal_single_rail_channel();
  const ChainContraction ref = contract(ideal, n_rounds, false);
  cplx num = 0.0, p = 0.0, p_ideal = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a)
      for (int bp = 0; bp < 2; ++bp)
        for (int ap = 0; ap < 2; ++ap) num += s[a] * s[ap] * s[b] * s[bp] * noisy.m[i4(b, a, bp, ap)];
  for (int b = 0; b < 2; ++b)
    for (int bp = 0; bp < 2; ++bp) {
      p += s[b] * s[bp] * noisy.t[b * 2 + bp];
      p_ideal += s[b] * s[bp] * ref.t[b * 2 + bp];
    }
  if (p.real() < 1e-12) throw ZeroProbabilityError("chain projection branch has zero probability");
  return {num.real() / (p.real() * p_ideal.real()), p.real()};
}

namespace {

void finish_curve(ScalingCurve& c, int n_max, int n_exact) {
  // log F = a + b n over exact rows
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& r : c.rows) {
    if (r.extrapolated || r.fidelity <= 0) continue;
    const double y = std::log(r.fidelity);
    sx += r.n;
    sy += y;
    sxx += double(r.n) * r.n;
    sxy += r.n * y;
    ++cnt;
  }
  if (cnt >= 2) {
    c.fit_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    c.fit_intercept = (sy - c.fit_slope * sx) / cnt;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / cnt;
    for (const auto& r : c.rows) {
      if (r.extrapolated || r.fidelity <= 0) continue;
      const double y = std::log(r.fidelity);
      ss_res += std::pow(y - (c.fit_intercept + c.fit_slope * r.n), 2);
      ss_tot += std::pow(y - ybar, 2);
    }
    c.fit_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
  for (int n = n_exact + 1; n <= n_max; ++n) {
    ScalingRow r;
    r.n = n;
    r.fidelity = std::exp(c.fit_intercept + c.fit_slope * n);
    r.extrapolated = true;
    c.rows.push_back(r);
  }
  c.crossing = 0;
  for (const auto& r : c.rows) {
    if (r.fidelity > 0.5) c.crossing = r.n;
    else break;
  }
}

}  // namespace

ScalingCurve fidelity_scaling_curve(const EmissionChannel& ch, int n_max, bool logical, int n_exact) {
  return fidelity_scaling_curve(std::vector<EmissionChannel>{ch}, n_max, logical, n_exact);
}

ScalingCurve fidelity_scaling_curve(const std::vector<EmissionChannel>& ensemble, int n_max,
                                    bool logical, int n_exact) {
  if (ensemble.empty()) throw DomainError("empty channel ensemble");
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  ScalingCurve c;
  const int ne = std::min(n_max, n_exact);
  for (int n = 1; n <= ne; ++n) {
    double s = 0, ss = 0;
    for (const auto& ch : ensemble) {
      const double f = chain_fidelity(ch, n, logical).fidelity;
      s += f;
      ss += f * f;
    }
    const double k = static_cast<double>(ensemble.size());
    ScalingRow r;
    r.n = n;
    r.fidelity = s / k;
    r.stderr_ = k > 1 ? std::sqrt(std::max(0.0, (ss - s * s / k) / (k - 1))) : 0.0;
    c.rows.push_back(r);
  }
  finish_curve(c, n_max, ne);
  return c;
}

}  // namespace drlab
