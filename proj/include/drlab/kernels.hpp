#pragma once

#include <cstdint>
#include <vector>

#include "drlab/types.hpp"

// Data-parallel hot loops. Every kernel has a serial reference and an OpenMP
// version that must agree bit for bit: work is split into fixed blocks, each
// block owns its RNG stream, and partial results are reduced in block order.
namespace drlab::kernels {

// Mixed state as an eigen-ensemble over n two-level modes (big-endian index).
struct PureEnsemble {
  int n_modes = 0;
  std::vector<double> weights;
  std::vector<CVec> kets;
};

// Shots of the Husimi distribution plus circular Gaussian noise with E|n|^2 = n0[k].
// out has n_shots * n_modes entries.
constexpr std::int64_t kShotBlock = 4096;

namespace serial {
void sample_heterodyne(const PureEnsemble& ens, const std::vector<double>& n0,
                       std::int64_t n_shots, std::uint64_t seed, cplx* out);
// Sums over each of n_blocks contiguous shot blocks of prod_k conj(S_k)^m_k S_k^n_k
// for every exponent tuple with m_k, n_k <= max_exp. Grid index is big-endian over
// window modes with per-mode digit m*(max_exp+1)+n. Optional per-shot weights.
CMat moment_block_sums(const cplx* data, std::int64_t n_shots, int stride,
                       const std::vector<int>& window, int max_exp, int n_blocks,
                       const double* shot_weight = nullptr);
}  // namespace serial

namespace omp {
void sample_heterodyne(const PureEnsemble& ens, const std::vector<double>& n0,
                       std::int64_t n_shots, std::uint64_t seed, cplx* out);
CMat moment_block_sums(const cplx* data, std::int64_t n_shots, int stride,
                       const std::vector<int>& window, int max_exp, int n_blocks,
                       const double* shot_weight = nullptr);
}  // namespace omp

// One draw from the Husimi Q of a normalized 2x2 density matrix over {|0>,|1>}.
template <class Rng>
cplx sample_husimi_qubit(const Eigen::Matrix2cd& rho, double lambda_max, Rng& rng);

}  // namespace drlab::kernels
