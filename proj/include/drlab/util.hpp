#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "drlab/types.hpp"

namespace drlab {

// splitmix64 step; used to expand one master seed into independent streams.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

using Rng = std::mt19937_64;

// Pauli matrices in the {|0>,|1>} basis, index 0..3 = I, X, Y, Z.
const Eigen::Matrix2cd& pauli(int k);
Eigen::Matrix2cd hadamard();

std::int64_t ipow(std::int64_t base, int exp);
int product(const std::vector<int>& dims);

// Kronecker product of dense matrices.
CMat kron(const CMat& a, const CMat& b);
CMat kron_all(const std::vector<CMat>& ms);

// Apply a single-subsystem operator to a ket / density matrix.
CVec apply_local(const CVec& psi, const std::vector<int>& dims, int site, const CMat& op);
CMat apply_local(const CMat& rho, const std::vector<int>& dims, int site, const CMat& op);

// Eigen-projection of a Hermitian matrix onto {rho >= 0, Tr rho = trace}.
CMat project_psd_trace(const CMat& h, double trace = 1.0);
// Euclidean projection of a vector onto the simplex {x >= 0, sum x = s}.
RVec project_simplex(const RVec& v, double s = 1.0);

CMat hermitian_part(const CMat& m);
double trace_distance(const CMat& a, const CMat& b);

// Threads requested through DRLAB_THREADS (0 = runtime default).
int configured_threads();

}  // namespace drlab
