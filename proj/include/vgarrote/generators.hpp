#pragma once
// Synthetic benchmark instances: Gaussian inputs with a chosen covariance,
// outputs from a linear teacher plus Gaussian noise.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "vgarrote/data.hpp"

namespace vg {

enum class Covariance { identity, toeplitz, block, zhao };

struct InstanceSpec {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t p_val = 0;
  std::size_t p_test = 0;
  Vector w_true;
  double noise_sd = 1.0;
  Covariance covariance = Covariance::identity;
  double zeta = 0.0;           // toeplitz: chi_ij = zeta^|i-j|
  std::size_t block_size = 10;  // block: constant correlation inside each block
  double within_corr = 0.9;
  char zhao_variant = 'a';
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  Dataset train;
  Dataset val;
  Dataset test;
  Vector w_true;
  InstanceSpec spec;
};

/// Throws std::invalid_argument for inconsistent specs and NumericalError
/// when the requested covariance is not positive definite.
GeneratedInstance gen_instance(const InstanceSpec& spec);

/// Three-feature example with x3 = 2/3 x1 + 2/3 x2 + noise; teacher (2,3,0)
/// for variant 'a' and (-2,3,0) for variant 'b'.
GeneratedInstance gen_zhao(char variant, std::size_t p, std::uint64_t seed,
                           std::size_t p_val = 0, std::size_t p_test = 0);

/// Target covariance matrix for identity/toeplitz/block specs.
Matrix covariance_matrix(const InstanceSpec& spec);

/// k active entries equal to 1 at indices drawn uniformly without replacement.
Vector random_sparse_teacher(std::size_t n, std::size_t k, std::uint64_t seed);

/// Derives independent per-instance seeds from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Preset specs for the standard benchmark experiments.
InstanceSpec example1_spec(std::uint64_t seed);
InstanceSpec example2_spec(std::uint64_t seed);

std::string to_string(Covariance c);
Covariance covariance_from_string(const std::string& s);

/// key=value text, one entry per line; '#' starts a comment.
void write_spec(std::ostream& out, const InstanceSpec& spec);
InstanceSpec read_spec(std::istream& in);

}  // namespace vg
