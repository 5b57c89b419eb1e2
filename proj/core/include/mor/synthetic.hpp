#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mor/statespace.hpp"

namespace mor {

enum class SyntheticKind {
  /// E = E^T > 0 and A = A^T < 0 tridiagonal, c = b. Sparse storage.
  sss,
  /// Dense, E = I, A = S - (K K^T / n + I / 10) with S skew: poles in the open LHP.
  generic,
  /// Damped mass-spring chain in first-order form (complex poles), force
  /// and position sensor on the first mass. Sparse storage.
  resonant_chain,
};

std::string_view to_string(SyntheticKind k);
std::optional<SyntheticKind> parse_synthetic_kind(std::string_view s);

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::sss;
  int n = 10;
  std::uint64_t seed = 0;
};

/// Deterministic in (kind, n, seed). InvalidInput if n < 2.
LtiSystem make_synthetic(const SyntheticSpec& spec);

}  // namespace mor
