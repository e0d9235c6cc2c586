#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cdfwbpp/groebner.hpp"
#include "cdfwbpp/poly.hpp"

namespace cdfwbpp {

struct SaturationStats {
  // Least M with I_M = I_{M+1}, where I_n is generated by the images of the
  // start polynomial under all words of length <= n.
  std::size_t chain_length = 0;
  std::size_t basis_size = 0;
  std::uint32_t max_degree = 0;
  std::size_t expanded = 0;
};

struct ZeroVerdict {
  enum class Outcome { kZero, kNonzero, kInconclusive };

  Outcome outcome = Outcome::kZero;
  // Operator indices of the witness word, first applied first.
  std::vector<std::size_t> witness;
  Rat value;
  SaturationStats stats;
  // Diagnostic for kInconclusive.
  std::string message;

  bool zero() const { return outcome == Outcome::kZero; }
  bool nonzero() const { return outcome == Outcome::kNonzero; }
};

const char* to_string(ZeroVerdict::Outcome outcome);

// Decides whether point(d_w start) = 0 for every word w over the derivations
// `ops`, where `point` is a common evaluation vector. Breadth-first over
// words, letters in index order, so a NONZERO witness is shortest and
// lexicographically least among the shortest.
ZeroVerdict saturate(const Poly& start, std::span<const Derivation> ops, std::span<const Rat> point,
                     const ResourceLimits& limits = {});

}  // namespace cdfwbpp
