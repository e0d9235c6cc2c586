#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cdfwbpp {

// Exact rationals. mpq_class keeps values canonical (reduced, positive
// denominator) after every arithmetic operation.
using Rat = mpq_class;
using Int = mpz_class;

std::string to_string(const Rat& r);

// Accepts "n" or "n/d" with an optional leading sign.
Rat parse_rat(std::string_view text);

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

Int binomial(unsigned long n, unsigned long k);
Int factorial(unsigned long n);

}  // namespace cdfwbpp
