#include "cdfwbpp/rational.hpp"

#include <cctype>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kContextMismatch: return "variable context mismatch";
    case ErrorKind::kArity: return "arity mismatch";
    case ErrorKind::kMissingImage: return "missing substitution image";
    case ErrorKind::kUnknownLetter: return "unknown letter";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kPrecondition: return "precondition violated";
    case ErrorKind::kNotWellPosed: return "NOT_WELL_POSED";
    case ErrorKind::kNotComposable: return "NOT_STRONGLY_COMPOSABLE";
    case ErrorKind::kConstraint: return "malformed constraint";
    case ErrorKind::kResourceLimit: return "INCONCLUSIVE_RESOURCE_LIMIT";
    case ErrorKind::kInternal: return "INTERNAL_SOUNDNESS_FAILURE";
  }
  return "error";
}

std::string to_string(const Rat& r) { return r.get_str(); }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rat parse_rat(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw Error(ErrorKind::kParse, "malformed rational literal '" + std::string(text) + "'");
  }
  Int n(std::string(num), 10);
  Int d(std::string(den), 10);
  if (d == 0) throw Error(ErrorKind::kParse, "zero denominator in '" + std::string(text) + "'");
  Rat r(n, d);
  r.canonicalize();
  return negative ? Rat(-r) : r;
}

Int binomial(unsigned long n, unsigned long k) {
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

Int factorial(unsigned long n) {
  Int out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

}  // namespace cdfwbpp
