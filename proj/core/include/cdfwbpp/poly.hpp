#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdfwbpp/error.hpp"
#include "cdfwbpp/rational.hpp"

namespace cdfwbpp {

using VarId = std::uint32_t;

// Interned, immutable list of variable names. Every polynomial points at the
// context it lives in; arithmetic between polynomials requires compatible
// contexts.
class Context {
 public:
  explicit Context(std::vector<std::string> names);

  static std::shared_ptr<const Context> make(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(VarId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<VarId> find(std::string_view name) const;
  VarId at(std::string_view name) const;

  // True when this context's names are a prefix of `other`'s names.
  bool is_prefix_of(const Context& other) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> index_;
};

using ContextPtr = std::shared_ptr<const Context>;

// Same object, or identical name lists.
bool compatible(const ContextPtr& a, const ContextPtr& b);

// Returns `base`, or `base` with a numeric suffix, such that it does not
// occur in `taken`.
std::string fresh_name(const std::string& base, const std::vector<std::string>& taken);

class Monomial {
 public:
  using Factor = std::pair<VarId, std::uint32_t>;

  Monomial() = default;
  // Sorts by variable, merges repeated variables, drops zero exponents.
  explicit Monomial(std::vector<Factor> factors);

  static Monomial var(VarId v, std::uint32_t exponent = 1);

  const std::vector<Factor>& factors() const { return factors_; }
  std::uint32_t degree() const { return degree_; }
  std::uint32_t exponent(VarId v) const;
  bool is_one() const { return factors_.empty(); }

  bool divides(const Monomial& other) const;
  bool coprime(const Monomial& other) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  // Exact quotient; `b` must divide `a`.
  friend Monomial operator/(const Monomial& a, const Monomial& b);
  static Monomial lcm(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.factors_ == b.factors_;
  }
  friend bool operator<(const Monomial& a, const Monomial& b) {
    return a.factors_ < b.factors_;
  }

  std::size_t hash() const;

 private:
  std::vector<Factor> factors_;
  std::uint32_t degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

// Graded-lex comparison with variable 0 as the most significant variable.
// Returns a negative, zero, or positive value.
int grlex_compare(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Rat coeff;
};

// Sparse multivariate polynomial with exact rational coefficients. Terms are
// kept sorted in descending graded-lex order with no zero coefficients, so the
// representation of a polynomial is unique.
class Poly {
 public:
  explicit Poly(ContextPtr ctx);

  static Poly constant(ContextPtr ctx, const Rat& c);
  static Poly variable(ContextPtr ctx, VarId v);
  static Poly variable(ContextPtr ctx, std::string_view name);
  static Poly monomial(ContextPtr ctx, Monomial m, const Rat& c);
  static Poly from_terms(ContextPtr ctx, std::vector<Term> terms);

  const ContextPtr& context() const { return ctx_; }
  const std::vector<Term>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rat constant_term() const;
  // Coefficient of a monomial (0 if absent).
  Rat coeff(const Monomial& m) const;

  // Maximal total degree; the zero polynomial has degree 0.
  std::uint32_t degree() const;
  // Maximal absolute value of a coefficient; 0 for the zero polynomial.
  Rat height() const;
  // Largest variable id occurring, if any.
  std::optional<VarId> max_var() const;
  bool mentions(VarId v) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& q);
  Poly& operator-=(const Poly& q);
  Poly& operator*=(const Poly& q);
  Poly& operator*=(const Rat& c);
  friend Poly operator+(Poly p, const Poly& q) { return p += q; }
  friend Poly operator-(Poly p, const Poly& q) { return p -= q; }
  friend Poly operator*(const Poly& p, const Poly& q);
  friend Poly operator*(Poly p, const Rat& c) { return p *= c; }
  friend Poly operator*(const Rat& c, Poly p) { return p *= c; }

  Poly pow(unsigned e) const;
  Poly mul_term(const Monomial& m, const Rat& c) const;

  Rat eval(std::span<const Rat> point) const;

  // Homomorphic substitution of variables by polynomials over `target`.
  // Every variable occurring in this polynomial must have an image.
  Poly substitute(const std::vector<std::optional<Poly>>& images, const ContextPtr& target) const;

  // Reinterprets variable i as variable map[i] of `target`.
  Poly rename(const ContextPtr& target, std::span<const VarId> map) const;

  // Moves the polynomial into a context that extends the current one.
  Poly lift(const ContextPtr& bigger) const;

  Poly partial(VarId v) const;

  std::string to_string() const;

  friend bool operator==(const Poly& a, const Poly& b);

 private:
  void require_compatible(const Poly& q, const char* op) const;

  ContextPtr ctx_;
  std::vector<Term> terms_;
};

Poly add(const Poly& p, const Poly& q);
Poly mul(const Poly& p, const Poly& q);
Rat eval(const Poly& p, std::span<const Rat> point);
Poly substitute(const Poly& p, const std::vector<std::optional<Poly>>& images,
                const ContextPtr& target);

// A derivation of Q[x] is determined by its values on the variables.
class Derivation {
 public:
  Derivation(ContextPtr ctx, std::vector<Poly> images);

  const ContextPtr& context() const { return ctx_; }
  const Poly& image(VarId v) const { return images_.at(v); }
  const std::vector<Poly>& images() const { return images_; }
  // Maximal degree of the images.
  std::uint32_t degree() const;

  Poly apply(const Poly& p) const;

 private:
  ContextPtr ctx_;
  std::vector<Poly> images_;
};

Poly apply_derivation(const Derivation& d, const Poly& p);

// Parses `3*x^2 - 5/2*y + (x+1)^3`. Implicit multiplication is rejected.
Poly parse_poly(std::string_view text, const ContextPtr& ctx);

}  // namespace cdfwbpp
