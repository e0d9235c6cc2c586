#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdfwbpp/chain.hpp"
#include "cdfwbpp/groebner.hpp"
#include "cdfwbpp/poly.hpp"
#include "cdfwbpp/series.hpp"
#include "cdfwbpp/wbpp.hpp"

namespace cdfwbpp {

// Autonomous polynomial system d/dx_j y_i = P_ij(y), y(0) = c, over base
// variables x_1..x_d (the axes).
class CdfSystem {
 public:
  // kernel[i][j] is P_ij, a polynomial over the generator context.
  CdfSystem(std::vector<std::string> axes, ContextPtr generators, std::vector<std::vector<Poly>> kernel,
            std::vector<Rat> init);

  std::size_t dim() const { return axes_.size(); }
  std::size_t order() const { return ctx_->size(); }
  const std::vector<std::string>& axes() const { return axes_; }
  const ContextPtr& context() const { return ctx_; }
  const Poly& kernel(VarId gen, std::size_t axis) const { return kernel_.at(gen).at(axis); }
  const std::vector<std::vector<Poly>>& kernel() const { return kernel_; }
  const std::vector<Rat>& init() const { return init_; }
  std::uint32_t degree() const;

  // L_j = sum_h P_hj d/dy_h.
  const Derivation& lie(std::size_t axis) const { return lie_.at(axis); }
  const std::vector<Derivation>& lie_derivations() const { return lie_; }

  friend bool operator==(const CdfSystem& a, const CdfSystem& b);

 private:
  std::vector<std::string> axes_;
  ContextPtr ctx_;
  std::vector<std::vector<Poly>> kernel_;
  std::vector<Rat> init_;
  std::vector<Derivation> lie_;
};

// The series p o f where f solves the system.
struct CdfSeries {
  CdfSystem system;
  Poly expr;

  CdfSeries(CdfSystem sys, Poly p);
  friend bool operator==(const CdfSeries& a, const CdfSeries& b) {
    return a.system == b.system && a.expr == b.expr;
  }
};

// Several series over one shared system.
struct CdfVector {
  CdfSystem system;
  std::vector<Poly> exprs;

  CdfVector(CdfSystem sys, std::vector<Poly> ps);
  CdfSeries at(std::size_t i) const { return CdfSeries(system, exprs.at(i)); }
};

// Grows a system one generator at a time. Polynomials handed in may live in
// any earlier (prefix) context of the builder.
class CdfBuilder {
 public:
  explicit CdfBuilder(std::vector<std::string> axes);
  explicit CdfBuilder(const CdfSystem& base);

  std::size_t dim() const { return axes_.size(); }
  const ContextPtr& context() const { return ctx_; }
  VarId add_generator(const std::string& hint, const Rat& init);
  void set_kernel(VarId gen, std::size_t axis, const Poly& p);
  // Copies every generator of `sys` renamed apart; returns the new ids.
  std::vector<VarId> absorb(const CdfSystem& sys);
  // Moves `p` into the current context.
  Poly lift(const Poly& p) const;
  Poly var(VarId gen) const { return Poly::variable(ctx_, gen); }
  Rat init(VarId gen) const { return init_.at(gen); }
  CdfSystem build() const;

 private:
  std::vector<std::string> axes_;
  std::vector<std::string> names_;
  ContextPtr ctx_;
  std::vector<std::vector<Poly>> kernel_;
  std::vector<Rat> init_;
};

// A system whose kernel may mention the base variables: the context lists the
// generators first, then the axis names.
struct RawCdfSystem {
  std::vector<std::string> axes;
  ContextPtr context;
  std::size_t num_generators = 0;
  std::vector<std::vector<Poly>> kernel;
  std::vector<Rat> init;
};

// Replaces each base variable x_j by a generator t_j with d/dx_i t_j = [i=j]
// and t_j(0) = 0. A system that never mentions a base variable comes back
// with its generators unchanged.
CdfVector autonomize(const RawCdfSystem& raw, const std::vector<Poly>& exprs);

Poly lie_derivative(const CdfSystem& sys, std::size_t axis, const Poly& p);

// Coefficient at n via L_w p evaluated at the initial vector, for the word
// w = x1^n1 x2^n2 ... (or the supplied axis sequence).
Rat coeff_via_lie(const CdfSeries& s, const Exponent& n);
Rat coeff_via_word(const CdfSeries& s, const std::vector<std::size_t>& word);

// Generator tables to total degree N by the layered recurrence
// f_{i, m + e_j} = (P_ij o f)_m.
std::vector<TruncSeries> generator_tables(const CdfSystem& sys, std::uint32_t order);
// p evaluated on exponential coefficient tables.
TruncSeries eval_on_tables(const Poly& p, const std::vector<TruncSeries>& tables, std::size_t dim,
                           std::uint32_t order);
TruncSeries coeff_table(const CdfSeries& s, std::uint32_t order);

// Witness is the axis word of the first nonzero Lie derivative; its Parikh
// image is the witness exponent.
ZeroVerdict zeroness(const CdfSeries& s, const ResourceLimits& limits = {});
ZeroVerdict equivalent(const CdfSeries& a, const CdfSeries& b, const ResourceLimits& limits = {});
Exponent parikh(const std::vector<std::size_t>& word, std::size_t dim);

struct MergedSeries {
  CdfSystem system;
  Poly first;
  Poly second;
};
MergedSeries merge(const CdfSeries& a, const CdfSeries& b);

CdfSeries c_constant(const std::vector<std::string>& axes, const Rat& c);
// The base variable x_axis.
CdfSeries c_atom(const std::vector<std::string>& axes, std::size_t axis);
CdfSeries c_scale(const Rat& c, const CdfSeries& s);
CdfSeries c_add(const CdfSeries& a, const CdfSeries& b);
CdfSeries c_sub(const CdfSeries& a, const CdfSeries& b);
CdfSeries c_mul(const CdfSeries& a, const CdfSeries& b);
CdfSeries c_derive(const CdfSeries& s, std::size_t axis);
CdfSeries c_inverse(const CdfSeries& s);

// f lives over axes (x, y) with k = g.size() trailing y axes; every g_i lives
// over x. Requires g_i(0) = 0 whenever y_i can influence f.
CdfVector compose_strong(const CdfVector& f, const std::vector<CdfSeries>& g);
CdfSeries compose_strong(const CdfSeries& f, const std::vector<CdfSeries>& g);

struct ConstraintExpr;
using ConstraintPtr = std::shared_ptr<const ConstraintExpr>;

// Constraint over exponent vectors: atoms z_j = n and z_j = n mod m, closed
// under and, or, not.
struct ConstraintExpr {
  enum class Kind { kTrue, kFalse, kEq, kMod, kAnd, kOr, kNot };

  Kind kind = Kind::kTrue;
  std::size_t axis = 0;
  std::uint32_t value = 0;
  std::uint32_t modulus = 1;
  std::vector<ConstraintPtr> children;

  static ConstraintPtr truth(bool b);
  static ConstraintPtr eq(std::size_t axis, std::uint32_t n);
  static ConstraintPtr mod(std::size_t axis, std::uint32_t n, std::uint32_t m);
  static ConstraintPtr conj(std::vector<ConstraintPtr> cs);
  static ConstraintPtr disj(std::vector<ConstraintPtr> cs);
  static ConstraintPtr negate(ConstraintPtr c);
  // z_j >= n and z_j <= n, expressed through equality atoms.
  static ConstraintPtr at_least(std::size_t axis, std::uint32_t n);
  static ConstraintPtr at_most(std::size_t axis, std::uint32_t n);

  bool holds(const Exponent& n) const;
  // Largest axis mentioned plus one (0 if none).
  std::size_t arity() const;
};

// `names[j]` renders axis j; defaults to z1, z2, ...
std::string to_string(const ConstraintExpr& c, const std::vector<std::string>& names = {});

// Finite commutative monoid with a homomorphism from N^d and an accepting
// subset; recognizes {n : h(n) in F}.
class MonoidRecognizer {
 public:
  // Checks closure, commutativity, associativity and the identity law.
  MonoidRecognizer(std::vector<std::vector<std::size_t>> table, std::size_t identity,
                   std::vector<std::size_t> images, std::vector<bool> accepting);

  // Generated submonoid of the product construction for the constraint.
  static MonoidRecognizer compile(const ConstraintExpr& c, std::size_t dim);

  std::size_t size() const { return table_.size(); }
  std::size_t dim() const { return images_.size(); }
  std::size_t identity() const { return identity_; }
  std::size_t add(std::size_t a, std::size_t b) const { return table_[a][b]; }
  std::size_t image(std::size_t axis) const { return images_.at(axis); }
  bool accepting(std::size_t m) const { return accepting_.at(m); }
  std::size_t element_of(const Exponent& n) const;
  bool recognizes(const Exponent& n) const { return accepting_[element_of(n)]; }

 private:
  std::vector<std::vector<std::size_t>> table_;
  std::size_t identity_;
  std::vector<std::size_t> images_;
  std::vector<bool> accepting_;
};

CdfSeries restrict_regular(const CdfSeries& s, const ConstraintExpr& phi);
CdfSeries restrict_regular(const CdfSeries& s, const MonoidRecognizer& rec);

struct WellPosedness {
  bool ok = true;
  std::string diagnostic;
  RatMatrix jacobian;
};
// For y = F(x, y): F(0, 0) = 0 and dF/dy at the origin nilpotent. F has
// dim = d + k with the k unknowns as trailing axes.
WellPosedness well_posed(const CdfVector& F);
// Canonical solution of y = F(x, y), as series over the first d axes.
CdfVector implicit_solve(const CdfVector& F);

// Axis j becomes letter j (a, b, c, ...), generators become nonterminals and
// the initial vector the output.
Wbpp to_wbpp(const CdfSeries& s);
// Requires a commutative model; the bounded check up to `check_length` must
// find no counterexample.
CdfSeries from_wbpp(const Wbpp& m, std::size_t check_length = 5);

}  // namespace cdfwbpp
