#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cdfwbpp/poly.hpp"

namespace cdfwbpp {

class MonomialOrder {
 public:
  enum class Kind { kGradedLex, kLex };

  // Graded-lex with variable 0 most significant.
  MonomialOrder() = default;
  // `priority[0]` is the most significant variable.
  MonomialOrder(Kind kind, std::vector<VarId> priority);

  static MonomialOrder graded_lex() { return MonomialOrder(); }
  static MonomialOrder lex() { return MonomialOrder(Kind::kLex, {}); }

  Kind kind() const { return kind_; }
  int compare(const Monomial& a, const Monomial& b) const;

  friend bool operator==(const MonomialOrder& a, const MonomialOrder& b) {
    return a.kind_ == b.kind_ && a.rank_ == b.rank_;
  }

 private:
  int lex_compare(const Monomial& a, const Monomial& b) const;

  Kind kind_ = Kind::kGradedLex;
  // rank_[v] = position of variable v in the priority list; empty = identity.
  std::vector<std::uint32_t> rank_;
};

// Caps guarding the doubly exponential worst case. Exceeding one raises
// Error(kResourceLimit): the query is inconclusive, never answered wrongly.
struct ResourceLimits {
  std::uint32_t max_degree = 64;
  std::size_t max_basis = 4000;
  std::size_t max_iterations = 2'000'000;
};

// Reduced Groebner basis: monic generators sorted by increasing leading
// monomial.
class GroebnerBasis {
 public:
  GroebnerBasis(ContextPtr ctx, MonomialOrder order) : ctx_(std::move(ctx)), order_(order) {}
  GroebnerBasis(ContextPtr ctx, MonomialOrder order, std::vector<Poly> generators);

  const ContextPtr& context() const { return ctx_; }
  const MonomialOrder& order() const { return order_; }
  const std::vector<Poly>& generators() const { return generators_; }
  std::size_t size() const { return generators_.size(); }

 private:
  ContextPtr ctx_;
  MonomialOrder order_;
  std::vector<Poly> generators_;
};

// Leading term of `p` under `order`; `p` must be nonzero.
const Term& leading_term(const Poly& p, const MonomialOrder& order);

// Full normal form of `p` modulo `basis` (any finite set of polynomials;
// a Groebner basis makes the result canonical).
Poly reduce(const Poly& p, const std::vector<Poly>& basis, const MonomialOrder& order);
Poly reduce(const Poly& p, const GroebnerBasis& basis);

GroebnerBasis buchberger(const std::vector<Poly>& gens, const MonomialOrder& order,
                         const ResourceLimits& limits = {});
// For an empty generator list the context cannot be inferred.
GroebnerBasis buchberger(const ContextPtr& ctx, const std::vector<Poly>& gens,
                         const MonomialOrder& order, const ResourceLimits& limits = {});

bool ideal_contains(const GroebnerBasis& basis, const Poly& p);
bool ideal_equal(const GroebnerBasis& a, const GroebnerBasis& b);

// Incrementally maintained Groebner basis. Each add() runs Buchberger's
// algorithm with Gebauer-Moeller pair elimination on the new pairs only and
// leaves the basis reduced.
class IncrementalGroebner {
 public:
  IncrementalGroebner(ContextPtr ctx, MonomialOrder order, ResourceLimits limits = {});

  // Returns true if the ideal grew.
  bool add(const Poly& p);

  Poly reduce(const Poly& p) const;
  bool contains(const Poly& p) const { return reduce(p).is_zero(); }

  const std::vector<Poly>& generators() const { return basis_; }
  GroebnerBasis basis() const;

  std::uint32_t max_degree_seen() const { return max_degree_seen_; }
  std::size_t spair_reductions() const { return spair_reductions_; }
  // Shared iteration budget with callers that run their own loops.
  void charge_iteration();

 private:
  struct Pair {
    std::size_t i;
    std::size_t j;
    Monomial lcm;
  };

  void check_degree(const Poly& p);
  void update(std::size_t h);
  void complete();
  void interreduce();

  ContextPtr ctx_;
  MonomialOrder order_;
  ResourceLimits limits_;
  // All polynomials ever inserted during the current completion, indexed by
  // pair entries; `active_` marks the current (minimal) basis.
  std::vector<Poly> polys_;
  std::vector<std::size_t> active_;
  std::vector<Pair> pairs_;
  std::vector<Poly> basis_;
  std::uint32_t max_degree_seen_ = 0;
  std::size_t spair_reductions_ = 0;
  std::size_t iterations_ = 0;
};

}  // namespace cdfwbpp
