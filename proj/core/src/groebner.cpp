#include "cdfwbpp/groebner.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

MonomialOrder::MonomialOrder(Kind kind, std::vector<VarId> priority) : kind_(kind) {
  if (priority.empty()) return;
  VarId top = *std::max_element(priority.begin(), priority.end());
  rank_.assign(top + 1, UINT32_MAX);
  for (std::size_t i = 0; i < priority.size(); ++i) {
    if (rank_[priority[i]] != UINT32_MAX) {
      throw Error(ErrorKind::kPrecondition, "variable priority is not a permutation");
    }
    rank_[priority[i]] = static_cast<std::uint32_t>(i);
  }
  for (auto r : rank_) {
    if (r == UINT32_MAX) throw Error(ErrorKind::kPrecondition, "variable priority is not a permutation");
  }
  // The identity permutation is stored as empty so that equal orders compare equal.
  bool identity = true;
  for (std::size_t i = 0; i < rank_.size(); ++i) identity = identity && rank_[i] == i;
  if (identity) rank_.clear();
}

int MonomialOrder::lex_compare(const Monomial& a, const Monomial& b) const {
  if (rank_.empty()) {
    const auto& fa = a.factors();
    const auto& fb = b.factors();
    std::size_t n = std::min(fa.size(), fb.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (fa[i].first != fb[i].first) return fa[i].first < fb[i].first ? 1 : -1;
      if (fa[i].second != fb[i].second) return fa[i].second < fb[i].second ? -1 : 1;
    }
    if (fa.size() == fb.size()) return 0;
    return fa.size() > fb.size() ? 1 : -1;
  }
  // Walk the variables in priority order.
  for (std::uint32_t r = 0; r < rank_.size(); ++r) {
    VarId v = static_cast<VarId>(std::find(rank_.begin(), rank_.end(), r) - rank_.begin());
    std::uint32_t ea = a.exponent(v);
    std::uint32_t eb = b.exponent(v);
    if (ea != eb) return ea < eb ? -1 : 1;
  }
  return 0;
}

int MonomialOrder::compare(const Monomial& a, const Monomial& b) const {
  if (kind_ == Kind::kGradedLex) {
    if (rank_.empty()) return grlex_compare(a, b);
    if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  }
  return lex_compare(a, b);
}

namespace {

bool is_native(const MonomialOrder& order) {
  return order == MonomialOrder::graded_lex();
}

struct OrderGreater {
  const MonomialOrder* order;
  bool operator()(const Monomial& a, const Monomial& b) const { return order->compare(a, b) > 0; }
};

Poly make_monic(const Poly& p, const MonomialOrder& order) {
  if (p.is_zero()) return p;
  Rat lc = leading_term(p, order).coeff;
  if (lc == 1) return p;
  Rat inv = 1 / lc;
  return p * inv;
}

Poly spoly(const Poly& f, const Poly& g, const MonomialOrder& order) {
  const Term& lf = leading_term(f, order);
  const Term& lg = leading_term(g, order);
  Monomial l = Monomial::lcm(lf.mono, lg.mono);
  return f.mul_term(l / lf.mono, 1 / lf.coeff) - g.mul_term(l / lg.mono, 1 / lg.coeff);
}

}  // namespace

const Term& leading_term(const Poly& p, const MonomialOrder& order) {
  if (p.is_zero()) throw Error(ErrorKind::kInternal, "leading term of the zero polynomial");
  const auto& ts = p.terms();
  if (is_native(order)) return ts.front();
  const Term* best = &ts.front();
  for (const auto& t : ts) {
    if (order.compare(t.mono, best->mono) > 0) best = &t;
  }
  return *best;
}

Poly reduce(const Poly& p, const std::vector<Poly>& basis, const MonomialOrder& order) {
  if (p.is_zero() || basis.empty()) return p;
  std::vector<const Term*> leads;
  leads.reserve(basis.size());
  for (const auto& g : basis) {
    if (!compatible(g.context(), p.context())) {
      throw Error(ErrorKind::kContextMismatch, "reduction across different variable contexts");
    }
    leads.push_back(g.is_zero() ? nullptr : &leading_term(g, order));
  }
  std::map<Monomial, Rat, OrderGreater> work(OrderGreater{&order});
  for (const auto& t : p.terms()) work.emplace(t.mono, t.coeff);
  std::vector<Term> remainder;
  while (!work.empty()) {
    auto it = work.begin();
    std::size_t hit = basis.size();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (leads[i] && leads[i]->mono.divides(it->first)) {
        hit = i;
        break;
      }
    }
    if (hit == basis.size()) {
      remainder.push_back(Term{it->first, it->second});
      work.erase(it);
      continue;
    }
    Monomial q = it->first / leads[hit]->mono;
    Rat factor = it->second / leads[hit]->coeff;
    work.erase(it);
    for (const auto& t : basis[hit].terms()) {
      if (&t == leads[hit]) continue;
      Monomial m = t.mono * q;
      auto [slot, inserted] = work.emplace(m, Rat(0));
      slot->second -= factor * t.coeff;
      if (slot->second == 0) work.erase(slot);
    }
  }
  return Poly::from_terms(p.context(), std::move(remainder));
}

GroebnerBasis::GroebnerBasis(ContextPtr ctx, MonomialOrder order, std::vector<Poly> generators)
    : ctx_(std::move(ctx)), order_(order) {
  for (auto& g : generators) {
    if (g.is_zero()) continue;
    if (!compatible(g.context(), ctx_)) {
      throw Error(ErrorKind::kContextMismatch, "basis generator in a foreign context");
    }
    generators_.push_back(make_monic(g, order_));
  }
  std::sort(generators_.begin(), generators_.end(), [&](const Poly& a, const Poly& b) {
    return order_.compare(leading_term(a, order_).mono, leading_term(b, order_).mono) < 0;
  });
}

Poly reduce(const Poly& p, const GroebnerBasis& basis) {
  return reduce(p, basis.generators(), basis.order());
}

GroebnerBasis buchberger(const ContextPtr& ctx, const std::vector<Poly>& gens,
                         const MonomialOrder& order, const ResourceLimits& limits) {
  IncrementalGroebner builder(ctx, order, limits);
  for (const auto& g : gens) builder.add(g);
  return builder.basis();
}

GroebnerBasis buchberger(const std::vector<Poly>& gens, const MonomialOrder& order,
                         const ResourceLimits& limits) {
  if (gens.empty()) {
    throw Error(ErrorKind::kPrecondition, "buchberger on an empty list needs an explicit context");
  }
  return buchberger(gens.front().context(), gens, order, limits);
}

bool ideal_contains(const GroebnerBasis& basis, const Poly& p) {
  return reduce(p, basis).is_zero();
}

bool ideal_equal(const GroebnerBasis& a, const GroebnerBasis& b) {
  if (!(a.order() == b.order())) {
    throw Error(ErrorKind::kPrecondition, "ideal_equal on bases with different monomial orders");
  }
  if (a.generators() == b.generators()) return true;
  for (const auto& g : a.generators()) {
    if (!ideal_contains(b, g)) return false;
  }
  for (const auto& g : b.generators()) {
    if (!ideal_contains(a, g)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// IncrementalGroebner

IncrementalGroebner::IncrementalGroebner(ContextPtr ctx, MonomialOrder order, ResourceLimits limits)
    : ctx_(std::move(ctx)), order_(order), limits_(limits) {}

void IncrementalGroebner::charge_iteration() {
  if (++iterations_ > limits_.max_iterations) {
    throw Error(ErrorKind::kResourceLimit,
                "iteration budget of " + std::to_string(limits_.max_iterations) + " exhausted");
  }
}

void IncrementalGroebner::check_degree(const Poly& p) {
  max_degree_seen_ = std::max(max_degree_seen_, p.degree());
  if (p.degree() > limits_.max_degree) {
    throw Error(ErrorKind::kResourceLimit, "polynomial of degree " + std::to_string(p.degree()) +
                                               " exceeds the degree cap " +
                                               std::to_string(limits_.max_degree));
  }
}

Poly IncrementalGroebner::reduce(const Poly& p) const {
  return cdfwbpp::reduce(p, basis_, order_);
}

bool IncrementalGroebner::add(const Poly& p) {
  if (!compatible(p.context(), ctx_)) {
    throw Error(ErrorKind::kContextMismatch, "basis generator in a foreign context");
  }
  check_degree(p);
  Poly h = reduce(p);
  if (h.is_zero()) return false;
  polys_ = basis_;
  active_.clear();
  for (std::size_t i = 0; i < polys_.size(); ++i) active_.push_back(i);
  pairs_.clear();
  polys_.push_back(make_monic(h, order_));
  update(polys_.size() - 1);
  complete();
  interreduce();
  return true;
}

void IncrementalGroebner::update(std::size_t h) {
  const Monomial& lh = leading_term(polys_[h], order_).mono;
  auto lm = [&](std::size_t i) -> const Monomial& { return leading_term(polys_[i], order_).mono; };

  std::vector<Pair> candidates;
  candidates.reserve(active_.size());
  for (std::size_t g : active_) candidates.push_back(Pair{g, h, Monomial::lcm(lm(g), lh)});

  // Gebauer-Moeller: keep a new pair unless another new pair has a strictly
  // useful lcm dividing it (coprime pairs are kept here and dropped below).
  std::vector<Pair> kept;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    const Pair& p = candidates[a];
    bool coprime = lm(p.i).coprime(lh);
    bool dominated = false;
    if (!coprime) {
      for (std::size_t b = a + 1; b < candidates.size() && !dominated; ++b) {
        dominated = candidates[b].lcm.divides(p.lcm);
      }
      for (const auto& q : kept) {
        if (dominated) break;
        dominated = q.lcm.divides(p.lcm);
      }
    }
    if (coprime || !dominated) kept.push_back(p);
  }
  std::vector<Pair> fresh;
  for (auto& p : kept) {
    if (!lm(p.i).coprime(lh)) fresh.push_back(std::move(p));
  }

  std::vector<Pair> old;
  old.reserve(pairs_.size());
  for (auto& p : pairs_) {
    bool drop = lh.divides(p.lcm) && !(Monomial::lcm(lm(p.i), lh) == p.lcm) &&
                !(Monomial::lcm(lm(p.j), lh) == p.lcm);
    if (!drop) old.push_back(std::move(p));
  }
  pairs_ = std::move(old);
  for (auto& p : fresh) pairs_.push_back(std::move(p));

  std::vector<std::size_t> next;
  for (std::size_t g : active_) {
    if (!lh.divides(lm(g))) next.push_back(g);
  }
  next.push_back(h);
  active_ = std::move(next);
  if (active_.size() > limits_.max_basis) {
    throw Error(ErrorKind::kResourceLimit, "basis size exceeds the cap " +
                                               std::to_string(limits_.max_basis));
  }
}

void IncrementalGroebner::complete() {
  while (!pairs_.empty()) {
    charge_iteration();
    // Normal strategy: smallest lcm first; ties broken by insertion indices.
    auto best = pairs_.begin();
    for (auto it = pairs_.begin() + 1; it != pairs_.end(); ++it) {
      int c = order_.compare(it->lcm, best->lcm);
      if (c < 0 || (c == 0 && std::tie(it->j, it->i) < std::tie(best->j, best->i))) best = it;
    }
    Pair pair = *best;
    pairs_.erase(best);
    Poly s = spoly(polys_[pair.i], polys_[pair.j], order_);
    std::vector<Poly> current;
    current.reserve(active_.size());
    for (std::size_t g : active_) current.push_back(polys_[g]);
    Poly h = cdfwbpp::reduce(s, current, order_);
    ++spair_reductions_;
    if (h.is_zero()) continue;
    check_degree(h);
    polys_.push_back(make_monic(h, order_));
    update(polys_.size() - 1);
  }
}

void IncrementalGroebner::interreduce() {
  std::vector<Poly> minimal;
  minimal.reserve(active_.size());
  for (std::size_t g : active_) minimal.push_back(polys_[g]);
  std::vector<Poly> reduced;
  reduced.reserve(minimal.size());
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<Poly> others;
    others.reserve(minimal.size() - 1);
    for (std::size_t j = 0; j < minimal.size(); ++j) {
      if (j != i) others.push_back(minimal[j]);
    }
    reduced.push_back(make_monic(cdfwbpp::reduce(minimal[i], others, order_), order_));
  }
  std::sort(reduced.begin(), reduced.end(), [&](const Poly& a, const Poly& b) {
    return order_.compare(leading_term(a, order_).mono, leading_term(b, order_).mono) < 0;
  });
  basis_ = std::move(reduced);
  polys_.clear();
  active_.clear();
  pairs_.clear();
}

GroebnerBasis IncrementalGroebner::basis() const { return GroebnerBasis(ctx_, order_, basis_); }

}  // namespace cdfwbpp
