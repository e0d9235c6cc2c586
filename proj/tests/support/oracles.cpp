#include "oracles.hpp"

#include <algorithm>
#include <string>
#include <stdexcept>

namespace cdfwbpp {

void PrintTo(const TruncSeries& f, std::ostream* os) {
  *os << "{dim " << f.dim() << ", order " << f.order() << ":";
  for (const auto& [n, v] : f.entries()) *os << " " << exponent_to_string(n) << "=" << to_string(v);
  *os << "}";
}

void PrintTo(const Poly& p, std::ostream* os) { *os << p.to_string(); }

}  // namespace cdfwbpp

namespace oracle {

using namespace cdfwbpp;

namespace {

Rat runs_from(const BppSpec& b, std::vector<std::size_t> process, const std::vector<std::string>& word,
              std::size_t pos) {
  if (pos == word.size()) return process.empty() ? Rat(1) : Rat(0);
  Rat total = 0;
  for (std::size_t occ = 0; occ < process.size(); ++occ) {
    for (const auto& summand : b.rules[process[occ]]) {
      if (summand.action != word[pos]) continue;
      std::vector<std::size_t> next;
      for (std::size_t i = 0; i < process.size(); ++i) {
        if (i != occ) next.push_back(process[i]);
      }
      for (const auto& name : summand.merge) {
        auto it = std::find(b.nonterminals.begin(), b.nonterminals.end(), name);
        next.push_back(static_cast<std::size_t>(it - b.nonterminals.begin()));
      }
      total += runs_from(b, std::move(next), word, pos + 1);
    }
  }
  return total;
}

void all_monomials(std::size_t vars, std::uint32_t bound, std::size_t var, std::vector<Monomial::Factor>& cur,
                   std::uint32_t used, std::vector<Monomial>& out) {
  if (var == vars) {
    out.emplace_back(cur);
    return;
  }
  for (std::uint32_t e = 0; used + e <= bound; ++e) {
    if (e > 0) cur.emplace_back(static_cast<VarId>(var), e);
    all_monomials(vars, bound, var + 1, cur, used + e, out);
    if (e > 0) cur.pop_back();
  }
}

using Row = std::map<Monomial, Rat, bool (*)(const Monomial&, const Monomial&)>;

bool grlex_greater(const Monomial& a, const Monomial& b) { return grlex_compare(a, b) > 0; }

Row to_row(const Poly& p) {
  Row r(grlex_greater);
  for (const auto& t : p.terms()) r.emplace(t.mono, t.coeff);
  return r;
}

// Eliminates the pivots of `basis` from `r`; pivots are leading monomials.
void eliminate(Row& r, const std::vector<Row>& basis) {
  for (const auto& b : basis) {
    const auto& [pivot, pc] = *b.begin();
    auto it = r.find(pivot);
    if (it == r.end()) continue;
    Rat f = it->second / pc;
    for (const auto& [m, c] : b) {
      Rat v = r[m] - f * c;
      if (v == 0) {
        r.erase(m);
      } else {
        r[m] = v;
      }
    }
  }
}

Exponent widen(const Exponent& n, std::size_t dim) {
  Exponent out(dim, 0);
  std::copy(n.begin(), n.end(), out.begin());
  return out;
}

TruncSeries eval_species(const SpeciesExpr& e, std::vector<std::string> scope, std::size_t sorts,
                         std::uint32_t order) {
  const std::size_t dim = scope.size();
  using K = SpeciesExpr::Kind;
  switch (e.kind) {
    case K::kConst:
      return TruncSeries::constant(dim, order, Rat(e.value));
    case K::kAtom:
      return TruncSeries::variable(dim, order, e.axis);
    case K::kRef: {
      for (std::size_t i = dim; i-- > 0;) {
        if (scope[i] == e.name) return TruncSeries::variable(dim, order, i);
      }
      throw std::runtime_error("unbound reference " + e.name);
    }
    case K::kSet:
      return t_exp(eval_species(*e.children[0], scope, sorts, order));
    case K::kCyc:
      return t_neg_log_one_minus(eval_species(*e.children[0], scope, sorts, order));
    case K::kSeq:
      return t_inverse(t_sub(TruncSeries::constant(dim, order, 1), eval_species(*e.children[0], scope, sorts, order)));
    case K::kSum: {
      TruncSeries acc(dim, order);
      for (const auto& c : e.children) acc = t_add(acc, eval_species(*c, scope, sorts, order));
      return acc;
    }
    case K::kProd: {
      TruncSeries acc = TruncSeries::constant(dim, order, 1);
      for (const auto& c : e.children) acc = t_mul(acc, eval_species(*c, scope, sorts, order));
      return acc;
    }
    case K::kRestrict: {
      const auto& phi = *e.constraint;
      return t_mask(eval_species(*e.children[0], scope, sorts, order),
                    [&](const Exponent& n) { return phi.holds(n); });
    }
    case K::kCompose: {
      std::vector<std::string> inner = scope;
      inner.insert(inner.end(), e.binders.begin(), e.binders.end());
      TruncSeries outer = eval_species(*e.children[0], inner, sorts, order);
      std::vector<TruncSeries> subs;
      for (std::size_t i = 1; i < e.children.size(); ++i) {
        subs.push_back(eval_species(*e.children[i], scope, sorts, order));
      }
      return t_compose(outer, subs);
    }
    case K::kFix: {
      std::vector<std::string> inner = scope;
      inner.insert(inner.end(), e.binders.begin(), e.binders.end());
      std::vector<TruncSeries> bodies;
      for (const auto& b : e.children) bodies.push_back(eval_species(*b, inner, sorts, order));
      auto sol = t_solve_implicit(bodies, order);
      auto it = std::find(e.binders.begin(), e.binders.end(), e.name);
      return sol.at(static_cast<std::size_t>(it - e.binders.begin()));
    }
    case K::kNamed: {
      std::vector<std::string> base(scope.begin(), scope.begin() + static_cast<std::ptrdiff_t>(sorts));
      TruncSeries body = eval_species(*e.children[0], base, sorts, order);
      TruncSeries out(dim, order);
      for (const auto& [n, c] : body.entries()) out.set(widen(n, dim), c);
      return out;
    }
  }
  throw std::runtime_error("unknown species node");
}

}  // namespace

Rat bpp_runs(const BppSpec& b, const std::string& start, const std::vector<std::string>& word) {
  auto it = std::find(b.nonterminals.begin(), b.nonterminals.end(), start);
  return runs_from(b, {static_cast<std::size_t>(it - b.nonterminals.begin())}, word, 0);
}

std::map<std::vector<std::size_t>, long> shuffles(const std::vector<std::size_t>& u,
                                                  const std::vector<std::size_t>& v) {
  std::map<std::vector<std::size_t>, long> out;
  const std::size_t n = u.size() + v.size();
  // Each subset of positions of size |u| receives u, the rest v.
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountl(mask)) != u.size()) continue;
    std::vector<std::size_t> w;
    std::size_t i = 0;
    std::size_t j = 0;
    for (std::size_t p = 0; p < n; ++p) w.push_back(mask >> p & 1 ? u[i++] : v[j++]);
    ++out[w];
  }
  return out;
}

std::map<Exponent, Rat> cauchy(const std::map<Exponent, Rat>& f, const std::map<Exponent, Rat>& g,
                               std::uint32_t order) {
  std::map<Exponent, Rat> out;
  for (const auto& [a, x] : f) {
    for (const auto& [b, y] : g) {
      Exponent n(a.size());
      std::uint32_t deg = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        n[i] = a[i] + b[i];
        deg += n[i];
      }
      if (deg <= order) out[n] += x * y;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

bool macaulay_member(const std::vector<Poly>& gens, const Poly& p, std::uint32_t bound) {
  if (p.is_zero()) return true;
  const auto& ctx = p.context();
  std::vector<Row> basis;
  for (const auto& g : gens) {
    if (g.is_zero() || g.degree() > bound) continue;
    std::vector<Monomial> monos;
    std::vector<Monomial::Factor> cur;
    all_monomials(ctx->size(), bound - g.degree(), 0, cur, 0, monos);
    for (const auto& m : monos) {
      Row r = to_row(g.mul_term(m, 1));
      eliminate(r, basis);
      if (r.empty()) continue;
      // Keep earlier rows free of the new pivot so elimination stays one pass.
      const std::vector<Row> single{r};
      for (auto& b : basis) eliminate(b, single);
      basis.push_back(std::move(r));
    }
  }
  Row target = to_row(p);
  eliminate(target, basis);
  return target.empty();
}

TruncSeries species_series(const SpeciesExpr& e, std::size_t sorts, std::uint32_t order) {
  return eval_species(e, sort_names(sorts), sorts, order);
}

Rat random_rat(std::mt19937_64& rng, int range, int max_den) {
  std::uniform_int_distribution<int> num(-range, range);
  std::uniform_int_distribution<int> den(1, std::max(1, max_den));
  Rat r(num(rng), den(rng));
  r.canonicalize();
  return r;
}

Poly random_poly(std::mt19937_64& rng, const ContextPtr& ctx, std::uint32_t max_degree, std::size_t max_terms,
                 int range) {
  std::uniform_int_distribution<std::size_t> nterms(0, max_terms);
  std::uniform_int_distribution<std::uint32_t> deg(0, max_degree);
  std::uniform_int_distribution<std::size_t> var(0, ctx->size() - 1);
  std::vector<Term> terms;
  for (std::size_t t = nterms(rng); t-- > 0;) {
    std::vector<Monomial::Factor> fs;
    for (std::uint32_t d = deg(rng); d-- > 0;) fs.emplace_back(static_cast<VarId>(var(rng)), 1);
    Rat c = random_rat(rng, range);
    if (c != 0) terms.push_back({Monomial(fs), c});
  }
  return Poly::from_terms(ctx, std::move(terms));
}

Wbpp random_wbpp(std::mt19937_64& rng, std::size_t letters, std::size_t nonterminals, std::uint32_t degree) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nonterminals; ++i) names.push_back("N" + std::to_string(i));
  auto ctx = Context::make(names);
  std::vector<std::string> alphabet;
  for (std::size_t a = 0; a < letters; ++a) alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
  std::vector<std::vector<Poly>> delta(letters);
  for (auto& row : delta) {
    for (std::size_t i = 0; i < nonterminals; ++i) row.push_back(random_poly(rng, ctx, degree, 3, 2));
  }
  std::vector<Rat> output;
  for (std::size_t i = 0; i < nonterminals; ++i) output.push_back(random_rat(rng, 2));
  return Wbpp(alphabet, ctx, 0, std::move(delta), std::move(output));
}

std::vector<std::size_t> random_word(std::mt19937_64& rng, std::size_t letters, std::size_t length) {
  std::uniform_int_distribution<std::size_t> letter(0, letters - 1);
  std::vector<std::size_t> w(length);
  for (auto& a : w) a = letter(rng);
  return w;
}

CdfSeries random_block_system(std::mt19937_64& rng, std::size_t dim, bool zero_init, int q) {
  std::vector<std::string> axes;
  std::vector<std::string> names;
  std::vector<std::size_t> block;
  std::uniform_int_distribution<int> size(1, 2);
  for (std::size_t j = 0; j < dim; ++j) {
    axes.push_back("x" + std::to_string(j + 1));
    for (int g = size(rng); g-- > 0;) {
      names.push_back("g" + std::to_string(names.size()));
      block.push_back(j);
    }
  }
  auto ctx = Context::make(names);
  std::vector<std::vector<Poly>> kernel(names.size(), std::vector<Poly>(dim, Poly(ctx)));
  std::uniform_int_distribution<int> coin(0, 2);
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<Term> terms;
    terms.push_back({Monomial(), random_rat(rng, 3)});
    for (std::size_t h = 0; h < names.size(); ++h) {
      if (block[h] != block[i] || coin(rng) == 0) continue;
      terms.push_back({Monomial::var(static_cast<VarId>(h)), random_rat(rng, 3)});
      if (coin(rng) == 0) terms.push_back({Monomial::var(static_cast<VarId>(h), 2), random_rat(rng, 2)});
    }
    Poly p = Poly::from_terms(ctx, std::move(terms)) * Rat(1, q);
    kernel[i][block[i]] = p;
  }
  std::vector<Rat> init;
  for (std::size_t i = 0; i < names.size(); ++i) init.push_back(zero_init ? Rat(0) : random_rat(rng, 2));
  Poly expr = zero_init ? Poly::variable(ctx, 0) : random_poly(rng, ctx, 2, 3, 3);
  return CdfSeries(CdfSystem(axes, ctx, kernel, init), expr);
}

ConstraintPtr random_constraint(std::mt19937_64& rng, std::size_t dim, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 5 : 1);
  std::uniform_int_distribution<std::size_t> axis(0, dim - 1);
  std::uniform_int_distribution<std::uint32_t> small(0, 3);
  std::uniform_int_distribution<std::uint32_t> modulus(1, 3);
  switch (kind(rng)) {
    case 0:
      return ConstraintExpr::eq(axis(rng), small(rng));
    case 1: {
      std::uint32_t m = modulus(rng);
      return ConstraintExpr::mod(axis(rng), small(rng) % m, m);
    }
    case 2:
      return ConstraintExpr::negate(random_constraint(rng, dim, depth - 1));
    case 3:
      return ConstraintExpr::conj({random_constraint(rng, dim, depth - 1), random_constraint(rng, dim, depth - 1)});
    case 4:
      return ConstraintExpr::disj({random_constraint(rng, dim, depth - 1), random_constraint(rng, dim, depth - 1)});
    default:
      return ConstraintExpr::at_least(axis(rng), small(rng));
  }
}

std::vector<std::vector<std::size_t>> permutations_of(std::vector<std::size_t> w) {
  std::sort(w.begin(), w.end());
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(w);
  while (std::next_permutation(w.begin(), w.end()));
  return out;
}

}  // namespace oracle
