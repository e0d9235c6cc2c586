#include "cdfwbpp/cdf.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

namespace {

std::vector<Derivation> make_lie(const ContextPtr& ctx, const std::vector<std::vector<Poly>>& kernel,
                                 std::size_t dim) {
  std::vector<Derivation> out;
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<Poly> images;
    images.reserve(kernel.size());
    for (const auto& row : kernel) images.push_back(row[j]);
    out.emplace_back(ctx, std::move(images));
  }
  return out;
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::kDimensionMismatch, std::string(what) + ": dimension " + std::to_string(got) +
                                                   ", expected " + std::to_string(want));
  }
}

std::string letter_for_axis(std::size_t j) {
  if (j < 26) return std::string(1, static_cast<char>('a' + j));
  return "a" + std::to_string(j);
}

std::vector<std::string> default_axes(std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < d; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

// Determinant of a square polynomial matrix by Laplace expansion along rows,
// memoized on the set of remaining columns.
Poly determinant(const std::vector<std::vector<Poly>>& m, const ContextPtr& ctx) {
  std::size_t k = m.size();
  if (k == 0) return Poly::constant(ctx, 1);
  if (k > 20) throw Error(ErrorKind::kResourceLimit, "implicit system too large for cofactor expansion");
  std::map<std::uint32_t, Poly> memo;
  std::function<Poly(std::size_t, std::uint32_t)> rec = [&](std::size_t row, std::uint32_t cols) -> Poly {
    if (row == k) return Poly::constant(ctx, 1);
    auto it = memo.find(cols);
    if (it != memo.end()) return it->second;
    Poly acc(ctx);
    int sign = 1;
    for (std::size_t c = 0; c < k; ++c) {
      if (!(cols & (1u << c))) continue;
      if (!m[row][c].is_zero()) {
        Poly term = m[row][c] * rec(row + 1, cols & ~(1u << c));
        if (sign > 0) {
          acc += term;
        } else {
          acc -= term;
        }
      }
      sign = -sign;
    }
    memo.emplace(cols, acc);
    return acc;
  };
  return rec(0, (k == 32 ? ~0u : (1u << k) - 1));
}

std::vector<std::vector<Poly>> minor_of(const std::vector<std::vector<Poly>>& m, std::size_t r, std::size_t c) {
  std::vector<std::vector<Poly>> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i == r) continue;
    std::vector<Poly> row;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j != c) row.push_back(m[i][j]);
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CdfSystem::CdfSystem(std::vector<std::string> axes, ContextPtr generators, std::vector<std::vector<Poly>> kernel,
                     std::vector<Rat> init)
    : axes_(std::move(axes)), ctx_(std::move(generators)), kernel_(std::move(kernel)), init_(std::move(init)) {
  if (kernel_.size() != ctx_->size() || init_.size() != ctx_->size()) {
    throw Error(ErrorKind::kArity, "kernel and initial vector must have one entry per generator");
  }
  for (const auto& row : kernel_) {
    require_dim(row.size(), axes_.size(), "kernel row");
    for (const auto& p : row) {
      if (!compatible(p.context(), ctx_)) {
        throw Error(ErrorKind::kContextMismatch, "kernel entry outside the generator context");
      }
    }
  }
  lie_ = make_lie(ctx_, kernel_, axes_.size());
}

std::uint32_t CdfSystem::degree() const {
  std::uint32_t d = 0;
  for (const auto& row : kernel_) {
    for (const auto& p : row) d = std::max(d, p.degree());
  }
  return d;
}

bool operator==(const CdfSystem& a, const CdfSystem& b) {
  return a.axes_ == b.axes_ && compatible(a.ctx_, b.ctx_) && a.kernel_ == b.kernel_ && a.init_ == b.init_;
}

CdfSeries::CdfSeries(CdfSystem sys, Poly p) : system(std::move(sys)), expr(std::move(p)) {
  if (!compatible(expr.context(), system.context())) {
    throw Error(ErrorKind::kContextMismatch, "expression outside the generator context");
  }
}

CdfVector::CdfVector(CdfSystem sys, std::vector<Poly> ps) : system(std::move(sys)), exprs(std::move(ps)) {
  for (const auto& p : exprs) {
    if (!compatible(p.context(), system.context())) {
      throw Error(ErrorKind::kContextMismatch, "expression outside the generator context");
    }
  }
}

// ---------------------------------------------------------------------------

CdfBuilder::CdfBuilder(std::vector<std::string> axes) : axes_(std::move(axes)), ctx_(Context::make({})) {}

CdfBuilder::CdfBuilder(const CdfSystem& base)
    : axes_(base.axes()),
      names_(base.context()->names()),
      ctx_(base.context()),
      kernel_(base.kernel()),
      init_(base.init()) {}

VarId CdfBuilder::add_generator(const std::string& hint, const Rat& init) {
  names_.push_back(fresh_name(hint, names_));
  ctx_ = Context::make(names_);
  kernel_.emplace_back(axes_.size(), Poly(ctx_));
  init_.push_back(init);
  return static_cast<VarId>(names_.size() - 1);
}

void CdfBuilder::set_kernel(VarId gen, std::size_t axis, const Poly& p) {
  if (axis >= axes_.size()) throw Error(ErrorKind::kDimensionMismatch, "kernel axis out of range");
  kernel_.at(gen).at(axis) = p.lift(ctx_);
}

std::vector<VarId> CdfBuilder::absorb(const CdfSystem& sys) {
  require_dim(sys.dim(), axes_.size(), "absorbed system");
  std::vector<VarId> map;
  for (VarId g = 0; g < sys.order(); ++g) map.push_back(add_generator(sys.context()->name(g), sys.init()[g]));
  for (VarId g = 0; g < sys.order(); ++g) {
    for (std::size_t j = 0; j < axes_.size(); ++j) kernel_[map[g]][j] = sys.kernel(g, j).rename(ctx_, map);
  }
  return map;
}

Poly CdfBuilder::lift(const Poly& p) const { return p.lift(ctx_); }

CdfSystem CdfBuilder::build() const {
  std::vector<std::vector<Poly>> kernel = kernel_;
  for (auto& row : kernel) {
    for (auto& p : row) p = p.lift(ctx_);
  }
  return CdfSystem(axes_, ctx_, std::move(kernel), init_);
}

// ---------------------------------------------------------------------------

CdfVector autonomize(const RawCdfSystem& raw, const std::vector<Poly>& exprs) {
  std::size_t k = raw.num_generators;
  std::size_t d = raw.axes.size();
  if (raw.context->size() != k + d) {
    throw Error(ErrorKind::kArity, "raw system context must list generators then axes");
  }
  if (raw.kernel.size() != k || raw.init.size() != k) {
    throw Error(ErrorKind::kArity, "kernel and initial vector must have one entry per generator");
  }
  bool mentions = false;
  for (const auto& row : raw.kernel) {
    require_dim(row.size(), d, "kernel row");
    for (const auto& p : row) {
      for (std::size_t j = 0; j < d; ++j) mentions = mentions || p.mentions(static_cast<VarId>(k + j));
    }
  }
  for (const auto& p : exprs) {
    for (std::size_t j = 0; j < d; ++j) mentions = mentions || p.mentions(static_cast<VarId>(k + j));
  }
  std::vector<std::string> names(raw.context->names().begin(),
                                 raw.context->names().begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<VarId> map(k + d);
  for (std::size_t i = 0; i < k; ++i) map[i] = static_cast<VarId>(i);
  if (mentions) {
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<std::string> taken = raw.context->names();
      taken.insert(taken.end(), names.begin(), names.end());
      names.push_back(fresh_name("t" + std::to_string(j + 1), taken));
      map[k + j] = static_cast<VarId>(k + j);
    }
  } else {
    // Unused axis variables map nowhere; rename() would reject a mention.
    for (std::size_t j = 0; j < d; ++j) map[k + j] = static_cast<VarId>(k + d + 1);
  }
  auto ctx = Context::make(names);
  std::vector<std::vector<Poly>> kernel;
  std::vector<Rat> init = raw.init;
  for (const auto& row : raw.kernel) {
    std::vector<Poly> r;
    for (const auto& p : row) r.push_back(p.rename(ctx, map));
    kernel.push_back(std::move(r));
  }
  if (mentions) {
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<Poly> r;
      for (std::size_t i = 0; i < d; ++i) r.push_back(Poly::constant(ctx, i == j ? 1 : 0));
      kernel.push_back(std::move(r));
      init.push_back(0);
    }
  }
  std::vector<Poly> out;
  for (const auto& p : exprs) out.push_back(p.rename(ctx, map));
  return CdfVector(CdfSystem(raw.axes, ctx, std::move(kernel), std::move(init)), std::move(out));
}

Poly lie_derivative(const CdfSystem& sys, std::size_t axis, const Poly& p) {
  if (axis >= sys.dim()) throw Error(ErrorKind::kDimensionMismatch, "Lie derivative axis out of range");
  return sys.lie(axis).apply(p);
}

Rat coeff_via_word(const CdfSeries& s, const std::vector<std::size_t>& word) {
  Poly p = s.expr;
  for (std::size_t j : word) p = lie_derivative(s.system, j, p);
  return p.eval(s.system.init());
}

Rat coeff_via_lie(const CdfSeries& s, const Exponent& n) {
  require_dim(n.size(), s.system.dim(), "exponent");
  std::vector<std::size_t> word;
  for (std::size_t j = 0; j < n.size(); ++j) word.insert(word.end(), n[j], j);
  return coeff_via_word(s, word);
}

TruncSeries eval_on_tables(const Poly& p, const std::vector<TruncSeries>& tables, std::size_t dim,
                           std::uint32_t order) {
  std::vector<std::vector<TruncSeries>> powers(tables.size());
  auto power = [&](VarId v, std::uint32_t e) -> const TruncSeries& {
    auto& cache = powers.at(v);
    if (cache.empty()) {
      cache.push_back(TruncSeries::constant(dim, order, Rat(1)));
      cache.push_back(tables[v].truncated(order));
    }
    while (cache.size() <= e) cache.push_back(t_mul(cache.back(), cache[1]));
    return cache[e];
  };
  TruncSeries out(dim, order);
  for (const auto& t : p.terms()) {
    TruncSeries term = TruncSeries::constant(dim, order, t.coeff);
    for (const auto& [v, e] : t.mono.factors()) term = t_mul(term, power(v, e));
    out = t_add(out, term);
  }
  return out;
}

std::vector<TruncSeries> generator_tables(const CdfSystem& sys, std::uint32_t order) {
  std::size_t d = sys.dim();
  std::size_t k = sys.order();
  std::vector<TruncSeries> tables;
  for (std::size_t i = 0; i < k; ++i) tables.push_back(TruncSeries::constant(d, order, sys.init()[i]));
  if (d == 0) return tables;
  for (std::uint32_t layer = 1; layer <= order; ++layer) {
    std::vector<TruncSeries> lower;
    for (const auto& t : tables) lower.push_back(t.truncated(layer - 1));
    std::map<std::pair<std::size_t, std::size_t>, TruncSeries> values;
    auto value = [&](std::size_t i, std::size_t j) -> const TruncSeries& {
      auto key = std::make_pair(i, j);
      auto it = values.find(key);
      if (it == values.end()) {
        it = values.emplace(key, eval_on_tables(sys.kernel(static_cast<VarId>(i), j), lower, d, layer - 1)).first;
      }
      return it->second;
    };
    for (const auto& m : exponents_of_degree(d, layer)) {
      std::size_t j = 0;
      while (m[j] == 0) ++j;
      Exponent mm = m;
      --mm[j];
      for (std::size_t i = 0; i < k; ++i) tables[i].set(m, value(i, j).get(mm));
    }
  }
  return tables;
}

TruncSeries coeff_table(const CdfSeries& s, std::uint32_t order) {
  return eval_on_tables(s.expr, generator_tables(s.system, order), s.system.dim(), order);
}

Exponent parikh(const std::vector<std::size_t>& word, std::size_t dim) {
  Exponent n(dim, 0);
  for (std::size_t j : word) ++n.at(j);
  return n;
}

ZeroVerdict zeroness(const CdfSeries& s, const ResourceLimits& limits) {
  return saturate(s.expr, s.system.lie_derivations(), s.system.init(), limits);
}

MergedSeries merge(const CdfSeries& a, const CdfSeries& b) {
  require_dim(b.system.dim(), a.system.dim(), "merged series");
  CdfBuilder builder(a.system);
  auto map = builder.absorb(b.system);
  CdfSystem sys = builder.build();
  Poly first = a.expr.lift(sys.context());
  Poly second = b.expr.rename(sys.context(), map);
  return {std::move(sys), std::move(first), std::move(second)};
}

ZeroVerdict equivalent(const CdfSeries& a, const CdfSeries& b, const ResourceLimits& limits) {
  auto m = merge(a, b);
  return zeroness(CdfSeries(m.system, m.first - m.second), limits);
}

// ---------------------------------------------------------------------------

CdfSeries c_constant(const std::vector<std::string>& axes, const Rat& c) {
  auto ctx = Context::make({});
  return CdfSeries(CdfSystem(axes, ctx, {}, {}), Poly::constant(ctx, c));
}

CdfSeries c_atom(const std::vector<std::string>& axes, std::size_t axis) {
  if (axis >= axes.size()) throw Error(ErrorKind::kDimensionMismatch, "atom axis out of range");
  CdfBuilder b(axes);
  VarId t = b.add_generator("t" + std::to_string(axis + 1), 0);
  b.set_kernel(t, axis, Poly::constant(b.context(), 1));
  CdfSystem sys = b.build();
  return CdfSeries(sys, Poly::variable(sys.context(), t));
}

CdfSeries c_scale(const Rat& c, const CdfSeries& s) { return CdfSeries(s.system, c * s.expr); }

CdfSeries c_add(const CdfSeries& a, const CdfSeries& b) {
  auto m = merge(a, b);
  return CdfSeries(m.system, m.first + m.second);
}

CdfSeries c_sub(const CdfSeries& a, const CdfSeries& b) {
  auto m = merge(a, b);
  return CdfSeries(m.system, m.first - m.second);
}

CdfSeries c_mul(const CdfSeries& a, const CdfSeries& b) {
  auto m = merge(a, b);
  return CdfSeries(m.system, m.first * m.second);
}

CdfSeries c_derive(const CdfSeries& s, std::size_t axis) {
  return CdfSeries(s.system, lie_derivative(s.system, axis, s.expr));
}

CdfSeries c_inverse(const CdfSeries& s) {
  Rat p0 = s.expr.eval(s.system.init());
  if (p0 == 0) throw Error(ErrorKind::kPrecondition, "inverse of a series with zero constant term");
  CdfBuilder b(s.system);
  VarId u = b.add_generator("u", 1 / p0);
  Poly uu = b.var(u).pow(2);
  for (std::size_t j = 0; j < s.system.dim(); ++j) {
    b.set_kernel(u, j, -(b.lift(lie_derivative(s.system, j, s.expr)) * uu));
  }
  CdfSystem sys = b.build();
  return CdfSeries(sys, Poly::variable(sys.context(), u));
}

// ---------------------------------------------------------------------------

CdfVector compose_strong(const CdfVector& f, const std::vector<CdfSeries>& g) {
  std::size_t k = g.size();
  if (f.system.dim() < k) throw Error(ErrorKind::kDimensionMismatch, "more substitutions than axes");
  std::size_t d = f.system.dim() - k;
  std::vector<std::string> axes(f.system.axes().begin(), f.system.axes().begin() + static_cast<std::ptrdiff_t>(d));
  for (const auto& gi : g) require_dim(gi.system.dim(), d, "substituted series");

  CdfBuilder b(axes);
  std::vector<VarId> fmap;
  for (VarId l = 0; l < f.system.order(); ++l) {
    fmap.push_back(b.add_generator(f.system.context()->name(l), f.system.init()[l]));
  }
  std::vector<Poly> q;
  std::vector<std::vector<VarId>> gmaps;
  for (const auto& gi : g) gmaps.push_back(b.absorb(gi.system));
  CdfSystem partial = b.build();
  for (std::size_t i = 0; i < k; ++i) q.push_back(g[i].expr.rename(partial.context(), gmaps[i]));

  for (std::size_t i = 0; i < k; ++i) {
    bool occurs = false;
    for (VarId l = 0; l < f.system.order(); ++l) occurs = occurs || !f.system.kernel(l, d + i).is_zero();
    if (occurs && q[i].eval(partial.init()) != 0) {
      throw Error(ErrorKind::kNotComposable, "substitution for axis " + f.system.axes()[d + i] +
                                                 " has a nonzero constant term");
    }
  }
  // Chain rule: d/dx_j u_l = A_lj(u) + sum_i (L_j q_i) B_li(u).
  std::vector<std::vector<Poly>> lq(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < d; ++j) lq[i].push_back(lie_derivative(partial, j, q[i]));
  }
  const ContextPtr& ctx = partial.context();
  for (VarId l = 0; l < f.system.order(); ++l) {
    for (std::size_t j = 0; j < d; ++j) {
      Poly entry = f.system.kernel(l, j).rename(ctx, fmap);
      for (std::size_t i = 0; i < k; ++i) {
        const Poly& bl = f.system.kernel(l, d + i);
        if (bl.is_zero() || lq[i][j].is_zero()) continue;
        entry += lq[i][j] * bl.rename(ctx, fmap);
      }
      b.set_kernel(fmap[l], j, entry);
    }
  }
  CdfSystem sys = b.build();
  std::vector<Poly> exprs;
  for (const auto& p : f.exprs) exprs.push_back(p.rename(sys.context(), fmap));
  return CdfVector(std::move(sys), std::move(exprs));
}

CdfSeries compose_strong(const CdfSeries& f, const std::vector<CdfSeries>& g) {
  return compose_strong(CdfVector(f.system, {f.expr}), g).at(0);
}

// ---------------------------------------------------------------------------

ConstraintPtr ConstraintExpr::truth(bool b) {
  auto c = std::make_shared<ConstraintExpr>();
  c->kind = b ? Kind::kTrue : Kind::kFalse;
  return c;
}

ConstraintPtr ConstraintExpr::eq(std::size_t axis, std::uint32_t n) {
  auto c = std::make_shared<ConstraintExpr>();
  c->kind = Kind::kEq;
  c->axis = axis;
  c->value = n;
  return c;
}

ConstraintPtr ConstraintExpr::mod(std::size_t axis, std::uint32_t n, std::uint32_t m) {
  if (m == 0) throw Error(ErrorKind::kConstraint, "modulus must be at least 1");
  auto c = std::make_shared<ConstraintExpr>();
  c->kind = Kind::kMod;
  c->axis = axis;
  c->value = n;
  c->modulus = m;
  return c;
}

ConstraintPtr ConstraintExpr::conj(std::vector<ConstraintPtr> cs) {
  if (cs.size() == 1) return cs[0];
  auto c = std::make_shared<ConstraintExpr>();
  c->kind = Kind::kAnd;
  c->children = std::move(cs);
  return c;
}

ConstraintPtr ConstraintExpr::disj(std::vector<ConstraintPtr> cs) {
  if (cs.size() == 1) return cs[0];
  auto c = std::make_shared<ConstraintExpr>();
  c->kind = Kind::kOr;
  c->children = std::move(cs);
  return c;
}

ConstraintPtr ConstraintExpr::negate(ConstraintPtr inner) {
  auto c = std::make_shared<ConstraintExpr>();
  c->kind = Kind::kNot;
  c->children.push_back(std::move(inner));
  return c;
}

ConstraintPtr ConstraintExpr::at_least(std::size_t axis, std::uint32_t n) {
  if (n == 0) return truth(true);
  return negate(at_most(axis, n - 1));
}

ConstraintPtr ConstraintExpr::at_most(std::size_t axis, std::uint32_t n) {
  std::vector<ConstraintPtr> cs;
  for (std::uint32_t i = 0; i <= n; ++i) cs.push_back(eq(axis, i));
  return disj(std::move(cs));
}

bool ConstraintExpr::holds(const Exponent& n) const {
  switch (kind) {
    case Kind::kTrue:
      return true;
    case Kind::kFalse:
      return false;
    case Kind::kEq:
      return n.at(axis) == value;
    case Kind::kMod:
      return n.at(axis) % modulus == value % modulus;
    case Kind::kAnd:
      return std::all_of(children.begin(), children.end(), [&](const ConstraintPtr& c) { return c->holds(n); });
    case Kind::kOr:
      return std::any_of(children.begin(), children.end(), [&](const ConstraintPtr& c) { return c->holds(n); });
    case Kind::kNot:
      return !children.at(0)->holds(n);
  }
  return false;
}

std::size_t ConstraintExpr::arity() const {
  std::size_t a = (kind == Kind::kEq || kind == Kind::kMod) ? axis + 1 : 0;
  for (const auto& c : children) a = std::max(a, c->arity());
  return a;
}

std::string to_string(const ConstraintExpr& c, const std::vector<std::string>& names) {
  auto axis_name = [&](std::size_t j) { return j < names.size() ? names[j] : "z" + std::to_string(j + 1); };
  auto join = [&](const char* op, const char* empty) {
    if (c.children.empty()) return std::string(empty);
    std::string out = "(";
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      if (i > 0) out += op;
      out += to_string(*c.children[i], names);
    }
    return out + ")";
  };
  switch (c.kind) {
    case ConstraintExpr::Kind::kTrue:
      return "true";
    case ConstraintExpr::Kind::kFalse:
      return "false";
    case ConstraintExpr::Kind::kEq:
      return axis_name(c.axis) + " == " + std::to_string(c.value);
    case ConstraintExpr::Kind::kMod:
      return axis_name(c.axis) + " % " + std::to_string(c.modulus) + " == " + std::to_string(c.value);
    case ConstraintExpr::Kind::kAnd:
      return join(" && ", "true");
    case ConstraintExpr::Kind::kOr:
      return join(" || ", "false");
    case ConstraintExpr::Kind::kNot:
      return "!" + to_string(*c.children.at(0), names);
  }
  return "?";
}

// ---------------------------------------------------------------------------

MonoidRecognizer::MonoidRecognizer(std::vector<std::vector<std::size_t>> table, std::size_t identity,
                                   std::vector<std::size_t> images, std::vector<bool> accepting)
    : table_(std::move(table)), identity_(identity), images_(std::move(images)), accepting_(std::move(accepting)) {
  std::size_t n = table_.size();
  if (n == 0) throw Error(ErrorKind::kConstraint, "empty monoid");
  if (identity_ >= n || accepting_.size() != n) throw Error(ErrorKind::kConstraint, "malformed monoid");
  for (auto h : images_) {
    if (h >= n) throw Error(ErrorKind::kConstraint, "generator image outside the monoid");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (table_[a].size() != n) throw Error(ErrorKind::kConstraint, "addition table is not square");
    for (std::size_t b = 0; b < n; ++b) {
      if (table_[a][b] >= n) throw Error(ErrorKind::kConstraint, "addition table is not closed");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (table_[identity_][a] != a || table_[a][identity_] != a) {
      throw Error(ErrorKind::kConstraint, "identity law fails");
    }
    for (std::size_t b = 0; b < n; ++b) {
      if (table_[a][b] != table_[b][a]) throw Error(ErrorKind::kConstraint, "addition is not commutative");
      for (std::size_t c = 0; c < n; ++c) {
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) {
          throw Error(ErrorKind::kConstraint, "addition is not associative");
        }
      }
    }
  }
}

namespace {

MonoidRecognizer cyclic_like(std::size_t size, const std::function<std::size_t(std::size_t, std::size_t)>& add,
                             std::size_t dim, std::size_t axis, std::size_t one, std::vector<bool> accepting) {
  std::vector<std::vector<std::size_t>> table(size, std::vector<std::size_t>(size));
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) table[a][b] = add(a, b);
  }
  std::vector<std::size_t> images(dim, 0);
  if (axis >= dim) throw Error(ErrorKind::kConstraint, "constraint mentions axis " + std::to_string(axis + 1) +
                                                           " beyond dimension " + std::to_string(dim));
  images[axis] = one;
  return MonoidRecognizer(std::move(table), 0, std::move(images), std::move(accepting));
}

// Generated submonoid of A x B with acceptance combined by `accept`.
MonoidRecognizer product(const MonoidRecognizer& a, const MonoidRecognizer& b,
                         const std::function<bool(bool, bool)>& accept) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  std::vector<std::pair<std::size_t, std::size_t>> elems;
  auto intern = [&](std::pair<std::size_t, std::size_t> e) {
    auto [it, inserted] = index.try_emplace(e, elems.size());
    if (inserted) elems.push_back(e);
    return it->second;
  };
  intern({a.identity(), b.identity()});
  for (std::size_t pos = 0; pos < elems.size(); ++pos) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      auto [x, y] = elems[pos];
      intern({a.add(x, a.image(j)), b.add(y, b.image(j))});
    }
  }
  std::size_t n = elems.size();
  std::vector<std::vector<std::size_t>> table(n, std::vector<std::size_t>(n));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      auto e = std::make_pair(a.add(elems[p].first, elems[q].first), b.add(elems[p].second, elems[q].second));
      auto it = index.find(e);
      if (it == index.end()) throw Error(ErrorKind::kInternal, "generated submonoid not closed");
      table[p][q] = it->second;
    }
  }
  std::vector<std::size_t> images;
  for (std::size_t j = 0; j < a.dim(); ++j) images.push_back(index.at({a.image(j), b.image(j)}));
  std::vector<bool> acc;
  for (const auto& [x, y] : elems) acc.push_back(accept(a.accepting(x), b.accepting(y)));
  return MonoidRecognizer(std::move(table), 0, std::move(images), std::move(acc));
}

MonoidRecognizer trivial(std::size_t dim, bool accept) {
  return MonoidRecognizer({{0}}, 0, std::vector<std::size_t>(dim, 0), {accept});
}

}  // namespace

MonoidRecognizer MonoidRecognizer::compile(const ConstraintExpr& c, std::size_t dim) {
  using Kind = ConstraintExpr::Kind;
  switch (c.kind) {
    case Kind::kTrue:
      return trivial(dim, true);
    case Kind::kFalse:
      return trivial(dim, false);
    case Kind::kEq: {
      // Threshold monoid 0..n, with n + 1 standing for "more than n".
      std::size_t top = c.value + 1;
      std::vector<bool> acc(top + 1, false);
      acc[c.value] = true;
      return cyclic_like(
          top + 1, [top](std::size_t x, std::size_t y) { return std::min(x + y, top); }, dim, c.axis, 1,
          std::move(acc));
    }
    case Kind::kMod: {
      std::size_t m = c.modulus;
      std::vector<bool> acc(m, false);
      acc[c.value % m] = true;
      return cyclic_like(
          m, [m](std::size_t x, std::size_t y) { return (x + y) % m; }, dim, c.axis, 1 % m, std::move(acc));
    }
    case Kind::kAnd:
    case Kind::kOr: {
      bool is_and = c.kind == Kind::kAnd;
      MonoidRecognizer acc = trivial(dim, is_and);
      for (const auto& child : c.children) {
        acc = product(acc, compile(*child, dim),
                      is_and ? std::function<bool(bool, bool)>([](bool x, bool y) { return x && y; })
                             : std::function<bool(bool, bool)>([](bool x, bool y) { return x || y; }));
      }
      return acc;
    }
    case Kind::kNot: {
      MonoidRecognizer inner = compile(*c.children.at(0), dim);
      std::vector<bool> acc;
      for (std::size_t m = 0; m < inner.size(); ++m) acc.push_back(!inner.accepting(m));
      inner.accepting_ = std::move(acc);
      return inner;
    }
  }
  throw Error(ErrorKind::kConstraint, "unknown constraint node");
}

std::size_t MonoidRecognizer::element_of(const Exponent& n) const {
  require_dim(n.size(), dim(), "exponent");
  std::size_t m = identity_;
  for (std::size_t j = 0; j < n.size(); ++j) {
    for (std::uint32_t t = 0; t < n[j]; ++t) m = add(m, images_[j]);
  }
  return m;
}

CdfSeries restrict_regular(const CdfSeries& s, const ConstraintExpr& phi) {
  if (phi.arity() > s.system.dim()) {
    throw Error(ErrorKind::kConstraint, "constraint mentions an axis beyond the series dimension");
  }
  return restrict_regular(s, MonoidRecognizer::compile(phi, s.system.dim()));
}

CdfSeries restrict_regular(const CdfSeries& s, const MonoidRecognizer& rec) {
  const CdfSystem& sys = s.system;
  require_dim(rec.dim(), sys.dim(), "recognizer");
  std::size_t n = rec.size();
  std::size_t k = sys.order();
  CdfBuilder b(sys.axes());
  for (VarId i = 0; i < k; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      b.add_generator(sys.context()->name(i) + "_" + std::to_string(m), m == rec.identity() ? sys.init()[i] : 0);
    }
  }
  const ContextPtr ctx = b.context();
  auto gen = [&](VarId i, std::size_t m) { return static_cast<VarId>(i * n + m); };
  // parts[m] is the part of p supported on exponents mapped to m.
  auto push_down = [&](const Poly& p) {
    std::vector<Poly> parts(n, Poly(ctx));
    for (const auto& t : p.terms()) {
      std::vector<Poly> acc(n, Poly(ctx));
      acc[rec.identity()] = Poly::constant(ctx, t.coeff);
      for (const auto& [v, e] : t.mono.factors()) {
        for (std::uint32_t r = 0; r < e; ++r) {
          std::vector<Poly> next(n, Poly(ctx));
          for (std::size_t a = 0; a < n; ++a) {
            if (acc[a].is_zero()) continue;
            for (std::size_t c = 0; c < n; ++c) {
              next[rec.add(a, c)] += acc[a].mul_term(Monomial::var(gen(v, c)), Rat(1));
            }
          }
          acc = std::move(next);
        }
      }
      for (std::size_t m = 0; m < n; ++m) parts[m] += acc[m];
    }
    return parts;
  };
  for (VarId i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < sys.dim(); ++j) {
      auto parts = push_down(sys.kernel(i, j));
      std::size_t h = rec.image(j);
      std::vector<Poly> entry(n, Poly(ctx));
      for (std::size_t m = 0; m < n; ++m) entry[rec.add(m, h)] += parts[m];
      for (std::size_t m = 0; m < n; ++m) b.set_kernel(gen(i, m), j, entry[m]);
    }
  }
  auto parts = push_down(s.expr);
  Poly expr(ctx);
  for (std::size_t m = 0; m < n; ++m) {
    if (rec.accepting(m)) expr += parts[m];
  }
  return CdfSeries(b.build(), expr);
}

// ---------------------------------------------------------------------------

WellPosedness well_posed(const CdfVector& F) {
  WellPosedness out;
  std::size_t k = F.exprs.size();
  if (F.system.dim() < k) throw Error(ErrorKind::kDimensionMismatch, "more unknowns than axes");
  std::size_t d = F.system.dim() - k;
  const auto& c = F.system.init();
  for (std::size_t a = 0; a < k; ++a) {
    Rat v = F.exprs[a].eval(c);
    if (v != 0) {
      out.ok = false;
      out.diagnostic = "equation for " + F.system.axes()[d + a] + " has value " + to_string(v) +
                       " at the origin, expected 0";
      return out;
    }
  }
  out.jacobian.assign(k, std::vector<Rat>(k, Rat(0)));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      out.jacobian[a][b] = lie_derivative(F.system, d + b, F.exprs[a]).eval(c);
    }
  }
  if (!is_nilpotent(out.jacobian)) {
    out.ok = false;
    out.diagnostic = "Jacobian at the origin is not nilpotent";
  }
  return out;
}

CdfVector implicit_solve(const CdfVector& F) {
  auto wp = well_posed(F);
  if (!wp.ok) throw Error(ErrorKind::kNotWellPosed, wp.diagnostic);
  const CdfSystem& sys = F.system;
  std::size_t k = F.exprs.size();
  std::size_t d = sys.dim() - k;
  std::vector<std::string> axes(sys.axes().begin(), sys.axes().begin() + static_cast<std::ptrdiff_t>(d));

  CdfBuilder b(axes);
  for (VarId l = 0; l < sys.order(); ++l) b.add_generator(sys.context()->name(l), sys.init()[l]);
  std::vector<VarId> ys;
  for (std::size_t a = 0; a < k; ++a) ys.push_back(b.add_generator(sys.axes()[d + a], 0));
  VarId delta = b.add_generator("delta", 1);
  const ContextPtr ctx = b.context();

  // I - J and the x-partials of F, all polynomials in the F generators.
  std::vector<std::vector<Poly>> m(k, std::vector<Poly>(k, Poly(ctx)));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t c = 0; c < k; ++c) {
      m[a][c] = Poly::constant(ctx, a == c ? 1 : 0) - lie_derivative(sys, d + c, F.exprs[a]).lift(ctx);
    }
  }
  Poly det = determinant(m, ctx);
  std::vector<Rat> point = sys.init();
  point.resize(ctx->size(), Rat(0));
  Rat det0 = det.eval(point);
  if (det0 == 0) throw Error(ErrorKind::kNotWellPosed, "I - Jacobian is singular at the origin");
  std::vector<std::vector<Poly>> adj(k, std::vector<Poly>(k, Poly(ctx)));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      Poly cof = determinant(minor_of(m, r, c), ctx);
      adj[c][r] = ((r + c) % 2 == 0) ? cof : -cof;
    }
  }
  Poly dv = b.var(delta);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Poly> fx;
    for (std::size_t a = 0; a < k; ++a) fx.push_back(lie_derivative(sys, j, F.exprs[a]).lift(ctx));
    // dy/dx_j = delta * adj(I - J) * dF/dx_j.
    std::vector<Poly> dy(k, Poly(ctx));
    for (std::size_t r = 0; r < k; ++r) {
      Poly acc(ctx);
      for (std::size_t a = 0; a < k; ++a) {
        if (!adj[r][a].is_zero() && !fx[a].is_zero()) acc += adj[r][a] * fx[a];
      }
      dy[r] = dv * acc;
      b.set_kernel(ys[r], j, dy[r]);
    }
    std::vector<Poly> du;
    for (VarId l = 0; l < sys.order(); ++l) {
      Poly entry = sys.kernel(l, j).lift(ctx);
      for (std::size_t r = 0; r < k; ++r) {
        const Poly& bl = sys.kernel(l, d + r);
        if (!bl.is_zero()) entry += bl.lift(ctx) * dy[r];
      }
      b.set_kernel(l, j, entry);
      du.push_back(entry);
    }
    // d(delta)/dx_j = -delta^2 * D_j det(I - J), Jacobi's formula.
    Poly ddet(ctx);
    for (VarId l = 0; l < sys.order(); ++l) {
      Poly part = det.partial(l);
      if (!part.is_zero()) ddet += part * du[l];
    }
    b.set_kernel(delta, j, -(dv * dv * ddet));
  }
  CdfSystem out = b.build();
  std::vector<Rat> init = out.init();
  init[delta] = 1 / det0;
  CdfSystem fixed(out.axes(), out.context(), out.kernel(), std::move(init));
  std::vector<Poly> exprs;
  for (auto y : ys) exprs.push_back(Poly::variable(fixed.context(), y));
  return CdfVector(std::move(fixed), std::move(exprs));
}

// ---------------------------------------------------------------------------

Wbpp to_wbpp(const CdfSeries& s) {
  const CdfSystem& sys = s.system;
  std::vector<std::string> alphabet;
  for (std::size_t j = 0; j < sys.dim(); ++j) alphabet.push_back(letter_for_axis(j));
  std::optional<VarId> start;
  if (s.expr.terms().size() == 1 && s.expr.terms()[0].coeff == 1 && s.expr.terms()[0].mono.degree() == 1) {
    start = s.expr.terms()[0].mono.factors()[0].first;
  }
  ContextPtr ctx = sys.context();
  std::vector<std::string> names = ctx->names();
  if (!start) {
    names.push_back(fresh_name("U", names));
    ctx = Context::make(names);
    start = static_cast<VarId>(names.size() - 1);
  }
  std::vector<std::vector<Poly>> delta(sys.dim());
  for (std::size_t j = 0; j < sys.dim(); ++j) {
    for (VarId i = 0; i < sys.order(); ++i) delta[j].push_back(sys.kernel(i, j).lift(ctx));
    if (ctx->size() > sys.order()) delta[j].push_back(lie_derivative(sys, j, s.expr).lift(ctx));
  }
  std::vector<Rat> output = sys.init();
  if (ctx->size() > sys.order()) output.push_back(s.expr.eval(sys.init()));
  return Wbpp(alphabet, ctx, *start, std::move(delta), std::move(output));
}

CdfSeries from_wbpp(const Wbpp& m, std::size_t check_length) {
  auto report = check_commutative_bounded(m, check_length);
  if (!report.ok) {
    throw Error(ErrorKind::kPrecondition, "model is not commutative: " + m.word_to_string(report.u) + " and " +
                                              m.word_to_string(report.v) + " have different coefficients");
  }
  std::size_t d = m.alphabet().size();
  std::vector<std::vector<Poly>> kernel(m.num_nonterminals());
  for (VarId i = 0; i < m.num_nonterminals(); ++i) {
    for (std::size_t j = 0; j < d; ++j) kernel[i].push_back(m.delta(j, i));
  }
  CdfSystem sys(default_axes(d), m.context(), std::move(kernel), m.output());
  return CdfSeries(sys, m.start_config());
}

}  // namespace cdfwbpp
