#include "cdfwbpp/species.hpp"

#include <map>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

namespace {

std::shared_ptr<SpeciesExpr> node(SpeciesExpr::Kind kind) {
  auto e = std::make_shared<SpeciesExpr>();
  e->kind = kind;
  return e;
}

bool constraints_equal(const ConstraintPtr& a, const ConstraintPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->axis != b->axis || a->value != b->value || a->modulus != b->modulus ||
      a->children.size() != b->children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!constraints_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

struct Scope {
  std::vector<std::string> axes;
  CdfBuilder builder;
  std::map<std::size_t, VarId> atoms;

  explicit Scope(std::vector<std::string> a) : axes(a), builder(std::move(a)) {}
};

std::vector<std::string> extend(const std::vector<std::string>& axes, const std::vector<std::string>& more) {
  std::vector<std::string> out = axes;
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

Poly compile_in(const SpeciesExpr& e, Scope& scope, std::size_t sorts);

CdfSeries compile_series(const SpeciesExpr& e, const std::vector<std::string>& axes, std::size_t sorts) {
  Scope fresh(axes);
  Poly p = compile_in(e, fresh, sorts);
  CdfSystem sys = fresh.builder.build();
  return CdfSeries(sys, p.lift(sys.context()));
}

Poly absorb(Scope& scope, const CdfSeries& s) {
  auto map = scope.builder.absorb(s.system);
  return s.expr.rename(scope.builder.context(), map);
}

// Same series viewed over more axes; it is constant along the new ones.
CdfSeries widen(const CdfSeries& s, const std::vector<std::string>& axes) {
  std::vector<std::vector<Poly>> kernel = s.system.kernel();
  for (auto& row : kernel) row.resize(axes.size(), Poly(s.system.context()));
  return CdfSeries(CdfSystem(axes, s.system.context(), std::move(kernel), s.system.init()), s.expr);
}

Rat value_at_origin(const Scope& scope, const Poly& p) {
  CdfSystem sys = scope.builder.build();
  return p.lift(sys.context()).eval(sys.init());
}

std::vector<Poly> lie_all(const Scope& scope, const Poly& p) {
  CdfSystem sys = scope.builder.build();
  std::vector<Poly> out;
  for (std::size_t j = 0; j < sys.dim(); ++j) out.push_back(lie_derivative(sys, j, p.lift(sys.context())));
  return out;
}

void require_empty_free(const Scope& scope, const Poly& a, const char* op) {
  Rat a0 = value_at_origin(scope, a);
  if (a0 != 0) {
    throw Error(ErrorKind::kPrecondition, std::string(op) + " argument has " + to_string(a0) +
                                              " structures on the empty set; restrict it to size >= 1");
  }
}

VarId atom_generator(Scope& scope, std::size_t axis) {
  auto it = scope.atoms.find(axis);
  if (it != scope.atoms.end()) return it->second;
  VarId t = scope.builder.add_generator("t" + std::to_string(axis + 1), 0);
  scope.builder.set_kernel(t, axis, Poly::constant(scope.builder.context(), 1));
  scope.atoms.emplace(axis, t);
  return t;
}

CdfVector compile_bodies(const SpeciesExpr& fix, const std::vector<std::string>& axes, std::size_t sorts) {
  Scope inner(extend(axes, fix.binders));
  std::vector<Poly> bodies;
  for (const auto& b : fix.children) bodies.push_back(compile_in(*b, inner, sorts));
  CdfSystem sys = inner.builder.build();
  for (auto& p : bodies) p = p.lift(sys.context());
  return CdfVector(std::move(sys), std::move(bodies));
}

Poly compile_in(const SpeciesExpr& e, Scope& scope, std::size_t sorts) {
  using Kind = SpeciesExpr::Kind;
  const ContextPtr& ctx = scope.builder.context();
  switch (e.kind) {
    case Kind::kConst:
      return Poly::constant(ctx, Rat(e.value));
    case Kind::kAtom:
      if (e.axis >= scope.axes.size()) throw Error(ErrorKind::kDimensionMismatch, "atom axis out of scope");
      return scope.builder.var(atom_generator(scope, e.axis));
    case Kind::kRef:
      for (std::size_t j = scope.axes.size(); j-- > 0;) {
        if (scope.axes[j] == e.name) return scope.builder.var(atom_generator(scope, j));
      }
      throw Error(ErrorKind::kParse, "unknown name " + e.name);
    case Kind::kSum:
    case Kind::kProd: {
      std::vector<Poly> parts;
      for (const auto& c : e.children) parts.push_back(compile_in(*c, scope, sorts));
      const ContextPtr& now = scope.builder.context();
      Poly acc = Poly::constant(now, e.kind == Kind::kSum ? 0 : 1);
      for (const auto& p : parts) {
        if (e.kind == Kind::kSum) {
          acc += p.lift(now);
        } else {
          acc *= p.lift(now);
        }
      }
      return acc;
    }
    case Kind::kSet: {
      Poly a = compile_in(*e.children.at(0), scope, sorts);
      require_empty_free(scope, a, "SET");
      auto la = lie_all(scope, a);
      VarId s = scope.builder.add_generator("set", 1);
      Poly sv = scope.builder.var(s);
      for (std::size_t j = 0; j < la.size(); ++j) scope.builder.set_kernel(s, j, sv * scope.builder.lift(la[j]));
      return sv;
    }
    case Kind::kCyc:
    case Kind::kSeq: {
      Poly a = compile_in(*e.children.at(0), scope, sorts);
      require_empty_free(scope, a, e.kind == Kind::kCyc ? "CYC" : "SEQ");
      auto la = lie_all(scope, a);
      // r = 1 / (1 - a) and c = -log(1 - a).
      VarId r = scope.builder.add_generator("seq", 1);
      Poly rv = scope.builder.var(r);
      for (std::size_t j = 0; j < la.size(); ++j) {
        scope.builder.set_kernel(r, j, scope.builder.lift(la[j]) * rv * rv);
      }
      if (e.kind == Kind::kSeq) return rv;
      VarId c = scope.builder.add_generator("cyc", 0);
      rv = scope.builder.var(r);
      for (std::size_t j = 0; j < la.size(); ++j) scope.builder.set_kernel(c, j, scope.builder.lift(la[j]) * rv);
      return scope.builder.var(c);
    }
    case Kind::kRestrict: {
      CdfSeries inner = compile_series(*e.children.at(0), scope.axes, sorts);
      return absorb(scope, restrict_regular(inner, *e.constraint));
    }
    case Kind::kCompose: {
      CdfSeries outer = compile_series(*e.children.at(0), extend(scope.axes, e.binders), sorts);
      std::vector<CdfSeries> subs;
      for (std::size_t i = 1; i < e.children.size(); ++i) subs.push_back(compile_series(*e.children[i], scope.axes, sorts));
      return absorb(scope, compose_strong(outer, subs));
    }
    case Kind::kFix: {
      CdfVector sol = implicit_solve(compile_bodies(e, scope.axes, sorts));
      std::size_t sel = e.binders.size();
      for (std::size_t i = 0; i < e.binders.size(); ++i) {
        if (e.binders[i] == e.name) sel = i;
      }
      if (sel == e.binders.size()) throw Error(ErrorKind::kParse, "fix selects unknown binder " + e.name);
      return absorb(scope, sol.at(sel));
    }
    case Kind::kNamed: {
      CdfSeries def = compile_series(*e.children.at(0), sort_names(sorts), sorts);
      return absorb(scope, widen(def, scope.axes));
    }
  }
  throw Error(ErrorKind::kInternal, "unknown species node");
}

void walk_fix(const SpeciesExpr& e, const std::vector<std::string>& scope, std::size_t sorts,
              std::vector<FixReport>& out) {
  using Kind = SpeciesExpr::Kind;
  switch (e.kind) {
    case Kind::kFix: {
      std::string names;
      for (const auto& b : e.binders) names += (names.empty() ? "" : ", ") + b;
      out.push_back({names, well_posed(e, scope, sorts)});
      auto inner = extend(scope, e.binders);
      for (const auto& c : e.children) walk_fix(*c, inner, sorts, out);
      return;
    }
    case Kind::kCompose:
      walk_fix(*e.children.at(0), extend(scope, e.binders), sorts, out);
      for (std::size_t i = 1; i < e.children.size(); ++i) walk_fix(*e.children[i], scope, sorts, out);
      return;
    case Kind::kNamed:
      walk_fix(*e.children.at(0), sort_names(sorts), sorts, out);
      return;
    default:
      for (const auto& c : e.children) walk_fix(*c, scope, sorts, out);
  }
}

}  // namespace

SpeciesPtr SpeciesExpr::constant(Int n) {
  if (n < 0) throw Error(ErrorKind::kPrecondition, "negative species constant");
  auto e = node(Kind::kConst);
  e->value = n;
  return e;
}

SpeciesPtr SpeciesExpr::atom(std::size_t axis) {
  auto e = node(Kind::kAtom);
  e->axis = axis;
  return e;
}

SpeciesPtr SpeciesExpr::set(SpeciesPtr a) {
  auto e = node(Kind::kSet);
  e->children.push_back(std::move(a));
  return e;
}

SpeciesPtr SpeciesExpr::cyc(SpeciesPtr a) {
  auto e = node(Kind::kCyc);
  e->children.push_back(std::move(a));
  return e;
}

SpeciesPtr SpeciesExpr::seq(SpeciesPtr a) {
  auto e = node(Kind::kSeq);
  e->children.push_back(std::move(a));
  return e;
}

SpeciesPtr SpeciesExpr::sum(std::vector<SpeciesPtr> terms) {
  auto e = node(Kind::kSum);
  e->children = std::move(terms);
  return e;
}

SpeciesPtr SpeciesExpr::prod(std::vector<SpeciesPtr> factors) {
  auto e = node(Kind::kProd);
  e->children = std::move(factors);
  return e;
}

SpeciesPtr SpeciesExpr::compose(SpeciesPtr outer, std::vector<std::string> binders, std::vector<SpeciesPtr> subs) {
  if (binders.size() != subs.size()) throw Error(ErrorKind::kArity, "one substitution per binder");
  auto e = node(Kind::kCompose);
  e->children.push_back(std::move(outer));
  for (auto& s : subs) e->children.push_back(std::move(s));
  e->binders = std::move(binders);
  return e;
}

SpeciesPtr SpeciesExpr::restrict(SpeciesPtr a, ConstraintPtr phi) {
  auto e = node(Kind::kRestrict);
  e->children.push_back(std::move(a));
  e->constraint = std::move(phi);
  return e;
}

SpeciesPtr SpeciesExpr::fix(std::vector<std::string> binders, std::vector<SpeciesPtr> bodies, std::string selected) {
  if (binders.size() != bodies.size() || binders.empty()) {
    throw Error(ErrorKind::kArity, "fix needs one body per binder");
  }
  auto e = node(Kind::kFix);
  e->binders = std::move(binders);
  e->children = std::move(bodies);
  e->name = std::move(selected);
  return e;
}

SpeciesPtr SpeciesExpr::ref(std::string name) {
  auto e = node(Kind::kRef);
  e->name = std::move(name);
  return e;
}

SpeciesPtr SpeciesExpr::named(std::string name, SpeciesPtr body) {
  auto e = node(Kind::kNamed);
  e->name = std::move(name);
  e->children.push_back(std::move(body));
  return e;
}

bool structurally_equal(const SpeciesExpr& a, const SpeciesExpr& b) {
  if (a.kind != b.kind || a.value != b.value || a.axis != b.axis || a.name != b.name || a.binders != b.binders ||
      a.children.size() != b.children.size() || !constraints_equal(a.constraint, b.constraint)) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

std::vector<std::string> sort_names(std::size_t sorts) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < sorts; ++j) out.push_back("X" + std::to_string(j + 1));
  return out;
}

CdfSeries compile(const SpeciesExpr& e, std::size_t sorts) { return compile_series(e, sort_names(sorts), sorts); }

WellPosedness well_posed(const SpeciesExpr& fix, const std::vector<std::string>& scope, std::size_t sorts) {
  if (fix.kind != SpeciesExpr::Kind::kFix) throw Error(ErrorKind::kPrecondition, "not a fix node");
  return well_posed(compile_bodies(fix, scope, sorts));
}

WellPosedness well_posed(const SpeciesExpr& fix, const std::vector<std::string>& scope) {
  return well_posed(fix, scope, scope.size());
}

std::vector<FixReport> check_fixpoints(const SpeciesExpr& e, std::size_t sorts) {
  std::vector<FixReport> out;
  walk_fix(e, sort_names(sorts), sorts, out);
  return out;
}

TruncSeries count_table(const SpeciesExpr& e, std::size_t sorts, std::uint32_t order) {
  TruncSeries t = coeff_table(compile(e, sorts), order);
  for (const auto& [n, v] : t.entries()) {
    if (!is_integer(v) || v < 0) {
      throw Error(ErrorKind::kInternal, "species count at " + exponent_to_string(n) + " is " + to_string(v));
    }
  }
  return t;
}

ZeroVerdict equipotent(const SpeciesExpr& a, const SpeciesExpr& b, std::size_t sorts, const ResourceLimits& limits) {
  return equivalent(compile(a, sorts), compile(b, sorts), limits);
}

}  // namespace cdfwbpp
