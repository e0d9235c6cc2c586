#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "cdfwbpp/cdf.hpp"
#include "cdfwbpp/chain.hpp"
#include "cdfwbpp/series.hpp"

namespace cdfwbpp {

struct SpeciesExpr;
using SpeciesPtr = std::shared_ptr<const SpeciesExpr>;

// Constructible species. Axes are positional: a node sees the declared sorts
// followed by the binders of every enclosing fix and compose, outermost
// first. Atoms and constraints refer to axes by index in that scope; binder
// references go by name.
struct SpeciesExpr {
  enum class Kind { kConst, kAtom, kSet, kCyc, kSeq, kSum, kProd, kCompose, kRestrict, kFix, kRef, kNamed };

  Kind kind = Kind::kConst;
  // kConst: the constant species with this many structures on the empty set.
  Int value = 0;
  // kAtom: axis index in scope.
  std::size_t axis = 0;
  // kRef: binder name; kFix: selected binder; kNamed: definition name.
  std::string name;
  // kSet/kCyc/kSeq/kRestrict/kNamed: one child. kSum/kProd: operands.
  // kCompose: outer first, then one substitution per binder. kFix: one body
  // per binder.
  std::vector<SpeciesPtr> children;
  std::vector<std::string> binders;
  ConstraintPtr constraint;

  static SpeciesPtr constant(Int n);
  static SpeciesPtr zero() { return constant(0); }
  static SpeciesPtr one() { return constant(1); }
  static SpeciesPtr atom(std::size_t axis);
  static SpeciesPtr set(SpeciesPtr a);
  static SpeciesPtr cyc(SpeciesPtr a);
  static SpeciesPtr seq(SpeciesPtr a);
  static SpeciesPtr sum(std::vector<SpeciesPtr> terms);
  static SpeciesPtr prod(std::vector<SpeciesPtr> factors);
  static SpeciesPtr compose(SpeciesPtr outer, std::vector<std::string> binders, std::vector<SpeciesPtr> subs);
  static SpeciesPtr restrict(SpeciesPtr a, ConstraintPtr phi);
  static SpeciesPtr fix(std::vector<std::string> binders, std::vector<SpeciesPtr> bodies, std::string selected);
  static SpeciesPtr ref(std::string name);
  // A closed species defined over the declared sorts only, reused by name.
  static SpeciesPtr named(std::string name, SpeciesPtr body);
};

bool structurally_equal(const SpeciesExpr& a, const SpeciesExpr& b);

std::vector<std::string> sort_names(std::size_t sorts);

// EGS of the species as a CDF series over the declared sorts.
CdfSeries compile(const SpeciesExpr& e, std::size_t sorts);

// Well-posedness of a fix node whose enclosing scope has the given axes; the
// first `sorts` of them are the declared sorts (all of them by default).
WellPosedness well_posed(const SpeciesExpr& fix, const std::vector<std::string>& scope, std::size_t sorts);
WellPosedness well_posed(const SpeciesExpr& fix, const std::vector<std::string>& scope);

struct FixReport {
  std::string binders;
  WellPosedness result;
};
// Checks every fix node reachable in the expression.
std::vector<FixReport> check_fixpoints(const SpeciesExpr& e, std::size_t sorts);

// Counts of labelled structures; a non-integral or negative entry raises
// kInternal.
TruncSeries count_table(const SpeciesExpr& e, std::size_t sorts, std::uint32_t order);

ZeroVerdict equipotent(const SpeciesExpr& a, const SpeciesExpr& b, std::size_t sorts,
                       const ResourceLimits& limits = {});

}  // namespace cdfwbpp
