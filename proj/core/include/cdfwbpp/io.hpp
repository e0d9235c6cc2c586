#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdfwbpp/cdf.hpp"
#include "cdfwbpp/species.hpp"
#include "cdfwbpp/wbpp.hpp"

namespace cdfwbpp {

// Every format: UTF-8, one directive per line (except .spec), `#` starts a
// comment. Parse failures raise Error(kParse) with a line number.

struct WbppFile {
  Wbpp model;
  std::vector<std::string> warnings;
};
// alphabet a b / nonterminals S X / start S / output X = 0 / delta a X = X^2
WbppFile parse_wbpp(std::string_view text);
std::string print_wbpp(const Wbpp& m);

// alphabet a b (optional) / start S / rule X = a.(X|X) + b.end
BppSpec parse_bpp(std::string_view text);
std::string print_bpp(const BppSpec& b);

struct CdfFile {
  CdfSeries series;
  std::vector<std::string> warnings;
  // Present when the expression was given as restrict(p; phi).
  ConstraintPtr constraint;
  std::optional<MonoidRecognizer> recognizer;
};
// vars x1 / gens s c / init s = 0 / d/dx1 s = c / expr = s^2 + c^2 - 1.
// Kernel entries may mention the vars; such systems are autonomized.
CdfFile parse_cdf(std::string_view text);
std::string print_cdf(const CdfSeries& s);

// Axis names resolve against `axes`; z1, z2, ... always name axes by position.
ConstraintPtr parse_constraint(std::string_view text, const std::vector<std::string>& axes);

struct SpecFile {
  std::size_t sorts = 1;
  std::vector<std::pair<std::string, SpeciesPtr>> definitions;

  // The last definition.
  const SpeciesPtr& main() const;
};
// sorts 1 / species Cayley { fix { Y = X1 * SET(Y) } in Y }
SpecFile parse_spec(std::string_view text);
std::string print_spec(const SpecFile& f);
std::string print_species(const SpeciesExpr& e, const std::vector<std::string>& scope);

std::string read_text_file(const std::string& path);

}  // namespace cdfwbpp
