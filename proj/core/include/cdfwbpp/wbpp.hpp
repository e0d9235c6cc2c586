#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdfwbpp/chain.hpp"
#include "cdfwbpp/groebner.hpp"
#include "cdfwbpp/poly.hpp"

namespace cdfwbpp {

// A word as a sequence of letter indices.
using Word = std::vector<std::size_t>;
// A configuration is a polynomial over the nonterminals.
using Config = Poly;

// Weighted basic parallel process: letter-indexed derivations of Q[N] plus an
// output vector. The series of a configuration a is [[a]]_w = F(Delta_w a).
class Wbpp {
 public:
  // delta[a][i] is Delta_a applied to nonterminal i.
  Wbpp(std::vector<std::string> alphabet, ContextPtr nonterminals, VarId start,
       std::vector<std::vector<Poly>> delta, std::vector<Rat> output);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const ContextPtr& context() const { return ctx_; }
  std::size_t num_nonterminals() const { return ctx_->size(); }
  VarId start() const { return start_; }
  Config start_config() const { return Poly::variable(ctx_, start_); }

  const Poly& delta(std::size_t letter, VarId x) const { return derivations_.at(letter).image(x); }
  const Derivation& derivation(std::size_t letter) const { return derivations_.at(letter); }
  const std::vector<Derivation>& derivations() const { return derivations_; }
  const std::vector<Rat>& output() const { return output_; }
  // Maximal degree of a transition polynomial.
  std::uint32_t degree() const;

  std::size_t letter_index(std::string_view letter) const;
  std::optional<std::size_t> find_letter(std::string_view letter) const;

  // Splits "aabb" into letters (greedy longest match over the alphabet);
  // letters may also be separated by spaces or dots.
  Word parse_word(std::string_view text) const;
  std::string word_to_string(const Word& w) const;

  friend bool operator==(const Wbpp& a, const Wbpp& b);

 private:
  std::vector<std::string> alphabet_;
  ContextPtr ctx_;
  VarId start_;
  std::vector<Derivation> derivations_;
  std::vector<Rat> output_;
};

Config delta_letter(const Wbpp& m, std::size_t letter, const Config& alpha);
Config delta_letter(const Wbpp& m, std::string_view letter, const Config& alpha);
Config delta_word(const Wbpp& m, const Word& w, const Config& alpha);
// F extended homomorphically: evaluation at the output vector.
Rat output_of(const Wbpp& m, const Config& alpha);
Rat evaluate(const Wbpp& m, const Config& alpha, const Word& w);

// All coefficients for |w| <= max_length in breadth-first order (by length,
// then lexicographically by letter index).
std::vector<std::pair<Word, Rat>> coeffs_up_to(const Wbpp& m, const Config& alpha, std::size_t max_length);

ZeroVerdict zeroness(const Wbpp& m, const Config& alpha, const ResourceLimits& limits = {});

// Both models over a shared alphabet and nonterminal context.
struct WbppUnion {
  Wbpp model;
  Config first;
  Config second;
};
// Alphabet union (first model's letters first), nonterminals of the second
// model renamed apart, missing transitions padded with 0.
WbppUnion disjoint_union(const Wbpp& m1, const Wbpp& m2);
ZeroVerdict equivalent(const Wbpp& m1, const Wbpp& m2, const ResourceLimits& limits = {});

// Closure constructions; each result has a fresh start nonterminal.
Wbpp scale(const Wbpp& m, const Rat& c);
Wbpp sum(const Wbpp& m1, const Wbpp& m2);
Wbpp shuffle(const Wbpp& m1, const Wbpp& m2);
Wbpp derive(const Wbpp& m, std::size_t letter);
Wbpp shuffle_inverse(const Wbpp& m);

// Basic parallel process in standard form: every rule is a sum of summands
// a.(X1 | ... | Xn), with n = 0 meaning termination.
struct BppSummand {
  std::string action;
  std::vector<std::string> merge;
};

struct BppSpec {
  std::vector<std::string> alphabet;
  std::vector<std::string> nonterminals;
  std::string start;
  // rules[i] belongs to nonterminals[i].
  std::vector<std::vector<BppSummand>> rules;
};

// Multiplicity semantics: [[X]]_w counts the runs of X reading w and ending
// in the terminated process.
Wbpp bpp_to_wbpp(const BppSpec& b);

struct CommutativityReport {
  bool ok = true;
  Word u;
  Word v;
};
// Compares coefficients of Parikh-equivalent words up to the length bound.
CommutativityReport check_commutative_bounded(const Wbpp& m, std::size_t max_length);

}  // namespace cdfwbpp
