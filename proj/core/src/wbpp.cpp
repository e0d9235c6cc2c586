#include "cdfwbpp/wbpp.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

namespace {

std::vector<Derivation> make_derivations(const ContextPtr& ctx, std::vector<std::vector<Poly>> delta) {
  std::vector<Derivation> out;
  out.reserve(delta.size());
  for (auto& row : delta) {
    if (row.size() != ctx->size()) {
      throw Error(ErrorKind::kArity, "transition row has " + std::to_string(row.size()) +
                                         " entries for " + std::to_string(ctx->size()) + " nonterminals");
    }
    out.emplace_back(ctx, std::move(row));
  }
  return out;
}

bool all_single_char(const std::vector<std::string>& letters) {
  return std::all_of(letters.begin(), letters.end(), [](const std::string& s) { return s.size() == 1; });
}

// Appends a fresh nonterminal to `base`; `images(ctx, u)` returns Delta_a U
// for every letter over the extended context.
Wbpp with_fresh_start(const Wbpp& base, const std::string& hint,
                      const std::function<std::vector<Poly>(const ContextPtr&, VarId)>& images,
                      const Rat& output) {
  std::vector<std::string> names = base.context()->names();
  names.push_back(fresh_name(hint, names));
  auto ctx = Context::make(names);
  VarId u = static_cast<VarId>(names.size() - 1);
  std::vector<Poly> top = images(ctx, u);
  std::vector<std::vector<Poly>> delta(base.alphabet().size());
  for (std::size_t a = 0; a < delta.size(); ++a) {
    for (VarId x = 0; x < base.num_nonterminals(); ++x) delta[a].push_back(base.delta(a, x).lift(ctx));
    delta[a].push_back(top.at(a));
  }
  std::vector<Rat> out = base.output();
  out.push_back(output);
  return Wbpp(base.alphabet(), ctx, u, std::move(delta), std::move(out));
}

}  // namespace

Wbpp::Wbpp(std::vector<std::string> alphabet, ContextPtr nonterminals, VarId start,
           std::vector<std::vector<Poly>> delta, std::vector<Rat> output)
    : alphabet_(std::move(alphabet)), ctx_(std::move(nonterminals)), start_(start), output_(std::move(output)) {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (alphabet_[i].empty()) throw Error(ErrorKind::kParse, "empty letter");
    for (std::size_t j = 0; j < i; ++j) {
      if (alphabet_[i] == alphabet_[j]) throw Error(ErrorKind::kParse, "duplicate letter " + alphabet_[i]);
    }
  }
  if (delta.size() != alphabet_.size()) {
    throw Error(ErrorKind::kArity, "transition table does not match the alphabet");
  }
  if (start_ >= ctx_->size()) throw Error(ErrorKind::kArity, "start nonterminal out of range");
  if (output_.size() != ctx_->size()) throw Error(ErrorKind::kArity, "output vector has the wrong length");
  for (const auto& row : delta) {
    for (const auto& p : row) {
      if (!compatible(p.context(), ctx_)) {
        throw Error(ErrorKind::kContextMismatch, "transition polynomial outside the nonterminal context");
      }
    }
  }
  derivations_ = make_derivations(ctx_, std::move(delta));
}

std::uint32_t Wbpp::degree() const {
  std::uint32_t d = 0;
  for (const auto& op : derivations_) d = std::max(d, op.degree());
  return d;
}

std::optional<std::size_t> Wbpp::find_letter(std::string_view letter) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (alphabet_[i] == letter) return i;
  }
  return std::nullopt;
}

std::size_t Wbpp::letter_index(std::string_view letter) const {
  if (auto i = find_letter(letter)) return *i;
  throw Error(ErrorKind::kUnknownLetter, "unknown letter '" + std::string(letter) + "'");
}

Word Wbpp::parse_word(std::string_view text) const {
  Word w;
  if (text == "ε" || text == "eps") return w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char ch = text[pos];
    if (ch == ' ' || ch == '.' || ch == '\t') {
      ++pos;
      continue;
    }
    std::size_t best = alphabet_.size();
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < alphabet_.size(); ++i) {
      const auto& l = alphabet_[i];
      if (l.size() > best_len && text.compare(pos, l.size(), l) == 0) {
        best = i;
        best_len = l.size();
      }
    }
    if (best == alphabet_.size()) {
      throw Error(ErrorKind::kUnknownLetter, "word '" + std::string(text) + "' has an unknown letter at position " +
                                                 std::to_string(pos));
    }
    w.push_back(best);
    pos += best_len;
  }
  return w;
}

std::string Wbpp::word_to_string(const Word& w) const {
  if (w.empty()) return "ε";
  std::string out;
  bool compact = all_single_char(alphabet_);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i > 0 && !compact) out += '.';
    out += alphabet_.at(w[i]);
  }
  return out;
}

bool operator==(const Wbpp& a, const Wbpp& b) {
  if (a.alphabet_ != b.alphabet_ || !compatible(a.ctx_, b.ctx_) || a.start_ != b.start_ ||
      a.output_ != b.output_) {
    return false;
  }
  for (std::size_t l = 0; l < a.alphabet_.size(); ++l) {
    if (a.derivations_[l].images() != b.derivations_[l].images()) return false;
  }
  return true;
}

Config delta_letter(const Wbpp& m, std::size_t letter, const Config& alpha) {
  if (letter >= m.alphabet().size()) throw Error(ErrorKind::kUnknownLetter, "letter index out of range");
  return m.derivation(letter).apply(alpha);
}

Config delta_letter(const Wbpp& m, std::string_view letter, const Config& alpha) {
  return delta_letter(m, m.letter_index(letter), alpha);
}

Config delta_word(const Wbpp& m, const Word& w, const Config& alpha) {
  Config out = alpha;
  for (std::size_t a : w) out = delta_letter(m, a, out);
  return out;
}

Rat output_of(const Wbpp& m, const Config& alpha) { return alpha.eval(m.output()); }

Rat evaluate(const Wbpp& m, const Config& alpha, const Word& w) { return output_of(m, delta_word(m, w, alpha)); }

std::vector<std::pair<Word, Rat>> coeffs_up_to(const Wbpp& m, const Config& alpha, std::size_t max_length) {
  std::vector<std::pair<Word, Rat>> out;
  std::vector<std::pair<Word, Config>> level{{Word{}, alpha}};
  for (std::size_t len = 0;; ++len) {
    for (const auto& [w, c] : level) out.emplace_back(w, output_of(m, c));
    if (len == max_length) break;
    std::vector<std::pair<Word, Config>> next;
    next.reserve(level.size() * m.alphabet().size());
    for (const auto& [w, c] : level) {
      for (std::size_t a = 0; a < m.alphabet().size(); ++a) {
        Word child = w;
        child.push_back(a);
        next.emplace_back(std::move(child), delta_letter(m, a, c));
      }
    }
    level = std::move(next);
  }
  return out;
}

ZeroVerdict zeroness(const Wbpp& m, const Config& alpha, const ResourceLimits& limits) {
  if (!compatible(alpha.context(), m.context())) {
    throw Error(ErrorKind::kContextMismatch, "configuration outside the model's nonterminal context");
  }
  return saturate(alpha, m.derivations(), m.output(), limits);
}

WbppUnion disjoint_union(const Wbpp& m1, const Wbpp& m2) {
  std::vector<std::string> alphabet = m1.alphabet();
  for (const auto& l : m2.alphabet()) {
    if (!m1.find_letter(l)) alphabet.push_back(l);
  }
  std::vector<std::string> names = m1.context()->names();
  std::vector<VarId> map2;
  for (const auto& n : m2.context()->names()) {
    names.push_back(fresh_name(n, names));
    map2.push_back(static_cast<VarId>(names.size() - 1));
  }
  auto ctx = Context::make(names);
  std::vector<std::vector<Poly>> delta(alphabet.size());
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    auto a1 = m1.find_letter(alphabet[a]);
    auto a2 = m2.find_letter(alphabet[a]);
    for (VarId x = 0; x < m1.num_nonterminals(); ++x) {
      delta[a].push_back(a1 ? m1.delta(*a1, x).lift(ctx) : Poly(ctx));
    }
    for (VarId x = 0; x < m2.num_nonterminals(); ++x) {
      delta[a].push_back(a2 ? m2.delta(*a2, x).rename(ctx, map2) : Poly(ctx));
    }
  }
  std::vector<Rat> output = m1.output();
  output.insert(output.end(), m2.output().begin(), m2.output().end());
  Wbpp model(alphabet, ctx, m1.start(), std::move(delta), std::move(output));
  Config first = m1.start_config().lift(ctx);
  Config second = m2.start_config().rename(ctx, map2);
  return {std::move(model), std::move(first), std::move(second)};
}

ZeroVerdict equivalent(const Wbpp& m1, const Wbpp& m2, const ResourceLimits& limits) {
  auto u = disjoint_union(m1, m2);
  return zeroness(u.model, u.first - u.second, limits);
}

Wbpp scale(const Wbpp& m, const Rat& c) {
  return with_fresh_start(
      m, "U",
      [&](const ContextPtr& ctx, VarId) {
        std::vector<Poly> out;
        for (std::size_t a = 0; a < m.alphabet().size(); ++a) out.push_back(c * m.delta(a, m.start()).lift(ctx));
        return out;
      },
      c * m.output()[m.start()]);
}

Wbpp sum(const Wbpp& m1, const Wbpp& m2) {
  auto u = disjoint_union(m1, m2);
  const Wbpp& base = u.model;
  return with_fresh_start(
      base, "U",
      [&](const ContextPtr& ctx, VarId) {
        std::vector<Poly> out;
        for (std::size_t a = 0; a < base.alphabet().size(); ++a) {
          out.push_back(delta_letter(base, a, u.first + u.second).lift(ctx));
        }
        return out;
      },
      output_of(base, u.first + u.second));
}

Wbpp shuffle(const Wbpp& m1, const Wbpp& m2) {
  auto u = disjoint_union(m1, m2);
  const Wbpp& base = u.model;
  return with_fresh_start(
      base, "U",
      [&](const ContextPtr& ctx, VarId) {
        std::vector<Poly> out;
        for (std::size_t a = 0; a < base.alphabet().size(); ++a) {
          out.push_back(delta_letter(base, a, u.first * u.second).lift(ctx));
        }
        return out;
      },
      output_of(base, u.first) * output_of(base, u.second));
}

Wbpp derive(const Wbpp& m, std::size_t letter) {
  Config d = delta_letter(m, letter, m.start_config());
  return with_fresh_start(
      m, "U",
      [&](const ContextPtr& ctx, VarId) {
        std::vector<Poly> out;
        for (std::size_t b = 0; b < m.alphabet().size(); ++b) out.push_back(delta_letter(m, b, d).lift(ctx));
        return out;
      },
      output_of(m, d));
}

Wbpp shuffle_inverse(const Wbpp& m) {
  Rat f0 = m.output()[m.start()];
  if (f0 == 0) throw Error(ErrorKind::kPrecondition, "shuffle inverse of a series with zero constant term");
  return with_fresh_start(
      m, "U",
      [&](const ContextPtr& ctx, VarId u) {
        Poly uu = Poly::variable(ctx, u).pow(2);
        std::vector<Poly> out;
        for (std::size_t a = 0; a < m.alphabet().size(); ++a) {
          out.push_back(-(m.delta(a, m.start()).lift(ctx) * uu));
        }
        return out;
      },
      1 / f0);
}

Wbpp bpp_to_wbpp(const BppSpec& b) {
  if (b.rules.size() != b.nonterminals.size()) {
    throw Error(ErrorKind::kArity, "every nonterminal needs exactly one rule list");
  }
  auto ctx = Context::make(b.nonterminals);
  std::vector<std::string> alphabet = b.alphabet;
  auto letter_of = [&](const std::string& action) -> std::size_t {
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
      if (alphabet[i] == action) return i;
    }
    if (!b.alphabet.empty()) throw Error(ErrorKind::kUnknownLetter, "action '" + action + "' is not in the alphabet");
    alphabet.push_back(action);
    return alphabet.size() - 1;
  };
  for (const auto& rule : b.rules) {
    for (const auto& s : rule) letter_of(s.action);
  }
  // A nonterminal is productive when some summand consists of productive
  // nonterminals only.
  std::vector<bool> productive(b.nonterminals.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < b.rules.size(); ++i) {
      if (productive[i]) continue;
      for (const auto& s : b.rules[i]) {
        bool ok = std::all_of(s.merge.begin(), s.merge.end(),
                              [&](const std::string& n) { return productive[ctx->at(n)]; });
        if (ok) {
          productive[i] = changed = true;
          break;
        }
      }
    }
  }
  for (std::size_t i = 0; i < productive.size(); ++i) {
    if (!productive[i]) {
      throw Error(ErrorKind::kPrecondition, "nonterminal " + b.nonterminals[i] + " is not productive");
    }
  }
  std::vector<std::vector<Poly>> delta(alphabet.size(), std::vector<Poly>(ctx->size(), Poly(ctx)));
  for (std::size_t i = 0; i < b.rules.size(); ++i) {
    for (const auto& s : b.rules[i]) {
      Poly term = Poly::constant(ctx, 1);
      for (const auto& n : s.merge) term *= Poly::variable(ctx, n);
      delta[letter_of(s.action)][i] += term;
    }
  }
  return Wbpp(alphabet, ctx, ctx->at(b.start), std::move(delta), std::vector<Rat>(ctx->size(), Rat(0)));
}

CommutativityReport check_commutative_bounded(const Wbpp& m, std::size_t max_length) {
  std::map<std::vector<std::size_t>, std::pair<Word, Rat>> first;
  for (auto& [w, v] : coeffs_up_to(m, m.start_config(), max_length)) {
    std::vector<std::size_t> parikh(m.alphabet().size(), 0);
    for (std::size_t a : w) ++parikh[a];
    auto [it, inserted] = first.try_emplace(parikh, w, v);
    if (!inserted && it->second.second != v) return {false, it->second.first, w};
  }
  return {};
}

}  // namespace cdfwbpp
