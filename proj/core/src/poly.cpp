#include "cdfwbpp/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

// ---------------------------------------------------------------------------
// Context

Context::Context(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    auto [it, inserted] = index_.emplace(names_[i], static_cast<VarId>(i));
    if (!inserted) {
      throw Error(ErrorKind::kContextMismatch, "duplicate variable name '" + names_[i] + "'");
    }
  }
}

ContextPtr Context::make(std::vector<std::string> names) {
  return std::make_shared<const Context>(std::move(names));
}

std::optional<VarId> Context::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId Context::at(std::string_view name) const {
  auto v = find(name);
  if (!v) throw Error(ErrorKind::kParse, "unknown variable '" + std::string(name) + "'");
  return *v;
}

bool Context::is_prefix_of(const Context& other) const {
  if (names_.size() > other.names_.size()) return false;
  return std::equal(names_.begin(), names_.end(), other.names_.begin());
}

bool compatible(const ContextPtr& a, const ContextPtr& b) {
  return a == b || (a && b && a->names() == b->names());
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& taken) {
  auto used = [&](const std::string& s) {
    return std::find(taken.begin(), taken.end(), s) != taken.end();
  };
  if (!used(base)) return base;
  for (std::size_t i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!used(candidate)) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  for (const auto& [v, e] : factors) {
    if (e == 0) continue;
    if (!factors_.empty() && factors_.back().first == v) {
      factors_.back().second += e;
    } else {
      factors_.emplace_back(v, e);
    }
    degree_ += e;
  }
}

Monomial Monomial::var(VarId v, std::uint32_t exponent) {
  return Monomial({{v, exponent}});
}

std::uint32_t Monomial::exponent(VarId v) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), Factor{v, 0});
  return (it != factors_.end() && it->first == v) ? it->second : 0;
}

bool Monomial::divides(const Monomial& other) const {
  if (degree_ > other.degree_) return false;
  auto it = other.factors_.begin();
  for (const auto& [v, e] : factors_) {
    while (it != other.factors_.end() && it->first < v) ++it;
    if (it == other.factors_.end() || it->first != v || it->second < e) return false;
  }
  return true;
}

bool Monomial::coprime(const Monomial& other) const {
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() && b != other.factors_.end()) {
    if (a->first == b->first) return false;
    if (a->first < b->first) ++a; else ++b;
  }
  return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() || j != b.factors_.end()) {
    if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
      out.factors_.push_back(*i++);
    } else if (i == a.factors_.end() || j->first < i->first) {
      out.factors_.push_back(*j++);
    } else {
      out.factors_.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  out.degree_ = a.degree_ + b.degree_;
  return out;
}

Monomial operator/(const Monomial& a, const Monomial& b) {
  Monomial out;
  auto j = b.factors_.begin();
  for (const auto& [v, e] : a.factors_) {
    std::uint32_t sub = 0;
    if (j != b.factors_.end() && j->first == v) sub = (j++)->second;
    if (sub > e) throw Error(ErrorKind::kInternal, "monomial division is not exact");
    if (e > sub) out.factors_.emplace_back(v, e - sub);
  }
  if (j != b.factors_.end()) throw Error(ErrorKind::kInternal, "monomial division is not exact");
  out.degree_ = a.degree_ - b.degree_;
  return out;
}

Monomial Monomial::lcm(const Monomial& a, const Monomial& b) {
  Monomial out;
  auto i = a.factors_.begin();
  auto j = b.factors_.begin();
  while (i != a.factors_.end() || j != b.factors_.end()) {
    if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
      out.factors_.push_back(*i++);
    } else if (i == a.factors_.end() || j->first < i->first) {
      out.factors_.push_back(*j++);
    } else {
      out.factors_.emplace_back(i->first, std::max(i->second, j->second));
      ++i;
      ++j;
    }
  }
  for (const auto& f : out.factors_) out.degree_ += f.second;
  return out;
}

std::size_t Monomial::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& [v, e] : factors_) {
    h ^= (static_cast<std::size_t>(v) * 0x100000001b3ULL + e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

int grlex_compare(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
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

// ---------------------------------------------------------------------------
// Poly

namespace {

bool grlex_greater(const Term& a, const Term& b) { return grlex_compare(a.mono, b.mono) > 0; }

// Sorts, merges equal monomials and drops zero coefficients.
std::vector<Term> canonical(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), grlex_greater);
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().mono == t.mono) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && out.back().coeff == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coeff == 0) out.pop_back();
  return out;
}

std::vector<Term> from_accumulator(std::unordered_map<Monomial, Rat, MonomialHash>& acc) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (c != 0) out.push_back(Term{m, std::move(c)});
  }
  std::sort(out.begin(), out.end(), grlex_greater);
  return out;
}

}  // namespace

Poly::Poly(ContextPtr ctx) : ctx_(std::move(ctx)) {}

Poly Poly::constant(ContextPtr ctx, const Rat& c) {
  Poly p(std::move(ctx));
  if (c != 0) p.terms_.push_back(Term{Monomial(), c});
  return p;
}

Poly Poly::variable(ContextPtr ctx, VarId v) {
  if (v >= ctx->size()) throw Error(ErrorKind::kArity, "variable id out of range");
  Poly p(std::move(ctx));
  p.terms_.push_back(Term{Monomial::var(v), Rat(1)});
  return p;
}

Poly Poly::variable(ContextPtr ctx, std::string_view name) {
  VarId v = ctx->at(name);
  return variable(std::move(ctx), v);
}

Poly Poly::monomial(ContextPtr ctx, Monomial m, const Rat& c) {
  Poly p(std::move(ctx));
  if (c != 0) p.terms_.push_back(Term{std::move(m), c});
  return p;
}

Poly Poly::from_terms(ContextPtr ctx, std::vector<Term> terms) {
  Poly p(std::move(ctx));
  p.terms_ = canonical(std::move(terms));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one());
}

Rat Poly::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coeff;
  return Rat(0);
}

Rat Poly::coeff(const Monomial& m) const {
  for (const auto& t : terms_) {
    if (t.mono == m) return t.coeff;
  }
  return Rat(0);
}

std::uint32_t Poly::degree() const { return terms_.empty() ? 0 : terms_.front().mono.degree(); }

Rat Poly::height() const {
  Rat h(0);
  for (const auto& t : terms_) {
    Rat a = abs(t.coeff);
    if (a > h) h = a;
  }
  return h;
}

std::optional<VarId> Poly::max_var() const {
  std::optional<VarId> out;
  for (const auto& t : terms_) {
    if (!t.mono.factors().empty()) {
      VarId v = t.mono.factors().back().first;
      if (!out || v > *out) out = v;
    }
  }
  return out;
}

bool Poly::mentions(VarId v) const {
  for (const auto& t : terms_) {
    if (t.mono.exponent(v) > 0) return true;
  }
  return false;
}

void Poly::require_compatible(const Poly& q, const char* op) const {
  if (!compatible(ctx_, q.ctx_)) {
    throw Error(ErrorKind::kContextMismatch,
                std::string("polynomial ") + op + " across different variable contexts");
  }
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Poly& Poly::operator+=(const Poly& q) {
  require_compatible(q, "addition");
  std::vector<Term> out;
  out.reserve(terms_.size() + q.terms_.size());
  auto i = terms_.begin();
  auto j = q.terms_.begin();
  while (i != terms_.end() || j != q.terms_.end()) {
    int cmp = 0;
    if (i == terms_.end()) cmp = -1;
    else if (j == q.terms_.end()) cmp = 1;
    else cmp = grlex_compare(i->mono, j->mono);
    if (cmp > 0) {
      out.push_back(std::move(*i++));
    } else if (cmp < 0) {
      out.push_back(*j++);
    } else {
      Rat c = i->coeff + j->coeff;
      if (c != 0) out.push_back(Term{std::move(i->mono), std::move(c)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

Poly& Poly::operator-=(const Poly& q) { return *this += -q; }

Poly operator*(const Poly& p, const Poly& q) {
  p.require_compatible(q, "multiplication");
  Poly out(p.ctx_);
  if (p.is_zero() || q.is_zero()) return out;
  if (q.is_constant()) return p * q.constant_term();
  if (p.is_constant()) return q * p.constant_term();
  std::unordered_map<Monomial, Rat, MonomialHash> acc;
  acc.reserve(p.terms_.size() * q.terms_.size());
  for (const auto& a : p.terms_) {
    for (const auto& b : q.terms_) {
      acc[a.mono * b.mono] += a.coeff * b.coeff;
    }
  }
  out.terms_ = from_accumulator(acc);
  return out;
}

Poly& Poly::operator*=(const Poly& q) { return *this = *this * q; }

Poly& Poly::operator*=(const Rat& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& t : terms_) t.coeff *= c;
  }
  return *this;
}

Poly Poly::pow(unsigned e) const {
  Poly result = constant(ctx_, Rat(1));
  Poly base = *this;
  while (e > 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return result;
}

Poly Poly::mul_term(const Monomial& m, const Rat& c) const {
  Poly out(ctx_);
  if (c == 0) return out;
  out.terms_.reserve(terms_.size());
  // Multiplying by a monomial preserves graded-lex order.
  for (const auto& t : terms_) out.terms_.push_back(Term{t.mono * m, t.coeff * c});
  return out;
}

Rat Poly::eval(std::span<const Rat> point) const {
  if (point.size() != ctx_->size()) {
    throw Error(ErrorKind::kArity, "evaluation point has " + std::to_string(point.size()) +
                                       " coordinates, expected " + std::to_string(ctx_->size()));
  }
  Rat total(0);
  Rat power;
  for (const auto& t : terms_) {
    Rat value = t.coeff;
    for (const auto& [v, e] : t.mono.factors()) {
      if (point[v] == 0) {
        value = 0;
        break;
      }
      mpz_pow_ui(power.get_num_mpz_t(), point[v].get_num_mpz_t(), e);
      mpz_pow_ui(power.get_den_mpz_t(), point[v].get_den_mpz_t(), e);
      power.canonicalize();
      value *= power;
    }
    total += value;
  }
  return total;
}

Poly Poly::substitute(const std::vector<std::optional<Poly>>& images,
                      const ContextPtr& target) const {
  Poly out(target);
  // Cache of powers per variable: powers[v][e-1] = image(v)^e.
  std::vector<std::vector<Poly>> powers(ctx_->size());
  for (const auto& t : terms_) {
    Poly term = constant(target, t.coeff);
    for (const auto& [v, e] : t.mono.factors()) {
      if (v >= images.size() || !images[v]) {
        throw Error(ErrorKind::kMissingImage,
                    "no substitution image for variable '" + ctx_->name(v) + "'");
      }
      if (!compatible(images[v]->context(), target)) {
        throw Error(ErrorKind::kContextMismatch, "substitution image in a foreign context");
      }
      auto& cache = powers[v];
      while (cache.size() < e) {
        cache.push_back(cache.empty() ? *images[v] : cache.back() * *images[v]);
      }
      term *= cache[e - 1];
      if (term.is_zero()) break;
    }
    out += term;
  }
  return out;
}

Poly Poly::rename(const ContextPtr& target, std::span<const VarId> map) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    std::vector<Monomial::Factor> f;
    f.reserve(t.mono.factors().size());
    for (const auto& [v, e] : t.mono.factors()) {
      if (v >= map.size() || map[v] >= target->size()) {
        throw Error(ErrorKind::kArity, "variable renaming out of range");
      }
      f.emplace_back(map[v], e);
    }
    out.push_back(Term{Monomial(std::move(f)), t.coeff});
  }
  return from_terms(target, std::move(out));
}

Poly Poly::lift(const ContextPtr& bigger) const {
  if (ctx_ == bigger) return *this;
  if (!ctx_->is_prefix_of(*bigger)) {
    throw Error(ErrorKind::kContextMismatch, "lift target does not extend the context");
  }
  Poly out = *this;
  out.ctx_ = bigger;
  return out;
}

Poly Poly::partial(VarId v) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    std::uint32_t e = t.mono.exponent(v);
    if (e == 0) continue;
    out.push_back(Term{t.mono / Monomial::var(v), t.coeff * e});
  }
  return from_terms(ctx_, std::move(out));
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    Rat c = t.coeff;
    bool negative = c < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    bool unit = c == 1;
    if (!unit || t.mono.is_one()) {
      os << c.get_str();
      if (!t.mono.is_one()) os << '*';
    }
    bool first_factor = true;
    for (const auto& [v, e] : t.mono.factors()) {
      if (!first_factor) os << '*';
      first_factor = false;
      os << ctx_->name(v);
      if (e > 1) os << '^' << e;
    }
  }
  return os.str();
}

bool operator==(const Poly& a, const Poly& b) {
  if (!compatible(a.ctx_, b.ctx_) || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].mono == b.terms_[i].mono) || a.terms_[i].coeff != b.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

Poly add(const Poly& p, const Poly& q) { return p + q; }
Poly mul(const Poly& p, const Poly& q) { return p * q; }
Rat eval(const Poly& p, std::span<const Rat> point) { return p.eval(point); }
Poly substitute(const Poly& p, const std::vector<std::optional<Poly>>& images,
                const ContextPtr& target) {
  return p.substitute(images, target);
}

// ---------------------------------------------------------------------------
// Derivation

Derivation::Derivation(ContextPtr ctx, std::vector<Poly> images)
    : ctx_(std::move(ctx)), images_(std::move(images)) {
  if (images_.size() != ctx_->size()) {
    throw Error(ErrorKind::kArity, "derivation needs one image per variable");
  }
  for (const auto& p : images_) {
    if (!compatible(p.context(), ctx_)) {
      throw Error(ErrorKind::kContextMismatch, "derivation image in a foreign context");
    }
  }
}

std::uint32_t Derivation::degree() const {
  std::uint32_t d = 0;
  for (const auto& p : images_) d = std::max(d, p.degree());
  return d;
}

Poly Derivation::apply(const Poly& p) const {
  if (!compatible(p.context(), ctx_)) {
    throw Error(ErrorKind::kContextMismatch, "derivation applied in a foreign context");
  }
  std::unordered_map<Monomial, Rat, MonomialHash> acc;
  for (const auto& t : p.terms()) {
    for (const auto& [v, e] : t.mono.factors()) {
      const Poly& img = images_[v];
      if (img.is_zero()) continue;
      Monomial rest = t.mono / Monomial::var(v);
      Rat scale = t.coeff * e;
      for (const auto& it : img.terms()) acc[rest * it.mono] += scale * it.coeff;
    }
  }
  return Poly::from_terms(ctx_, from_accumulator(acc));
}

Poly apply_derivation(const Derivation& d, const Poly& p) { return d.apply(p); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, const ContextPtr& ctx) : text_(text), ctx_(ctx) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::kParse, "polynomial '" + std::string(text_) + "': " + msg +
                                       " at column " + std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly acc = term();
    for (;;) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  Poly term() {
    Poly acc = unary();
    while (accept('*')) acc *= unary();
    skip_ws();
    if (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                text_[pos_] == '(' || text_[pos_] == '_')) {
      fail("implicit multiplication is not allowed");
    }
    return acc;
  }

  Poly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = atom();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a nonnegative integer");
      unsigned long e = std::stoul(std::string(text_.substr(start, pos_ - start)));
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Poly atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Poly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string lit(text_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        skip_ws();
        std::size_t dstart = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (dstart == pos_) fail("'/' is only allowed inside rational literals");
        lit += "/" + std::string(text_.substr(dstart, pos_ - dstart));
      }
      return Poly::constant(ctx_, parse_rat(lit));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_')) {
        ++pos_;
      }
      std::string_view name = text_.substr(start, pos_ - start);
      auto v = ctx_->find(name);
      if (!v) fail("unknown variable '" + std::string(name) + "'");
      return Poly::variable(ctx_, *v);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const ContextPtr& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, const ContextPtr& ctx) { return PolyParser(text, ctx).parse(); }

}  // namespace cdfwbpp
