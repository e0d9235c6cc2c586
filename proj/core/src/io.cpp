#include "cdfwbpp/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> lines_of(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty() || number == 0) {
    ++number;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.push_back({number, line});
    if (text.empty()) break;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + msg);
}

// Splits "head = tail" at the first '=' that is not part of '=='.
std::pair<std::string_view, std::string_view> split_assign(const Line& l) {
  for (std::size_t i = 0; i < l.text.size(); ++i) {
    if (l.text[i] != '=') continue;
    if (i + 1 < l.text.size() && l.text[i + 1] == '=') {
      ++i;
      continue;
    }
    return {trim(l.text.substr(0, i)), trim(l.text.substr(i + 1))};
  }
  fail(l.number, "expected '='");
}

// Rewrites parse errors from a sub-parser with the line number.
template <typename F>
auto at_line(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse || e.kind() == ErrorKind::kUnknownLetter) fail(line, e.what());
    throw;
  }
}

Rat parse_constant(std::string_view text, std::size_t line) {
  return at_line(line, [&] {
    Poly p = parse_poly(text, Context::make({}));
    return p.constant_term();
  });
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += sep;
    out += v[i];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

WbppFile parse_wbpp(std::string_view text) {
  std::vector<std::string> alphabet;
  std::vector<std::string> nonterminals;
  std::optional<std::string> start;
  std::size_t start_line = 0;
  std::vector<Line> outputs;
  std::vector<Line> deltas;
  for (const auto& l : lines_of(text)) {
    auto w = words(l.text);
    if (w[0] == "alphabet") {
      alphabet.insert(alphabet.end(), w.begin() + 1, w.end());
    } else if (w[0] == "nonterminals") {
      nonterminals.insert(nonterminals.end(), w.begin() + 1, w.end());
    } else if (w[0] == "start") {
      if (w.size() != 2) fail(l.number, "start takes one nonterminal");
      start = w[1];
      start_line = l.number;
    } else if (w[0] == "output") {
      outputs.push_back(l);
    } else if (w[0] == "delta") {
      deltas.push_back(l);
    } else {
      fail(l.number, "unknown directive '" + w[0] + "'");
    }
  }
  if (nonterminals.empty()) throw Error(ErrorKind::kParse, "no nonterminals declared");
  for (const auto& n : nonterminals) {
    if (!is_identifier(n)) throw Error(ErrorKind::kParse, "bad nonterminal name '" + n + "'");
  }
  auto ctx = at_line(0, [&] { return Context::make(nonterminals); });
  if (!start) start = nonterminals[0];
  VarId s = at_line(start_line, [&] { return ctx->at(*start); });
  std::vector<std::optional<Rat>> out(ctx->size());
  std::vector<std::vector<std::optional<Poly>>> delta(alphabet.size(), std::vector<std::optional<Poly>>(ctx->size()));
  auto letter_of = [&](const std::string& a, std::size_t line) {
    auto it = std::find(alphabet.begin(), alphabet.end(), a);
    if (it == alphabet.end()) fail(line, "unknown letter '" + a + "'");
    return static_cast<std::size_t>(it - alphabet.begin());
  };
  for (const auto& l : outputs) {
    auto [head, tail] = split_assign(l);
    auto w = words(head);
    if (w.size() != 2) fail(l.number, "expected 'output X = value'");
    VarId x = at_line(l.number, [&] { return ctx->at(w[1]); });
    if (out[x]) fail(l.number, "duplicate output for " + w[1]);
    out[x] = parse_constant(tail, l.number);
  }
  for (const auto& l : deltas) {
    auto [head, tail] = split_assign(l);
    auto w = words(head);
    if (w.size() != 3) fail(l.number, "expected 'delta a X = polynomial'");
    std::size_t a = letter_of(w[1], l.number);
    VarId x = at_line(l.number, [&] { return ctx->at(w[2]); });
    if (delta[a][x]) fail(l.number, "duplicate transition for " + w[1] + " " + w[2]);
    delta[a][x] = at_line(l.number, [&] { return parse_poly(tail, ctx); });
  }
  std::vector<std::string> warnings;
  std::vector<Rat> output;
  std::size_t missing_out = 0;
  for (auto& o : out) {
    if (!o) ++missing_out;
    output.push_back(o.value_or(Rat(0)));
  }
  if (missing_out > 0) warnings.push_back(std::to_string(missing_out) + " output value(s) default to 0");
  std::vector<std::vector<Poly>> table(alphabet.size());
  std::size_t missing_delta = 0;
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    for (VarId x = 0; x < ctx->size(); ++x) {
      if (!delta[a][x]) ++missing_delta;
      table[a].push_back(delta[a][x].value_or(Poly(ctx)));
    }
  }
  if (missing_delta > 0) warnings.push_back(std::to_string(missing_delta) + " transition(s) default to 0");
  return {Wbpp(alphabet, ctx, s, std::move(table), std::move(output)), std::move(warnings)};
}

std::string print_wbpp(const Wbpp& m) {
  std::ostringstream os;
  os << "alphabet " << join(m.alphabet()) << "\n";
  os << "nonterminals " << join(m.context()->names()) << "\n";
  os << "start " << m.context()->name(m.start()) << "\n";
  for (VarId x = 0; x < m.num_nonterminals(); ++x) {
    os << "output " << m.context()->name(x) << " = " << to_string(m.output()[x]) << "\n";
  }
  for (std::size_t a = 0; a < m.alphabet().size(); ++a) {
    for (VarId x = 0; x < m.num_nonterminals(); ++x) {
      os << "delta " << m.alphabet()[a] << " " << m.context()->name(x) << " = " << m.delta(a, x).to_string() << "\n";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

std::vector<BppSummand> parse_bpp_rhs(std::string_view rhs, std::size_t line) {
  std::vector<BppSummand> out;
  std::size_t depth = 0;
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (rhs[i] == '(') ++depth;
    if (rhs[i] == ')') {
      if (depth == 0) fail(line, "unbalanced ')'");
      --depth;
    }
    if (rhs[i] == '+' && depth == 0) {
      parts.push_back(trim(rhs.substr(begin, i - begin)));
      begin = i + 1;
    }
  }
  if (depth != 0) fail(line, "unbalanced '('");
  parts.push_back(trim(rhs.substr(begin)));
  for (auto part : parts) {
    auto dot = part.find('.');
    if (dot == std::string_view::npos) fail(line, "summand '" + std::string(part) + "' is not action-prefixed");
    BppSummand s;
    s.action = std::string(trim(part.substr(0, dot)));
    if (!is_identifier(s.action)) fail(line, "bad action '" + s.action + "'");
    std::string_view body = trim(part.substr(dot + 1));
    if (!body.empty() && body.front() == '(') {
      if (body.back() != ')') fail(line, "not in standard form: '" + std::string(part) + "'");
      body = trim(body.substr(1, body.size() - 2));
    }
    std::size_t pos = 0;
    while (true) {
      auto bar = body.find('|', pos);
      std::string_view item = trim(body.substr(pos, bar == std::string_view::npos ? bar : bar - pos));
      if (!is_identifier(item)) {
        fail(line, "not in standard form: '" + std::string(part) + "' (expected a merge of nonterminals or end)");
      }
      if (item != "end") s.merge.emplace_back(item);
      if (bar == std::string_view::npos) break;
      pos = bar + 1;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

BppSpec parse_bpp(std::string_view text) {
  BppSpec b;
  std::map<std::string, std::size_t> index;
  auto intern = [&](const std::string& n) {
    auto [it, inserted] = index.try_emplace(n, b.nonterminals.size());
    if (inserted) {
      b.nonterminals.push_back(n);
      b.rules.emplace_back();
    }
    return it->second;
  };
  for (const auto& l : lines_of(text)) {
    auto w = words(l.text);
    if (w[0] == "alphabet") {
      b.alphabet.insert(b.alphabet.end(), w.begin() + 1, w.end());
    } else if (w[0] == "nonterminals") {
      for (std::size_t i = 1; i < w.size(); ++i) intern(w[i]);
    } else if (w[0] == "start") {
      if (w.size() != 2) fail(l.number, "start takes one nonterminal");
      b.start = w[1];
    } else if (w[0] == "rule") {
      auto [head, rhs] = split_assign(l);
      auto hw = words(head);
      if (hw.size() != 2 || !is_identifier(hw[1])) fail(l.number, "expected 'rule X = ...'");
      std::size_t x = intern(hw[1]);
      auto summands = parse_bpp_rhs(rhs, l.number);
      for (auto& s : summands) {
        for (const auto& n : s.merge) intern(n);
      }
      auto& rule = b.rules[x];
      rule.insert(rule.end(), summands.begin(), summands.end());
    } else {
      fail(l.number, "unknown directive '" + w[0] + "'");
    }
  }
  if (b.nonterminals.empty()) throw Error(ErrorKind::kParse, "no rules");
  if (b.start.empty()) b.start = b.nonterminals[0];
  if (!index.count(b.start)) throw Error(ErrorKind::kParse, "unknown start nonterminal " + b.start);
  return b;
}

std::string print_bpp(const BppSpec& b) {
  std::ostringstream os;
  if (!b.alphabet.empty()) os << "alphabet " << join(b.alphabet) << "\n";
  os << "nonterminals " << join(b.nonterminals) << "\n";
  os << "start " << b.start << "\n";
  for (std::size_t i = 0; i < b.nonterminals.size(); ++i) {
    if (b.rules[i].empty()) continue;
    os << "rule " << b.nonterminals[i] << " =";
    for (std::size_t k = 0; k < b.rules[i].size(); ++k) {
      const auto& s = b.rules[i][k];
      os << (k == 0 ? " " : " + ") << s.action << ".";
      if (s.merge.empty()) {
        os << "end";
      } else if (s.merge.size() == 1) {
        os << s.merge[0];
      } else {
        os << "(" << join(s.merge, "|") << ")";
      }
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum class Type { kIdent, kInt, kSym, kEnd };
  Type type;
  std::string text;
  std::size_t line;
};

std::vector<Token> tokenize(std::string_view text) {
  static const char* two_char[] = {"<-", "&&", "||", "==", "!=", ">=", "<="};
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({Token::Type::kIdent, std::string(text.substr(i, j - i)), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Token::Type::kInt, std::string(text.substr(i, j - i)), line});
      i = j;
    } else {
      std::string sym(1, c);
      for (const char* t : two_char) {
        if (text.compare(i, 2, t) == 0) sym = t;
      }
      if (std::string("+*(){};,=<>!%").find(c) == std::string::npos && sym.size() == 1) {
        throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": unexpected character '" + sym + "'");
      }
      out.push_back({Token::Type::kSym, sym, line});
      i += sym.size();
    }
  }
  out.push_back({Token::Type::kEnd, "", line});
  return out;
}

class TokenParser {
 public:
  explicit TokenParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_sym(const char* s) const { return peek().type == Token::Type::kSym && peek().text == s; }
  bool at_ident(const char* s) const { return peek().type == Token::Type::kIdent && peek().text == s; }
  bool at_end() const { return peek().type == Token::Type::kEnd; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void error(const std::string& msg) const {
    throw Error(ErrorKind::kParse, "line " + std::to_string(peek().line) + ": " + msg +
                                       (at_end() ? " at end of input" : " near '" + peek().text + "'"));
  }
  void expect_sym(const char* s) {
    if (!at_sym(s)) error(std::string("expected '") + s + "'");
    next();
  }
  std::string expect_ident() {
    if (peek().type != Token::Type::kIdent) error("expected a name");
    return next().text;
  }
  std::uint32_t expect_uint() {
    if (peek().type != Token::Type::kInt) error("expected a number");
    return static_cast<std::uint32_t>(std::stoul(next().text));
  }
  std::size_t pos() const { return pos_; }

  // Constraint grammar: or := and ('||' and)*, and := unary ('&&' unary)*.
  ConstraintPtr constraint(const std::vector<std::string>& axes) {
    std::vector<ConstraintPtr> cs{conj(axes)};
    while (at_sym("||")) {
      next();
      cs.push_back(conj(axes));
    }
    return cs.size() == 1 ? cs[0] : ConstraintExpr::disj(std::move(cs));
  }

 protected:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

 private:
  ConstraintPtr conj(const std::vector<std::string>& axes) {
    std::vector<ConstraintPtr> cs{unary(axes)};
    while (at_sym("&&")) {
      next();
      cs.push_back(unary(axes));
    }
    return cs.size() == 1 ? cs[0] : ConstraintExpr::conj(std::move(cs));
  }

  ConstraintPtr unary(const std::vector<std::string>& axes) {
    if (at_sym("!")) {
      next();
      return ConstraintExpr::negate(unary(axes));
    }
    if (at_sym("(")) {
      next();
      auto c = constraint(axes);
      expect_sym(")");
      return c;
    }
    if (at_ident("true") || at_ident("false")) return ConstraintExpr::truth(next().text == "true");
    std::string var = expect_ident();
    std::size_t axis = resolve_axis(var, axes);
    if (at_sym("%")) {
      next();
      std::uint32_t m = expect_uint();
      expect_sym("==");
      return ConstraintExpr::mod(axis, expect_uint(), m);
    }
    if (peek().type != Token::Type::kSym) error("expected a comparison");
    std::string op = next().text;
    std::uint32_t n = expect_uint();
    if (op == "==") return ConstraintExpr::eq(axis, n);
    if (op == "!=") return ConstraintExpr::negate(ConstraintExpr::eq(axis, n));
    if (op == ">=") return ConstraintExpr::at_least(axis, n);
    if (op == "<=") return ConstraintExpr::at_most(axis, n);
    if (op == ">") return ConstraintExpr::at_least(axis, n + 1);
    if (op == "<") return n == 0 ? ConstraintExpr::truth(false) : ConstraintExpr::at_most(axis, n - 1);
    error("unknown comparison '" + op + "'");
  }

  std::size_t resolve_axis(const std::string& var, const std::vector<std::string>& axes) const {
    for (std::size_t j = axes.size(); j-- > 0;) {
      if (axes[j] == var) return j;
    }
    if (var.size() > 1 && var[0] == 'z' &&
        std::all_of(var.begin() + 1, var.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      std::size_t j = std::stoul(var.substr(1));
      if (j >= 1 && j <= axes.size()) return j - 1;
    }
    error("unknown constraint variable '" + var + "'");
  }
};

}  // namespace

ConstraintPtr parse_constraint(std::string_view text, const std::vector<std::string>& axes) {
  TokenParser p(tokenize(text));
  auto c = p.constraint(axes);
  if (!p.at_end()) p.error("trailing input after constraint");
  return c;
}

// ---------------------------------------------------------------------------

CdfFile parse_cdf(std::string_view text) {
  std::vector<std::string> vars;
  std::vector<std::string> gens;
  std::vector<Line> inits;
  std::vector<Line> derivs;
  std::optional<Line> expr;
  for (const auto& l : lines_of(text)) {
    auto w = words(l.text);
    if (w[0] == "vars") {
      vars.insert(vars.end(), w.begin() + 1, w.end());
    } else if (w[0] == "gens") {
      gens.insert(gens.end(), w.begin() + 1, w.end());
    } else if (w[0] == "init") {
      inits.push_back(l);
    } else if (w[0].rfind("d/d", 0) == 0) {
      derivs.push_back(l);
    } else if (w[0] == "expr" || w[0].rfind("expr=", 0) == 0) {
      if (expr) fail(l.number, "duplicate expr");
      expr = l;
    } else {
      fail(l.number, "unknown directive '" + w[0] + "'");
    }
  }
  if (vars.empty()) throw Error(ErrorKind::kParse, "no vars declared");
  if (!expr) throw Error(ErrorKind::kParse, "no expr given");
  for (const auto& n : vars) {
    if (!is_identifier(n)) throw Error(ErrorKind::kParse, "bad variable name '" + n + "'");
  }
  for (const auto& n : gens) {
    if (!is_identifier(n)) throw Error(ErrorKind::kParse, "bad generator name '" + n + "'");
  }
  std::vector<std::string> all = gens;
  all.insert(all.end(), vars.begin(), vars.end());
  auto ctx = at_line(0, [&] { return Context::make(all); });
  std::size_t k = gens.size();
  std::size_t d = vars.size();
  std::vector<std::optional<Rat>> init(k);
  std::vector<std::vector<std::optional<Poly>>> kernel(k, std::vector<std::optional<Poly>>(d));
  auto gen_of = [&](const std::string& n, std::size_t line) {
    auto it = std::find(gens.begin(), gens.end(), n);
    if (it == gens.end()) fail(line, "unknown generator '" + n + "'");
    return static_cast<std::size_t>(it - gens.begin());
  };
  for (const auto& l : inits) {
    auto [head, tail] = split_assign(l);
    auto w = words(head);
    if (w.size() != 2) fail(l.number, "expected 'init g = value'");
    std::size_t g = gen_of(w[1], l.number);
    if (init[g]) fail(l.number, "duplicate init for " + w[1]);
    init[g] = parse_constant(tail, l.number);
  }
  for (const auto& l : derivs) {
    auto [head, tail] = split_assign(l);
    auto w = words(head);
    if (w.size() != 2) fail(l.number, "expected 'd/dx g = polynomial'");
    std::string var = w[0].substr(3);
    auto it = std::find(vars.begin(), vars.end(), var);
    if (it == vars.end()) fail(l.number, "unknown variable '" + var + "'");
    std::size_t j = static_cast<std::size_t>(it - vars.begin());
    std::size_t g = gen_of(w[1], l.number);
    if (kernel[g][j]) fail(l.number, "duplicate equation for d/d" + var + " " + w[1]);
    kernel[g][j] = at_line(l.number, [&] { return parse_poly(tail, ctx); });
  }
  CdfFile out{c_constant(vars, 0), {}, nullptr, std::nullopt};
  std::size_t missing_init = 0;
  std::size_t missing_kernel = 0;
  RawCdfSystem raw{vars, ctx, k, {}, {}};
  for (std::size_t g = 0; g < k; ++g) {
    if (!init[g]) ++missing_init;
    raw.init.push_back(init[g].value_or(Rat(0)));
    std::vector<Poly> row;
    for (std::size_t j = 0; j < d; ++j) {
      if (!kernel[g][j]) ++missing_kernel;
      row.push_back(kernel[g][j].value_or(Poly(ctx)));
    }
    raw.kernel.push_back(std::move(row));
  }
  if (missing_init > 0) out.warnings.push_back(std::to_string(missing_init) + " initial value(s) default to 0");
  if (missing_kernel > 0) out.warnings.push_back(std::to_string(missing_kernel) + " derivative(s) default to 0");

  auto [head, tail] = split_assign(*expr);
  if (head != "expr") fail(expr->number, "expected 'expr = ...'");
  std::string_view body = tail;
  std::string_view constraint_text;
  bool restricted = body.rfind("restrict", 0) == 0 && trim(body.substr(8)).rfind("(", 0) == 0;
  if (restricted) {
    body = trim(trim(body.substr(8)).substr(1));
    if (body.empty() || body.back() != ')') fail(expr->number, "restrict(...) must close with ')'");
    body.remove_suffix(1);
    auto semi = body.rfind(';');
    if (semi == std::string_view::npos) fail(expr->number, "restrict needs '; constraint'");
    constraint_text = trim(body.substr(semi + 1));
    body = trim(body.substr(0, semi));
  }
  Poly p = at_line(expr->number, [&] { return parse_poly(body, ctx); });
  CdfVector auto_sys = at_line(expr->number, [&] { return autonomize(raw, {p}); });
  out.series = auto_sys.at(0);
  if (restricted) {
    out.constraint = at_line(expr->number, [&] { return parse_constraint(constraint_text, vars); });
    out.recognizer = MonoidRecognizer::compile(*out.constraint, d);
    out.series = restrict_regular(out.series, *out.recognizer);
  }
  return out;
}

std::string print_cdf(const CdfSeries& s) {
  const CdfSystem& sys = s.system;
  std::ostringstream os;
  os << "vars " << join(sys.axes()) << "\n";
  if (sys.order() > 0) os << "gens " << join(sys.context()->names()) << "\n";
  for (VarId g = 0; g < sys.order(); ++g) {
    os << "init " << sys.context()->name(g) << " = " << to_string(sys.init()[g]) << "\n";
  }
  for (VarId g = 0; g < sys.order(); ++g) {
    for (std::size_t j = 0; j < sys.dim(); ++j) {
      os << "d/d" << sys.axes()[j] << " " << sys.context()->name(g) << " = " << sys.kernel(g, j).to_string() << "\n";
    }
  }
  os << "expr = " << s.expr.to_string() << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

class SpecParser : public TokenParser {
 public:
  using TokenParser::TokenParser;

  SpecFile file() {
    SpecFile f;
    if (at_ident("sorts")) {
      next();
      f.sorts = expect_uint();
    }
    file_ = &f;
    while (!at_end()) {
      if (!at_ident("species")) error("expected 'species'");
      next();
      std::string name = expect_ident();
      for (const auto& [n, e] : f.definitions) {
        if (n == name) error("species " + name + " defined twice");
      }
      expect_sym("{");
      std::vector<std::string> scope = sort_names(f.sorts);
      auto e = sum(scope);
      expect_sym("}");
      f.definitions.emplace_back(name, e);
    }
    if (f.definitions.empty()) error("no species defined");
    return f;
  }

 private:
  SpeciesPtr sum(const std::vector<std::string>& scope) {
    std::vector<SpeciesPtr> terms{product(scope)};
    while (at_sym("+")) {
      next();
      terms.push_back(product(scope));
    }
    return terms.size() == 1 ? terms[0] : SpeciesExpr::sum(std::move(terms));
  }

  SpeciesPtr product(const std::vector<std::string>& scope) {
    std::vector<SpeciesPtr> factors{factor(scope)};
    while (at_sym("*")) {
      next();
      factors.push_back(factor(scope));
    }
    return factors.size() == 1 ? factors[0] : SpeciesExpr::prod(std::move(factors));
  }

  SpeciesPtr unary_call(const std::vector<std::string>& scope, SpeciesPtr (*make)(SpeciesPtr)) {
    expect_sym("(");
    auto a = sum(scope);
    expect_sym(")");
    return make(std::move(a));
  }

  // Names bound by "Y <- ..." after the ';' of compose(F; ...), scanned ahead
  // so that F can refer to them.
  std::vector<std::string> scan_compose_binders() const {
    std::size_t i = pos_;
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.type == Token::Type::kEnd) return {};
      if (t.type != Token::Type::kSym) continue;
      if (t.text == "(" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "}") --depth;
      if (depth == 0 && t.text == ";") break;
    }
    return scan_binders(i + 1, "<-");
  }

  // Identifiers followed by `arrow` at nesting depth 0, from token i until the
  // enclosing bracket closes.
  std::vector<std::string> scan_binders(std::size_t i, const char* arrow) const {
    std::vector<std::string> out;
    int depth = 0;
    for (; i + 1 < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.type == Token::Type::kSym) {
        if (t.text == "(" || t.text == "{") ++depth;
        if (t.text == ")" || t.text == "}") {
          if (depth == 0) break;
          --depth;
        }
      }
      if (depth == 0 && t.type == Token::Type::kIdent && toks_[i + 1].type == Token::Type::kSym &&
          toks_[i + 1].text == arrow) {
        out.push_back(t.text);
      }
    }
    return out;
  }

  SpeciesPtr factor(const std::vector<std::string>& scope) {
    if (peek().type == Token::Type::kInt) return SpeciesExpr::constant(Int(next().text));
    if (at_sym("(")) {
      next();
      auto e = sum(scope);
      expect_sym(")");
      return e;
    }
    std::string id = expect_ident();
    if (id == "SET") return unary_call(scope, &SpeciesExpr::set);
    if (id == "CYC") return unary_call(scope, &SpeciesExpr::cyc);
    if (id == "SEQ") return unary_call(scope, &SpeciesExpr::seq);
    if (id == "restrict") {
      expect_sym("(");
      auto a = sum(scope);
      expect_sym(";");
      auto phi = constraint(scope);
      expect_sym(")");
      return SpeciesExpr::restrict(std::move(a), std::move(phi));
    }
    if (id == "compose") {
      expect_sym("(");
      auto binders = scan_compose_binders();
      if (binders.empty()) error("compose needs at least one 'Y <- G' substitution");
      std::vector<std::string> inner = scope;
      inner.insert(inner.end(), binders.begin(), binders.end());
      auto outer = sum(inner);
      expect_sym(";");
      std::vector<std::string> names;
      std::vector<SpeciesPtr> subs;
      while (true) {
        names.push_back(expect_ident());
        expect_sym("<-");
        subs.push_back(sum(scope));
        if (!at_sym(",")) break;
        next();
      }
      expect_sym(")");
      return SpeciesExpr::compose(std::move(outer), std::move(names), std::move(subs));
    }
    if (id == "fix") {
      expect_sym("{");
      auto binders = scan_binders(pos_, "=");
      if (binders.empty()) error("fix needs at least one 'Y = body' binding");
      std::vector<std::string> inner = scope;
      inner.insert(inner.end(), binders.begin(), binders.end());
      std::vector<std::string> names;
      std::vector<SpeciesPtr> bodies;
      while (!at_sym("}")) {
        names.push_back(expect_ident());
        expect_sym("=");
        bodies.push_back(sum(inner));
        if (at_sym(";") || at_sym(",")) next();
      }
      expect_sym("}");
      if (!at_ident("in")) error("expected 'in'");
      next();
      std::string selected = expect_ident();
      if (std::find(names.begin(), names.end(), selected) == names.end()) {
        error("fix selects unknown binder " + selected);
      }
      return SpeciesExpr::fix(std::move(names), std::move(bodies), std::move(selected));
    }
    return name(id, scope);
  }

  SpeciesPtr name(const std::string& id, const std::vector<std::string>& scope) {
    std::size_t sorts = file_->sorts;
    for (std::size_t j = scope.size(); j-- > 0;) {
      if (scope[j] != id) continue;
      if (j < sorts) return SpeciesExpr::atom(j);
      return SpeciesExpr::ref(id);
    }
    if (id == "X" && sorts == 1) return SpeciesExpr::atom(0);
    for (const auto& [n, e] : file_->definitions) {
      if (n == id) return SpeciesExpr::named(n, e);
    }
    error("unknown name '" + id + "'");
  }

  SpecFile* file_ = nullptr;
};

std::string print_node(const SpeciesExpr& e, const std::vector<std::string>& scope, bool in_product) {
  using Kind = SpeciesExpr::Kind;
  auto sub = [&](const SpeciesPtr& c, bool prod = false) { return print_node(*c, scope, prod); };
  switch (e.kind) {
    case Kind::kConst:
      return e.value.get_str();
    case Kind::kAtom:
      return e.axis < scope.size() ? scope[e.axis] : "z" + std::to_string(e.axis + 1);
    case Kind::kRef:
    case Kind::kNamed:
      return e.name;
    case Kind::kSet:
      return "SET(" + sub(e.children[0]) + ")";
    case Kind::kCyc:
      return "CYC(" + sub(e.children[0]) + ")";
    case Kind::kSeq:
      return "SEQ(" + sub(e.children[0]) + ")";
    case Kind::kSum: {
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) out += (i ? " + " : "") + sub(e.children[i]);
      return in_product ? "(" + out + ")" : out;
    }
    case Kind::kProd: {
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) out += (i ? " * " : "") + sub(e.children[i], true);
      return out;
    }
    case Kind::kRestrict:
      return "restrict(" + sub(e.children[0]) + "; " + to_string(*e.constraint, scope) + ")";
    case Kind::kCompose: {
      std::vector<std::string> inner = scope;
      inner.insert(inner.end(), e.binders.begin(), e.binders.end());
      std::string out = "compose(" + print_node(*e.children[0], inner, false) + ";";
      for (std::size_t i = 0; i < e.binders.size(); ++i) {
        out += (i ? ", " : " ") + e.binders[i] + " <- " + sub(e.children[i + 1]);
      }
      return out + ")";
    }
    case Kind::kFix: {
      std::vector<std::string> inner = scope;
      inner.insert(inner.end(), e.binders.begin(), e.binders.end());
      std::string out = "fix {";
      for (std::size_t i = 0; i < e.binders.size(); ++i) {
        out += (i ? "; " : " ") + e.binders[i] + " = " + print_node(*e.children[i], inner, false);
      }
      return out + " } in " + e.name;
    }
  }
  return "?";
}

}  // namespace

const SpeciesPtr& SpecFile::main() const {
  if (definitions.empty()) throw Error(ErrorKind::kParse, "no species defined");
  return definitions.back().second;
}

SpecFile parse_spec(std::string_view text) {
  SpecParser p(tokenize(text));
  return p.file();
}

std::string print_species(const SpeciesExpr& e, const std::vector<std::string>& scope) {
  return print_node(e, scope, false);
}

std::string print_spec(const SpecFile& f) {
  std::ostringstream os;
  os << "sorts " << f.sorts << "\n";
  for (const auto& [name, e] : f.definitions) {
    os << "species " << name << " { " << print_species(*e, sort_names(f.sorts)) << " }\n";
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace cdfwbpp
