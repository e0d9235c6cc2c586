#include "cdfwbpp/series.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cdfwbpp/error.hpp"

namespace cdfwbpp {

std::uint32_t total_degree(std::span<const std::uint32_t> n) {
  return std::accumulate(n.begin(), n.end(), std::uint32_t{0});
}

Int exponent_factorial(std::span<const std::uint32_t> n) {
  Int out = 1;
  for (auto e : n) out *= factorial(e);
  return out;
}

Int multinomial_binomial(std::span<const std::uint32_t> n, std::span<const std::uint32_t> m) {
  Int out = 1;
  for (std::size_t j = 0; j < n.size(); ++j) out *= binomial(n[j], m[j]);
  return out;
}

namespace {

void exponents_rec(std::size_t axis, std::uint32_t left, Exponent& cur, std::vector<Exponent>& out) {
  if (axis + 1 == cur.size()) {
    cur[axis] = left;
    out.push_back(cur);
    return;
  }
  for (std::uint32_t e = left + 1; e-- > 0;) {
    cur[axis] = e;
    exponents_rec(axis + 1, left - e, cur, out);
  }
}

bool leq(const Exponent& a, const Exponent& b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] > b[j]) return false;
  }
  return true;
}

Exponent minus(const Exponent& a, const Exponent& b) {
  Exponent out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] - b[j];
  return out;
}

Exponent plus(const Exponent& a, const Exponent& b) {
  Exponent out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

void require_same_dim(const TruncSeries& f, const TruncSeries& g) {
  if (f.dim() != g.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "series of dimensions " + std::to_string(f.dim()) +
                                                   " and " + std::to_string(g.dim()));
  }
}

std::size_t first_nonzero_axis(const Exponent& m) {
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] > 0) return j;
  }
  return m.size();
}

}  // namespace

std::vector<Exponent> exponents_of_degree(std::size_t dim, std::uint32_t degree) {
  std::vector<Exponent> out;
  if (dim == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Exponent cur(dim, 0);
  exponents_rec(0, degree, cur, out);
  return out;
}

std::string exponent_to_string(std::span<const std::uint32_t> n) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] == 0) continue;
    if (!first) os << '*';
    first = false;
    os << 'x' << (j + 1);
    if (n[j] > 1) os << '^' << n[j];
  }
  if (first) os << '1';
  return os.str();
}

// ---------------------------------------------------------------------------

TruncSeries::TruncSeries(std::size_t dim, std::uint32_t order) : dim_(dim), order_(order) {}

TruncSeries TruncSeries::constant(std::size_t dim, std::uint32_t order, const Rat& c) {
  TruncSeries f(dim, order);
  f.set(Exponent(dim, 0), c);
  return f;
}

TruncSeries TruncSeries::variable(std::size_t dim, std::uint32_t order, std::size_t axis) {
  if (axis >= dim) throw Error(ErrorKind::kDimensionMismatch, "axis out of range");
  Exponent n(dim, 0);
  n[axis] = 1;
  return monomial(dim, order, n, Rat(1));
}

TruncSeries TruncSeries::monomial(std::size_t dim, std::uint32_t order, const Exponent& n,
                                  const Rat& c) {
  TruncSeries f(dim, order);
  f.set(n, c);
  return f;
}

TruncSeries TruncSeries::univariate(const std::vector<Rat>& values) {
  if (values.empty()) throw Error(ErrorKind::kPrecondition, "empty coefficient list");
  TruncSeries f(1, static_cast<std::uint32_t>(values.size() - 1));
  for (std::uint32_t n = 0; n < values.size(); ++n) f.set({n}, values[n]);
  return f;
}

Rat TruncSeries::get(const Exponent& n) const {
  auto it = entries_.find(n);
  return it == entries_.end() ? Rat(0) : it->second;
}

void TruncSeries::set(const Exponent& n, const Rat& value) {
  if (n.size() != dim_) throw Error(ErrorKind::kDimensionMismatch, "exponent has wrong dimension");
  if (total_degree(n) > order_) return;
  if (value == 0) {
    entries_.erase(n);
  } else {
    entries_[n] = value;
  }
}

Rat TruncSeries::constant_term() const { return get(Exponent(dim_, 0)); }

std::vector<Rat> TruncSeries::sequence() const {
  if (dim_ != 1) throw Error(ErrorKind::kDimensionMismatch, "sequence() needs a univariate series");
  std::vector<Rat> out(order_ + 1);
  for (const auto& [n, v] : entries_) out[n[0]] = v;
  return out;
}

TruncSeries TruncSeries::truncated(std::uint32_t order) const {
  TruncSeries out(dim_, std::min(order, order_));
  for (const auto& [n, v] : entries_) out.set(n, v);
  return out;
}

TruncSeries t_add(const TruncSeries& f, const TruncSeries& g) {
  require_same_dim(f, g);
  TruncSeries out = f.truncated(std::min(f.order(), g.order()));
  for (const auto& [n, v] : g.entries()) {
    if (total_degree(n) <= out.order()) out.set(n, out.get(n) + v);
  }
  return out;
}

TruncSeries t_sub(const TruncSeries& f, const TruncSeries& g) { return t_add(f, t_scale(-1, g)); }

TruncSeries t_scale(const Rat& c, const TruncSeries& f) {
  TruncSeries out(f.dim(), f.order());
  for (const auto& [n, v] : f.entries()) out.set(n, c * v);
  return out;
}

TruncSeries t_mul(const TruncSeries& f, const TruncSeries& g) {
  require_same_dim(f, g);
  std::uint32_t order = std::min(f.order(), g.order());
  std::map<Exponent, Rat> acc;
  for (const auto& [m, a] : f.entries()) {
    std::uint32_t dm = total_degree(m);
    for (const auto& [k, b] : g.entries()) {
      if (dm + total_degree(k) > order) continue;
      Exponent n = plus(m, k);
      acc[n] += Rat(multinomial_binomial(n, m)) * a * b;
    }
  }
  TruncSeries out(f.dim(), order);
  for (const auto& [n, v] : acc) out.set(n, v);
  return out;
}

TruncSeries t_pow(const TruncSeries& f, unsigned e) {
  TruncSeries out = TruncSeries::constant(f.dim(), f.order(), Rat(1));
  for (unsigned i = 0; i < e; ++i) out = t_mul(out, f);
  return out;
}

TruncSeries t_derive(const TruncSeries& f, std::size_t axis) {
  if (axis >= f.dim()) throw Error(ErrorKind::kDimensionMismatch, "derivation axis out of range");
  TruncSeries out(f.dim(), f.order() == 0 ? 0 : f.order() - 1);
  for (const auto& [n, v] : f.entries()) {
    if (n[axis] == 0) continue;
    Exponent m = n;
    --m[axis];
    out.set(m, v);
  }
  return out;
}

TruncSeries t_exp(const TruncSeries& f) {
  if (f.constant_term() != 0) {
    throw Error(ErrorKind::kPrecondition, "exp needs a series with zero constant term");
  }
  std::vector<TruncSeries> df;
  for (std::size_t j = 0; j < f.dim(); ++j) df.push_back(t_derive(f, j));
  TruncSeries g = TruncSeries::constant(f.dim(), f.order(), Rat(1));
  // g' = f' g along the first axis that is nonzero in the target exponent.
  for (std::uint32_t layer = 1; layer <= f.order(); ++layer) {
    for (const auto& m : exponents_of_degree(f.dim(), layer)) {
      std::size_t j = first_nonzero_axis(m);
      Exponent mm = m;
      --mm[j];
      Rat value(0);
      for (const auto& [k, v] : df[j].entries()) {
        if (!leq(k, mm)) continue;
        value += Rat(multinomial_binomial(mm, k)) * v * g.get(minus(mm, k));
      }
      g.set(m, value);
    }
  }
  return g;
}

TruncSeries t_inverse(const TruncSeries& f) {
  Rat f0 = f.constant_term();
  if (f0 == 0) throw Error(ErrorKind::kPrecondition, "inverse of a series with zero constant term");
  Rat inv0 = 1 / f0;
  TruncSeries g = TruncSeries::constant(f.dim(), f.order(), inv0);
  // f * g = 1, solved for the top entry of each layer.
  for (std::uint32_t layer = 1; layer <= f.order(); ++layer) {
    for (const auto& m : exponents_of_degree(f.dim(), layer)) {
      Rat acc(0);
      for (const auto& [k, v] : f.entries()) {
        if (total_degree(k) == 0 || !leq(k, m)) continue;
        acc += Rat(multinomial_binomial(m, k)) * v * g.get(minus(m, k));
      }
      g.set(m, -inv0 * acc);
    }
  }
  return g;
}

TruncSeries t_neg_log_one_minus(const TruncSeries& f) {
  if (f.constant_term() != 0) {
    throw Error(ErrorKind::kPrecondition, "-log(1 - f) needs a series with zero constant term");
  }
  TruncSeries one_minus = t_sub(TruncSeries::constant(f.dim(), f.order(), Rat(1)), f);
  TruncSeries r = t_inverse(one_minus);
  std::vector<TruncSeries> rhs;
  for (std::size_t j = 0; j < f.dim(); ++j) rhs.push_back(t_mul(t_derive(f, j), r));
  // h' = f' / (1 - f), h(0) = 0.
  TruncSeries h(f.dim(), f.order());
  for (std::uint32_t layer = 1; layer <= f.order(); ++layer) {
    for (const auto& m : exponents_of_degree(f.dim(), layer)) {
      std::size_t j = first_nonzero_axis(m);
      Exponent mm = m;
      --mm[j];
      h.set(m, rhs[j].get(mm));
    }
  }
  return h;
}

TruncSeries t_compose(const TruncSeries& f, const std::vector<TruncSeries>& g) {
  std::size_t k = g.size();
  if (f.dim() < k) throw Error(ErrorKind::kDimensionMismatch, "composition arity exceeds dimension");
  std::size_t d = f.dim() - k;
  std::uint32_t order = f.order();
  for (const auto& gi : g) {
    if (gi.dim() != d) throw Error(ErrorKind::kDimensionMismatch, "substituted series has wrong dimension");
    order = std::min(order, gi.order());
  }
  std::vector<bool> occurs(k, false);
  for (const auto& [n, v] : f.entries()) {
    for (std::size_t i = 0; i < k; ++i) occurs[i] = occurs[i] || n[d + i] > 0;
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (occurs[i] && g[i].constant_term() != 0) {
      throw Error(ErrorKind::kNotComposable,
                  "y" + std::to_string(i + 1) + " occurs but its image has a nonzero constant term");
    }
  }
  // powers[i][e] = g_i^e / e!
  std::vector<std::vector<TruncSeries>> powers(k);
  auto power = [&](std::size_t i, std::uint32_t e) -> const TruncSeries& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(TruncSeries::constant(d, order, Rat(1)));
    while (cache.size() <= e) {
      std::uint32_t next = static_cast<std::uint32_t>(cache.size());
      cache.push_back(t_scale(Rat(1, next), t_mul(cache.back(), g[i].truncated(order))));
    }
    return cache[e];
  };
  TruncSeries out(d, order);
  for (const auto& [n, v] : f.entries()) {
    Exponent a(n.begin(), n.begin() + static_cast<std::ptrdiff_t>(d));
    std::uint32_t min_order = total_degree(a);
    for (std::size_t i = 0; i < k; ++i) min_order += n[d + i];
    if (min_order > order) continue;
    TruncSeries term = TruncSeries::monomial(d, order, a, v);
    for (std::size_t i = 0; i < k && !term.is_zero(); ++i) {
      if (n[d + i] > 0) term = t_mul(term, power(i, n[d + i]));
    }
    out = t_add(out, term);
  }
  return out;
}

RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
  std::size_t n = a.size();
  std::size_t m = b.empty() ? 0 : b[0].size();
  RatMatrix out(n, std::vector<Rat>(m, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < b.size(); ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
    }
  }
  return out;
}

bool is_nilpotent(const RatMatrix& m) {
  std::size_t k = m.size();
  if (k == 0) return true;
  RatMatrix power = m;
  for (std::size_t i = 1; i < k; ++i) power = mat_mul(power, m);
  for (const auto& row : power) {
    for (const auto& v : row) {
      if (v != 0) return false;
    }
  }
  return true;
}

std::vector<TruncSeries> t_solve_implicit(const std::vector<TruncSeries>& system, std::uint32_t order) {
  std::size_t k = system.size();
  if (k == 0) return {};
  std::size_t full = system[0].dim();
  if (full < k) throw Error(ErrorKind::kDimensionMismatch, "implicit system has too few axes");
  std::size_t d = full - k;
  RatMatrix jacobian(k, std::vector<Rat>(k, Rat(0)));
  for (std::size_t a = 0; a < k; ++a) {
    if (system[a].dim() != full) throw Error(ErrorKind::kDimensionMismatch, "implicit system dimensions differ");
    if (system[a].order() < order) {
      throw Error(ErrorKind::kPrecondition, "implicit system is truncated below the requested order");
    }
    if (system[a].constant_term() != 0) {
      throw Error(ErrorKind::kNotWellPosed, "equation " + std::to_string(a + 1) +
                                                " does not vanish at the origin");
    }
    for (std::size_t b = 0; b < k; ++b) {
      Exponent unit(full, 0);
      unit[d + b] = 1;
      jacobian[a][b] = system[a].get(unit);
    }
  }
  if (!is_nilpotent(jacobian)) {
    throw Error(ErrorKind::kNotWellPosed, "Jacobian at the origin is not nilpotent");
  }
  std::vector<TruncSeries> y(k, TruncSeries(d, order));
  std::size_t rounds = std::max<std::size_t>(1, static_cast<std::size_t>(order) * k);
  for (std::size_t t = 0; t < rounds; ++t) {
    std::vector<TruncSeries> next;
    next.reserve(k);
    for (std::size_t a = 0; a < k; ++a) next.push_back(t_compose(system[a], y).truncated(order));
    y = std::move(next);
  }
  for (std::size_t a = 0; a < k; ++a) {
    if (!(t_compose(system[a], y).truncated(order) == y[a])) {
      throw Error(ErrorKind::kNotWellPosed, "fixed-point iteration did not converge");
    }
  }
  return y;
}

TruncSeries t_mask(const TruncSeries& f, const std::function<bool(const Exponent&)>& keep) {
  TruncSeries out(f.dim(), f.order());
  for (const auto& [n, v] : f.entries()) {
    if (keep(n)) out.set(n, v);
  }
  return out;
}

std::map<Exponent, Rat> to_ordinary(const TruncSeries& f) {
  std::map<Exponent, Rat> out;
  for (const auto& [n, v] : f.entries()) out[n] = v / Rat(exponent_factorial(n));
  return out;
}

TruncSeries from_ordinary(std::size_t dim, std::uint32_t order, const std::map<Exponent, Rat>& coeffs) {
  TruncSeries out(dim, order);
  for (const auto& [n, v] : coeffs) out.set(n, v * Rat(exponent_factorial(n)));
  return out;
}

}  // namespace cdfwbpp
