#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cdfwbpp/rational.hpp"

namespace cdfwbpp {

using Exponent = std::vector<std::uint32_t>;

std::uint32_t total_degree(std::span<const std::uint32_t> n);
// Product of the per-axis factorials n_1! ... n_d!.
Int exponent_factorial(std::span<const std::uint32_t> n);
// Multi-index binomial prod_j C(n_j, m_j); requires m <= n componentwise.
Int multinomial_binomial(std::span<const std::uint32_t> n, std::span<const std::uint32_t> m);
// All exponent vectors of dimension `dim` with total degree exactly `degree`,
// in descending lexicographic order (x1^degree first).
std::vector<Exponent> exponents_of_degree(std::size_t dim, std::uint32_t degree);
// `x1^2*x3` style rendering; "1" for the zero vector.
std::string exponent_to_string(std::span<const std::uint32_t> n);

// Multivariate power series f = sum_n f_n x^n / n! truncated at total degree
// N. The stored values are the exponential coefficients f_n.
class TruncSeries {
 public:
  TruncSeries(std::size_t dim, std::uint32_t order);

  static TruncSeries constant(std::size_t dim, std::uint32_t order, const Rat& c);
  // The series x_axis (axis is 0-based).
  static TruncSeries variable(std::size_t dim, std::uint32_t order, std::size_t axis);
  // c * x^n / n!, i.e. exponential coefficient c at n.
  static TruncSeries monomial(std::size_t dim, std::uint32_t order, const Exponent& n, const Rat& c);
  // Univariate table from exponential coefficients f_0, f_1, ...; order is
  // values.size() - 1.
  static TruncSeries univariate(const std::vector<Rat>& values);

  std::size_t dim() const { return dim_; }
  std::uint32_t order() const { return order_; }

  Rat get(const Exponent& n) const;
  // Entries beyond the truncation order are silently dropped.
  void set(const Exponent& n, const Rat& value);
  const std::map<Exponent, Rat>& entries() const { return entries_; }

  Rat constant_term() const;
  bool is_zero() const { return entries_.empty(); }
  // Univariate helper: f_0 .. f_N.
  std::vector<Rat> sequence() const;

  TruncSeries truncated(std::uint32_t order) const;

  friend bool operator==(const TruncSeries& a, const TruncSeries& b) {
    return a.dim_ == b.dim_ && a.order_ == b.order_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t dim_;
  std::uint32_t order_;
  std::map<Exponent, Rat> entries_;
};

TruncSeries t_add(const TruncSeries& f, const TruncSeries& g);
TruncSeries t_sub(const TruncSeries& f, const TruncSeries& g);
TruncSeries t_scale(const Rat& c, const TruncSeries& f);
// Product of power series, i.e. binomial convolution of exponential
// coefficients.
TruncSeries t_mul(const TruncSeries& f, const TruncSeries& g);
TruncSeries t_pow(const TruncSeries& f, unsigned e);
// Partial derivative along a 0-based axis; the result has order N - 1.
TruncSeries t_derive(const TruncSeries& f, std::size_t axis);

// e^f, requires f_0 = 0.
TruncSeries t_exp(const TruncSeries& f);
// -log(1 - f), requires f_0 = 0.
TruncSeries t_neg_log_one_minus(const TruncSeries& f);
// 1 / f, requires f_0 != 0.
TruncSeries t_inverse(const TruncSeries& f);

// f has dimension d + k (x then y); each g_i has dimension d. Substitutes
// y_i := g_i. Requires g_i(0) = 0 for every y_i occurring in f.
TruncSeries t_compose(const TruncSeries& f, const std::vector<TruncSeries>& g);

// Canonical solution of the well-posed system y = F(x, y) truncated at N.
// Each F_i has dimension d + k and order >= N.
std::vector<TruncSeries> t_solve_implicit(const std::vector<TruncSeries>& system, std::uint32_t order);

// Keeps only entries whose exponent satisfies the predicate.
TruncSeries t_mask(const TruncSeries& f, const std::function<bool(const Exponent&)>& keep);

// Ordinary coefficients f_n / n! and back.
std::map<Exponent, Rat> to_ordinary(const TruncSeries& f);
TruncSeries from_ordinary(std::size_t dim, std::uint32_t order, const std::map<Exponent, Rat>& coeffs);

using RatMatrix = std::vector<std::vector<Rat>>;
RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b);
// M^k = 0 for a k x k matrix.
bool is_nilpotent(const RatMatrix& m);

}  // namespace cdfwbpp
