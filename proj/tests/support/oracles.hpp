#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cdfwbpp/cdf.hpp"
#include "cdfwbpp/poly.hpp"
#include "cdfwbpp/series.hpp"
#include "cdfwbpp/species.hpp"
#include "cdfwbpp/wbpp.hpp"

namespace cdfwbpp {

// Readable gtest failure messages.
void PrintTo(const TruncSeries& f, std::ostream* os);
void PrintTo(const Poly& p, std::ostream* os);

}  // namespace cdfwbpp

namespace oracle {

using cdfwbpp::Exponent;
using cdfwbpp::Poly;
using cdfwbpp::Rat;
using cdfwbpp::TruncSeries;

// Counts the runs of a BPP process (a list of nonterminal occurrences) that
// read `word` and end terminated, by explicit enumeration.
Rat bpp_runs(const cdfwbpp::BppSpec& b, const std::string& start, const std::vector<std::string>& word);

// All interleavings of u and v with multiplicities.
std::map<std::vector<std::size_t>, long> shuffles(const std::vector<std::size_t>& u,
                                                  const std::vector<std::size_t>& v);

// Ordinary coefficients convolved as f(x) g(x) = sum_n (sum_m f_m g_{n-m}) x^n.
std::map<Exponent, Rat> cauchy(const std::map<Exponent, Rat>& f, const std::map<Exponent, Rat>& g,
                               std::uint32_t order);

// p in ideal(gens) decided by linear algebra over all products m * g of total
// degree <= bound (a complete test once the bound is large enough).
bool macaulay_member(const std::vector<Poly>& gens, const Poly& p, std::uint32_t bound);

// EGS of a species built only from TruncSeries combinators.
TruncSeries species_series(const cdfwbpp::SpeciesExpr& e, std::size_t sorts, std::uint32_t order);

// Random helpers shared by the property suites.
Rat random_rat(std::mt19937_64& rng, int range, int max_den = 1);
Poly random_poly(std::mt19937_64& rng, const cdfwbpp::ContextPtr& ctx, std::uint32_t max_degree,
                 std::size_t max_terms, int range);
cdfwbpp::Wbpp random_wbpp(std::mt19937_64& rng, std::size_t letters, std::size_t nonterminals,
                          std::uint32_t degree);
std::vector<std::size_t> random_word(std::mt19937_64& rng, std::size_t letters, std::size_t length);

// A system whose flows along different axes act on disjoint generator
// blocks, hence commute. With zero_init every initial value is 0 and every
// kernel constant has denominator q.
cdfwbpp::CdfSeries random_block_system(std::mt19937_64& rng, std::size_t dim, bool zero_init, int q);
cdfwbpp::ConstraintPtr random_constraint(std::mt19937_64& rng, std::size_t dim, int depth);
std::vector<std::vector<std::size_t>> permutations_of(std::vector<std::size_t> w);

}  // namespace oracle
