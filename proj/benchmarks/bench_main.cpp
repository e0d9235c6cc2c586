#include <benchmark/benchmark.h>

#include <string>

#include "cdfwbpp/cdf.hpp"
#include "cdfwbpp/groebner.hpp"
#include "cdfwbpp/io.hpp"
#include "cdfwbpp/species.hpp"
#include "cdfwbpp/wbpp.hpp"

using namespace cdfwbpp;

namespace {

std::string model(const char* name) { return read_text_file(std::string(CDFWBPP_MODELS_DIR) + "/" + name); }

// Cyclic-n style ideal: elementary symmetric polynomials minus constants.
std::vector<Poly> cyclic(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  auto ctx = Context::make(names);
  std::vector<Poly> gens;
  for (std::size_t k = 1; k <= n; ++k) {
    Poly sum(ctx);
    for (std::size_t i = 0; i < n; ++i) {
      Poly prod = Poly::constant(ctx, 1);
      for (std::size_t j = 0; j < k; ++j) prod = prod * Poly::variable(ctx, static_cast<VarId>((i + j) % n));
      sum = sum + prod;
    }
    if (k == n) sum = sum - Poly::constant(ctx, 1);
    gens.push_back(sum);
  }
  return gens;
}

void BM_BuchbergerCyclic(benchmark::State& state) {
  auto gens = cyclic(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(buchberger(gens, MonomialOrder::graded_lex()).size());
}
BENCHMARK(BM_BuchbergerCyclic)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_WbppZeroness(benchmark::State& state) {
  Wbpp m = parse_wbpp(model("running.wbpp")).model;
  for (auto _ : state) benchmark::DoNotOptimize(zeroness(m, m.start_config()).witness.size());
}
BENCHMARK(BM_WbppZeroness);

void BM_WbppCoefficients(benchmark::State& state) {
  Wbpp m = parse_wbpp(model("running.wbpp")).model;
  auto L = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coeffs_up_to(m, m.start_config(), L).size());
}
BENCHMARK(BM_WbppCoefficients)->DenseRange(4, 10, 2);

void BM_CdfTable(benchmark::State& state) {
  CdfSeries s = parse_cdf(model("cayley.cdf")).series;
  auto N = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coeff_table(s, N).get({N}));
}
BENCHMARK(BM_CdfTable)->RangeMultiplier(2)->Range(8, 64);

void BM_CdfLie(benchmark::State& state) {
  CdfSeries s = parse_cdf(model("cayley.cdf")).series;
  auto N = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coeff_via_lie(s, {N}));
}
BENCHMARK(BM_CdfLie)->RangeMultiplier(2)->Range(8, 32);

void BM_CdfZeroness(benchmark::State& state) {
  CdfSeries s = parse_cdf(model("sin2cos2.cdf")).series;
  for (auto _ : state) benchmark::DoNotOptimize(zeroness(s).zero());
}
BENCHMARK(BM_CdfZeroness);

void BM_CdfEquivalence(benchmark::State& state) {
  CdfSeries a = parse_cdf(model("sinh_restrict.cdf")).series;
  CdfSeries b = parse_cdf(model("sinh_closed.cdf")).series;
  for (auto _ : state) benchmark::DoNotOptimize(equivalent(a, b).zero());
}
BENCHMARK(BM_CdfEquivalence);

void BM_SpeciesCount(benchmark::State& state) {
  SpecFile f = parse_spec(model("series_parallel.spec"));
  auto N = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_table(*f.main(), f.sorts, N).get({N}));
}
BENCHMARK(BM_SpeciesCount)->RangeMultiplier(2)->Range(6, 24)->Unit(benchmark::kMillisecond);

void BM_SpeciesEquipotence(benchmark::State& state) {
  SpecFile a = parse_spec(model("seq.spec"));
  SpecFile b = parse_spec(model("seq_via_fix.spec"));
  for (auto _ : state) benchmark::DoNotOptimize(equipotent(*a.main(), *b.main(), 1).zero());
}
BENCHMARK(BM_SpeciesEquipotence);

}  // namespace

BENCHMARK_MAIN();
