#include <benchmark/benchmark.h>

#include "derivkit/random.hpp"

using namespace derivkit;

namespace {

// Resolution of a random presheaf over the chain Δn; the tower has length ≤ n.
void BM_ResolveChain(benchmark::State& state) {
  const FinCat c = delta(static_cast<std::size_t>(state.range(0)));
  Rng r(1);
  const Presheaf f = random_presheaf(r, Field::f2(), c, 3);
  for (auto _ : state) benchmark::DoNotOptimize(resolve(f));
}
BENCHMARK(BM_ResolveChain)->DenseRange(1, 6);

void BM_ResolveRandom(benchmark::State& state) {
  Rng r(2);
  const Field k = state.range(0) ? Field::rationals() : Field::f2();
  const FinCat c = random_category(r, 5);
  const Presheaf f = random_presheaf(r, k, c, 3);
  for (auto _ : state) benchmark::DoNotOptimize(resolve(f));
}
BENCHMARK(BM_ResolveRandom)->Arg(0)->Arg(1);

void BM_Ext(benchmark::State& state) {
  const FinCat c = delta(3);
  Rng r(3);
  const Complex x = random_complex(r, Field::f2(), c, 2, -1, 1);
  const Complex y = random_complex(r, Field::f2(), c, 2, -1, 1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ext_dim(x, y, n));
}
BENCHMARK(BM_Ext)->DenseRange(-1, 2);

void BM_LiftObject(benchmark::State& state) {
  const FinCat index = delta(static_cast<std::size_t>(state.range(0)));
  Rng r(4);
  const IncoherentDiagram f = random_toda_diagram(r, Field::f2(), index, delta(1), 2);
  for (auto _ : state) benchmark::DoNotOptimize(lift_object(f));
}
BENCHMARK(BM_LiftObject)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_HomCompare(benchmark::State& state) {
  const FinCat index = delta(2);
  const FinCat e = *named_shape("e");
  Rng r(5);
  const Presheaf f = random_presheaf(r, Field::f2(), product(index, e), 2);
  const Presheaf g = random_presheaf(r, Field::f2(), product(index, e), 2);
  const Complex x = Complex::stalk(f), z = Complex::stalk(g);
  for (auto _ : state) benchmark::DoNotOptimize(hom_compare(x, z, index, e));
}
BENCHMARK(BM_HomCompare)->Unit(benchmark::kMillisecond);

void BM_StandardTriangle(benchmark::State& state) {
  Rng r(6);
  const SquareObject s = random_bicartesian_square(r, Field::f2(), delta(1), 2);
  for (auto _ : state) benchmark::DoNotOptimize(standard_triangle(s));
}
BENCHMARK(BM_StandardTriangle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
