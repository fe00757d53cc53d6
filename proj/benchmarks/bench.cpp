// SPDX-License-Identifier: Apache-2.0
#include "irva/algebra.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace irva;

namespace {

const char* kTriangle = "dim 2; x1 >= 1 & x2 < 2 & x1 - x2 <= 1";

std::vector<RVector> random_points(int count, int dim, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-12, 12);
    std::uniform_int_distribution<int> den(1, 4);
    std::vector<RVector> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        RVector p(dim);
        for (int k = 0; k < dim; ++k)
            p[k] = Rational(num(rng), den(rng));
        out.push_back(std::move(p));
    }
    return out;
}

void BM_BuildTriangle(benchmark::State& state) {
    Formula f = parse_formula(kTriangle);
    for (auto _ : state)
        benchmark::DoNotOptimize(build(f));
}
BENCHMARK(BM_BuildTriangle);

void BM_Member(benchmark::State& state) {
    Irva tri = build(parse_formula(kTriangle));
    auto points = random_points(256, 2, 42);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(decide_member_affine(tri, points[i]));
        i = (i + 1) % points.size();
    }
}
BENCHMARK(BM_Member);

void BM_MemberLargeCoefficients(benchmark::State& state) {
    // x1 = 2^k x2: the structure stays two states; only scalars grow.
    long k = state.range(0);
    Formula f = parse_formula("dim 2; x1 = " + std::to_string(1L << k) + "*x2");
    Irva line = build_cone(f);
    auto points = random_points(256, 2, 43);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(decide_member(line, points[i]));
        i = (i + 1) % points.size();
    }
}
BENCHMARK(BM_MemberLargeCoefficients)->Arg(1)->Arg(8)->Arg(16);

void BM_CombineQuadrant(benchmark::State& state) {
    Irva a = atom_irva(RVector{Rational(1), Rational(0)}, CmpOp::Ge, 2);
    Irva b = atom_irva(RVector{Rational(0), Rational(1)}, CmpOp::Ge, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(combine(a, b, BoolOp::And));
}
BENCHMARK(BM_CombineQuadrant);

void BM_MinimizeTriangle(benchmark::State& state) {
    Irva raw = build(parse_formula(kTriangle), {false, 64});
    for (auto _ : state)
        benchmark::DoNotOptimize(minimize(raw));
}
BENCHMARK(BM_MinimizeTriangle);

} // namespace

BENCHMARK_MAIN();
