// SPDX-License-Identifier: Apache-2.0
#include "irva/algebra.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace irva;
namespace tt = irva::testing;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

Irva quadrant() {
    return combine(atom_irva(RVector{q(1), q(0)}, CmpOp::Ge, 2),
                   atom_irva(RVector{q(0), q(1)}, CmpOp::Ge, 2), BoolOp::And);
}

/* Index of the unique implicit state with the given space and polarity. */
int find_state(const Irva& a, const VectorSpace& space, Polarity pol) {
    int found = -1;
    for (size_t i = 0; i < a.implicit_states.size(); ++i) {
        if (a.implicit_states[i].space == space && a.implicit_states[i].polarity == pol) {
            REQUIRE(found < 0);
            found = static_cast<int>(i);
        }
    }
    REQUIRE(found >= 0);
    return found;
}

void check_valid(const Irva& a) {
    auto vs = validate(a);
    for (const auto& v : vs)
        MESSAGE(violation_name(v.kind), ": ", v.detail);
    CHECK(vs.empty());
}

} // namespace

TEST_CASE("constant IRVA") {
    Irva t = const_irva(2, true);
    Irva f = const_irva(2, false);
    check_valid(t);
    check_valid(f);
    std::mt19937_64 rng(7501);
    for (int i = 0; i < 10; ++i) {
        RVector v = tt::random_vector(rng, 2);
        CHECK(decide_member(t, v));
        CHECK(!decide_member(f, v));
    }
}

TEST_CASE("atom structure follows the sign analysis") {
    // x1 - x2 <= 0: hyperplane in, +1 side violates (a.e1 = 1 > 0).
    Irva le = atom_irva(RVector{q(1), q(-1)}, CmpOp::Le, 2);
    check_valid(le);
    const ImplicitState& h = le.istate(le.initial);
    CHECK(h.space.basis() == RMatrix{{q(1), q(1)}});
    CHECK(h.polarity == Polarity::In);
    CHECK(le.istate(h.trans.at(1)).polarity == Polarity::Out);
    CHECK(le.istate(h.trans.at(-1)).polarity == Polarity::In);
    CHECK(!decide_member(le, RVector{q(1), q(0)})); // a.v = 1 > 0
    CHECK(decide_member(le, RVector{q(-1), q(0)}));

    // x1 = 0 in R^1: zero space in, both directions to one out state.
    Irva eq = atom_irva(RVector{q(1)}, CmpOp::Eq, 1);
    check_valid(eq);
    CHECK(eq.implicit_states.size() == 2);
    CHECK(eq.istate(eq.initial).space.dim() == 0);
    CHECK(eq.istate(eq.initial).polarity == Polarity::In);
    CHECK(eq.istate(eq.initial).trans.at(1) == eq.istate(eq.initial).trans.at(-1));

    // x1 > 0 in R^1: zero space out, +1 in, -1 out.
    Irva gt = atom_irva(RVector{q(1)}, CmpOp::Gt, 1);
    check_valid(gt);
    CHECK(gt.istate(gt.initial).polarity == Polarity::Out);
    CHECK(gt.istate(gt.istate(gt.initial).trans.at(1)).polarity == Polarity::In);
    CHECK(gt.istate(gt.istate(gt.initial).trans.at(-1)).polarity == Polarity::Out);

    CHECK_THROWS_AS(atom_irva(RVector{q(0), q(0)}, CmpOp::Le, 2), std::invalid_argument);
}

TEST_CASE("atoms agree with direct constraint evaluation") {
    std::mt19937_64 rng(7502);
    for (int iter = 0; iter < 30; ++iter) {
        int n = 1 + static_cast<int>(rng() % 3);
        RVector a = tt::random_vector(rng, n, 5, 1);
        if (a.is_zero())
            continue;
        CmpOp op = static_cast<CmpOp>(rng() % 5);
        Irva atom = atom_irva(a, op, n);
        check_valid(atom);
        for (int k = 0; k < 20; ++k) {
            RVector v = tt::random_vector(rng, n, 6, 3);
            CHECK(decide_member(atom, v) == cmp_holds(dot(a, v), op, q(0)));
        }
    }
}

TEST_CASE("complement flips membership and is an involution") {
    CHECK(isomorphic(complement(const_irva(2, true)), const_irva(2, false)));

    Irva le = atom_irva(RVector{q(1), q(-1)}, CmpOp::Le, 2);
    CHECK(isomorphic(complement(complement(le)), le));

    std::mt19937_64 rng(7503);
    Irva quad = quadrant();
    Irva not_quad = complement(quad);
    check_valid(not_quad);
    for (int k = 0; k < 40; ++k) {
        RVector v = tt::random_vector(rng, 2, 6, 3);
        CHECK(decide_member(not_quad, v) == !decide_member(quad, v));
    }
}

TEST_CASE("quadrant product has the five expected components") {
    Irva quad = quadrant();
    check_valid(quad);
    REQUIRE(quad.implicit_states.size() == 5);

    VectorSpace zero(2);
    VectorSpace xaxis = VectorSpace::from_generators({RVector{q(1), q(0)}}, 2);
    VectorSpace yaxis = VectorSpace::from_generators({RVector{q(0), q(1)}}, 2);
    VectorSpace full = VectorSpace::full(2);

    CHECK(quad.istate(quad.initial).space == zero);
    CHECK(quad.istate(quad.initial).polarity == Polarity::In);
    find_state(quad, xaxis, Polarity::In);
    find_state(quad, yaxis, Polarity::In);
    find_state(quad, full, Polarity::In);
    find_state(quad, full, Polarity::Out);

    CHECK(decide_member(quad, RVector{q(0), q(0)}));
    CHECK(decide_member(quad, RVector{q(3), q(0)}));
    CHECK(decide_member(quad, RVector{q(0), q(2)}));
    CHECK(decide_member(quad, RVector{q(1), q(5)}));
    CHECK(!decide_member(quad, RVector{q(-1), q(0)}));
    CHECK(!decide_member(quad, RVector{q(1), q(-1, 2)}));
}

TEST_CASE("minimal covered component on the quadrant") {
    Irva quad = quadrant();
    int apex = quad.initial.index();
    VectorSpace xaxis = VectorSpace::from_generators({RVector{q(1), q(0)}}, 2);
    int ray_x = find_state(quad, xaxis, Polarity::In);
    int interior = find_state(quad, VectorSpace::full(2), Polarity::In);

    SUBCASE("narrow cone around the diagonal isolates the open quadrant") {
        ConeRegion c;
        c.ambient_dim = 2;
        c.strict = RVector{q(1), q(0)};
        c.constraints.push_back({RVector{q(1), q(0)}, ConeRel::NonNegative});
        c.constraints.push_back({RVector{q(-3, 4), q(1)}, ConeRel::NonNegative}); // z2 >= 3/4 z1
        c.constraints.push_back({RVector{q(5, 4), q(-1)}, ConeRel::NonNegative}); // z2 <= 5/4 z1
        QueryResult r = minimal_covered_component(quad, apex, c);
        REQUIRE(r.kind == QueryResult::Kind::Isolated);
        CHECK(r.state == interior);
    }

    SUBCASE("narrow cone around the +x1 axis isolates the ray") {
        ConeRegion c;
        c.ambient_dim = 2;
        c.strict = RVector{q(1), q(0)};
        c.constraints.push_back({RVector{q(1), q(0)}, ConeRel::NonNegative});
        c.constraints.push_back({RVector{q(1, 4), q(1)}, ConeRel::NonNegative});  // z2 >= -z1/4
        c.constraints.push_back({RVector{q(1, 4), q(-1)}, ConeRel::NonNegative}); // z2 <= z1/4
        QueryResult r = minimal_covered_component(quad, apex, c);
        REQUIRE(r.kind == QueryResult::Kind::Isolated);
        CHECK(r.state == ray_x);
    }

    SUBCASE("halfplane covering both rays is not isolated") {
        ConeRegion c;
        c.ambient_dim = 2;
        c.strict = RVector{q(1), q(1)};
        c.constraints.push_back({RVector{q(1), q(1)}, ConeRel::NonNegative});
        QueryResult r = minimal_covered_component(quad, apex, c);
        CHECK(r.kind == QueryResult::Kind::NotIsolated);
    }
}

TEST_CASE("tautologies and contradictions") {
    std::mt19937_64 rng(7504);
    for (int iter = 0; iter < 5; ++iter) {
        Formula f = tt::random_formula(rng, 2, 3);
        Irva a = build(f);
        Irva top = combine(a, complement(a), BoolOp::Or);
        CHECK(is_universal(top));
        CHECK(top.implicit_states.size() == 1); // minimization collapses the tautology
        CHECK(is_empty(combine(a, complement(a), BoolOp::And)));
    }
}

TEST_CASE("combine is a pointwise Boolean homomorphism") {
    std::mt19937_64 rng(7505);
    for (int iter = 0; iter < 8; ++iter) {
        int dim = 2 + static_cast<int>(rng() % 2);
        Formula fa = tt::random_formula(rng, dim, 3);
        Formula fb = tt::random_formula(rng, dim, 3);
        Irva a = build(fa);
        Irva b = build(fb);
        for (BoolOp op : {BoolOp::And, BoolOp::Or, BoolOp::Xor, BoolOp::Diff}) {
            Irva c = combine(a, b, op);
            check_valid(c);
            for (int k = 0; k < 25; ++k) {
                RVector p = tt::random_point_for(fa, rng);
                CHECK(decide_member_affine(c, p) ==
                      apply_bool_op(op, decide_member_affine(a, p), decide_member_affine(b, p)));
            }
        }
    }
}

TEST_CASE("minimize: fixed reductions") {
    // Atoms are already minimal.
    Irva le = atom_irva(RVector{q(1), q(-1)}, CmpOp::Le, 2);
    CHECK(isomorphic(minimize(le), le));
    Irva eq = atom_irva(RVector{q(1), q(-2)}, CmpOp::Eq, 2);
    CHECK(isomorphic(minimize(eq), eq));

    // line OR true: the line state is absorbed by the universal one.
    Irva line_or_true = combine(atom_irva(RVector{q(1), q(-1)}, CmpOp::Eq, 2), const_irva(2, true),
                                BoolOp::Or, {64, false});
    Irva m = minimize(line_or_true);
    CHECK(m.implicit_states.size() == 1);
    CHECK(m.istate(m.initial).space.is_full());
    CHECK(m.istate(m.initial).polarity == Polarity::In);

    // minimize is a fixpoint byte for byte.
    Irva quad = quadrant();
    CHECK(serialize(minimize(minimize(quad))) == serialize(minimize(quad)));
}

TEST_CASE("minimize preserves membership on random builds") {
    std::mt19937_64 rng(7506);
    for (int iter = 0; iter < 6; ++iter) {
        int dim = 2 + static_cast<int>(rng() % 2);
        Formula f = tt::random_formula(rng, dim, 4);
        Irva raw = build(f, {false, 64}); // no minimization anywhere
        Irva min = minimize(raw);
        check_valid(raw);
        check_valid(min);
        CHECK(min.implicit_states.size() <= raw.implicit_states.size());
        for (int k = 0; k < 60; ++k) {
            RVector p = tt::random_point_for(f, rng);
            CHECK(decide_member_affine(raw, p) == decide_member_affine(min, p));
        }
        CHECK(serialize(minimize(min)) == serialize(min));
    }
}

TEST_CASE("isomorphism basics") {
    Irva t = const_irva(2, true);
    CHECK(isomorphic(t, t));
    CHECK(!isomorphic(t, const_irva(2, false)));
    CHECK(!isomorphic(t, const_irva(3, true)));

    std::mt19937_64 rng(7507);
    for (int iter = 0; iter < 5; ++iter) {
        Formula fa = tt::random_formula(rng, 2, 3);
        Formula fb = tt::random_formula(rng, 2, 3);
        Irva a = build(fa), b = build(fb);
        // A ^ B is isomorphic to !(!A v !B).
        Irva lhs = combine(a, b, BoolOp::And);
        Irva rhs = complement(combine(complement(a), complement(b), BoolOp::Or));
        CHECK(isomorphic(lhs, minimize(rhs)));
        for (int k = 0; k < 20; ++k) {
            RVector p = tt::random_point_for(fa, rng);
            CHECK(decide_member_affine(lhs, p) ==
                  (decide_member_affine(a, p) && decide_member_affine(b, p)));
        }
    }
}

TEST_CASE("set predicates") {
    std::mt19937_64 rng(7508);
    Formula f = tt::random_formula(rng, 2, 3);
    Formula g = tt::random_formula(rng, 2, 3);
    Irva a = build(f), b = build(g);

    CHECK(is_empty(combine(a, complement(a), BoolOp::And)));
    CHECK(equal(combine(a, b, BoolOp::Or), combine(b, a, BoolOp::Or)));
    CHECK(subset(combine(a, b, BoolOp::And), a));
    CHECK(subset(a, combine(a, b, BoolOp::Or)));

    Irva triangle = build(parse_formula("dim 2; x1 >= 1 & x2 < 2 & x1 - x2 <= 1"));
    Irva halfplane = build(parse_formula("dim 2; x1 >= 1"));
    CHECK(subset(triangle, halfplane));
    CHECK(!subset(halfplane, triangle));
}

TEST_CASE("build: triangle and degenerate formulas") {
    Irva tri = build(parse_formula("dim 2; x1 >= 1 & x2 < 2 & x1 - x2 <= 1"));
    check_valid(tri);
    IrvaStats st = stats(tri);
    CHECK(st.implicit_count == 9);
    CHECK(st.in_count == 4);
    CHECK(decide_member_affine(tri, RVector{q(1), q(0)}));
    CHECK(!decide_member_affine(tri, RVector{q(1), q(2)}));
    CHECK(!decide_member_affine(tri, RVector{q(3), q(2)}));
    CHECK(decide_member_affine(tri, RVector{q(2), q(3, 2)}));

    CHECK(is_empty(build(parse_formula("dim 2; false"))));
    CHECK(is_empty(build(parse_formula("dim 1; x1 < 0 & x1 > 0"))));

    // The universal polyhedron: every affine point is in, and the
    // represented set is exactly the open halfspace of the cone layer.
    Irva top = build(parse_formula("dim 2; true"));
    std::mt19937_64 rng(7512);
    for (int k = 0; k < 10; ++k)
        CHECK(decide_member_affine(top, tt::random_vector(rng, 2)));
    CHECK(!is_universal(top));
    CHECK(is_universal(combine(top, complement(top), BoolOp::Or)));
}

TEST_CASE("build_cone keeps homogeneous formulas in their own space") {
    Irva line = build_cone(parse_formula("dim 2; x1 = 2*x2"));
    CHECK(line.source == SourceKind::Conical);
    CHECK(line.dim == 2);
    CHECK(line.implicit_states.size() == 2);
    CHECK(line.istate(line.initial).space.basis() == RMatrix{{q(1), q(1, 2)}});

    CHECK_THROWS_AS(build_cone(parse_formula("dim 2; x1 >= 1")), std::invalid_argument);
}

TEST_CASE("oracle equivalence sweep (sampled)") {
    std::mt19937_64 rng(7509);
    for (int iter = 0; iter < 10; ++iter) {
        int dim = 2 + static_cast<int>(rng() % 3);
        Formula f = tt::random_formula(rng, dim, 4);
        Irva a = build(f);
        check_valid(a);
        for (int k = 0; k < 120; ++k) {
            RVector p = tt::random_point_for(f, rng);
            CHECK(decide_member_affine(a, p) == eval(f, p));
        }
    }
}

TEST_CASE("canonicity under equivalent rewritings (sampled)") {
    std::mt19937_64 rng(7510);
    for (int iter = 0; iter < 5; ++iter) {
        Formula f = tt::random_formula(rng, 2 + static_cast<int>(rng() % 2), 4);
        Irva a = build(f);
        Irva b = build(tt::equivalent_rewrite(f));
        CHECK(isomorphic(a, b));
        CHECK(serialize(a) == serialize(b));
    }
}

TEST_CASE("strict growth along every built structure") {
    std::mt19937_64 rng(7511);
    for (int iter = 0; iter < 5; ++iter) {
        Formula f = tt::random_formula(rng, 2, 4);
        Irva a = build(f);
        // validate() covers the strict-growth integrity constraint.
        check_valid(a);
        Irva raw = build(f, {false, 64});
        check_valid(raw);
    }
}
