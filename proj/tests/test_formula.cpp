// SPDX-License-Identifier: Apache-2.0
#include "irva/formula.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace irva;
namespace tt = irva::testing;

namespace {
Rational q(long n, long d = 1) { return Rational(n, d); }
const char* kTriangle = "dim 2; x1 >= 1 & x2 < 2 & x1 - x2 <= 1";
} // namespace

TEST_CASE("parsing structure") {
    Formula tri = parse_formula(kTriangle);
    CHECK(tri.dim() == 2);
    REQUIRE(tri.kind() == Formula::Kind::And); // left-associated chain
    CHECK(tri.left().kind() == Formula::Kind::And);
    CHECK(tri.right().kind() == Formula::Kind::Atom);
    CHECK(tri.right().constraint().op == CmpOp::Le);
    CHECK(tri.right().constraint().coeffs == RVector{q(1), q(-1)});
    CHECK(tri.right().constraint().bound == q(1));

    Formula t = parse_formula("dim 1; true");
    CHECK(t.kind() == Formula::Kind::True);

    Formula f = parse_formula("dim 2; !(x1 = 2*x2) | x1 > 1/3");
    REQUIRE(f.kind() == Formula::Kind::Or);
    CHECK(f.left().kind() == Formula::Kind::Not);
    CHECK(f.left().child().constraint().op == CmpOp::Eq);
    CHECK(f.right().constraint().op == CmpOp::Gt);
    // 1/3 cleared to integers: 3*x1 > 1.
    CHECK(f.right().constraint().coeffs == RVector{q(3), q(0)});
    CHECK(f.right().constraint().bound == q(1));
}

TEST_CASE("parsing accepts sums, comments, and mixed terms") {
    Formula f = parse_formula("dim 3; # a comment line\n"
                              "  2*x1 - 3/2 * x2 + x3 - 1 <= x2 + 5 # trailing\n");
    REQUIRE(f.kind() == Formula::Kind::Atom);
    // 2 x1 - 3/2 x2 + x3 - 1 <= x2 + 5  ==>  4 x1 - 5 x2 + 2 x3 <= 12
    CHECK(f.constraint().coeffs == RVector{q(4), q(-5), q(2)});
    CHECK(f.constraint().bound == q(12));
    CHECK(f.constraint().op == CmpOp::Le);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_formula("dim 2 x1 > 0"), ParseError);
    CHECK_THROWS_AS(parse_formula("dim 2; x3 > 0"), ParseError); // index exceeds dim
    CHECK_THROWS_AS(parse_formula("dim 2; x1 >"), ParseError);
    CHECK_THROWS_AS(parse_formula("dim 2; (x1 > 0"), ParseError);
    CHECK_THROWS_AS(parse_formula("dim 0; true"), ParseError);
    CHECK_THROWS_AS(parse_formula("dim 2; x1 > 1/0"), ParseError);
    try {
        parse_formula("dim 2;\n x1 >~ 0");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col > 1);
    }
}

TEST_CASE("evaluation on the triangle") {
    Formula tri = parse_formula(kTriangle);
    CHECK(eval(tri, RVector{q(1), q(0)}));
    CHECK(!eval(tri, RVector{q(1), q(2)}));
    CHECK(eval(tri, RVector{q(2), q(3, 2)}));
    CHECK(!eval(tri, RVector{q(3), q(2)}));
    CHECK_THROWS_AS(eval(tri, RVector{q(0)}), std::invalid_argument);
}

TEST_CASE("print/parse round-trip is the identity on ASTs") {
    auto same_ast = [](const Formula& a, const Formula& b) {
        std::function<bool(const Formula&, const Formula&)> go = [&](const Formula& x, const Formula& y) {
            if (x.kind() != y.kind())
                return false;
            switch (x.kind()) {
            case Formula::Kind::Atom:
                return x.constraint().coeffs == y.constraint().coeffs &&
                       x.constraint().bound == y.constraint().bound && x.constraint().op == y.constraint().op;
            case Formula::Kind::Not:
                return go(x.child(), y.child());
            case Formula::Kind::And:
            case Formula::Kind::Or:
                return go(x.left(), y.left()) && go(x.right(), y.right());
            default:
                return true;
            }
        };
        return a.dim() == b.dim() && go(a, b);
    };

    std::mt19937_64 rng(7301);
    for (int iter = 0; iter < 60; ++iter) {
        Formula f = tt::random_formula(rng, 2 + static_cast<int>(rng() % 3), 5);
        Formula reparsed = parse_formula(print_formula(f));
        CHECK(same_ast(f, reparsed));
    }
    Formula tri = parse_formula(kTriangle);
    CHECK(same_ast(tri, parse_formula(print_formula(tri))));
}

TEST_CASE("conify: fixed transforms") {
    Formula f = conify(parse_formula("dim 1; x1 >= 1"));
    CHECK(f.dim() == 2);
    REQUIRE(f.kind() == Formula::Kind::And);
    CHECK(f.left().constraint().coeffs == RVector{q(1), q(-1)});
    CHECK(f.left().constraint().bound == q(0));
    CHECK(f.left().constraint().op == CmpOp::Ge);
    CHECK(f.right().constraint().coeffs == RVector{q(0), q(1)});
    CHECK(f.right().constraint().op == CmpOp::Gt);

    Formula top = conify(parse_formula("dim 3; true"));
    REQUIRE(top.kind() == Formula::Kind::Atom); // positivity alone
    CHECK(top.dim() == 4);

    // Constant atoms fold away so every surviving atom has a normal.
    Formula folded = conify(parse_formula("dim 1; 1 < 2 & x1 > 0"));
    REQUIRE(folded.kind() == Formula::Kind::And);
    CHECK(folded.left().kind() == Formula::Kind::And);
    CHECK(folded.left().left().kind() == Formula::Kind::True);
}

TEST_CASE("conify: cone semantics") {
    Formula tri = parse_formula(kTriangle);
    Formula cone = conify(tri);

    CHECK(eval(cone, RVector{q(2), q(3, 2), q(1)}));
    CHECK(eval(cone, RVector{q(4), q(3), q(2)})); // lambda = 2 of the same point

    std::mt19937_64 rng(7302);
    for (int iter = 0; iter < 50; ++iter) {
        Formula f = tt::random_formula(rng, 2 + static_cast<int>(rng() % 2), 4);
        Formula c = conify(f);
        RVector p = tt::random_vector(rng, f.dim(), 8, 3);
        RVector lifted(f.dim() + 1);
        for (int i = 0; i < f.dim(); ++i)
            lifted[i] = p[i];
        lifted[f.dim()] = q(1);
        CHECK(eval(c, lifted) == eval(f, p));

        Rational lambda(1 + static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 5));
        CHECK(eval(c, lambda * lifted) == eval(f, p));
    }
}
