// SPDX-License-Identifier: Apache-2.0
// Test-only helpers: independent brute-force oracles and random input
// generators. Nothing here may call into the code paths it is used to
// check.
#pragma once

#include "irva/cone.hpp"
#include "irva/formula.hpp"
#include "irva/linalg.hpp"

#include <functional>
#include <random>
#include <vector>

namespace irva::testing {

/* Determinant by Laplace expansion; fine for the tiny matrices the
 * oracles deal with. */
inline Rational det_laplace(const RMatrix& m) {
    const int n = m.rows();
    if (n == 1)
        return m.at(0, 0);
    Rational acc;
    for (int c = 0; c < n; ++c) {
        if (m.at(0, c).is_zero())
            continue;
        RMatrix minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int k = 0; k < n; ++k) {
                if (k == c)
                    continue;
                minor.at(r - 1, cc++) = m.at(r, k);
            }
        }
        Rational term = m.at(0, c) * det_laplace(minor);
        acc += (c % 2 == 0) ? term : -term;
    }
    return acc;
}

/* Rank as the largest k with a nonsingular k x k submatrix. Exponential,
 * independent of the elimination path under test. */
inline int rank_by_minors(const RMatrix& m) {
    int best = 0;
    int maxk = std::min(m.rows(), m.cols());
    std::vector<int> rsel, csel;
    std::function<bool(int, int, int)> pick_cols = [&](int k, int from, int need) -> bool {
        if (need == 0) {
            RMatrix sub(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    sub.at(i, j) = m.at(rsel[i], csel[j]);
            return !det_laplace(sub).is_zero();
        }
        for (int c = from; c <= m.cols() - need; ++c) {
            csel.push_back(c);
            if (pick_cols(k, c + 1, need - 1))
                return true;
            csel.pop_back();
        }
        return false;
    };
    std::function<bool(int, int, int)> pick_rows = [&](int k, int from, int need) -> bool {
        if (need == 0) {
            csel.clear();
            return pick_cols(k, 0, k);
        }
        for (int r = from; r <= m.rows() - need; ++r) {
            rsel.push_back(r);
            if (pick_rows(k, r + 1, need - 1))
                return true;
            rsel.pop_back();
        }
        return false;
    };
    for (int k = 1; k <= maxk; ++k) {
        rsel.clear();
        if (pick_rows(k, 0, k))
            best = k;
    }
    return best;
}

/* Exhaustive vertex-candidate search for "is there a point of the cone
 * with strict = 1"; complete for integer-coefficient regions because a
 * nonempty polyhedron has a basic point with Cramer-bounded coordinates,
 * well inside the box. */
inline bool feasible_strict_bruteforce(const ConeRegion& r, long box = 1 << 20) {
    const int d = r.ambient_dim;
    std::vector<std::pair<RVector, Rational>> ineqs; // f.v >= b
    std::vector<std::pair<RVector, Rational>> eqs;   // g.v = c
    for (const auto& c : r.constraints) {
        if (c.rel == ConeRel::NonNegative)
            ineqs.push_back({c.functional, Rational(0)});
        else
            eqs.push_back({c.functional, Rational(0)});
    }
    eqs.push_back({r.strict, Rational(1)});
    for (int k = 0; k < d; ++k) {
        RVector up = RVector::unit(d, k);
        ineqs.push_back({-up, Rational(-box)});
        ineqs.push_back({up, Rational(-box)});
    }
    auto satisfied = [&](const RVector& v) {
        for (const auto& [f, b] : ineqs)
            if (dot(f, v) < b)
                return false;
        for (const auto& [g, c] : eqs)
            if (!(dot(g, v) == c))
                return false;
        return true;
    };
    const int total = static_cast<int>(ineqs.size());
    std::vector<int> sel;
    bool found = false;
    std::function<void(int, int)> try_subsets = [&](int from, int room) {
        if (found)
            return;
        // Solve eqs + selected tight inequalities.
        RMatrix sys(static_cast<int>(eqs.size() + sel.size()), d);
        RVector rhs(static_cast<int>(eqs.size() + sel.size()));
        int row = 0;
        for (const auto& [g, c] : eqs) {
            for (int k = 0; k < d; ++k)
                sys.at(row, k) = g[k];
            rhs[row++] = c;
        }
        for (int idx : sel) {
            for (int k = 0; k < d; ++k)
                sys.at(row, k) = ineqs[idx].first[k];
            rhs[row++] = ineqs[idx].second;
        }
        if (auto x = solve(sys, rhs); x && satisfied(*x)) {
            found = true;
            return;
        }
        if (room == 0)
            return;
        for (int i = from; i < total; ++i) {
            sel.push_back(i);
            try_subsets(i + 1, room - 1);
            sel.pop_back();
            if (found)
                return;
        }
    };
    try_subsets(0, d);
    return found;
}

inline Rational random_rational(std::mt19937_64& rng, int max_num = 12, int max_den = 4) {
    std::uniform_int_distribution<int> num(-max_num, max_num);
    std::uniform_int_distribution<int> den(1, max_den);
    return Rational(num(rng), den(rng));
}

inline RVector random_vector(std::mt19937_64& rng, int dim, int max_num = 12, int max_den = 4) {
    RVector v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = random_rational(rng, max_num, max_den);
    return v;
}

inline RMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, int max_num = 6) {
    RMatrix m(rows, cols);
    std::uniform_int_distribution<int> num(-max_num, max_num);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m.at(r, c) = Rational(num(rng));
    return m;
}

/* Random formula with at most `max_atoms` atoms, integer coefficients
 * in [-8, 8]. */
inline Formula random_formula(std::mt19937_64& rng, int dim, int max_atoms) {
    std::uniform_int_distribution<int> coef(-8, 8);
    std::uniform_int_distribution<int> opdist(0, 4);
    auto random_atom = [&] {
        LinearConstraint c;
        c.coeffs = RVector(dim);
        bool nonzero = false;
        for (int i = 0; i < dim; ++i) {
            c.coeffs[i] = Rational(coef(rng));
            nonzero = nonzero || !c.coeffs[i].is_zero();
        }
        if (!nonzero)
            c.coeffs[std::uniform_int_distribution<int>(0, dim - 1)(rng)] = Rational(1);
        c.bound = Rational(coef(rng));
        c.op = static_cast<CmpOp>(opdist(rng));
        return Formula::atom(dim, std::move(c));
    };
    std::function<Formula(int)> gen = [&](int budget) -> Formula {
        if (budget <= 1)
            return random_atom();
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0:
            return random_atom();
        case 1:
            return Formula::negation(gen(budget));
        case 2: {
            int lhs = std::uniform_int_distribution<int>(1, budget - 1)(rng);
            return Formula::conjunction(gen(lhs), gen(budget - lhs));
        }
        default: {
            int lhs = std::uniform_int_distribution<int>(1, budget - 1)(rng);
            return Formula::disjunction(gen(lhs), gen(budget - lhs));
        }
        }
    };
    return gen(max_atoms);
}

/* Equivalent rewriting used by the canonicity checks: De Morgan on every
 * connective, operand order swapped, atoms double-negated. */
inline Formula equivalent_rewrite(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True:
        return Formula::negation(Formula::constant(f.dim(), false));
    case Formula::Kind::False:
        return Formula::negation(Formula::constant(f.dim(), true));
    case Formula::Kind::Atom:
        return Formula::negation(Formula::negation(f));
    case Formula::Kind::Not:
        return Formula::negation(equivalent_rewrite(f.child()));
    case Formula::Kind::And:
        return Formula::negation(Formula::disjunction(
            Formula::negation(equivalent_rewrite(f.right())),
            Formula::negation(equivalent_rewrite(f.left()))));
    case Formula::Kind::Or:
        return Formula::negation(Formula::conjunction(
            Formula::negation(equivalent_rewrite(f.right())),
            Formula::negation(equivalent_rewrite(f.left()))));
    }
    throw std::logic_error("unreachable");
}

/* Random query point; with probability ~1/2 snapped exactly onto the
 * hyperplane of a random atom so component boundaries get exercised. */
inline RVector random_point_for(const Formula& f, std::mt19937_64& rng) {
    RVector p = random_vector(rng, f.dim(), 10, 4);
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0)
        return p;
    // Collect the atoms, pick one, solve its constraint to equality for
    // one coordinate with a nonzero coefficient.
    std::vector<LinearConstraint> atoms;
    std::function<void(const Formula&)> collect = [&](const Formula& g) {
        switch (g.kind()) {
        case Formula::Kind::Atom:
            atoms.push_back(g.constraint());
            break;
        case Formula::Kind::Not:
            collect(g.child());
            break;
        case Formula::Kind::And:
        case Formula::Kind::Or:
            collect(g.left());
            collect(g.right());
            break;
        default:
            break;
        }
    };
    collect(f);
    if (atoms.empty())
        return p;
    const LinearConstraint& c = atoms[std::uniform_int_distribution<size_t>(0, atoms.size() - 1)(rng)];
    for (int k = 0; k < c.coeffs.dim(); ++k) {
        if (c.coeffs[k].is_zero())
            continue;
        Rational rest;
        for (int i = 0; i < c.coeffs.dim(); ++i)
            if (i != k)
                rest += c.coeffs[i] * p[i];
        p[k] = (c.bound - rest) / c.coeffs[k];
        break;
    }
    return p;
}

} // namespace irva::testing
