// SPDX-License-Identifier: Apache-2.0
#include "irva/cone.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

namespace irva {

namespace {

/* One linear row "f . x >= b" (or "= b" for the equality list). */
struct Row {
    RVector f;
    Rational b;
};

/* Scale a row to a canonical integer-primitive form so duplicates
 * produced by Fourier-Motzkin can be discarded. */
void normalize_row(Row& row) {
    mpz_class lcm_den = 1;
    mpz_class gcd_num = 0;
    auto feed = [&](const Rational& x) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), lcm_den.get_mpz_t(), x.den().get_mpz_t());
        lcm_den = l;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), gcd_num.get_mpz_t(), x.num().get_mpz_t());
        gcd_num = g;
    };
    for (int i = 0; i < row.f.dim(); ++i)
        feed(row.f[i]);
    feed(row.b);
    if (gcd_num == 0)
        return; // all-zero row
    Rational scale = Rational::from_integer(lcm_den) / Rational::from_integer(gcd_num);
    if (scale.sign() < 0)
        scale = -scale;
    for (int i = 0; i < row.f.dim(); ++i)
        row.f[i] *= scale;
    row.b *= scale;
}

/* Positive scale making the vector integer-primitive. */
void normalize_functional(RVector& f) {
    mpz_class lcm_den = 1;
    mpz_class gcd_num = 0;
    for (int i = 0; i < f.dim(); ++i) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), lcm_den.get_mpz_t(), f[i].den().get_mpz_t());
        lcm_den = l;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), gcd_num.get_mpz_t(), f[i].num().get_mpz_t());
        gcd_num = g;
    }
    if (gcd_num == 0)
        return;
    Rational scale = Rational::from_integer(lcm_den) / Rational::from_integer(gcd_num);
    if (scale.sign() < 0)
        scale = -scale;
    f *= scale;
}

/* Fourier-Motzkin runs almost always fit comfortably in machine words
 * once rows are gcd-reduced, and the elimination loop is in the hot
 * path of every region query, so there are two engines: an
 * overflow-checked int64 one and the full rational one it falls back
 * to. Both are exact. */

constexpr int kFastVars = detail::kFastVars;
using FastRow = detail::IntRow;

struct FastOverflow {};

long long to_ll(const mpz_class& z) {
    if (!z.fits_slong_p() || z.get_si() == LLONG_MIN)
        throw FastOverflow{};
    return z.get_si();
}

long long narrow_128(__int128 v) {
    if (v > LLONG_MAX || v <= LLONG_MIN)
        throw FastOverflow{};
    return static_cast<long long>(v);
}

__int128 gcd_128(__int128 a, __int128 b) {
    if (a < 0)
        a = -a;
    if (b < 0)
        b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/* One elimination step, kept for witness reconstruction. */
struct FastStep {
    int var;
    std::vector<FastRow> lowers; // positive coefficient on var
    std::vector<FastRow> uppers; // negative coefficient
};

bool fast_fm(std::vector<FastRow> rows, int nvars, std::vector<FastStep>* steps) {
    auto compact = [&](std::vector<FastRow>& rs) -> bool {
        std::vector<FastRow> keep;
        keep.reserve(rs.size());
        for (FastRow& r : rs) {
            long long g = 0;
            bool zero_coeffs = true;
            for (int i = 0; i <= nvars; ++i) {
                g = std::gcd(g, r[i]);
                if (i < nvars && r[i] != 0)
                    zero_coeffs = false;
            }
            if (zero_coeffs) {
                if (r[nvars] > 0)
                    return false; // 0 >= positive
                continue;
            }
            if (g > 1)
                for (int i = 0; i <= nvars; ++i)
                    r[i] /= g;
            keep.push_back(r);
        }
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        rs = std::move(keep);
        return true;
    };
    if (!compact(rows))
        return false;

    while (!rows.empty()) {
        int best_var = -1;
        long best_cost = 0;
        for (int v = 0; v < nvars; ++v) {
            long pos = 0, neg = 0;
            bool used = false;
            for (const FastRow& r : rows) {
                if (r[v] > 0)
                    ++pos;
                else if (r[v] < 0)
                    ++neg;
                if (r[v] != 0)
                    used = true;
            }
            if (!used)
                continue;
            long cost = pos * neg;
            if (best_var < 0 || cost < best_cost) {
                best_var = v;
                best_cost = cost;
            }
        }
        if (best_var < 0)
            return true;

        FastStep step;
        step.var = best_var;
        std::vector<FastRow> rest;
        rest.reserve(rows.size());
        for (const FastRow& r : rows) {
            if (r[best_var] > 0)
                step.lowers.push_back(r);
            else if (r[best_var] < 0)
                step.uppers.push_back(r);
            else
                rest.push_back(r);
        }
        for (const FastRow& lo : step.lowers) {
            for (const FastRow& up : step.uppers) {
                // (-up_k) * lo + lo_k * up: a positive combination that
                // cancels the eliminated variable.
                __int128 a = -static_cast<__int128>(up[best_var]);
                __int128 c = lo[best_var];
                std::array<__int128, kFastVars + 1> wide{};
                __int128 g = 0;
                for (int i = 0; i <= nvars; ++i) {
                    wide[i] = a * lo[i] + c * up[i];
                    g = gcd_128(g, wide[i]);
                }
                FastRow combined{};
                if (g != 0)
                    for (int i = 0; i <= nvars; ++i)
                        combined[i] = narrow_128(wide[i] / g);
                rest.push_back(combined);
            }
        }
        rows = std::move(rest);
        if (steps)
            steps->push_back(std::move(step));
        if (!compact(rows))
            return false;
    }
    return true;
}

/* Witness from the recorded elimination steps, walked in reverse; the
 * variable is pinned between its tightest lower and upper bounds, which
 * cannot cross once the later variables are fixed. */
RVector fast_witness(const std::vector<FastStep>& steps, int nvars) {
    RVector x(nvars);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        auto bound = [&](const FastRow& row) {
            Rational rest((long)row[nvars]);
            for (int i = 0; i < nvars; ++i)
                if (i != it->var && row[i] != 0)
                    rest -= Rational((long)row[i]) * x[i];
            return rest / Rational((long)row[it->var]);
        };
        std::optional<Rational> lo, hi;
        for (const FastRow& row : it->lowers) {
            Rational v = bound(row);
            if (!lo || v > *lo)
                lo = v;
        }
        for (const FastRow& row : it->uppers) {
            Rational v = bound(row);
            if (!hi || v < *hi)
                hi = v;
        }
        if (lo && hi)
            x[it->var] = (*lo + *hi) / Rational(2);
        else if (lo)
            x[it->var] = *lo;
        else if (hi)
            x[it->var] = *hi;
    }
    return x;
}

struct SlowStep {
    int var;
    std::vector<Row> lowers;
    std::vector<Row> uppers;
};

bool slow_fm(std::vector<Row> rows, int nvars, std::vector<SlowStep>& steps) {
    auto compact = [&](std::vector<Row>& rs) -> bool {
        std::set<std::vector<Rational>> seen;
        std::vector<Row> keep;
        for (Row& row : rs) {
            normalize_row(row);
            if (row.f.is_zero()) {
                if (row.b.sign() > 0)
                    return false; // 0 >= positive
                continue;
            }
            std::vector<Rational> key;
            key.reserve(row.f.dim() + 1);
            for (int i = 0; i < row.f.dim(); ++i)
                key.push_back(row.f[i]);
            key.push_back(row.b);
            if (seen.insert(std::move(key)).second)
                keep.push_back(std::move(row));
        }
        rs = std::move(keep);
        return true;
    };
    if (!compact(rows))
        return false;
    while (!rows.empty()) {
        int best_var = -1;
        long best_cost = 0;
        for (int v = 0; v < nvars; ++v) {
            long pos = 0, neg = 0;
            bool used = false;
            for (const Row& row : rows) {
                int s = row.f[v].sign();
                if (s > 0)
                    ++pos;
                else if (s < 0)
                    ++neg;
                if (s != 0)
                    used = true;
            }
            if (!used)
                continue;
            long cost = pos * neg;
            if (best_var < 0 || cost < best_cost) {
                best_var = v;
                best_cost = cost;
            }
        }
        if (best_var < 0)
            return true;
        SlowStep step;
        step.var = best_var;
        std::vector<Row> rest;
        for (Row& row : rows) {
            int s = row.f[best_var].sign();
            if (s > 0)
                step.lowers.push_back(std::move(row));
            else if (s < 0)
                step.uppers.push_back(std::move(row));
            else
                rest.push_back(std::move(row));
        }
        for (const Row& lo : step.lowers) {
            for (const Row& up : step.uppers) {
                Rational a = Rational(1) / lo.f[best_var];
                Rational c = Rational(-1) / up.f[best_var];
                Row combined;
                combined.f = RVector(nvars);
                for (int i = 0; i < nvars; ++i)
                    combined.f[i] = a * lo.f[i] + c * up.f[i];
                combined.b = a * lo.b + c * up.b;
                rest.push_back(std::move(combined));
            }
        }
        rows = std::move(rest);
        steps.push_back(std::move(step));
        if (!compact(rows))
            return false;
    }
    return true;
}

RVector slow_witness(const std::vector<SlowStep>& steps, int nvars) {
    RVector x(nvars);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        auto bound = [&](const Row& row) {
            Rational rest = row.b;
            for (int i = 0; i < nvars; ++i)
                if (i != it->var && !row.f[i].is_zero())
                    rest -= row.f[i] * x[i];
            return rest / row.f[it->var];
        };
        std::optional<Rational> lo, hi;
        for (const Row& row : it->lowers) {
            Rational v = bound(row);
            if (!lo || v > *lo)
                lo = v;
        }
        for (const Row& row : it->uppers) {
            Rational v = bound(row);
            if (!hi || v < *hi)
                hi = v;
        }
        if (lo && hi)
            x[it->var] = (*lo + *hi) / Rational(2);
        else if (lo)
            x[it->var] = *lo;
        else if (hi)
            x[it->var] = *hi;
    }
    return x;
}

/* Exact feasibility of { f.x >= b }. Returns nullopt when infeasible; a
 * witness when feasible and requested, otherwise a placeholder standing
 * for "feasible". */
std::optional<RVector> linear_feasible_point(std::vector<Row> ineqs, int nvars,
                                             bool want_witness = true) {
    std::optional<RVector> point;
    bool decided = false;
    if (nvars <= kFastVars) {
        try {
            std::vector<FastRow> rows;
            rows.reserve(ineqs.size());
            for (Row& row : ineqs) {
                // Rows coming from prefix regions are integral already.
                bool integral = row.b.is_integer();
                for (int i = 0; integral && i < nvars; ++i)
                    integral = row.f[i].is_integer();
                if (!integral)
                    normalize_row(row);
                FastRow fr{};
                for (int i = 0; i < nvars; ++i)
                    fr[i] = to_ll(row.f[i].num());
                fr[nvars] = to_ll(row.b.num());
                rows.push_back(fr);
            }
            std::vector<FastStep> steps;
            if (fast_fm(std::move(rows), nvars, want_witness ? &steps : nullptr))
                point = want_witness ? fast_witness(steps, nvars) : RVector(nvars);
            decided = true;
        } catch (const FastOverflow&) {
            point.reset();
            decided = false;
        }
    }
    if (!decided) {
        std::vector<SlowStep> steps;
        if (slow_fm(std::move(ineqs), nvars, steps))
            point = want_witness ? slow_witness(steps, nvars) : RVector(nvars);
    }
    return point;
}

/* The system "all constraints hold and strict(v) > 0" for a cone is
 * scale-equivalent to "all constraints hold and strict(v) >= 1": every
 * functional here is homogeneous, so a strictly departing point can be
 * scaled onto the strict >= 1 slab. This keeps the system a pure
 * (integral) inequality system. */
void append_region_rows(std::vector<Row>& ineqs, const ConeRegion& r) {
    for (const ConeConstraint& c : r.constraints) {
        if (c.rel == ConeRel::NonNegative) {
            ineqs.push_back({c.functional, Rational(0)});
        } else {
            ineqs.push_back({c.functional, Rational(0)});
            ineqs.push_back({-c.functional, Rational(0)});
        }
    }
}

std::vector<Row> region_rows(const ConeRegion& r) {
    std::vector<Row> ineqs;
    ineqs.reserve(r.constraints.size() + 2);
    append_region_rows(ineqs, r);
    ineqs.push_back({r.strict, Rational(1)});
    return ineqs;
}

} // namespace

ConeRegion region_from_prefix(const BasisExtension& be, int face, const std::vector<bool>& bits) {
    const int d = be.residual_dim();
    const int i = face > 0 ? face : -face;
    if (face == 0 || i < 1 || i > d)
        throw std::invalid_argument("face index out of range");
    if (d == 1 && !bits.empty())
        throw std::invalid_argument("bit word must be empty when the residual dimension is 1");
    const int sigma = face > 0 ? 1 : -1;

    RVector axis = be.functionals.row(i - 1);
    if (sigma < 0)
        axis = -axis;

    RVector axis_primitive = axis;
    normalize_functional(axis_primitive);

    ConeRegion region;
    region.ambient_dim = be.space.ambient_dim();
    region.strict = axis_primitive;
    region.constraints.push_back({axis_primitive, ConeRel::NonNegative});

    if (d == 1)
        return region;

    // Off-face coordinates in increasing residual order, each with a
    // dyadic interval refined round-robin by the bits.
    std::vector<int> coords;
    coords.reserve(d - 1);
    for (int j = 1; j <= d; ++j)
        if (j != i)
            coords.push_back(j);
    std::vector<Rational> lo(coords.size(), Rational(0));
    std::vector<Rational> hi(coords.size(), Rational(1));
    for (size_t t = 0; t < bits.size(); ++t) {
        size_t k = t % coords.size();
        Rational mid = (lo[k] + hi[k]) / Rational(2);
        if (bits[t])
            lo[k] = mid;
        else
            hi[k] = mid;
    }

    for (size_t k = 0; k < coords.size(); ++k) {
        RVector fj = be.functionals.row(coords[k] - 1);
        // (lo - 1/2) * 2 * sigma * z_i <= z_j <= (hi - 1/2) * 2 * sigma * z_i
        Rational lo_scale = Rational(2) * lo[k] - Rational(1);
        Rational hi_scale = Rational(2) * hi[k] - Rational(1);
        RVector low = fj - lo_scale * axis;
        RVector high = hi_scale * axis - fj;
        normalize_functional(low);
        normalize_functional(high);
        region.constraints.push_back({std::move(low), ConeRel::NonNegative});
        region.constraints.push_back({std::move(high), ConeRel::NonNegative});
    }
    return region;
}

bool feasible_strict(const ConeRegion& r) { return strict_witness(r).has_value(); }

std::optional<RVector> strict_witness(const ConeRegion& r) {
    return linear_feasible_point(region_rows(r), r.ambient_dim);
}

bool region_contains(const ConeRegion& r, const RVector& v) {
    for (const ConeConstraint& c : r.constraints) {
        Rational val = dot(c.functional, v);
        if (c.rel == ConeRel::NonNegative ? val.sign() < 0 : !val.is_zero())
            return false;
    }
    return true;
}

bool meets_vector_space(const ConeRegion& r, const VectorSpace& vs) {
    if (vs.ambient_dim() != r.ambient_dim)
        throw std::invalid_argument("ambient dimension mismatch");
    const int k = vs.dim();
    if (k == 0)
        return false; // strict(0) = 0
    // Substitute v = sum_l t_l b_l and decide in the parameter space.
    auto substitute = [&](const RVector& f) {
        RVector g(k);
        for (int l = 0; l < k; ++l)
            g[l] = dot(f, vs.basis().row(l));
        return g;
    };
    RVector strict_sub = substitute(r.strict);
    if (strict_sub.is_zero())
        return false; // the strict functional vanishes on the subspace
    std::vector<Row> ineqs;
    ineqs.reserve(r.constraints.size() + 2);
    for (const ConeConstraint& c : r.constraints) {
        Row row{substitute(c.functional), Rational(0)};
        if (c.rel == ConeRel::NonNegative) {
            ineqs.push_back(std::move(row));
        } else {
            ineqs.push_back({-row.f, row.b});
            ineqs.push_back(std::move(row));
        }
    }
    ineqs.push_back({std::move(strict_sub), Rational(1)});
    return linear_feasible_point(std::move(ineqs), k, false).has_value();
}

ConeRegion intersect(const ConeRegion& a, const ConeRegion& b) {
    if (a.ambient_dim != b.ambient_dim)
        throw std::invalid_argument("ambient dimension mismatch");
    ConeRegion out = a;
    out.constraints.insert(out.constraints.end(), b.constraints.begin(), b.constraints.end());
    return out;
}

std::optional<RVector> strict_witness_all(const std::vector<const ConeRegion*>& regions) {
    std::vector<Row> ineqs;
    for (const ConeRegion* r : regions)
        append_region_rows(ineqs, *r);
    ineqs.push_back({regions.front()->strict, Rational(1)});
    return linear_feasible_point(std::move(ineqs), regions.front()->ambient_dim);
}

bool meets_vector_space_all(const std::vector<const ConeRegion*>& regions, const VectorSpace& vs) {
    const int k = vs.dim();
    if (k == 0)
        return false;
    auto substitute = [&](const RVector& f) {
        RVector g(k);
        for (int l = 0; l < k; ++l)
            g[l] = dot(f, vs.basis().row(l));
        return g;
    };
    RVector strict_sub = substitute(regions.front()->strict);
    if (strict_sub.is_zero())
        return false;
    std::vector<Row> ineqs;
    for (const ConeRegion* r : regions) {
        for (const ConeConstraint& c : r->constraints) {
            Row row{substitute(c.functional), Rational(0)};
            if (c.rel == ConeRel::NonNegative) {
                ineqs.push_back(std::move(row));
            } else {
                ineqs.push_back({-row.f, row.b});
                ineqs.push_back(std::move(row));
            }
        }
    }
    ineqs.push_back({std::move(strict_sub), Rational(1)});
    return linear_feasible_point(std::move(ineqs), k, false).has_value();
}

namespace detail {

std::optional<RVector> feasible_integer_rows(std::vector<IntRow> rows, int nvars, bool want_witness) {
    try {
        std::vector<FastStep> steps;
        std::vector<IntRow> work = rows;
        if (!fast_fm(std::move(work), nvars, want_witness ? &steps : nullptr))
            return std::nullopt;
        return want_witness ? fast_witness(steps, nvars) : RVector(nvars);
    } catch (const FastOverflow&) {
        // Rare: intermediate coefficients outgrew the machine words.
        // Exactness must not depend on word size, so redo in rationals.
        std::vector<Row> slow;
        slow.reserve(rows.size());
        for (const IntRow& r : rows) {
            Row row;
            row.f = RVector(nvars);
            for (int i = 0; i < nvars; ++i)
                row.f[i] = Rational(static_cast<long>(r[i]));
            row.b = Rational(static_cast<long>(r[nvars]));
            slow.push_back(std::move(row));
        }
        std::vector<SlowStep> steps;
        if (!slow_fm(std::move(slow), nvars, steps))
            return std::nullopt;
        return want_witness ? slow_witness(steps, nvars) : RVector(nvars);
    }
}

} // namespace detail

} // namespace irva
