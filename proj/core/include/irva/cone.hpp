// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irva/vector_space.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace irva {

enum class ConeRel : uint8_t { NonNegative, Zero };

struct ConeConstraint {
    RVector functional;
    ConeRel rel = ConeRel::NonNegative;
};

/* Closed convex cone in H-representation, with a designated functional
 * that tells "genuinely departing" points (strict > 0) from the apex
 * face (strict = 0). The origin always satisfies every constraint. */
struct ConeRegion {
    int ambient_dim = 0;
    std::vector<ConeConstraint> constraints;
    RVector strict;
};

/* Cone of all vectors v = y + z (y in be.space, z residual) whose
 * residual direction admits an encoding starting with the given face
 * symbol and bit word. Constraints are expressed in global coordinates
 * through the residual functionals, so be.space is the lineality space
 * of the result. Bit words refine the off-face dyadic intervals
 * round-robin; halves are closed, so sibling regions overlap exactly on
 * boundary directions (where dual encodings exist). */
ConeRegion region_from_prefix(const BasisExtension& be, int face, const std::vector<bool>& bits);

/* True iff some v satisfies all constraints with strict(v) > 0. Decided
 * exactly: normalize strict(v) = 1 and test rational feasibility of the
 * resulting system by Fourier-Motzkin elimination. */
bool feasible_strict(const ConeRegion& r);

/* Same decision, but produces a point with strict(v) = 1 when feasible
 * (back-substitution through the elimination steps). */
std::optional<RVector> strict_witness(const ConeRegion& r);

/* Does the point satisfy every constraint (the strict functional is not
 * consulted)? */
bool region_contains(const ConeRegion& r, const RVector& v);

/* True iff some v in vs satisfies all constraints with strict(v) > 0. */
bool meets_vector_space(const ConeRegion& r, const VectorSpace& vs);

/* Constraint lists concatenated; the strict functional comes from the
 * left operand (the caller's query cone). */
ConeRegion intersect(const ConeRegion& a, const ConeRegion& b);

/* Forms over an implicit intersection of several regions (the strict
 * functional comes from the first), without materializing it. The
 * exploration loops intersect the same query cone with many short-lived
 * prefix regions; these entry points keep that cheap. */
std::optional<RVector> strict_witness_all(const std::vector<const ConeRegion*>& regions);
bool meets_vector_space_all(const std::vector<const ConeRegion*>& regions, const VectorSpace& vs);

namespace detail {

constexpr int kFastVars = 8;
using IntRow = std::array<long long, kFastVars + 1>; // coefficients, then the bound

/* Exact feasibility of { row . x >= bound } over nvars <= kFastVars
 * variables; machine arithmetic with an overflow-checked fallback to
 * rationals. Returns a witness when requested, a placeholder when not. */
std::optional<RVector> feasible_integer_rows(std::vector<IntRow> rows, int nvars, bool want_witness);

} // namespace detail

} // namespace irva
