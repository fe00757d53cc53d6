// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irva/formula.hpp"
#include "irva/irva.hpp"

namespace irva {

enum class BoolOp : uint8_t { And, Or, Xor, Diff };

bool apply_bool_op(BoolOp op, bool a, bool b);

/* Universal or empty set: a single implicit state carrying the full
 * space, no transitions. */
Irva const_irva(int n, bool value);

/* Homogeneous half-space, hyperplane, or open half-space a.x # 0. The
 * hyperplane kernel(a) forms the initial state; the two departing
 * directions go straight to universal states whose polarity follows the
 * sign of a on the chosen extension vector. */
Irva atom_irva(const RVector& a, CmpOp op, int n);

/* Same structure with every polarity flipped. */
Irva complement(const Irva& a);

/* Outcome of the minimal-covered-component query. */
struct QueryResult {
    enum class Kind : uint8_t { Isolated, NotIsolated, Stuck };
    Kind kind = Kind::Stuck;
    int state = -1; // implicit state index when Isolated

    static QueryResult isolated(int s) { return {Kind::Isolated, s}; }
    static QueryResult not_isolated() { return {Kind::NotIsolated, -1}; }
    static QueryResult stuck() { return {Kind::Stuck, -1}; }
};

/* Starting from implicit state q, finds the unique minimal component of
 * the represented polyhedron whose vector space meets the query cone in
 * a strictly departing direction, following only decision branches whose
 * prefix region still intersects the cone. NotIsolated reports several
 * incomparable minimal candidates; Stuck signals a corrupt structure. */
QueryResult minimal_covered_component(const Irva& a, int q, const ConeRegion& cone);

struct CombineOptions {
    int depth_cap = 64;          // refinement bits per branch before giving up
    bool minimize_result = true;
};

/* Boolean product: simulates both operands concurrently, intersecting
 * component spaces and combining polarities. Throws DepthCapExceeded if
 * a branch cannot isolate destination components within the cap. */
Irva combine(const Irva& a, const Irva& b, BoolOp op, const CombineOptions& opts = {});

/* Bottom-up reduction to the canonical form: merges indistinguishable
 * states and absorbs states whose decisions are subsumed by a successor
 * component. Output states are renumbered canonically. */
Irva minimize(const Irva& a);

/* Equality of minimized IRVA up to state renaming: parallel traversal
 * matching transition labels, vector spaces, and polarities. */
bool isomorphic(const Irva& a, const Irva& b);

/* Set predicates; operands are minimized internally. */
bool is_empty(const Irva& a);
bool is_universal(const Irva& a);
bool equal(const Irva& a, const Irva& b);
bool subset(const Irva& a, const Irva& b);

struct BuildOptions {
    bool minimize = true; // minimize after every product
    int depth_cap = 64;
};

/* Formula over R^n to the IRVA of its representing cone in R^{n+1}:
 * conify, then fold the AST with atom_irva / complement / combine. */
Irva build(const Formula& f, const BuildOptions& opts = {});

/* Fold a formula whose atoms are all homogeneous (a.x # 0) directly,
 * without the cone step; the result is tagged conical. */
Irva build_cone(const Formula& f, const BuildOptions& opts = {});

} // namespace irva
