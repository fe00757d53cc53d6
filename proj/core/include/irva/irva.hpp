// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irva/cone.hpp"
#include "irva/vector_space.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irva {

struct IrvaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Thrown when the Boolean product cannot settle on a destination
 * component within the configured bit-refinement budget. */
struct DepthCapExceeded : IrvaError {
    using IrvaError::IrvaError;
};

/* Reference to a state in either of the two state arrays. Implicit
 * states are encoded as the index itself, explicit states as its
 * bitwise complement. */
class StateRef {
public:
    StateRef() : code_(0) {}
    static StateRef implicit_at(int i) { return StateRef(i); }
    static StateRef explicit_at(int i) { return StateRef(~i); }

    bool is_explicit() const { return code_ < 0; }
    bool is_implicit() const { return code_ >= 0; }
    int index() const { return code_ >= 0 ? code_ : ~code_; }
    int code() const { return code_; }

    friend auto operator<=>(const StateRef&, const StateRef&) = default;

private:
    explicit StateRef(int code) : code_(code) {}
    int code_;
};

enum class Polarity : uint8_t { In, Out };

/* Stands for a polyhedral component: the vectors of `space` get the
 * answer `polarity`, everything else departs through `trans`, keyed by
 * the signed face symbol of the direction encoding. */
struct ImplicitState {
    VectorSpace space;
    Polarity polarity = Polarity::Out;
    std::map<int, StateRef> trans;
    std::optional<BasisExtension> extension; // cached; absent when space is full
};

/* Binary decision node inside the acyclic routing structure. */
struct ExplicitState {
    StateRef succ0;
    StateRef succ1;
};

enum class SourceKind : uint8_t {
    Conical, // the represented set is conical with respect to 0
    Affine,  // represents the cone over a polyhedron of dimension dim-1
};

/* Implicit Real Vector Automaton over R^dim. Immutable once finalized;
 * membership queries are pure and safe to run concurrently. */
struct Irva {
    int dim = 0;
    SourceKind source = SourceKind::Conical;
    int affine_dim = 0; // meaningful iff source == Affine
    std::vector<ImplicitState> implicit_states;
    std::vector<ExplicitState> explicit_states;
    StateRef initial = StateRef::implicit_at(0);
    std::optional<std::string> origin_formula; // optional provenance comment

    const ImplicitState& istate(StateRef r) const { return implicit_states[r.index()]; }
    const ExplicitState& estate(StateRef r) const { return explicit_states[r.index()]; }
    int residual_dim(int implicit_idx) const { return dim - implicit_states[implicit_idx].space.dim(); }

    /* Computes the cached basis extensions. Call after assembling or
     * mutating states; all library constructors do. */
    void finalize();
};

enum class ViolationKind : uint8_t {
    InitialNotImplicit,
    DanglingTarget,
    IncompleteTransitions,
    Cycle,
    NonIncreasingSpace,
    UnreachableState,
};

struct Violation {
    ViolationKind kind;
    std::string detail;
};

const char* violation_name(ViolationKind k);

/* Structural integrity check: acyclicity, transition completeness,
 * strict growth of vector spaces along paths, reachability. Violations
 * are data, not errors. */
std::vector<Violation> validate(const Irva& a);

struct ValidationError : IrvaError {
    explicit ValidationError(std::vector<Violation> vs);
    std::vector<Violation> violations;
};

/* Choice policy where a direction admits several valid encodings
 * (residual on a cube edge/corner, or a dyadic boundary). The defaults
 * are the library's canonical tie-breaks; the alternatives exist so
 * tests can check that the choice does not affect membership. */
struct EncodingPolicy {
    int face_choice = 0;     // index into the valid face candidates, mod count
    bool ties_to_one = true; // at a dyadic midpoint, emit 1 and take the upper half
};

/* Lazily produced encoding of a nonzero residual direction: a face
 * symbol followed by an unbounded deterministic bit stream. */
struct DirectionEncoding {
    int face = 0;                  // signed 1-based face symbol
    std::vector<Rational> offsets; // off-face coordinates mapped into [0,1]
    size_t cursor = 0;
    bool ties_to_one = true;

    bool has_bits() const { return !offsets.empty(); }
    bool next_bit();
};

/* All face symbols the normalized direction lies on (one per index
 * attaining the maximum amplitude). Nonempty for z != 0. */
std::vector<int> candidate_faces(const RVector& z);

DirectionEncoding encode_direction(const RVector& z, const EncodingPolicy& policy = {});

/* Membership of v in the represented conical set: follows one path of
 * implicit and explicit states, deciding against each visited vector
 * space and re-encoding the residual of the original vector. */
bool decide_member(const Irva& a, const RVector& v, const EncodingPolicy& policy = {});

/* Membership of v in the polyhedron underlying an affine-sourced IRVA:
 * appends the homogenizing 1 and decides in the cone. */
bool decide_member_affine(const Irva& a, const RVector& v, const EncodingPolicy& policy = {});

/* Canonical emission order: breadth-first discovery from the initial
 * state with a fixed edge order, sorted by longest-path depth with
 * implicit states before explicit ones at equal depth. Isomorphic IRVA
 * enumerate isomorphic state sequences. */
std::vector<StateRef> canonical_order(const Irva& a);

/* Deterministic text form (states renumbered canonically); isomorphic
 * minimized IRVA serialize byte-identically. */
std::string serialize(const Irva& a);

/* Parses, validates, and finalizes. Throws IrvaError / ValidationError
 * on malformed input. */
Irva deserialize(const std::string& text);

struct IrvaStats {
    int implicit_count = 0;
    int explicit_count = 0;
    int transition_count = 0;
    int in_count = 0;
    int out_count = 0;
    std::map<int, int> by_dimension; // space dim -> implicit state count
};

IrvaStats stats(const Irva& a);

/* Graphviz rendering: rounded boxes for implicit states (doubled border
 * for in polarity), small circles for explicit states. */
std::string to_dot(const Irva& a);

} // namespace irva
