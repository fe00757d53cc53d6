// SPDX-License-Identifier: Apache-2.0
#include "irva/algebra.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace irva {

bool apply_bool_op(BoolOp op, bool a, bool b) {
    switch (op) {
    case BoolOp::And: return a && b;
    case BoolOp::Or: return a || b;
    case BoolOp::Xor: return a != b;
    case BoolOp::Diff: return a && !b;
    }
    return false;
}

Irva const_irva(int n, bool value) {
    if (n < 1)
        throw std::invalid_argument("dimension must be positive");
    Irva out;
    out.dim = n;
    out.implicit_states.push_back({VectorSpace::full(n), value ? Polarity::In : Polarity::Out, {}, std::nullopt});
    out.initial = StateRef::implicit_at(0);
    return out;
}

Irva atom_irva(const RVector& a, CmpOp op, int n) {
    if (a.dim() != n)
        throw std::invalid_argument("normal dimension mismatch");
    if (a.is_zero())
        throw std::invalid_argument("atom requires a nonzero normal");

    Irva out;
    out.dim = n;

    RMatrix row(1, n);
    for (int c = 0; c < n; ++c)
        row.at(0, c) = a[c];
    VectorSpace hyper = VectorSpace::from_generators(nullspace(row), n);
    bool zero_in = op == CmpOp::Le || op == CmpOp::Eq || op == CmpOp::Ge;
    out.implicit_states.push_back({hyper, zero_in ? Polarity::In : Polarity::Out, {}, std::nullopt});
    out.initial = StateRef::implicit_at(0);

    BasisExtension ext = extend_basis(hyper);
    // Residual direction +1 is the side where a.v has the sign of a on
    // the extension vector.
    int side = dot(a, RVector::unit(n, ext.z_indices[0])).sign();

    if (op == CmpOp::Eq) {
        out.implicit_states.push_back({VectorSpace::full(n), Polarity::Out, {}, std::nullopt});
        out.implicit_states[0].trans[1] = StateRef::implicit_at(1);
        out.implicit_states[0].trans[-1] = StateRef::implicit_at(1);
    } else {
        bool pos_in = op == CmpOp::Ge || op == CmpOp::Gt;
        bool neg_in = op == CmpOp::Le || op == CmpOp::Lt;
        bool plus_in = side > 0 ? pos_in : neg_in;
        bool minus_in = side > 0 ? neg_in : pos_in;
        out.implicit_states.push_back({VectorSpace::full(n), plus_in ? Polarity::In : Polarity::Out, {}, std::nullopt});
        out.implicit_states.push_back({VectorSpace::full(n), minus_in ? Polarity::In : Polarity::Out, {}, std::nullopt});
        out.implicit_states[0].trans[1] = StateRef::implicit_at(1);
        out.implicit_states[0].trans[-1] = StateRef::implicit_at(2);
    }
    out.implicit_states[0].extension = std::move(ext);
    return out;
}

Irva complement(const Irva& a) {
    Irva out = a;
    out.origin_formula.reset();
    for (auto& s : out.implicit_states)
        s.polarity = s.polarity == Polarity::In ? Polarity::Out : Polarity::In;
    return out;
}

namespace {

/* reach[i][j]: implicit state j is reachable from implicit state i by a
 * nonempty transition path. */
std::vector<std::vector<bool>> implicit_reachability(const Irva& a) {
    const int ni = static_cast<int>(a.implicit_states.size());
    std::map<int, std::set<int>> memo; // state code -> reachable implicit indexes
    std::function<const std::set<int>&(StateRef)> reach_from = [&](StateRef s) -> const std::set<int>& {
        auto it = memo.find(s.code());
        if (it != memo.end())
            return it->second;
        auto& acc = memo[s.code()]; // placed first: acyclicity makes re-entry impossible
        auto visit_edge = [&](StateRef t) {
            std::set<int> sub = reach_from(t); // copy: acc may rehash during recursion
            if (t.is_implicit())
                acc.insert(t.index());
            acc.insert(sub.begin(), sub.end());
        };
        if (s.is_implicit()) {
            for (const auto& [sym, t] : a.istate(s).trans)
                visit_edge(t);
        } else {
            visit_edge(a.estate(s).succ0);
            visit_edge(a.estate(s).succ1);
        }
        return memo[s.code()];
    };
    std::vector<std::vector<bool>> out(ni, std::vector<bool>(ni, false));
    for (int i = 0; i < ni; ++i)
        for (int j : reach_from(StateRef::implicit_at(i)))
            out[i][j] = true;
    return out;
}

using detail::IntRow;
using detail::kFastVars;

/* Integer mirror of a region; absent (ok = false) when something does
 * not fit in machine words. All sign information is preserved exactly,
 * so the mirrors can stand in for the rational forms wherever only
 * feasibility or sign tests are needed. */
struct IntRegion {
    bool ok = false;
    std::vector<IntRow> rows; // constraint functionals, bound slot 0
    std::array<long long, kFastVars> strict{};
};

long long fit_ll(const mpz_class& z, bool& ok) {
    if (!z.fits_slong_p()) {
        ok = false;
        return 0;
    }
    long long v = z.get_si();
    if (v == LLONG_MIN)
        ok = false;
    return v;
}

IntRegion compile_region(const ConeRegion& r) {
    IntRegion out;
    if (r.ambient_dim > kFastVars)
        return out;
    bool ok = true;
    auto convert = [&](const RVector& f, IntRow& row) {
        for (int i = 0; i < r.ambient_dim && ok; ++i) {
            if (!f[i].is_integer()) {
                ok = false;
                break;
            }
            row[i] = fit_ll(f[i].num(), ok);
        }
    };
    for (const ConeConstraint& c : r.constraints) {
        IntRow row{};
        convert(c.functional, row);
        if (!ok)
            return out;
        out.rows.push_back(row);
        if (c.rel == ConeRel::Zero) {
            IntRow neg{};
            for (int i = 0; i < r.ambient_dim; ++i)
                neg[i] = -row[i];
            out.rows.push_back(neg);
        }
    }
    IntRow srow{};
    convert(r.strict, srow);
    if (!ok)
        return out;
    for (int i = 0; i < r.ambient_dim; ++i)
        out.strict[i] = srow[i];
    out.ok = true;
    return out;
}

/* Witness numerators over a common positive denominator; only the signs
 * of integer-functional dots are ever consulted. */
struct IntPoint {
    bool ok = false;
    std::array<long long, kFastVars> num{};
};

IntPoint compile_point(const RVector& v) {
    IntPoint p;
    if (v.dim() > kFastVars)
        return p;
    mpz_class lcm = 1;
    for (int i = 0; i < v.dim(); ++i) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), v[i].den().get_mpz_t());
        lcm = l;
    }
    bool ok = true;
    for (int i = 0; i < v.dim() && ok; ++i) {
        mpz_class scaled = v[i].num() * (lcm / v[i].den());
        p.num[i] = fit_ll(scaled, ok);
    }
    p.ok = ok;
    return p;
}

struct SweepPoint {
    RVector exact;
    IntPoint fast;
};

SweepPoint make_sweep_point(RVector v) {
    IntPoint f = compile_point(v);
    return {std::move(v), f};
}

bool point_in_region(const ConeRegion& r, const IntRegion& fast, const SweepPoint& p, int dim) {
    if (fast.ok && p.fast.ok) {
        for (const IntRow& row : fast.rows) {
            __int128 s = 0;
            for (int i = 0; i < dim; ++i)
                s += static_cast<__int128>(row[i]) * p.fast.num[i];
            if (s < 0)
                return false;
        }
        return true;
    }
    return region_contains(r, p.exact);
}

/* Basis rows scaled per row to integer-primitive vectors; a positive
 * per-parameter scale is harmless for the substituted feasibility
 * systems. */
struct IntBasis {
    bool ok = false;
    int k = 0;
    std::vector<std::array<long long, kFastVars>> rows;
};

IntBasis compile_basis(const VectorSpace& vs) {
    IntBasis out;
    out.k = vs.dim();
    if (vs.ambient_dim() > kFastVars)
        return out;
    bool ok = true;
    for (int r = 0; r < vs.dim() && ok; ++r) {
        mpz_class lcm = 1;
        for (int c = 0; c < vs.ambient_dim(); ++c) {
            mpz_class l;
            mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), vs.basis().at(r, c).den().get_mpz_t());
            lcm = l;
        }
        std::array<long long, kFastVars> row{};
        for (int c = 0; c < vs.ambient_dim() && ok; ++c) {
            const Rational& x = vs.basis().at(r, c);
            mpz_class scaled = x.num() * (lcm / x.den());
            row[c] = fit_ll(scaled, ok);
        }
        out.rows.push_back(row);
    }
    out.ok = ok;
    return out;
}

struct PrefixEntry {
    ConeRegion region;
    IntRegion fast;
};

struct ChainEntry {
    const ConeRegion* region;
    const IntRegion* fast;
};

/* The prefix regions enumerated while sweeping an operand are fixed by
 * its decision structure, so one Boolean product keeps them cached per
 * (implicit state, face, bit word). Map nodes give stable addresses. */
using PrefixCache = std::map<std::tuple<int, int, std::vector<bool>>, PrefixEntry>;

const PrefixEntry& cached_prefix(PrefixCache& cache, const BasisExtension& be, int state, int face,
                                 const std::vector<bool>& bits) {
    auto key = std::make_tuple(state, face, bits);
    auto it = cache.find(key);
    if (it == cache.end()) {
        PrefixEntry entry{region_from_prefix(be, face, bits), {}};
        entry.fast = compile_region(entry.region);
        it = cache.emplace(std::move(key), std::move(entry)).first;
    }
    return it->second;
}

bool chain_all_fast(const std::vector<ChainEntry>& chain) {
    for (const ChainEntry& e : chain)
        if (!e.fast || !e.fast->ok)
            return false;
    return true;
}

/* Witness of the chain's intersection with strict departure, or nullopt. */
std::optional<SweepPoint> chain_witness(const std::vector<ChainEntry>& chain, int dim) {
    if (dim <= kFastVars && chain_all_fast(chain)) {
        std::vector<IntRow> rows;
        for (const ChainEntry& e : chain)
            rows.insert(rows.end(), e.fast->rows.begin(), e.fast->rows.end());
        IntRow srow{};
        for (int i = 0; i < dim; ++i)
            srow[i] = chain.front().fast->strict[i];
        srow[dim] = 1; // strict >= 1: scale-equivalent to strict > 0 on a cone
        rows.push_back(srow);
        auto w = detail::feasible_integer_rows(std::move(rows), dim, true);
        if (!w)
            return std::nullopt;
        return make_sweep_point(std::move(*w));
    }
    std::vector<const ConeRegion*> regions;
    regions.reserve(chain.size());
    for (const ChainEntry& e : chain)
        regions.push_back(e.region);
    auto w = strict_witness_all(regions);
    if (!w)
        return std::nullopt;
    return make_sweep_point(std::move(*w));
}

/* Does some strictly departing point of the chain's intersection lie in
 * the subspace? */
bool chain_meets(const std::vector<ChainEntry>& chain, const VectorSpace& vs, const IntBasis& basis) {
    const int k = vs.dim();
    if (k == 0)
        return false;
    const int dim = vs.ambient_dim();
    if (basis.ok && dim <= kFastVars && chain_all_fast(chain)) {
        bool fits = true;
        auto substitute = [&](const long long* f, IntRow& srow) {
            bool zero = true;
            for (int l = 0; l < k && fits; ++l) {
                __int128 s = 0;
                for (int i = 0; i < dim; ++i)
                    s += static_cast<__int128>(f[i]) * basis.rows[l][i];
                if (s > LLONG_MAX || s <= LLONG_MIN)
                    fits = false;
                srow[l] = static_cast<long long>(s);
                zero = zero && s == 0;
            }
            return zero;
        };
        std::vector<IntRow> rows;
        IntRow srow{};
        if (substitute(chain.front().fast->strict.data(), srow))
            return false; // strict vanishes on the subspace
        srow[k] = 1;
        for (const ChainEntry& e : chain) {
            for (const IntRow& row : e.fast->rows) {
                IntRow sub{};
                substitute(row.data(), sub);
                rows.push_back(sub);
            }
        }
        rows.push_back(srow);
        if (fits)
            return detail::feasible_integer_rows(std::move(rows), k, false).has_value();
    }
    std::vector<const ConeRegion*> regions;
    regions.reserve(chain.size());
    for (const ChainEntry& e : chain)
        regions.push_back(e.region);
    return meets_vector_space_all(regions, vs);
}

/* Per-operand working set shared across all queries of one product. */
struct SweepContext {
    const Irva& a;
    PrefixCache& prefixes;
    std::map<int, IntBasis>& bases; // implicit state -> compiled basis

    const IntBasis& basis_of(int state) {
        auto it = bases.find(state);
        if (it == bases.end())
            it = bases.emplace(state, compile_basis(a.implicit_states[state].space)).first;
        return it->second;
    }
};

/* Collects the implicit states where strictly departing points of the
 * query cone terminate. The region under consideration is the chain's
 * intersection (the query cone first, then one prefix region per
 * traversed level). A state t reached through a branch is a destination
 * only if some cone point inside the branch region lies in VS(t):
 * exactly those points stop there. All other branch points continue
 * from t with a fresh variable change, so the sweep recurses through t
 * with the branch appended to the chain; destinations behind a
 * pass-through state are found that way. Spaces grow strictly along
 * implicit chains, which bounds the recursion depth.
 *
 * Each surviving branch carries a witness point; a child region whose
 * prefix constraints the witness already satisfies needs no fresh
 * feasibility run. */
void collect_destinations(SweepContext& ctx, int cur, std::vector<ChainEntry>& chain,
                          const SweepPoint& witness, int depth, std::set<int>& dest) {
    const Irva& a = ctx.a;
    if (depth > a.dim + 1)
        throw IrvaError("component query exceeded the dimension bound (corrupt structure)");
    const ImplicitState& st = a.implicit_states[cur];
    const int d = a.dim - st.space.dim();
    if (d == 0)
        return; // universal: every point stops here
    const BasisExtension& be = *st.extension;
    for (int i = 1; i <= d; ++i) {
        for (int face : {i, -i}) {
            auto it = st.trans.find(face);
            if (it == st.trans.end())
                continue; // incomplete structure; surfaces as Stuck in the caller
            // `branch` is the current prefix region of this face path; a
            // deeper prefix subsumes it, so the chain carries exactly one
            // entry per face path.
            std::vector<bool> bits;
            std::function<void(StateRef, const PrefixEntry&, const SweepPoint&)> walk =
                [&](StateRef t, const PrefixEntry& branch, const SweepPoint& w) {
                    if (t.is_implicit()) {
                        chain.push_back({&branch.region, &branch.fast});
                        const ImplicitState& hit = a.implicit_states[t.index()];
                        if (!dest.count(t.index()) &&
                            (hit.space.contains(w.exact) ||
                             chain_meets(chain, hit.space, ctx.basis_of(t.index()))))
                            dest.insert(t.index());
                        if (!hit.space.is_full())
                            collect_destinations(ctx, t.index(), chain, w, depth + 1, dest);
                        chain.pop_back();
                        return;
                    }
                    const ExplicitState& e = a.estate(t);
                    for (bool b : {false, true}) {
                        bits.push_back(b);
                        const PrefixEntry& prefix = cached_prefix(ctx.prefixes, be, cur, face, bits);
                        StateRef next = b ? e.succ1 : e.succ0;
                        if (point_in_region(prefix.region, prefix.fast, w, a.dim)) {
                            walk(next, prefix, w);
                        } else {
                            chain.push_back({&prefix.region, &prefix.fast});
                            auto w2 = chain_witness(chain, a.dim);
                            chain.pop_back();
                            if (w2)
                                walk(next, prefix, *w2);
                        }
                        bits.pop_back();
                    }
                };
            const PrefixEntry& prefix = cached_prefix(ctx.prefixes, be, cur, face, bits);
            if (point_in_region(prefix.region, prefix.fast, witness, a.dim)) {
                walk(it->second, prefix, witness);
            } else {
                chain.push_back({&prefix.region, &prefix.fast});
                auto w2 = chain_witness(chain, a.dim);
                chain.pop_back();
                if (w2)
                    walk(it->second, prefix, *w2);
            }
        }
    }
}

QueryResult mcc_impl(SweepContext& ctx, int q, const ConeRegion& cone, const IntRegion& cone_fast,
                     const std::vector<std::vector<bool>>& reach) {
    std::vector<ChainEntry> chain{{&cone, &cone_fast}};
    // Points of VS(q) inside the cone stop at q itself, which precedes
    // everything else reachable, so q is the unique minimum.
    if (chain_meets(chain, ctx.a.implicit_states[q].space, ctx.basis_of(q)))
        return QueryResult::isolated(q);
    std::set<int> dest;
    if (auto w = chain_witness(chain, ctx.a.dim))
        collect_destinations(ctx, q, chain, *w, 0, dest);
    if (dest.empty())
        return QueryResult::stuck();
    for (int u : dest) {
        bool least = true;
        for (int w : dest) {
            if (w != u && !reach[u][w]) {
                least = false;
                break;
            }
        }
        if (least)
            return QueryResult::isolated(u);
    }
    return QueryResult::not_isolated();
}

} // namespace

QueryResult minimal_covered_component(const Irva& a, int q, const ConeRegion& cone) {
    if (cone.ambient_dim != a.dim)
        throw std::invalid_argument("cone ambient dimension mismatch");
    if (q < 0 || q >= static_cast<int>(a.implicit_states.size()))
        throw std::invalid_argument("query state out of range");
    PrefixCache prefixes;
    std::map<int, IntBasis> bases;
    SweepContext ctx{a, prefixes, bases};
    return mcc_impl(ctx, q, cone, compile_region(cone), implicit_reachability(a));
}

namespace {

/* Renumber states into the canonical emission order. */
Irva canonicalize(const Irva& a) {
    std::vector<StateRef> order = canonical_order(a);
    std::map<int, StateRef> remap;
    int next_imp = 0, next_exp = 0;
    for (StateRef s : order) {
        if (s.is_implicit())
            remap[s.code()] = StateRef::implicit_at(next_imp++);
        else
            remap[s.code()] = StateRef::explicit_at(next_exp++);
    }
    Irva out;
    out.dim = a.dim;
    out.source = a.source;
    out.affine_dim = a.affine_dim;
    out.origin_formula = a.origin_formula;
    // Walking `order` again visits each kind in ascending new-index order.
    for (StateRef s : order) {
        if (s.is_implicit()) {
            ImplicitState copy = a.istate(s);
            for (auto& [sym, t] : copy.trans)
                t = remap.at(t.code());
            out.implicit_states.push_back(std::move(copy));
        } else {
            const ExplicitState& e = a.estate(s);
            out.explicit_states.push_back({remap.at(e.succ0.code()), remap.at(e.succ1.code())});
        }
    }
    out.initial = remap.at(a.initial.code());
    out.finalize();
    return out;
}

} // namespace

Irva combine(const Irva& a, const Irva& b, BoolOp op, const CombineOptions& opts) {
    if (a.dim != b.dim)
        throw std::invalid_argument("operand dimension mismatch");
    if (a.source != b.source || (a.source == SourceKind::Affine && a.affine_dim != b.affine_dim))
        throw std::invalid_argument("operand source kind mismatch");

    const auto reach_a = implicit_reachability(a);
    const auto reach_b = implicit_reachability(b);
    PrefixCache prefixes_a, prefixes_b;
    std::map<int, IntBasis> bases_a, bases_b;
    SweepContext ctx_a{a, prefixes_a, bases_a};
    SweepContext ctx_b{b, prefixes_b, bases_b};

    Irva out;
    out.dim = a.dim;
    out.source = a.source;
    out.affine_dim = a.affine_dim;

    std::map<std::pair<int, int>, int> memo;
    std::vector<std::pair<int, int>> keys;
    std::deque<int> worklist;

    auto product_state = [&](int qa, int qb) {
        auto key = std::make_pair(qa, qb);
        auto it = memo.find(key);
        if (it != memo.end())
            return it->second;
        VectorSpace vs = a.implicit_states[qa].space.intersect(b.implicit_states[qb].space);
        bool in = apply_bool_op(op, a.implicit_states[qa].polarity == Polarity::In,
                                b.implicit_states[qb].polarity == Polarity::In);
        int idx = static_cast<int>(out.implicit_states.size());
        std::optional<BasisExtension> ext;
        if (!vs.is_full())
            ext = extend_basis(vs);
        out.implicit_states.push_back({std::move(vs), in ? Polarity::In : Polarity::Out, {}, std::move(ext)});
        memo.emplace(key, idx);
        keys.push_back(key);
        worklist.push_back(idx);
        return idx;
    };

    // Explores one prefix of the decision structure leaving product
    // state s: if the prefix region isolates minimal components in both
    // operands whose joint space genuinely grows and still meets the
    // region, it resolves to the memoized product state; otherwise an
    // explicit state splits the prefix further.
    std::function<StateRef(int, const BasisExtension&, int, std::vector<bool>&)> explore =
        [&](int s, const BasisExtension& be, int face, std::vector<bool>& bits) -> StateRef {
        if (static_cast<int>(bits.size()) > opts.depth_cap) {
            std::ostringstream msg;
            msg << "refinement depth cap (" << opts.depth_cap << ") exceeded at product state " << s
                << ", face " << face;
            throw DepthCapExceeded(msg.str());
        }
        ConeRegion region = region_from_prefix(be, face, bits);
        IntRegion region_fast = compile_region(region);
        const auto [qa, qb] = keys[s];
        QueryResult r1 = mcc_impl(ctx_a, qa, region, region_fast, reach_a);
        if (r1.kind == QueryResult::Kind::Stuck)
            throw IrvaError("covered-component query got stuck on a corrupt operand");
        if (r1.kind == QueryResult::Kind::Isolated) {
            QueryResult r2 = mcc_impl(ctx_b, qb, region, region_fast, reach_b);
            if (r2.kind == QueryResult::Kind::Stuck)
                throw IrvaError("covered-component query got stuck on a corrupt operand");
            if (r2.kind == QueryResult::Kind::Isolated) {
                VectorSpace joint =
                    a.implicit_states[r1.state].space.intersect(b.implicit_states[r2.state].space);
                if (joint.dim() > out.implicit_states[s].space.dim() &&
                    meets_vector_space(region, joint))
                    return StateRef::implicit_at(product_state(r1.state, r2.state));
            }
        }
        if (be.residual_dim() == 1)
            throw IrvaError("cannot refine a one-dimensional residual (corrupt operands)");
        int e = static_cast<int>(out.explicit_states.size());
        out.explicit_states.push_back({});
        bits.push_back(false);
        StateRef s0 = explore(s, be, face, bits);
        bits.back() = true;
        StateRef s1 = explore(s, be, face, bits);
        bits.pop_back();
        out.explicit_states[e] = {s0, s1};
        return StateRef::explicit_at(e);
    };

    out.initial = StateRef::implicit_at(product_state(a.initial.index(), b.initial.index()));
    while (!worklist.empty()) {
        int s = worklist.front();
        worklist.pop_front();
        int d = out.dim - out.implicit_states[s].space.dim();
        if (d == 0)
            continue;
        // Copy: product_state may grow the state vector during explore.
        BasisExtension be = *out.implicit_states[s].extension;
        for (int i = 1; i <= d; ++i) {
            for (int face : {i, -i}) {
                std::vector<bool> bits;
                StateRef target = explore(s, be, face, bits);
                out.implicit_states[s].trans[face] = target;
            }
        }
    }

    out.finalize();
    return opts.minimize_result ? minimize(out) : out;
}

namespace {

struct Redirects {
    std::vector<int> imp; // implicit index -> resolved state code
    std::vector<int> exp;

    explicit Redirects(const Irva& a) {
        imp.resize(a.implicit_states.size());
        exp.resize(a.explicit_states.size());
        for (size_t i = 0; i < imp.size(); ++i)
            imp[i] = StateRef::implicit_at(static_cast<int>(i)).code();
        for (size_t i = 0; i < exp.size(); ++i)
            exp[i] = StateRef::explicit_at(static_cast<int>(i)).code();
    }

    StateRef find(StateRef s) {
        int& slot = s.is_implicit() ? imp[s.index()] : exp[s.index()];
        StateRef target = slot >= 0 ? StateRef::implicit_at(slot) : StateRef::explicit_at(~slot);
        if (target == s)
            return s;
        StateRef root = find(target);
        slot = root.code();
        return root;
    }

    void merge(StateRef from, StateRef into) {
        int& slot = from.is_implicit() ? imp[from.index()] : exp[from.index()];
        slot = into.code();
    }
};

template <typename Fn>
void for_each_resolved_edge(const Irva& a, Redirects& rd, StateRef s, Fn&& fn) {
    if (s.is_implicit()) {
        const ImplicitState& st = a.istate(s);
        int d = a.dim - st.space.dim();
        for (int i = 1; i <= d; ++i) {
            for (int sym : {i, -i}) {
                auto it = st.trans.find(sym);
                if (it != st.trans.end())
                    fn(sym, rd.find(it->second));
            }
        }
    } else {
        const ExplicitState& st = a.estate(s);
        fn(0, rd.find(st.succ0));
        fn(1, rd.find(st.succ1));
    }
}

/* Reachable states from the (resolved) initial state, in DFS post-order:
 * every state appears after all of its successors. */
std::vector<StateRef> reachable_postorder(const Irva& a, Redirects& rd, StateRef init) {
    std::vector<StateRef> order;
    std::set<int> seen;
    std::function<void(StateRef)> dfs = [&](StateRef s) {
        if (!seen.insert(s.code()).second)
            return;
        for_each_resolved_edge(a, rd, s, [&](int, StateRef t) { dfs(t); });
        order.push_back(s);
    };
    dfs(init);
    return order;
}

} // namespace

Irva minimize(const Irva& a) {
    Irva work = a;
    Redirects rd(work);

    // Memoized implicit-closure over resolved edges; invalidated after
    // every structural change.
    std::map<int, std::set<int>> closure;
    std::function<const std::set<int>&(StateRef)> impl_closure = [&](StateRef s) -> const std::set<int>& {
        auto it = closure.find(s.code());
        if (it != closure.end())
            return it->second;
        std::set<int> acc;
        for_each_resolved_edge(work, rd, s, [&](int, StateRef t) {
            if (t.is_implicit())
                acc.insert(t.index());
            const std::set<int>& sub = impl_closure(t);
            acc.insert(sub.begin(), sub.end());
        });
        return closure.emplace(s.code(), std::move(acc)).first->second;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        closure.clear();
        StateRef init = rd.find(work.initial);
        std::vector<StateRef> bottom_up = reachable_postorder(work, rd, init);

        // Rule 1: merge indistinguishable states. Successors are already
        // canonical when a state is processed, so one bottom-up pass
        // catches every merge this round.
        std::map<std::string, StateRef> seen;
        for (StateRef s : bottom_up) {
            if (rd.find(s) != s)
                continue;
            std::ostringstream sig;
            if (s.is_implicit()) {
                const ImplicitState& st = work.istate(s);
                sig << "I " << (st.polarity == Polarity::In ? "in" : "out") << " " << st.space.dim();
                for (int r = 0; r < st.space.dim(); ++r)
                    for (int c = 0; c < work.dim; ++c)
                        sig << " " << st.space.basis().at(r, c).str();
            } else {
                sig << "E";
            }
            for_each_resolved_edge(work, rd, s, [&](int sym, StateRef t) { sig << " " << sym << ":" << t.code(); });
            auto [it, fresh] = seen.emplace(sig.str(), s);
            if (!fresh) {
                rd.merge(s, it->second);
                changed = true;
            }
        }
        if (changed)
            continue;

        // Rule 2: absorb a state into a direct implicit successor that
        // already dominates every component reachable from it.
        //
        // Explicit states are absorbed only as pure pass-throughs (both
        // successors equal the target): removing a node whose bit still
        // mattered would shift the round-robin coordinate alignment of
        // every later bit.
        //
        // An implicit state s is absorbed into s1 only if, additionally,
        // every decision branch of s that some point of VS(s1) can take
        // ends at a state that answers pol(s1) for it. The reachability
        // condition alone does not give this: s may be a genuine
        // component whose surrounding space VS(s1) continues into
        // differently-polarized components.
        auto implicit_absorb_ok = [&](StateRef s, StateRef t) {
            const ImplicitState& ss = work.istate(s);
            const ImplicitState& tt = work.implicit_states[t.index()];
            if (ss.polarity != tt.polarity)
                return false;
            const std::set<int>& from_s = impl_closure(s);
            const std::set<int>& from_t = impl_closure(t);
            for (int w : from_s)
                if (w != t.index() && !from_t.count(w))
                    return false;
            // Branch test: a maximal prefix whose region meets VS(t)
            // strictly must first-hit a state that keeps VS(t) inside
            // with the same polarity.
            const BasisExtension& be = *ss.extension;
            int d = work.dim - ss.space.dim();
            for (int i = 1; i <= d; ++i) {
                for (int face : {i, -i}) {
                    auto it = ss.trans.find(face);
                    if (it == ss.trans.end())
                        return false;
                    std::vector<bool> bits;
                    std::function<bool(StateRef)> branch_ok = [&](StateRef cur) {
                        cur = rd.find(cur);
                        if (cur.is_implicit()) {
                            ConeRegion region = region_from_prefix(be, face, bits);
                            if (!meets_vector_space(region, tt.space))
                                return true; // no VS(t) point departs through here
                            const ImplicitState& hit = work.implicit_states[cur.index()];
                            return hit.polarity == tt.polarity && hit.space.contains(tt.space);
                        }
                        const ExplicitState& e = work.estate(cur);
                        for (bool b : {false, true}) {
                            bits.push_back(b);
                            bool ok = branch_ok(b ? e.succ1 : e.succ0);
                            bits.pop_back();
                            if (!ok)
                                return false;
                        }
                        return true;
                    };
                    if (!branch_ok(it->second))
                        return false;
                }
            }
            return true;
        };

        for (StateRef s : bottom_up) {
            if (rd.find(s) != s)
                continue;
            StateRef absorb_into;
            bool found = false;
            if (s.is_explicit()) {
                const ExplicitState& e = work.estate(s);
                StateRef t0 = rd.find(e.succ0), t1 = rd.find(e.succ1);
                if (t0 == t1 && t0.is_implicit()) {
                    absorb_into = t0;
                    found = true;
                }
            } else {
                for_each_resolved_edge(work, rd, s, [&](int, StateRef t) {
                    if (found || !t.is_implicit() || t == s)
                        return;
                    if (implicit_absorb_ok(s, t)) {
                        absorb_into = t;
                        found = true;
                    }
                });
            }
            if (found) {
                rd.merge(s, absorb_into);
                changed = true;
                break; // reach sets are stale now; recompute
            }
        }
    }

    // Rebuild only the reachable part, then renumber canonically.
    StateRef init = rd.find(work.initial);
    std::vector<StateRef> keep = reachable_postorder(work, rd, init);
    std::map<int, StateRef> remap;
    Irva out;
    out.dim = work.dim;
    out.source = work.source;
    out.affine_dim = work.affine_dim;
    out.origin_formula = work.origin_formula;
    for (StateRef s : keep) {
        if (s.is_implicit())
            remap[s.code()] = StateRef::implicit_at(static_cast<int>(out.implicit_states.size()));
        else
            remap[s.code()] = StateRef::explicit_at(static_cast<int>(out.explicit_states.size()));
        if (s.is_implicit())
            out.implicit_states.push_back(work.istate(s));
        else
            out.explicit_states.push_back(work.estate(s));
    }
    for (auto& st : out.implicit_states)
        for (auto& [sym, t] : st.trans)
            t = remap.at(rd.find(t).code());
    for (auto& st : out.explicit_states) {
        st.succ0 = remap.at(rd.find(st.succ0).code());
        st.succ1 = remap.at(rd.find(st.succ1).code());
    }
    out.initial = remap.at(init.code());
    out.finalize();
    return canonicalize(out);
}

bool isomorphic(const Irva& a, const Irva& b) {
    if (a.dim != b.dim || a.source != b.source)
        return false;
    if (a.source == SourceKind::Affine && a.affine_dim != b.affine_dim)
        return false;

    std::map<int, int> fwd, bwd;
    std::deque<std::pair<StateRef, StateRef>> queue;
    auto pair_up = [&](StateRef x, StateRef y) {
        if (x.is_implicit() != y.is_implicit())
            return false;
        auto fit = fwd.find(x.code());
        auto bit = bwd.find(y.code());
        if (fit != fwd.end() || bit != bwd.end())
            return fit != fwd.end() && bit != bwd.end() && fit->second == y.code() && bit->second == x.code();
        fwd[x.code()] = y.code();
        bwd[y.code()] = x.code();
        queue.emplace_back(x, y);
        return true;
    };
    if (!pair_up(a.initial, b.initial))
        return false;
    while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        if (x.is_implicit()) {
            const ImplicitState& sx = a.istate(x);
            const ImplicitState& sy = b.istate(y);
            if (sx.polarity != sy.polarity || !(sx.space == sy.space))
                return false;
            if (sx.trans.size() != sy.trans.size())
                return false;
            for (const auto& [sym, tx] : sx.trans) {
                auto it = sy.trans.find(sym);
                if (it == sy.trans.end() || !pair_up(tx, it->second))
                    return false;
            }
        } else {
            const ExplicitState& sx = a.estate(x);
            const ExplicitState& sy = b.estate(y);
            if (!pair_up(sx.succ0, sy.succ0) || !pair_up(sx.succ1, sy.succ1))
                return false;
        }
    }
    // The correspondence must be a bijection on all states.
    return fwd.size() == a.implicit_states.size() + a.explicit_states.size() &&
           bwd.size() == b.implicit_states.size() + b.explicit_states.size();
}

bool is_empty(const Irva& a) {
    Irva m = minimize(a);
    for (const auto& s : m.implicit_states)
        if (s.polarity == Polarity::In)
            return false;
    return true;
}

bool is_universal(const Irva& a) {
    Irva m = minimize(a);
    for (const auto& s : m.implicit_states)
        if (s.polarity == Polarity::Out)
            return false;
    return true;
}

bool equal(const Irva& a, const Irva& b) {
    return isomorphic(minimize(a), minimize(b));
}

bool subset(const Irva& a, const Irva& b) {
    return is_empty(combine(a, complement(b), BoolOp::And));
}

namespace {

Irva fold_formula(const Formula& f, const BuildOptions& opts) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
        return const_irva(f.dim(), f.kind() == Formula::Kind::True);
    case Formula::Kind::Atom: {
        const LinearConstraint& c = f.constraint();
        if (c.coeffs.is_zero())
            return const_irva(f.dim(), cmp_holds(Rational(0), c.op, c.bound));
        if (!c.bound.is_zero())
            throw std::invalid_argument("conical build requires homogeneous atoms");
        return atom_irva(c.coeffs, c.op, f.dim());
    }
    case Formula::Kind::Not:
        return complement(fold_formula(f.child(), opts));
    case Formula::Kind::And:
    case Formula::Kind::Or:
        return combine(fold_formula(f.left(), opts), fold_formula(f.right(), opts),
                       f.kind() == Formula::Kind::And ? BoolOp::And : BoolOp::Or,
                       {opts.depth_cap, opts.minimize});
    }
    throw std::logic_error("unreachable");
}

} // namespace

Irva build(const Formula& f, const BuildOptions& opts) {
    Irva out = fold_formula(conify(f), opts);
    out.source = SourceKind::Affine;
    out.affine_dim = f.dim();
    return out;
}

Irva build_cone(const Formula& f, const BuildOptions& opts) {
    return fold_formula(f, opts);
}

} // namespace irva
