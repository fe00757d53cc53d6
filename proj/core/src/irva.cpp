// SPDX-License-Identifier: Apache-2.0
#include "irva/irva.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace irva {

void Irva::finalize() {
    for (auto& s : implicit_states) {
        if (s.space.is_full())
            s.extension.reset();
        else if (!s.extension)
            s.extension = extend_basis(s.space);
    }
}

const char* violation_name(ViolationKind k) {
    switch (k) {
    case ViolationKind::InitialNotImplicit: return "InitialNotImplicit";
    case ViolationKind::DanglingTarget: return "DanglingTarget";
    case ViolationKind::IncompleteTransitions: return "IncompleteTransitions";
    case ViolationKind::Cycle: return "Cycle";
    case ViolationKind::NonIncreasingSpace: return "NonIncreasingSpace";
    case ViolationKind::UnreachableState: return "UnreachableState";
    }
    return "?";
}

ValidationError::ValidationError(std::vector<Violation> vs)
    : IrvaError([&vs] {
          std::string m = "invalid IRVA:";
          for (const auto& v : vs) {
              m += " ";
              m += violation_name(v.kind);
              m += "(" + v.detail + ")";
          }
          return m;
      }()),
      violations(std::move(vs)) {}

namespace {

bool ref_exists(const Irva& a, StateRef r) {
    if (r.is_implicit())
        return r.index() >= 0 && r.index() < static_cast<int>(a.implicit_states.size());
    return r.index() >= 0 && r.index() < static_cast<int>(a.explicit_states.size());
}

std::string ref_name(StateRef r) {
    return (r.is_implicit() ? "i" : "e") + std::to_string(r.index());
}

template <typename Fn>
void for_each_edge(const Irva& a, StateRef s, Fn&& fn) {
    if (s.is_implicit()) {
        const ImplicitState& st = a.istate(s);
        int d = a.dim - st.space.dim();
        for (int i = 1; i <= d; ++i) {
            for (int sym : {i, -i}) {
                auto it = st.trans.find(sym);
                if (it != st.trans.end())
                    fn(it->second);
            }
        }
        // Stray symbols outside 1..d still count as edges for traversals.
        for (const auto& [sym, t] : st.trans)
            if (sym > d || sym < -d || sym == 0)
                fn(t);
    } else {
        const ExplicitState& st = a.estate(s);
        fn(st.succ0);
        fn(st.succ1);
    }
}

} // namespace

std::vector<Violation> validate(const Irva& a) {
    std::vector<Violation> out;
    if (a.dim < 1) {
        out.push_back({ViolationKind::DanglingTarget, "dimension must be positive"});
        return out;
    }
    if (!a.initial.is_implicit() || !ref_exists(a, a.initial)) {
        out.push_back({ViolationKind::InitialNotImplicit, "initial state " + ref_name(a.initial)});
        return out;
    }

    bool targets_ok = true;
    for (size_t i = 0; i < a.implicit_states.size(); ++i) {
        const ImplicitState& s = a.implicit_states[i];
        int d = a.dim - s.space.dim();
        for (int k = 1; k <= d; ++k) {
            for (int sym : {k, -k}) {
                if (!s.trans.count(sym))
                    out.push_back({ViolationKind::IncompleteTransitions,
                                   "i" + std::to_string(i) + " lacks symbol " + std::to_string(sym)});
            }
        }
        for (const auto& [sym, t] : s.trans) {
            if (sym == 0 || sym > d || sym < -d)
                out.push_back({ViolationKind::IncompleteTransitions,
                               "i" + std::to_string(i) + " has stray symbol " + std::to_string(sym)});
            if (!ref_exists(a, t)) {
                out.push_back({ViolationKind::DanglingTarget, "i" + std::to_string(i) + " -> missing state"});
                targets_ok = false;
            }
        }
    }
    for (size_t i = 0; i < a.explicit_states.size(); ++i) {
        for (StateRef t : {a.explicit_states[i].succ0, a.explicit_states[i].succ1}) {
            if (!ref_exists(a, t)) {
                out.push_back({ViolationKind::DanglingTarget, "e" + std::to_string(i) + " -> missing state"});
                targets_ok = false;
            }
        }
    }
    if (!targets_ok)
        return out;

    // Cycle detection over the full transition relation.
    enum { White, Grey, Black };
    std::map<int, int> color;
    bool cyclic = false;
    std::function<void(StateRef)> dfs = [&](StateRef s) {
        int& c = color[s.code()];
        if (c == Grey) {
            cyclic = true;
            return;
        }
        if (c == Black)
            return;
        c = Grey;
        for_each_edge(a, s, [&](StateRef t) {
            if (!cyclic)
                dfs(t);
        });
        c = Black;
    };
    for (size_t i = 0; i < a.implicit_states.size() && !cyclic; ++i)
        dfs(StateRef::implicit_at(static_cast<int>(i)));
    for (size_t i = 0; i < a.explicit_states.size() && !cyclic; ++i)
        dfs(StateRef::explicit_at(static_cast<int>(i)));
    if (cyclic) {
        out.push_back({ViolationKind::Cycle, "transition relation is not acyclic"});
        return out;
    }

    // Strict growth of vector spaces between implicit states: check each
    // implicit state against every implicit state it can reach.
    std::map<int, std::vector<int>> reach; // state code -> reachable implicit indexes
    std::function<const std::vector<int>&(StateRef)> impl_reach = [&](StateRef s) -> const std::vector<int>& {
        auto it = reach.find(s.code());
        if (it != reach.end())
            return it->second;
        std::vector<int> acc;
        for_each_edge(a, s, [&](StateRef t) {
            if (t.is_implicit())
                acc.push_back(t.index());
            const std::vector<int>& sub = impl_reach(t);
            acc.insert(acc.end(), sub.begin(), sub.end());
        });
        std::sort(acc.begin(), acc.end());
        acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
        return reach.emplace(s.code(), std::move(acc)).first->second;
    };
    for (size_t i = 0; i < a.implicit_states.size(); ++i) {
        const VectorSpace& lo = a.implicit_states[i].space;
        for (int j : impl_reach(StateRef::implicit_at(static_cast<int>(i)))) {
            const VectorSpace& hi = a.implicit_states[j].space;
            if (hi.dim() <= lo.dim() || !hi.contains(lo))
                out.push_back({ViolationKind::NonIncreasingSpace,
                               "i" + std::to_string(i) + " reaches i" + std::to_string(j)});
        }
    }

    // Reachability from the initial state.
    std::map<int, bool> seen;
    std::function<void(StateRef)> mark = [&](StateRef s) {
        if (seen[s.code()])
            return;
        seen[s.code()] = true;
        for_each_edge(a, s, [&](StateRef t) { mark(t); });
    };
    mark(a.initial);
    for (size_t i = 0; i < a.implicit_states.size(); ++i)
        if (!seen[StateRef::implicit_at(static_cast<int>(i)).code()])
            out.push_back({ViolationKind::UnreachableState, "i" + std::to_string(i)});
    for (size_t i = 0; i < a.explicit_states.size(); ++i)
        if (!seen[StateRef::explicit_at(static_cast<int>(i)).code()])
            out.push_back({ViolationKind::UnreachableState, "e" + std::to_string(i)});
    return out;
}

bool DirectionEncoding::next_bit() {
    Rational& t = offsets[cursor];
    cursor = (cursor + 1) % offsets.size();
    Rational half(1, 2);
    bool bit;
    if (t > half)
        bit = true;
    else if (t < half)
        bit = false;
    else
        bit = ties_to_one;
    // Rescale the interval half onto [0,1].
    t = t + t;
    if (bit)
        t -= Rational(1);
    return bit;
}

std::vector<int> candidate_faces(const RVector& z) {
    Rational best;
    for (int i = 0; i < z.dim(); ++i) {
        Rational m = z[i].abs();
        if (m > best)
            best = m;
    }
    std::vector<int> faces;
    if (best.is_zero())
        return faces;
    for (int i = 0; i < z.dim(); ++i)
        if (z[i].abs() == best)
            faces.push_back(z[i].sign() > 0 ? i + 1 : -(i + 1));
    return faces;
}

DirectionEncoding encode_direction(const RVector& z, const EncodingPolicy& policy) {
    std::vector<int> faces = candidate_faces(z);
    if (faces.empty())
        throw std::invalid_argument("cannot encode the zero vector");
    int face = faces[policy.face_choice % static_cast<int>(faces.size())];
    int i = face > 0 ? face : -face;

    DirectionEncoding enc;
    enc.face = face;
    enc.ties_to_one = policy.ties_to_one;
    // Normalized form [z] = z / (2 max |z_k|) puts the face coordinate at
    // +-1/2; dropping it and offsetting by 1/2 maps the rest into [0,1].
    Rational scale = Rational(1) / (Rational(2) * z[i - 1].abs());
    Rational half(1, 2);
    for (int j = 0; j < z.dim(); ++j) {
        if (j == i - 1)
            continue;
        enc.offsets.push_back(z[j] * scale + half);
    }
    return enc;
}

namespace {

bool decide_in_cone(const Irva& a, const RVector& v, const EncodingPolicy& policy) {
    if (v.dim() != a.dim)
        throw std::invalid_argument("point dimension mismatch");
    StateRef ref = a.initial;
    size_t guard = a.implicit_states.size() + 1;
    while (guard--) {
        const ImplicitState& s = a.istate(ref);
        if (s.space.contains(v))
            return s.polarity == Polarity::In;
        if (!s.extension)
            throw IrvaError("implicit state with a full space cannot be departed");
        DirectionEncoding enc = encode_direction(s.extension->residual_coords(v), policy);
        auto it = s.trans.find(enc.face);
        if (it == s.trans.end())
            throw IrvaError("missing transition for face symbol " + std::to_string(enc.face));
        StateRef t = it->second;
        while (t.is_explicit()) {
            if (!enc.has_bits())
                throw IrvaError("explicit state reached with an empty bit stream");
            const ExplicitState& e = a.estate(t);
            t = enc.next_bit() ? e.succ1 : e.succ0;
        }
        ref = t;
    }
    throw IrvaError("membership walk did not terminate (corrupt structure)");
}

} // namespace

bool decide_member(const Irva& a, const RVector& v, const EncodingPolicy& policy) {
    if (a.source != SourceKind::Conical)
        throw std::invalid_argument("decide_member requires a conical IRVA; use decide_member_affine");
    return decide_in_cone(a, v, policy);
}

bool decide_member_affine(const Irva& a, const RVector& v, const EncodingPolicy& policy) {
    if (a.source != SourceKind::Affine)
        throw std::invalid_argument("decide_member_affine requires an affine-sourced IRVA");
    if (v.dim() != a.affine_dim)
        throw std::invalid_argument("point dimension mismatch");
    RVector w(a.dim);
    for (int i = 0; i < v.dim(); ++i)
        w[i] = v[i];
    w[a.dim - 1] = Rational(1);
    return decide_in_cone(a, w, policy);
}

std::vector<StateRef> canonical_order(const Irva& a) {
    // Discovery pass: BFS with the fixed edge order +1,-1,+2,-2,... / 0,1.
    std::map<int, int> discovery;
    std::vector<StateRef> queue{a.initial};
    discovery[a.initial.code()] = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        StateRef s = queue[head];
        for_each_edge(a, s, [&](StateRef t) {
            if (discovery.emplace(t.code(), static_cast<int>(queue.size())).second)
                queue.push_back(t);
        });
    }
    // Longest-path depth from the initial state (the relation is acyclic).
    std::map<int, int> depth;
    for (StateRef s : queue)
        depth[s.code()] = 0;
    std::function<void(StateRef)> relax = [&](StateRef s) {
        for_each_edge(a, s, [&](StateRef t) {
            if (depth[t.code()] < depth[s.code()] + 1) {
                depth[t.code()] = depth[s.code()] + 1;
                relax(t);
            }
        });
    };
    relax(a.initial);

    std::vector<StateRef> order = queue;
    std::stable_sort(order.begin(), order.end(), [&](StateRef x, StateRef y) {
        int dx = depth[x.code()], dy = depth[y.code()];
        if (dx != dy)
            return dx < dy;
        if (x.is_explicit() != y.is_explicit())
            return y.is_explicit();
        return discovery[x.code()] < discovery[y.code()];
    });
    return order;
}

std::string serialize(const Irva& a) {
    std::vector<StateRef> order = canonical_order(a);
    std::map<int, int> id;
    for (size_t i = 0; i < order.size(); ++i)
        id[order[i].code()] = static_cast<int>(i);

    std::ostringstream out;
    out << "IRVA v1\n";
    if (a.origin_formula)
        out << "# formula: " << *a.origin_formula << "\n";
    out << "dim " << a.dim << "\n";
    if (a.source == SourceKind::Conical)
        out << "source conical\n";
    else
        out << "source affine " << a.affine_dim << "\n";
    out << "initial " << id.at(a.initial.code()) << "\n";

    for (StateRef s : order) {
        if (s.is_implicit()) {
            const ImplicitState& st = a.istate(s);
            out << "implicit " << id.at(s.code()) << " " << (st.polarity == Polarity::In ? "in" : "out")
                << " dim " << st.space.dim() << "\n";
            for (int r = 0; r < st.space.dim(); ++r) {
                for (int c = 0; c < a.dim; ++c)
                    out << (c ? " " : "") << st.space.basis().at(r, c).str();
                out << "\n";
            }
        } else {
            const ExplicitState& st = a.estate(s);
            out << "explicit " << id.at(s.code()) << " 0:" << id.at(st.succ0.code())
                << " 1:" << id.at(st.succ1.code()) << "\n";
        }
    }
    for (StateRef s : order) {
        if (!s.is_implicit())
            continue;
        const ImplicitState& st = a.istate(s);
        int d = a.dim - st.space.dim();
        for (int i = 1; i <= d; ++i) {
            for (int sym : {i, -i}) {
                auto it = st.trans.find(sym);
                if (it == st.trans.end())
                    continue;
                out << "itrans " << id.at(s.code()) << " " << (sym > 0 ? "+" : "") << sym << " "
                    << id.at(it->second.code()) << "\n";
            }
        }
    }
    return out.str();
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

Rational parse_rational_or_throw(const std::string& tok, int lineno) {
    auto r = Rational::parse(tok);
    if (!r)
        throw IrvaError("line " + std::to_string(lineno) + ": bad rational '" + tok + "'");
    return *r;
}

} // namespace

Irva deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::optional<std::string> origin;

    auto next_line = [&](std::string& out) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.rfind("# formula: ", 0) == 0) {
                if (!origin)
                    origin = line.substr(11);
                continue;
            }
            if (line.empty() || line[0] == '#')
                continue;
            out = line;
            return true;
        }
        return false;
    };

    auto fail = [&](const std::string& msg) -> IrvaError {
        return IrvaError("line " + std::to_string(lineno) + ": " + msg);
    };

    std::string cur;
    if (!next_line(cur) || cur != "IRVA v1")
        throw fail("expected 'IRVA v1' header");

    Irva a;
    bool have_dim = false, have_source = false, have_initial = false;
    int initial_file_id = -1;

    struct FileImplicit {
        Polarity pol;
        std::vector<RVector> rows;
        std::map<int, int> trans; // symbol -> file id
    };
    std::map<int, FileImplicit> implicits;
    std::map<int, std::pair<int, int>> explicits; // file id -> (succ0, succ1)
    std::vector<std::tuple<int, int, int>> itrans; // (implicit file id, symbol, target)

    auto to_int = [&](const std::string& tok) {
        try {
            size_t pos = 0;
            int v = std::stoi(tok, &pos);
            if (pos != tok.size())
                throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw fail("bad integer '" + tok + "'");
        }
    };

    while (next_line(cur)) {
        std::vector<std::string> t = split_ws(cur);
        if (t.empty())
            continue;
        if (t[0] == "dim") {
            if (t.size() != 2)
                throw fail("dim expects one argument");
            a.dim = to_int(t[1]);
            if (a.dim < 1)
                throw fail("dimension must be positive");
            have_dim = true;
        } else if (t[0] == "source") {
            if (t.size() == 2 && t[1] == "conical") {
                a.source = SourceKind::Conical;
            } else if (t.size() == 3 && t[1] == "affine") {
                a.source = SourceKind::Affine;
                a.affine_dim = to_int(t[2]);
            } else {
                throw fail("source must be 'conical' or 'affine <k>'");
            }
            have_source = true;
        } else if (t[0] == "initial") {
            if (t.size() != 2)
                throw fail("initial expects one argument");
            initial_file_id = to_int(t[1]);
            have_initial = true;
        } else if (t[0] == "implicit") {
            if (!have_dim)
                throw fail("implicit state before dim");
            if (t.size() != 5 || t[3] != "dim")
                throw fail("implicit expects '<id> <in|out> dim <m>'");
            int id = to_int(t[1]);
            Polarity pol;
            if (t[2] == "in")
                pol = Polarity::In;
            else if (t[2] == "out")
                pol = Polarity::Out;
            else
                throw fail("polarity must be 'in' or 'out'");
            int m = to_int(t[4]);
            if (m < 0 || m > a.dim)
                throw fail("basis dimension out of range");
            FileImplicit fi{pol, {}, {}};
            for (int r = 0; r < m; ++r) {
                std::string row_line;
                if (!next_line(row_line))
                    throw fail("missing basis row");
                std::vector<std::string> toks = split_ws(row_line);
                if (static_cast<int>(toks.size()) != a.dim)
                    throw fail("basis row needs " + std::to_string(a.dim) + " entries");
                RVector row(a.dim);
                for (int c = 0; c < a.dim; ++c)
                    row[c] = parse_rational_or_throw(toks[c], lineno);
                fi.rows.push_back(std::move(row));
            }
            if (!implicits.emplace(id, std::move(fi)).second)
                throw fail("duplicate implicit id " + std::to_string(id));
        } else if (t[0] == "explicit") {
            if (t.size() != 4 || t[2].rfind("0:", 0) != 0 || t[3].rfind("1:", 0) != 0)
                throw fail("explicit expects '<id> 0:<id> 1:<id>'");
            int id = to_int(t[1]);
            int s0 = to_int(t[2].substr(2));
            int s1 = to_int(t[3].substr(2));
            if (!explicits.emplace(id, std::make_pair(s0, s1)).second)
                throw fail("duplicate explicit id " + std::to_string(id));
        } else if (t[0] == "itrans") {
            if (t.size() != 4)
                throw fail("itrans expects '<id> <+-i> <id>'");
            std::string sym = t[2];
            if (!sym.empty() && sym[0] == '+')
                sym.erase(0, 1);
            itrans.emplace_back(to_int(t[1]), to_int(sym), to_int(t[3]));
        } else {
            throw fail("unknown directive '" + t[0] + "'");
        }
    }
    if (!have_dim)
        throw IrvaError("missing 'dim' line");
    if (!have_source)
        throw IrvaError("missing 'source' line");
    if (!have_initial)
        throw IrvaError("missing 'initial' line");
    a.origin_formula = origin;
    if (a.source == SourceKind::Affine && a.affine_dim != a.dim - 1)
        throw IrvaError("affine source dimension must be dim - 1");

    // File ids -> internal references.
    std::map<int, StateRef> refs;
    for (const auto& [id, fi] : implicits) {
        refs.emplace(id, StateRef::implicit_at(static_cast<int>(a.implicit_states.size())));
        VectorSpace space = VectorSpace::from_generators(fi.rows, a.dim);
        if (space.dim() != static_cast<int>(fi.rows.size()) ||
            (space.dim() && space.basis() != RMatrix::from_rows(fi.rows, a.dim)))
            throw IrvaError("implicit " + std::to_string(id) + ": basis is not in canonical reduced form");
        a.implicit_states.push_back({std::move(space), fi.pol, {}, std::nullopt});
    }
    for (const auto& [id, succ] : explicits) {
        if (implicits.count(id))
            throw IrvaError("id " + std::to_string(id) + " used for both state kinds");
        refs.emplace(id, StateRef::explicit_at(static_cast<int>(a.explicit_states.size())));
        a.explicit_states.push_back({});
    }
    auto lookup = [&](int id) {
        auto it = refs.find(id);
        if (it == refs.end())
            throw IrvaError("reference to unknown state id " + std::to_string(id));
        return it->second;
    };
    for (const auto& [id, succ] : explicits) {
        ExplicitState& e = a.explicit_states[refs.at(id).index()];
        e.succ0 = lookup(succ.first);
        e.succ1 = lookup(succ.second);
    }
    for (const auto& [src, sym, dst] : itrans) {
        auto it = implicits.find(src);
        if (it == implicits.end())
            throw IrvaError("itrans from unknown implicit id " + std::to_string(src));
        ImplicitState& s = a.implicit_states[refs.at(src).index()];
        if (!s.trans.emplace(sym, lookup(dst)).second)
            throw IrvaError("duplicate itrans symbol " + std::to_string(sym) + " on id " + std::to_string(src));
    }
    if (!lookup(initial_file_id).is_implicit())
        throw IrvaError("initial state must be implicit");
    a.initial = lookup(initial_file_id);

    std::vector<Violation> vs = validate(a);
    if (!vs.empty())
        throw ValidationError(std::move(vs));
    a.finalize();
    return a;
}

IrvaStats stats(const Irva& a) {
    IrvaStats st;
    st.implicit_count = static_cast<int>(a.implicit_states.size());
    st.explicit_count = static_cast<int>(a.explicit_states.size());
    st.transition_count = 2 * st.explicit_count;
    for (const auto& s : a.implicit_states) {
        st.transition_count += static_cast<int>(s.trans.size());
        ++(s.polarity == Polarity::In ? st.in_count : st.out_count);
        ++st.by_dimension[s.space.dim()];
    }
    return st;
}

std::string to_dot(const Irva& a) {
    std::vector<StateRef> order = canonical_order(a);
    std::map<int, int> id;
    for (size_t i = 0; i < order.size(); ++i)
        id[order[i].code()] = static_cast<int>(i);

    std::ostringstream out;
    out << "digraph irva {\n  rankdir=TB;\n";
    for (StateRef s : order) {
        int n = id.at(s.code());
        if (s.is_implicit()) {
            const ImplicitState& st = a.istate(s);
            std::string label;
            if (st.space.dim() == 0) {
                label = "{0}";
            } else {
                label = "{";
                for (int r = 0; r < st.space.dim(); ++r)
                    label += (r ? ", " : "") + st.space.basis().row(r).str();
                label += "}";
            }
            out << "  s" << n << " [shape=box, style=rounded, peripheries="
                << (st.polarity == Polarity::In ? 2 : 1) << ", label=\"" << label << "\"];\n";
        } else {
            out << "  s" << n << " [shape=circle, label=\"\", width=0.12, fixedsize=true];\n";
        }
    }
    for (StateRef s : order) {
        int n = id.at(s.code());
        if (s.is_implicit()) {
            const ImplicitState& st = a.istate(s);
            int d = a.dim - st.space.dim();
            for (int i = 1; i <= d; ++i) {
                for (int sym : {i, -i}) {
                    auto it = st.trans.find(sym);
                    if (it == st.trans.end())
                        continue;
                    out << "  s" << n << " -> s" << id.at(it->second.code()) << " [label=\""
                        << (sym > 0 ? "+" : "") << sym << "\"];\n";
                }
            }
        } else {
            const ExplicitState& st = a.estate(s);
            out << "  s" << n << " -> s" << id.at(st.succ0.code()) << " [label=\"0\"];\n";
            out << "  s" << n << " -> s" << id.at(st.succ1.code()) << " [label=\"1\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace irva
