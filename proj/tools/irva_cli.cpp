// SPDX-License-Identifier: Apache-2.0
// Command-line front door for building, querying, and combining IRVA
// files. Exit codes: 0 success / predicate true, 1 predicate false,
// 2 usage or I/O error, 3 depth-cap or integrity failure.
#include "irva/algebra.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace irva;

namespace {

constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIntegrity = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot write '" + path + "'");
    out << content;
}

Irva load_irva(const std::string& path) { return deserialize(read_file(path)); }

RVector parse_point(const std::string& text) {
    std::vector<Rational> coords;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos)
            throw UsageError("empty coordinate in point '" + text + "'");
        auto r = Rational::parse(item.substr(a, b - a + 1));
        if (!r)
            throw UsageError("bad coordinate '" + item + "'");
        coords.push_back(*r);
    }
    if (coords.empty())
        throw UsageError("empty point");
    return RVector(std::move(coords));
}

int predicate_exit(bool value) {
    std::cout << (value ? "true" : "false") << "\n";
    return value ? kExitTrue : kExitFalse;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Canonical symbolic representation of non-convex polyhedra"};
    app.require_subcommand(1);

    std::string formula_path, out_path, file_a, file_b, point_text;
    std::string op_name;
    bool no_minimize = false;
    bool oracle = false;
    int depth_cap = 64;

    auto* cmd_build = app.add_subcommand("build", "Build an IRVA from a constraint formula file");
    cmd_build->add_option("formula", formula_path, "formula file")->required();
    cmd_build->add_option("-o,--output", out_path, "output IRVA file")->required();
    cmd_build->add_flag("--no-minimize", no_minimize, "skip minimization after products");
    cmd_build->add_option("--depth-cap", depth_cap, "refinement bits per product branch");

    auto* cmd_member = app.add_subcommand("member", "Decide membership of a point");
    cmd_member->add_option("irva", file_a, "IRVA file")->required();
    cmd_member->add_option("point", point_text, "comma-separated rational coordinates")->required();
    cmd_member->add_flag("--oracle", oracle)->group(""); // test hook: answer from the stored formula

    auto* cmd_op = app.add_subcommand("op", "Boolean combination of two IRVA files");
    cmd_op->add_option("operator", op_name, "and|or|xor|diff")->required();
    cmd_op->add_option("a", file_a)->required();
    cmd_op->add_option("b", file_b)->required();
    cmd_op->add_option("-o,--output", out_path)->required();
    cmd_op->add_option("--depth-cap", depth_cap);

    auto* cmd_not = app.add_subcommand("not", "Complement of an IRVA file");
    cmd_not->add_option("a", file_a)->required();
    cmd_not->add_option("-o,--output", out_path)->required();

    auto* cmd_min = app.add_subcommand("minimize", "Reduce an IRVA to its canonical form");
    cmd_min->add_option("a", file_a)->required();
    cmd_min->add_option("-o,--output", out_path)->required();

    auto* cmd_eq = app.add_subcommand("eq", "Set equality of two IRVA files");
    cmd_eq->add_option("a", file_a)->required();
    cmd_eq->add_option("b", file_b)->required();

    auto* cmd_subset = app.add_subcommand("subset", "Set inclusion of two IRVA files");
    cmd_subset->add_option("a", file_a)->required();
    cmd_subset->add_option("b", file_b)->required();

    auto* cmd_empty = app.add_subcommand("empty", "Is the represented set empty");
    cmd_empty->add_option("a", file_a)->required();

    auto* cmd_stats = app.add_subcommand("stats", "Print structure statistics");
    cmd_stats->add_option("a", file_a)->required();

    auto* cmd_dot = app.add_subcommand("dot", "Emit a Graphviz rendering");
    cmd_dot->add_option("a", file_a)->required();
    cmd_dot->add_option("-o,--output", out_path, "output file (stdout when absent)");

    auto* cmd_validate = app.add_subcommand("validate", "Check structural integrity");
    cmd_validate->add_option("a", file_a)->required();

    try {
        app.parse(argc, argv);

        if (cmd_build->parsed()) {
            Formula f = parse_formula(read_file(formula_path));
            Irva a = build(f, {!no_minimize, depth_cap});
            a.origin_formula = print_formula(f);
            write_file(out_path, serialize(a));
            return kExitTrue;
        }
        if (cmd_member->parsed()) {
            Irva a = load_irva(file_a);
            RVector p = parse_point(point_text);
            if (oracle) {
                if (!a.origin_formula)
                    throw UsageError("no formula stored in '" + file_a + "'");
                Formula f = parse_formula(*a.origin_formula);
                return predicate_exit(eval(f, p));
            }
            bool inside = a.source == SourceKind::Affine ? decide_member_affine(a, p) : decide_member(a, p);
            return predicate_exit(inside);
        }
        if (cmd_op->parsed()) {
            BoolOp op;
            if (op_name == "and")
                op = BoolOp::And;
            else if (op_name == "or")
                op = BoolOp::Or;
            else if (op_name == "xor")
                op = BoolOp::Xor;
            else if (op_name == "diff")
                op = BoolOp::Diff;
            else
                throw UsageError("unknown operator '" + op_name + "'");
            Irva c = combine(load_irva(file_a), load_irva(file_b), op, {depth_cap, true});
            write_file(out_path, serialize(c));
            return kExitTrue;
        }
        if (cmd_not->parsed()) {
            write_file(out_path, serialize(complement(load_irva(file_a))));
            return kExitTrue;
        }
        if (cmd_min->parsed()) {
            write_file(out_path, serialize(minimize(load_irva(file_a))));
            return kExitTrue;
        }
        if (cmd_eq->parsed())
            return predicate_exit(equal(load_irva(file_a), load_irva(file_b)));
        if (cmd_subset->parsed())
            return predicate_exit(subset(load_irva(file_a), load_irva(file_b)));
        if (cmd_empty->parsed())
            return predicate_exit(is_empty(load_irva(file_a)));
        if (cmd_stats->parsed()) {
            Irva a = load_irva(file_a);
            IrvaStats st = stats(a);
            std::cout << "dim: " << a.dim << "\n";
            if (a.source == SourceKind::Affine)
                std::cout << "source: affine " << a.affine_dim << "\n";
            else
                std::cout << "source: conical\n";
            std::cout << "implicit states: " << st.implicit_count << "\n";
            std::cout << "explicit states: " << st.explicit_count << "\n";
            std::cout << "transitions: " << st.transition_count << "\n";
            std::cout << "polarity in: " << st.in_count << "\n";
            std::cout << "polarity out: " << st.out_count << "\n";
            std::cout << "components by dim:";
            for (const auto& [d, n] : st.by_dimension)
                std::cout << " " << d << ":" << n;
            std::cout << "\n";
            return kExitTrue;
        }
        if (cmd_dot->parsed()) {
            std::string dot = to_dot(load_irva(file_a));
            if (out_path.empty())
                std::cout << dot;
            else
                write_file(out_path, dot);
            return kExitTrue;
        }
        if (cmd_validate->parsed()) {
            Irva a;
            try {
                a = load_irva(file_a);
            } catch (const ValidationError& e) {
                for (const auto& v : e.violations)
                    std::cout << violation_name(v.kind) << ": " << v.detail << "\n";
                return kExitIntegrity;
            }
            std::vector<Violation> vs = validate(a);
            if (vs.empty()) {
                std::cout << "ok\n";
                return kExitTrue;
            }
            for (const auto& v : vs)
                std::cout << violation_name(v.kind) << ": " << v.detail << "\n";
            return kExitIntegrity;
        }
        throw UsageError("no subcommand");
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    } catch (const DepthCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const IrvaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
