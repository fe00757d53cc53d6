// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irva/linalg.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace irva {

enum class CmpOp : uint8_t { Lt, Le, Eq, Ge, Gt };

const char* cmp_op_text(CmpOp op);
bool cmp_holds(const Rational& lhs, CmpOp op, const Rational& rhs);

/* One linear constraint a.x # b. Atoms are normalized at construction:
 * coefficients and bound are scaled to coprime integers. */
struct LinearConstraint {
    RVector coeffs;
    Rational bound;
    CmpOp op = CmpOp::Le;

    bool eval(const RVector& p) const { return cmp_holds(dot(coeffs, p), op, bound); }
};

/* Immutable AST of linear constraints under Boolean connectives. This is
 * the semantic ground truth the whole decision structure is tested
 * against. Copies share structure. */
class Formula {
public:
    enum class Kind : uint8_t { True, False, Atom, Not, And, Or };

    static Formula constant(int dim, bool value);
    static Formula atom(int dim, LinearConstraint c);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);

    int dim() const { return dim_; }
    Kind kind() const;
    const LinearConstraint& constraint() const; // Atom only
    Formula child() const;                      // Not only
    Formula left() const;                       // And/Or
    Formula right() const;                      // And/Or

private:
    struct Node;
    Formula(int dim, std::shared_ptr<const Node> root) : dim_(dim), root_(std::move(root)) {}

    int dim_ = 0;
    std::shared_ptr<const Node> root_;
};

struct ParseError : std::runtime_error {
    ParseError(int line, int col, const std::string& msg);
    int line;
    int col;
};

/* Grammar: `dim <n> ;` then an expression over atoms `<sum> <op> <sum>`
 * with ops < <= = >= >, connectives ! & | (precedence ! > & > |),
 * parentheses, `true`/`false`, terms `[coef *] x<k>` and rational
 * literals, and `#` line comments. */
Formula parse_formula(const std::string& text);

/* Canonical one-line rendering; parse_formula(print_formula(f)) yields
 * a structurally identical AST. */
std::string print_formula(const Formula& f);

/* Exact truth value at a rational point. */
bool eval(const Formula& f, const RVector& p);

/* Homogenization onto the representing cone: dimension grows by one,
 * every atom a.x # b becomes a.x - b*x_{n+1} # 0, and the result is
 * conjoined with x_{n+1} > 0. Constant atoms 0 # b are folded so every
 * surviving atom has a nonzero normal. */
Formula conify(const Formula& f);

} // namespace irva
