// SPDX-License-Identifier: Apache-2.0
#include "irva/formula.hpp"

#include <cctype>
#include <sstream>

namespace irva {

const char* cmp_op_text(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

bool cmp_holds(const Rational& lhs, CmpOp op, const Rational& rhs) {
    switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
    }
    return false;
}

struct Formula::Node {
    Kind kind;
    LinearConstraint atom;              // Kind::Atom
    std::shared_ptr<const Node> a, b;   // children
};

Formula Formula::constant(int dim, bool value) {
    return Formula(dim, std::make_shared<Node>(Node{value ? Kind::True : Kind::False, {}, nullptr, nullptr}));
}

namespace {

/* Scale coefficients and bound to coprime integers; the solution set is
 * unchanged because the factor is positive. */
void normalize_atom(LinearConstraint& c) {
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
    for (int i = 0; i < c.coeffs.dim(); ++i)
        feed(c.coeffs[i]);
    feed(c.bound);
    if (gcd_num == 0)
        return;
    Rational scale = Rational::from_integer(lcm_den) / Rational::from_integer(gcd_num);
    if (scale.sign() < 0)
        scale = -scale;
    c.coeffs *= scale;
    c.bound *= scale;
}

} // namespace

Formula Formula::atom(int dim, LinearConstraint c) {
    if (c.coeffs.dim() != dim)
        throw std::invalid_argument("constraint dimension mismatch");
    normalize_atom(c);
    return Formula(dim, std::make_shared<Node>(Node{Kind::Atom, std::move(c), nullptr, nullptr}));
}

Formula Formula::negation(Formula f) {
    return Formula(f.dim_, std::make_shared<Node>(Node{Kind::Not, {}, f.root_, nullptr}));
}

Formula Formula::conjunction(Formula a, Formula b) {
    if (a.dim_ != b.dim_)
        throw std::invalid_argument("formula dimension mismatch");
    return Formula(a.dim_, std::make_shared<Node>(Node{Kind::And, {}, a.root_, b.root_}));
}

Formula Formula::disjunction(Formula a, Formula b) {
    if (a.dim_ != b.dim_)
        throw std::invalid_argument("formula dimension mismatch");
    return Formula(a.dim_, std::make_shared<Node>(Node{Kind::Or, {}, a.root_, b.root_}));
}

Formula::Kind Formula::kind() const { return root_->kind; }

const LinearConstraint& Formula::constraint() const {
    if (root_->kind != Kind::Atom)
        throw std::logic_error("not an atom");
    return root_->atom;
}

Formula Formula::child() const {
    if (root_->kind != Kind::Not)
        throw std::logic_error("not a negation");
    return Formula(dim_, root_->a);
}

Formula Formula::left() const {
    if (root_->kind != Kind::And && root_->kind != Kind::Or)
        throw std::logic_error("not a binary connective");
    return Formula(dim_, root_->a);
}

Formula Formula::right() const {
    if (root_->kind != Kind::And && root_->kind != Kind::Or)
        throw std::logic_error("not a binary connective");
    return Formula(dim_, root_->b);
}

ParseError::ParseError(int line, int col, const std::string& msg)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      line(line), col(col) {}

namespace {

struct Token {
    enum class Kind {
        Number, Var, DimKw, TrueKw, FalseKw,
        Lt, Le, Eq, Ge, Gt,
        Not, And, Or, LParen, RParen,
        Plus, Minus, Star, Slash, Semicolon, End,
    };
    Kind kind;
    Rational number;  // Number
    int var_index = 0; // Var, 1-based
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        skip_ws_and_comments();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Token::Kind::Number;
            t.number = Rational::from_integer(read_integer());
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string word;
            while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
                word += advance();
            if (word == "dim") {
                t.kind = Token::Kind::DimKw;
            } else if (word == "true") {
                t.kind = Token::Kind::TrueKw;
            } else if (word == "false") {
                t.kind = Token::Kind::FalseKw;
            } else if (word.size() > 1 && word[0] == 'x') {
                for (size_t i = 1; i < word.size(); ++i)
                    if (!std::isdigit(static_cast<unsigned char>(word[i])))
                        throw ParseError(t.line, t.col, "unknown identifier '" + word + "'");
                t.kind = Token::Kind::Var;
                t.var_index = std::stoi(word.substr(1));
                if (t.var_index < 1)
                    throw ParseError(t.line, t.col, "variable indices start at x1");
            } else {
                throw ParseError(t.line, t.col, "unknown identifier '" + word + "'");
            }
            return t;
        }
        advance();
        switch (c) {
        case '<':
            t.kind = match('=') ? Token::Kind::Le : Token::Kind::Lt;
            return t;
        case '>':
            t.kind = match('=') ? Token::Kind::Ge : Token::Kind::Gt;
            return t;
        case '=': t.kind = Token::Kind::Eq; return t;
        case '!': t.kind = Token::Kind::Not; return t;
        case '&': t.kind = Token::Kind::And; return t;
        case '|': t.kind = Token::Kind::Or; return t;
        case '(': t.kind = Token::Kind::LParen; return t;
        case ')': t.kind = Token::Kind::RParen; return t;
        case '+': t.kind = Token::Kind::Plus; return t;
        case '-': t.kind = Token::Kind::Minus; return t;
        case '*': t.kind = Token::Kind::Star; return t;
        case '/': t.kind = Token::Kind::Slash; return t;
        case ';': t.kind = Token::Kind::Semicolon; return t;
        default:
            throw ParseError(t.line, t.col, std::string("unexpected character '") + c + "'");
        }
    }

private:
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    bool match(char expect) {
        if (pos_ < text_.size() && text_[pos_] == expect) {
            advance();
            return true;
        }
        return false;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    mpz_class read_integer() {
        std::string digits;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            digits += advance();
        return mpz_class(digits);
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

/* Linear expression accumulated while parsing one side of an atom. */
struct Affine {
    RVector coeffs;
    Rational constant;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { shift(); }

    Formula parse() {
        expect(Token::Kind::DimKw, "expected 'dim'");
        if (cur_.kind != Token::Kind::Number || !cur_.number.is_integer() || cur_.number.sign() <= 0)
            throw ParseError(cur_.line, cur_.col, "expected a positive dimension");
        if (cur_.number.num() > 64)
            throw ParseError(cur_.line, cur_.col, "dimension too large");
        dim_ = static_cast<int>(cur_.number.num().get_si());
        shift();
        expect(Token::Kind::Semicolon, "expected ';' after the dimension");
        Formula f = parse_or();
        if (cur_.kind != Token::Kind::End)
            throw ParseError(cur_.line, cur_.col, "trailing input after the formula");
        return f;
    }

private:
    void shift() { cur_ = lexer_.next(); }

    void expect(Token::Kind k, const std::string& msg) {
        if (cur_.kind != k)
            throw ParseError(cur_.line, cur_.col, msg);
        shift();
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (cur_.kind == Token::Kind::Or) {
            shift();
            f = Formula::disjunction(f, parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_not();
        while (cur_.kind == Token::Kind::And) {
            shift();
            f = Formula::conjunction(f, parse_not());
        }
        return f;
    }

    Formula parse_not() {
        if (cur_.kind == Token::Kind::Not) {
            shift();
            return Formula::negation(parse_not());
        }
        return parse_primary();
    }

    Formula parse_primary() {
        switch (cur_.kind) {
        case Token::Kind::TrueKw:
            shift();
            return Formula::constant(dim_, true);
        case Token::Kind::FalseKw:
            shift();
            return Formula::constant(dim_, false);
        case Token::Kind::LParen: {
            shift();
            Formula f = parse_or();
            expect(Token::Kind::RParen, "expected ')'");
            return f;
        }
        default:
            return parse_atom();
        }
    }

    Formula parse_atom() {
        Affine lhs = parse_sum();
        CmpOp op;
        switch (cur_.kind) {
        case Token::Kind::Lt: op = CmpOp::Lt; break;
        case Token::Kind::Le: op = CmpOp::Le; break;
        case Token::Kind::Eq: op = CmpOp::Eq; break;
        case Token::Kind::Ge: op = CmpOp::Ge; break;
        case Token::Kind::Gt: op = CmpOp::Gt; break;
        default:
            throw ParseError(cur_.line, cur_.col, "expected a comparison operator");
        }
        shift();
        Affine rhs = parse_sum();
        LinearConstraint c;
        c.coeffs = lhs.coeffs - rhs.coeffs;
        c.bound = rhs.constant - lhs.constant;
        c.op = op;
        return Formula::atom(dim_, std::move(c));
    }

    Affine parse_sum() {
        Affine acc{RVector(dim_), Rational(0)};
        bool negate = false;
        if (cur_.kind == Token::Kind::Plus || cur_.kind == Token::Kind::Minus) {
            negate = cur_.kind == Token::Kind::Minus;
            shift();
        }
        parse_term(acc, negate);
        while (cur_.kind == Token::Kind::Plus || cur_.kind == Token::Kind::Minus) {
            bool neg = cur_.kind == Token::Kind::Minus;
            shift();
            parse_term(acc, neg);
        }
        return acc;
    }

    void parse_term(Affine& acc, bool negate) {
        Rational sign = negate ? Rational(-1) : Rational(1);
        if (cur_.kind == Token::Kind::Number) {
            Rational value = parse_rational();
            if (cur_.kind == Token::Kind::Star) {
                shift();
                acc.coeffs[expect_var()] += sign * value;
            } else if (cur_.kind == Token::Kind::Var) {
                acc.coeffs[expect_var()] += sign * value;
            } else {
                acc.constant += sign * value;
            }
            return;
        }
        if (cur_.kind == Token::Kind::Var) {
            acc.coeffs[expect_var()] += sign;
            return;
        }
        throw ParseError(cur_.line, cur_.col, "expected a term");
    }

    /* Consumes the current Var token, range-checked against dim. */
    int expect_var() {
        if (cur_.kind != Token::Kind::Var)
            throw ParseError(cur_.line, cur_.col, "expected a variable");
        if (cur_.var_index > dim_)
            throw ParseError(cur_.line, cur_.col,
                             "variable x" + std::to_string(cur_.var_index) + " exceeds dim " + std::to_string(dim_));
        int idx = cur_.var_index - 1;
        shift();
        return idx;
    }

    Rational parse_rational() {
        Rational value = cur_.number;
        shift();
        if (cur_.kind == Token::Kind::Slash) {
            shift();
            if (cur_.kind != Token::Kind::Number || cur_.number.is_zero())
                throw ParseError(cur_.line, cur_.col, "expected a nonzero denominator");
            value /= cur_.number;
            shift();
        }
        return value;
    }

    Lexer lexer_;
    Token cur_;
    int dim_ = 1;
};

void print_atom(std::ostream& out, const LinearConstraint& c) {
    bool first = true;
    for (int i = 0; i < c.coeffs.dim(); ++i) {
        const Rational& a = c.coeffs[i];
        if (a.is_zero())
            continue;
        if (first) {
            if (a == Rational(-1))
                out << "-";
            else if (a != Rational(1))
                out << a.str() << "*";
        } else {
            out << (a.sign() < 0 ? " - " : " + ");
            Rational mag = a.abs();
            if (mag != Rational(1))
                out << mag.str() << "*";
        }
        out << "x" << (i + 1);
        first = false;
    }
    if (first)
        out << "0";
    out << " " << cmp_op_text(c.op) << " " << c.bound.str();
}

void print_node(std::ostream& out, const Formula& f) {
    auto parenthesized = [&](const Formula& g) {
        out << "(";
        print_node(out, g);
        out << ")";
    };
    switch (f.kind()) {
    case Formula::Kind::True:
        out << "true";
        break;
    case Formula::Kind::False:
        out << "false";
        break;
    case Formula::Kind::Atom:
        print_atom(out, f.constraint());
        break;
    case Formula::Kind::Not: {
        out << "!";
        Formula c = f.child();
        if (c.kind() == Formula::Kind::Not || c.kind() == Formula::Kind::True || c.kind() == Formula::Kind::False)
            print_node(out, c);
        else
            parenthesized(c);
        break;
    }
    case Formula::Kind::And: {
        Formula l = f.left(), r = f.right();
        if (l.kind() == Formula::Kind::Or)
            parenthesized(l);
        else
            print_node(out, l);
        out << " & ";
        if (r.kind() == Formula::Kind::Or || r.kind() == Formula::Kind::And)
            parenthesized(r);
        else
            print_node(out, r);
        break;
    }
    case Formula::Kind::Or: {
        Formula l = f.left(), r = f.right();
        print_node(out, l);
        out << " | ";
        if (r.kind() == Formula::Kind::Or)
            parenthesized(r);
        else
            print_node(out, r);
        break;
    }
    }
}

} // namespace

Formula parse_formula(const std::string& text) {
    Parser p(text);
    return p.parse();
}

std::string print_formula(const Formula& f) {
    std::ostringstream out;
    out << "dim " << f.dim() << "; ";
    print_node(out, f);
    return out.str();
}

bool eval(const Formula& f, const RVector& p) {
    if (p.dim() != f.dim())
        throw std::invalid_argument("point dimension mismatch");
    switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return f.constraint().eval(p);
    case Formula::Kind::Not: return !eval(f.child(), p);
    case Formula::Kind::And: return eval(f.left(), p) && eval(f.right(), p);
    case Formula::Kind::Or: return eval(f.left(), p) || eval(f.right(), p);
    }
    return false;
}

namespace {

Formula homogenize(const Formula& f, int new_dim) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
        return Formula::constant(new_dim, f.kind() == Formula::Kind::True);
    case Formula::Kind::Atom: {
        const LinearConstraint& c = f.constraint();
        if (c.coeffs.is_zero())
            return Formula::constant(new_dim, cmp_holds(Rational(0), c.op, c.bound));
        LinearConstraint h;
        h.coeffs = RVector(new_dim);
        for (int i = 0; i < c.coeffs.dim(); ++i)
            h.coeffs[i] = c.coeffs[i];
        h.coeffs[new_dim - 1] = -c.bound;
        h.bound = Rational(0);
        h.op = c.op;
        return Formula::atom(new_dim, std::move(h));
    }
    case Formula::Kind::Not:
        return Formula::negation(homogenize(f.child(), new_dim));
    case Formula::Kind::And:
        return Formula::conjunction(homogenize(f.left(), new_dim), homogenize(f.right(), new_dim));
    case Formula::Kind::Or:
        return Formula::disjunction(homogenize(f.left(), new_dim), homogenize(f.right(), new_dim));
    }
    throw std::logic_error("unreachable");
}

} // namespace

Formula conify(const Formula& f) {
    const int n1 = f.dim() + 1;
    LinearConstraint positive;
    positive.coeffs = RVector::unit(n1, n1 - 1);
    positive.bound = Rational(0);
    positive.op = CmpOp::Gt;
    Formula pos = Formula::atom(n1, std::move(positive));
    Formula hom = homogenize(f, n1);
    if (hom.kind() == Formula::Kind::True)
        return pos;
    return Formula::conjunction(std::move(hom), std::move(pos));
}

} // namespace irva
