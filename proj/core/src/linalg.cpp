// SPDX-License-Identifier: Apache-2.0
#include "irva/linalg.hpp"

#include <sstream>
#include <stdexcept>

namespace irva {

RVector RVector::unit(int dim, int index) {
    RVector v(dim);
    v[index] = Rational(1);
    return v;
}

bool RVector::is_zero() const {
    for (const auto& x : entries_)
        if (!x.is_zero())
            return false;
    return true;
}

RVector RVector::operator-() const {
    RVector r(dim());
    for (int i = 0; i < dim(); ++i)
        r[i] = -entries_[i];
    return r;
}

RVector& RVector::operator+=(const RVector& o) {
    if (dim() != o.dim())
        throw std::invalid_argument("vector dimension mismatch");
    for (int i = 0; i < dim(); ++i)
        entries_[i] += o[i];
    return *this;
}

RVector& RVector::operator-=(const RVector& o) {
    if (dim() != o.dim())
        throw std::invalid_argument("vector dimension mismatch");
    for (int i = 0; i < dim(); ++i)
        entries_[i] -= o[i];
    return *this;
}

RVector& RVector::operator*=(const Rational& c) {
    for (auto& x : entries_)
        x *= c;
    return *this;
}

std::string RVector::str() const {
    std::ostringstream out;
    out << "(";
    for (int i = 0; i < dim(); ++i)
        out << (i ? ", " : "") << entries_[i].str();
    out << ")";
    return out.str();
}

Rational dot(const RVector& a, const RVector& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("vector dimension mismatch");
    Rational s;
    for (int i = 0; i < a.dim(); ++i)
        s += a[i] * b[i];
    return s;
}

RMatrix::RMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    entries_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != cols_)
            throw std::invalid_argument("ragged matrix initializer");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

RMatrix RMatrix::identity(int n) {
    RMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        m.at(i, i) = Rational(1);
    return m;
}

RMatrix RMatrix::from_rows(const std::vector<RVector>& rows, int cols) {
    RMatrix m(static_cast<int>(rows.size()), cols);
    for (int r = 0; r < m.rows(); ++r) {
        if (rows[r].dim() != cols)
            throw std::invalid_argument("row dimension mismatch");
        for (int c = 0; c < cols; ++c)
            m.at(r, c) = rows[r][c];
    }
    return m;
}

RVector RMatrix::row(int r) const {
    RVector v(cols_);
    for (int c = 0; c < cols_; ++c)
        v[c] = at(r, c);
    return v;
}

RVector RMatrix::col(int c) const {
    RVector v(rows_);
    for (int r = 0; r < rows_; ++r)
        v[r] = at(r, c);
    return v;
}

RVector RMatrix::apply(const RVector& v) const {
    if (v.dim() != cols_)
        throw std::invalid_argument("matrix/vector dimension mismatch");
    RVector out(rows_);
    for (int r = 0; r < rows_; ++r) {
        Rational s;
        for (int c = 0; c < cols_; ++c)
            s += at(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

RVector RMatrix::apply_left(const RVector& v) const {
    if (v.dim() != rows_)
        throw std::invalid_argument("matrix/vector dimension mismatch");
    RVector out(cols_);
    for (int c = 0; c < cols_; ++c) {
        Rational s;
        for (int r = 0; r < rows_; ++r)
            s += v[r] * at(r, c);
        out[c] = s;
    }
    return out;
}

RMatrix RMatrix::transposed() const {
    RMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            t.at(c, r) = at(r, c);
    return t;
}

RrefResult rref(const RMatrix& m) {
    RMatrix a = m;
    int rows = a.rows(), cols = a.cols();
    int lead = 0;
    std::vector<int> pivots;
    for (int col = 0; col < cols && lead < rows; ++col) {
        int p = -1;
        for (int r = lead; r < rows; ++r) {
            if (!a.at(r, col).is_zero()) {
                p = r;
                break;
            }
        }
        if (p < 0)
            continue;
        if (p != lead)
            for (int c = 0; c < cols; ++c)
                std::swap(a.at(p, c), a.at(lead, c));
        Rational inv = Rational(1) / a.at(lead, col);
        for (int c = col; c < cols; ++c)
            a.at(lead, c) *= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == lead || a.at(r, col).is_zero())
                continue;
            Rational f = a.at(r, col);
            for (int c = col; c < cols; ++c)
                a.at(r, c) -= f * a.at(lead, c);
        }
        pivots.push_back(col);
        ++lead;
    }
    int rank = static_cast<int>(pivots.size());
    RMatrix out(rank, cols);
    for (int r = 0; r < rank; ++r)
        for (int c = 0; c < cols; ++c)
            out.at(r, c) = a.at(r, c);
    return {std::move(out), rank, std::move(pivots)};
}

std::optional<RVector> solve(const RMatrix& m, const RVector& rhs) {
    if (m.rows() != rhs.dim())
        throw std::invalid_argument("solve: rhs dimension mismatch");
    RMatrix aug(m.rows(), m.cols() + 1);
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c)
            aug.at(r, c) = m.at(r, c);
        aug.at(r, m.cols()) = rhs[r];
    }
    RrefResult red = rref(aug);
    RVector x(m.cols());
    for (int r = 0; r < red.rank; ++r) {
        int pc = red.pivot_cols[r];
        if (pc == m.cols())
            return std::nullopt; // pivot in the rhs column: inconsistent
        // Free variables stay zero, so the pivot variable equals the
        // reduced right-hand side.
        x[pc] = red.matrix.at(r, m.cols());
    }
    return x;
}

std::vector<RVector> nullspace(const RMatrix& m) {
    RrefResult red = rref(m);
    int cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (int pc : red.pivot_cols)
        is_pivot[pc] = true;
    std::vector<RVector> basis;
    for (int fc = 0; fc < cols; ++fc) {
        if (is_pivot[fc])
            continue;
        RVector v(cols);
        v[fc] = Rational(1);
        for (int r = 0; r < red.rank; ++r)
            v[red.pivot_cols[r]] = -red.matrix.at(r, fc);
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace irva
