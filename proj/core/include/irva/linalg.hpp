// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irva/rational.hpp"

#include <initializer_list>
#include <optional>
#include <vector>

namespace irva {

/* Dense exact vector over Rational. */
class RVector {
public:
    RVector() = default;
    explicit RVector(int dim) : entries_(dim) {}
    RVector(std::initializer_list<Rational> xs) : entries_(xs) {}
    explicit RVector(std::vector<Rational> xs) : entries_(std::move(xs)) {}

    static RVector unit(int dim, int index);

    int dim() const { return static_cast<int>(entries_.size()); }
    const Rational& operator[](int i) const { return entries_[i]; }
    Rational& operator[](int i) { return entries_[i]; }

    bool is_zero() const;

    RVector operator-() const;
    RVector& operator+=(const RVector& o);
    RVector& operator-=(const RVector& o);
    RVector& operator*=(const Rational& c);
    friend RVector operator+(RVector a, const RVector& b) { return a += b; }
    friend RVector operator-(RVector a, const RVector& b) { return a -= b; }
    friend RVector operator*(const Rational& c, RVector v) { return v *= c; }

    friend bool operator==(const RVector&, const RVector&) = default;

    std::string str() const;

private:
    std::vector<Rational> entries_;
};

Rational dot(const RVector& a, const RVector& b);

/* Dense exact matrix, row major. */
class RMatrix {
public:
    RMatrix() = default;
    RMatrix(int rows, int cols) : rows_(rows), cols_(cols), entries_(static_cast<size_t>(rows) * cols) {}
    RMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

    static RMatrix identity(int n);
    static RMatrix from_rows(const std::vector<RVector>& rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Rational& at(int r, int c) const { return entries_[static_cast<size_t>(r) * cols_ + c]; }
    Rational& at(int r, int c) { return entries_[static_cast<size_t>(r) * cols_ + c]; }

    RVector row(int r) const;
    RVector col(int c) const;

    /* m * v, requires v.dim() == cols(). */
    RVector apply(const RVector& v) const;
    /* v^T * m as a vector of dim cols(), requires v.dim() == rows(). */
    RVector apply_left(const RVector& v) const;

    RMatrix transposed() const;

    friend bool operator==(const RMatrix&, const RMatrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Rational> entries_;
};

struct RrefResult {
    RMatrix matrix; // reduced row echelon form, zero rows removed
    int rank = 0;
    std::vector<int> pivot_cols; // strictly increasing, one per row
};

/* Unique reduced row echelon form. Canonicity carrier for the whole
 * library: two row spans are equal iff their RREFs are identical. */
RrefResult rref(const RMatrix& m);

/* Exact solution of m * x = rhs, or nullopt when none exists. For
 * underdetermined systems the free variables are set to zero. */
std::optional<RVector> solve(const RMatrix& m, const RVector& rhs);

/* Basis of { x : m * x = 0 }, one vector per free column of rref(m). */
std::vector<RVector> nullspace(const RMatrix& m);

} // namespace irva
