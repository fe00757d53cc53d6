// SPDX-License-Identifier: Apache-2.0
#include "irva/vector_space.hpp"

#include <stdexcept>

namespace irva {

VectorSpace::VectorSpace(int ambient_dim) : ambient_(ambient_dim), basis_(0, ambient_dim) {
    if (ambient_dim < 1)
        throw std::invalid_argument("ambient dimension must be positive");
}

VectorSpace VectorSpace::full(int ambient_dim) {
    VectorSpace v(ambient_dim);
    v.basis_ = RMatrix::identity(ambient_dim);
    return v;
}

VectorSpace VectorSpace::from_generators(const std::vector<RVector>& gens, int ambient_dim) {
    for (const auto& g : gens)
        if (g.dim() != ambient_dim)
            throw std::invalid_argument("generator dimension mismatch");
    VectorSpace v(ambient_dim);
    if (!gens.empty())
        v.basis_ = rref(RMatrix::from_rows(gens, ambient_dim)).matrix;
    return v;
}

bool VectorSpace::contains(const RVector& v) const {
    if (v.dim() != ambient_)
        throw std::invalid_argument("vector dimension mismatch");
    // Reduce v against the RREF rows; membership iff the residue is zero.
    RVector r = v;
    for (int row = 0; row < basis_.rows(); ++row) {
        int pc = -1;
        for (int c = 0; c < ambient_; ++c) {
            if (!basis_.at(row, c).is_zero()) {
                pc = c;
                break;
            }
        }
        const Rational f = r[pc];
        if (f.is_zero())
            continue;
        for (int c = pc; c < ambient_; ++c)
            r[c] -= f * basis_.at(row, c);
    }
    return r.is_zero();
}

bool VectorSpace::contains(const VectorSpace& other) const {
    if (other.ambient_ != ambient_)
        throw std::invalid_argument("ambient dimension mismatch");
    for (int r = 0; r < other.basis_.rows(); ++r)
        if (!contains(other.basis_.row(r)))
            return false;
    return true;
}

VectorSpace VectorSpace::intersect(const VectorSpace& other) const {
    if (other.ambient_ != ambient_)
        throw std::invalid_argument("ambient dimension mismatch");
    // v in both spans iff v = x^T A = y^T B. Solve A^T x - B^T y = 0 and
    // map each kernel vector back through A.
    int ka = dim(), kb = other.dim();
    if (ka == 0 || kb == 0)
        return VectorSpace(ambient_);
    RMatrix sys(ambient_, ka + kb);
    for (int r = 0; r < ambient_; ++r) {
        for (int i = 0; i < ka; ++i)
            sys.at(r, i) = basis_.at(i, r);
        for (int j = 0; j < kb; ++j)
            sys.at(r, ka + j) = -other.basis_.at(j, r);
    }
    std::vector<RVector> gens;
    for (const RVector& w : nullspace(sys)) {
        RVector v(ambient_);
        for (int i = 0; i < ka; ++i) {
            if (w[i].is_zero())
                continue;
            for (int c = 0; c < ambient_; ++c)
                v[c] += w[i] * basis_.at(i, c);
        }
        gens.push_back(std::move(v));
    }
    return from_generators(gens, ambient_);
}

RVector BasisExtension::residual_coords(const RVector& v) const {
    return functionals.apply(v);
}

BasisExtension extend_basis(const VectorSpace& vs) {
    const int n = vs.ambient_dim();
    const int m = vs.dim();
    if (m >= n)
        throw std::invalid_argument("cannot extend a full space");

    // Greedy completion with unit vectors, considered in index order.
    std::vector<RVector> rows;
    rows.reserve(n);
    for (int r = 0; r < m; ++r)
        rows.push_back(vs.basis().row(r));
    std::vector<int> z_indices;
    int rank = m;
    for (int j = 0; j < n && rank < n; ++j) {
        rows.push_back(RVector::unit(n, j));
        int new_rank = rref(RMatrix::from_rows(rows, n)).rank;
        if (new_rank > rank) {
            rank = new_rank;
            z_indices.push_back(j);
        } else {
            rows.pop_back();
        }
    }

    // Invert the combined basis (columns y_1..y_m, z_1..z_{n-m}); the last
    // n-m rows of the inverse are the residual functionals.
    RMatrix combined(n, n);
    for (int c = 0; c < m; ++c)
        for (int r = 0; r < n; ++r)
            combined.at(r, c) = vs.basis().at(c, r);
    for (int c = m; c < n; ++c)
        combined.at(z_indices[c - m], c) = Rational(1);

    RMatrix aug(n, 2 * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c)
            aug.at(r, c) = combined.at(r, c);
        aug.at(r, n + r) = Rational(1);
    }
    RrefResult red = rref(aug);
    RMatrix functionals(n - m, n);
    for (int r = m; r < n; ++r)
        for (int c = 0; c < n; ++c)
            functionals.at(r - m, c) = red.matrix.at(r, n + c);
    return BasisExtension{vs, std::move(z_indices), std::move(functionals)};
}

} // namespace irva
