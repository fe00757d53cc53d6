// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irva/linalg.hpp"

namespace irva {

/* Linear subspace of R^n held as its unique RREF basis (rows). Field
 * equality therefore decides subspace equality, which is what makes the
 * minimized decision structures canonical. */
class VectorSpace {
public:
    /* Zero subspace of the given ambient dimension. */
    explicit VectorSpace(int ambient_dim);

    static VectorSpace full(int ambient_dim);
    static VectorSpace from_generators(const std::vector<RVector>& gens, int ambient_dim);

    int ambient_dim() const { return ambient_; }
    int dim() const { return basis_.rows(); }
    bool is_full() const { return dim() == ambient_; }
    const RMatrix& basis() const { return basis_; }

    bool contains(const RVector& v) const;
    bool contains(const VectorSpace& other) const;

    /* Canonical basis of the intersection with `other`. */
    VectorSpace intersect(const VectorSpace& other) const;

    friend bool operator==(const VectorSpace&, const VectorSpace&) = default;

private:
    VectorSpace(int ambient, RMatrix basis) : ambient_(ambient), basis_(std::move(basis)) {}

    int ambient_;
    RMatrix basis_; // RREF, no zero rows
};

/* Completion of a proper subspace to a basis of the ambient space with
 * standard unit vectors, together with the functionals that read off the
 * coordinates along those unit vectors. For every v,
 *   v = (component in `space`) + sum_j functionals.row(j)(v) * unit(z_index[j]).
 */
struct BasisExtension {
    VectorSpace space;
    std::vector<int> z_indices; // 0-based ambient indices, strictly increasing
    RMatrix functionals;        // (n - m) x n

    int residual_dim() const { return static_cast<int>(z_indices.size()); }

    /* z = F * v; zero iff v lies in `space`. */
    RVector residual_coords(const RVector& v) const;
};

/* Picks the first standard unit vectors, in index order, that are
 * independent of the space and of the ones already picked. Requires a
 * proper subspace. */
BasisExtension extend_basis(const VectorSpace& vs);

} // namespace irva
