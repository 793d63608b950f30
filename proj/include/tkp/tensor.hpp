#pragma once

#include <cstdint>
#include <vector>

#include "tkp/errors.hpp"

namespace tkp {

using index_t = std::int64_t;

// Shape of a k-way tensor. Every dimension is >= 1; element counts are
// computed with checked 64-bit arithmetic.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<index_t> dims);

    index_t order() const { return static_cast<index_t>(dims_.size()); }
    index_t dim(index_t mode) const;  // mode is 1-based
    const std::vector<index_t>& dims() const { return dims_; }
    index_t elementCount() const { return count_; }

    bool operator==(const Shape& other) const { return dims_ == other.dims_; }
    bool operator!=(const Shape& other) const { return !(*this == other); }

private:
    std::vector<index_t> dims_;
    index_t count_ = 1;
};

// Multiplies two nonnegative 64-bit sizes, throwing SizeOverflow on wrap.
index_t checkedMul(index_t a, index_t b);

// Dense k-way real tensor. Storage is first-index-fastest (generalized
// column-major): entry (i1,...,ik), 1-based, lives at linear position
// i1 + n1*(i2-1) + n1*n2*(i3-1) + ...
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);  // zero-filled
    DenseTensor(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    index_t order() const { return shape_.order(); }
    index_t dim(index_t mode) const { return shape_.dim(mode); }
    index_t elementCount() const { return shape_.elementCount(); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    // 1-based multi-index access.
    double entry(const std::vector<index_t>& idx) const;
    void setEntry(const std::vector<index_t>& idx, double value);

    // 0-based offset of a 1-based multi-index.
    index_t linearOffset(const std::vector<index_t>& idx) const;

private:
    Shape shape_;
    std::vector<double> data_;
};

// Permutation of {1..N} stored as an index vector: source(p) is the source
// position feeding target position p, both 1-based. Applying the map to a
// vector x yields y with y[p] = x[source(p)].
struct PermutationMap {
    std::vector<index_t> map;  // map[p-1] = source position for target p

    index_t size() const { return static_cast<index_t>(map.size()); }
    index_t source(index_t target) const { return map[target - 1]; }

    // Throws BadPermutation unless map is a bijection on {1..N}.
    void validate() const;
};

PermutationMap identityMap(index_t n);
PermutationMap inverseMap(const PermutationMap& p);

// Composition applying `inner` first, then `outer`:
// result.source(t) = inner.source(outer.source(t)), so that
// apply(result, x) == apply(outer, apply(inner, x)).
PermutationMap composeMaps(const PermutationMap& outer, const PermutationMap& inner);

std::vector<double> applyPermutation(const PermutationMap& p, const std::vector<double>& x);

// --- Core operations ------------------------------------------------------

// Metadata-only reshape; element counts must agree.
DenseTensor reshape(const DenseTensor& t, Shape newShape);

// Output entry at (i_{perm(1)},...,i_{perm(k)}) equals the input entry at
// (i_1,...,i_k); the output shape is permuted accordingly and the data is
// physically reordered. perm is a 1-based permutation of 1..order.
DenseTensor permuteModes(const DenseTensor& t, const std::vector<index_t>& perm);

// Contraction over mode r (1-based) with the order-2 tensor U, whose column
// count must equal dim r. The output's mode-r dimension is U's row count.
DenseTensor modeProduct(const DenseTensor& t, index_t r, const DenseTensor& u);

// vec(a)^T vec(b), pairwise summation (the blessed reduction order).
double inner(const DenseTensor& a, const DenseTensor& b);
double frobeniusNorm(const DenseTensor& t);

// Pairwise sum of a contiguous range, exposed for reuse by the metrics code.
double pairwiseSum(const double* data, index_t n);

// Outer product of d nonempty vectors: entry (i1,...,id) = prod_j v[j][i_j].
DenseTensor outerRank1(const std::vector<std::vector<double>>& vectors);

// Tensor Kronecker product a = b (x) c of two equal-order tensors. For each
// mode the grouped result index is [i_c i_b] with c's index fastest:
// a at ([i1 j1],...,[ik jk]) = b(j1..jk) * c(i1..ik).
DenseTensor tensorKron(const DenseTensor& b, const DenseTensor& c);

// Left fold of tensorKron over factors listed chain-order left to right,
// i.e. {A(d), ..., A(1)} yields A(d) (x) ... (x) A(1).
DenseTensor tensorKronChain(const std::vector<DenseTensor>& factors);

} // namespace tkp
