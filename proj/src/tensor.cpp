#include "tkp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tkp {

index_t checkedMul(index_t a, index_t b) {
    index_t out = 0;
    if (__builtin_mul_overflow(a, b, &out))
        fail("SizeOverflow", "size product exceeds 64-bit range");
    return out;
}

Shape::Shape(std::vector<index_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
        fail("ShapeMismatch", "shape needs at least one dimension");
    count_ = 1;
    for (index_t d : dims_) {
        if (d < 1)
            fail("ShapeMismatch", "dimension " + std::to_string(d) + " is < 1");
        count_ = checkedMul(count_, d);
    }
}

index_t Shape::dim(index_t mode) const {
    if (mode < 1 || mode > order())
        fail("IndexOutOfRange", "mode " + std::to_string(mode) + " of " + std::to_string(order()));
    return dims_[static_cast<std::size_t>(mode - 1)];
}

DenseTensor::DenseTensor(Shape shape)
    : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_.elementCount()), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<index_t>(data_.size()) != shape_.elementCount())
        fail("ShapeMismatch", "data length " + std::to_string(data_.size()) +
                                  " does not match element count " +
                                  std::to_string(shape_.elementCount()));
}

index_t DenseTensor::linearOffset(const std::vector<index_t>& idx) const {
    if (static_cast<index_t>(idx.size()) != order())
        fail("ArityMismatch", "index arity " + std::to_string(idx.size()) + " for order " +
                                  std::to_string(order()));
    index_t offset = 0;
    index_t stride = 1;
    for (index_t m = 0; m < order(); ++m) {
        const index_t i = idx[static_cast<std::size_t>(m)];
        const index_t n = shape_.dims()[static_cast<std::size_t>(m)];
        if (i < 1 || i > n)
            fail("IndexOutOfRange", "index " + std::to_string(i) + " outside 1.." + std::to_string(n) +
                                        " in mode " + std::to_string(m + 1));
        offset += stride * (i - 1);
        stride *= n;
    }
    return offset;
}

double DenseTensor::entry(const std::vector<index_t>& idx) const {
    return data_[static_cast<std::size_t>(linearOffset(idx))];
}

void DenseTensor::setEntry(const std::vector<index_t>& idx, double value) {
    data_[static_cast<std::size_t>(linearOffset(idx))] = value;
}

void PermutationMap::validate() const {
    const index_t n = size();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (index_t v : map) {
        if (v < 1 || v > n)
            fail("BadPermutation", "entry " + std::to_string(v) + " outside 1.." + std::to_string(n));
        if (seen[static_cast<std::size_t>(v - 1)])
            fail("BadPermutation", "entry " + std::to_string(v) + " repeated");
        seen[static_cast<std::size_t>(v - 1)] = 1;
    }
}

PermutationMap identityMap(index_t n) {
    PermutationMap p;
    p.map.resize(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) p.map[static_cast<std::size_t>(i)] = i + 1;
    return p;
}

PermutationMap inverseMap(const PermutationMap& p) {
    PermutationMap inv;
    inv.map.assign(p.map.size(), 0);
    for (index_t t = 1; t <= p.size(); ++t) inv.map[static_cast<std::size_t>(p.source(t) - 1)] = t;
    return inv;
}

PermutationMap composeMaps(const PermutationMap& outer, const PermutationMap& inner) {
    if (outer.size() != inner.size())
        fail("ShapeMismatch", "permutation sizes differ");
    PermutationMap out;
    out.map.resize(outer.map.size());
    for (index_t t = 1; t <= outer.size(); ++t)
        out.map[static_cast<std::size_t>(t - 1)] = inner.source(outer.source(t));
    return out;
}

std::vector<double> applyPermutation(const PermutationMap& p, const std::vector<double>& x) {
    if (static_cast<index_t>(x.size()) != p.size())
        fail("ShapeMismatch", "vector length does not match permutation size");
    std::vector<double> y(x.size());
    for (index_t t = 1; t <= p.size(); ++t)
        y[static_cast<std::size_t>(t - 1)] = x[static_cast<std::size_t>(p.source(t) - 1)];
    return y;
}

DenseTensor reshape(const DenseTensor& t, Shape newShape) {
    if (newShape.elementCount() != t.elementCount())
        fail("ShapeMismatch", "reshape changes element count");
    return DenseTensor(std::move(newShape), t.data());
}

DenseTensor permuteModes(const DenseTensor& t, const std::vector<index_t>& perm) {
    const index_t k = t.order();
    if (static_cast<index_t>(perm.size()) != k)
        fail("BadPermutation", "mode permutation arity mismatch");
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    for (index_t v : perm) {
        if (v < 1 || v > k || seen[static_cast<std::size_t>(v - 1)])
            fail("BadPermutation", "mode list is not a permutation of 1..order");
        seen[static_cast<std::size_t>(v - 1)] = 1;
    }

    std::vector<index_t> outDims(static_cast<std::size_t>(k));
    for (index_t m = 0; m < k; ++m)
        outDims[static_cast<std::size_t>(m)] = t.dim(perm[static_cast<std::size_t>(m)]);
    DenseTensor out((Shape(outDims)));

    // Walk the output in storage order, advancing the matching input offset
    // through per-mode strides.
    std::vector<index_t> inStride(static_cast<std::size_t>(k), 1);
    for (index_t m = 1; m < k; ++m)
        inStride[static_cast<std::size_t>(m)] =
            inStride[static_cast<std::size_t>(m - 1)] * t.dim(m);

    std::vector<index_t> stride(static_cast<std::size_t>(k));
    for (index_t m = 0; m < k; ++m)
        stride[static_cast<std::size_t>(m)] =
            inStride[static_cast<std::size_t>(perm[static_cast<std::size_t>(m)] - 1)];

    const index_t total = t.elementCount();
    std::vector<index_t> counter(static_cast<std::size_t>(k), 0);
    index_t src = 0;
    const double* in = t.data().data();
    double* dst = out.data().data();
    for (index_t pos = 0; pos < total; ++pos) {
        dst[pos] = in[src];
        for (index_t m = 0; m < k; ++m) {
            auto mm = static_cast<std::size_t>(m);
            if (++counter[mm] < outDims[mm]) {
                src += stride[mm];
                break;
            }
            counter[mm] = 0;
            src -= stride[mm] * (outDims[mm] - 1);
        }
    }
    return out;
}

DenseTensor modeProduct(const DenseTensor& t, index_t r, const DenseTensor& u) {
    if (u.order() != 2)
        fail("ShapeMismatch", "mode-product operand must be a matrix");
    const index_t k = t.order();
    if (r < 1 || r > k)
        fail("IndexOutOfRange", "mode " + std::to_string(r) + " of " + std::to_string(k));
    const index_t rows = u.dim(1);
    const index_t cols = u.dim(2);
    const index_t nr = t.dim(r);
    if (cols != nr)
        fail("ShapeMismatch", "matrix has " + std::to_string(cols) + " columns, mode " +
                                  std::to_string(r) + " has dimension " + std::to_string(nr));

    index_t before = 1;
    for (index_t m = 1; m < r; ++m) before *= t.dim(m);
    index_t after = 1;
    for (index_t m = r + 1; m <= k; ++m) after *= t.dim(m);

    std::vector<index_t> outDims = t.shape().dims();
    outDims[static_cast<std::size_t>(r - 1)] = rows;
    DenseTensor out((Shape(outDims)));

    const double* in = t.data().data();
    const double* um = u.data().data();  // column-major rows x cols
    double* dst = out.data().data();
    for (index_t a = 0; a < after; ++a) {
        const double* inSlab = in + a * before * nr;
        double* outSlab = dst + a * before * rows;
        for (index_t j = 0; j < nr; ++j) {
            const double* inCol = inSlab + j * before;
            const double* uCol = um + j * rows;
            for (index_t i = 0; i < rows; ++i) {
                const double w = uCol[i];
                if (w == 0.0) continue;
                double* outCol = outSlab + i * before;
                for (index_t b = 0; b < before; ++b) outCol[b] += w * inCol[b];
            }
        }
    }
    return out;
}

namespace {

double pairwiseSumImpl(const double* data, index_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (index_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const index_t half = n / 2;
    return pairwiseSumImpl(data, half) + pairwiseSumImpl(data + half, n - half);
}

} // namespace

double pairwiseSum(const double* data, index_t n) { return pairwiseSumImpl(data, n); }

double inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape())
        fail("ShapeMismatch", "inner product requires identical shapes");
    const index_t n = a.elementCount();
    std::vector<double> prod(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i)
        prod[static_cast<std::size_t>(i)] = a.data()[static_cast<std::size_t>(i)] *
                                            b.data()[static_cast<std::size_t>(i)];
    return pairwiseSum(prod.data(), n);
}

double frobeniusNorm(const DenseTensor& t) { return std::sqrt(inner(t, t)); }

DenseTensor outerRank1(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty())
        fail("EmptyInput", "outer product needs at least one vector");
    std::vector<index_t> dims;
    dims.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.empty())
            fail("EmptyInput", "outer product vector is empty");
        dims.push_back(static_cast<index_t>(v.size()));
    }
    DenseTensor out((Shape(dims)));
    double* dst = out.data().data();
    const index_t total = out.elementCount();
    std::vector<index_t> counter(vectors.size(), 0);
    for (index_t pos = 0; pos < total; ++pos) {
        double p = 1.0;
        for (std::size_t m = 0; m < vectors.size(); ++m)
            p *= vectors[m][static_cast<std::size_t>(counter[m])];
        dst[pos] = p;
        for (std::size_t m = 0; m < vectors.size(); ++m) {
            if (++counter[m] < dims[m]) break;
            counter[m] = 0;
        }
    }
    return out;
}

DenseTensor tensorKron(const DenseTensor& b, const DenseTensor& c) {
    const index_t k = b.order();
    if (c.order() != k)
        fail("OrderMismatch", "Kronecker factors must have equal order");

    // vec-level Kronecker product: index of c varies fastest.
    const index_t nb = b.elementCount();
    const index_t nc = c.elementCount();
    std::vector<double> v(static_cast<std::size_t>(checkedMul(nb, nc)));
    for (index_t jb = 0; jb < nb; ++jb) {
        const double bv = b.data()[static_cast<std::size_t>(jb)];
        double* slab = v.data() + jb * nc;
        const double* cd = c.data().data();
        for (index_t ic = 0; ic < nc; ++ic) slab[ic] = bv * cd[ic];
    }

    // Reshape to (c-dims, b-dims), interleave to (c1,b1,c2,b2,...), then
    // group each adjacent pair into one mode.
    std::vector<index_t> splitDims;
    splitDims.reserve(static_cast<std::size_t>(2 * k));
    for (index_t m = 1; m <= k; ++m) splitDims.push_back(c.dim(m));
    for (index_t m = 1; m <= k; ++m) splitDims.push_back(b.dim(m));
    DenseTensor split(Shape(splitDims), std::move(v));

    std::vector<index_t> perm;
    perm.reserve(static_cast<std::size_t>(2 * k));
    for (index_t m = 1; m <= k; ++m) {
        perm.push_back(m);
        perm.push_back(k + m);
    }
    DenseTensor interleaved = permuteModes(split, perm);

    std::vector<index_t> outDims(static_cast<std::size_t>(k));
    for (index_t m = 1; m <= k; ++m)
        outDims[static_cast<std::size_t>(m - 1)] = checkedMul(c.dim(m), b.dim(m));
    return reshape(interleaved, Shape(outDims));
}

DenseTensor tensorKronChain(const std::vector<DenseTensor>& factors) {
    if (factors.empty())
        fail("EmptyInput", "Kronecker chain needs at least one factor");
    DenseTensor acc = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) acc = tensorKron(acc, factors[i]);
    return acc;
}

} // namespace tkp
