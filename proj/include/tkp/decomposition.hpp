#pragma once

#include <vector>

#include "tkp/svd.hpp"
#include "tkp/tensor.hpp"

namespace tkp {

enum class Backend { TTR1, HOSVD };

// One rank-1 term sigma * a(1) o a(2) o ... o a(d) of a polyadic expansion.
// path records where the term came from: the branch indices of the TTr1
// recursion tree, or the core multi-index for HOSVD. It is the deterministic
// tie-breaker when sigmas collide.
struct Rank1Term {
    double sigma = 0.0;                        // nonnegative
    std::vector<std::vector<double>> vectors;  // d unit-norm vectors
    std::vector<index_t> path;                 // 1-based
};

struct PolyadicDecomposition {
    Shape shape;  // shape of the decomposed tensor
    std::vector<Rank1Term> terms;
    Backend backend = Backend::TTR1;
};

// Tucker form A = S x1 U(1) x2 ... xk U(k). Factors have orthonormal
// columns; the core keeps min(n_i, product of the other dims) entries per
// mode, which equals the input dimension unless one mode dominates.
struct HosvdCore {
    DenseTensor core;
    std::vector<DenseTensor> factors;
};

// Orthogonal rank-1 expansion by recursive reshape+SVD along mode 1.
// A term survives when its root-to-leaf sigma product is positive and at
// least tol times the top root-level singular value. Terms are sorted by
// sigma descending, ties by path ascending.
PolyadicDecomposition ttr1svd(const DenseTensor& t, double tol);

// Upper bound on the TTr1 term count for a given shape.
index_t ttr1TermBound(const Shape& shape);

HosvdCore hosvd(const DenseTensor& t);

// One term per core entry with |entry| positive and at least tol * max|core|;
// the entry's sign is folded into the mode-1 vector.
PolyadicDecomposition hosvdTerms(const HosvdCore& core, double tol);

DenseTensor expandTerm(const Rank1Term& term);

// Sum of the first r expanded terms; r = 0 gives the zero tensor.
DenseTensor reconstructPD(const PolyadicDecomposition& pd, index_t r);
DenseTensor reconstructPD(const PolyadicDecomposition& pd);

} // namespace tkp
