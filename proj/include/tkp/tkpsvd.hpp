#pragma once

#include <vector>

#include "tkp/decomposition.hpp"
#include "tkp/tensor.hpp"

namespace tkp {

// Per-factor dimension grid: dims[i-1][r-1] = n(i)_r, the size of factor
// A(i) along mode r. Factor i = 1 is the RIGHTMOST Kronecker factor in the
// reconstruction A = sum_j sigma_j A(d)_j (x) ... (x) A(1)_j.
struct FactorGrid {
    index_t d = 0;  // degree (number of factors per term)
    index_t k = 0;  // tensor order
    std::vector<std::vector<index_t>> dims;

    // Structural checks (row/column counts, dims >= 1). Throws ShapeMismatch.
    void validate() const;

    Shape factorShape(index_t i) const;        // i is 1-based
    index_t factorElementCount(index_t i) const;
    // d-way shape of the regrouped tensor: mode i has size prod_r n(i)_r.
    Shape regroupedShape() const;
    // Shape of the full tensor: mode r has size prod_i n(i)_r.
    Shape targetShape() const;
    bool matches(const Shape& target) const;
};

struct TkpsvdResult {
    FactorGrid grid;
    std::vector<double> sigmas;  // descending, nonnegative
    // factors[j-1][i-1] = A(i) of term j, unit Frobenius norm.
    std::vector<std::vector<DenseTensor>> factors;
    Backend backend = Backend::TTR1;
    double sourceNorm = 0.0;
    // Groups (size >= 2) of 1-based term indices whose sigmas chain with
    // adjacent gaps <= 1e-8 * sigma_1. Per-term structure guarantees do not
    // apply inside these groups.
    std::vector<std::vector<index_t>> multiplets;

    index_t termCount() const { return static_cast<index_t>(sigmas.size()); }
    bool inMultiplet(index_t j) const;  // j is 1-based
};

// The permutation Q with vec(regrouped) = Q * vec(A): reshape A to a
// (k*d)-way tensor (per mode, factor dims i = 1..d), permute so each
// factor's k modes become adjacent, flatten.
PermutationMap buildQPermutation(const FactorGrid& grid);

// Detects near-equal sigma groups by chaining adjacent relative gaps.
std::vector<std::vector<index_t>> detectMultiplets(const std::vector<double>& sigmas,
                                                   double relGap = 1e-8);

TkpsvdResult tkpsvd(const DenseTensor& a, const FactorGrid& grid, Backend backend, double tol);

// Decomposition of a diagonal tensor given only its main diagonal. dims are
// the per-factor diagonal lengths; their product is the diagonal length.
// The result carries the factor DIAGONALS as order-1 tensors (grid k = 1);
// reconstructKP on it returns the diagonal. The full tensor is never formed.
TkpsvdResult tkpsvdDiagonal(const std::vector<double>& diag, const std::vector<index_t>& dims,
                            Backend backend, double tol);

// Order-k tensor of shape n x ... x n with the given main diagonal, for
// callers that want a diagonal factor as a full tensor.
DenseTensor diagonalTensor(const std::vector<double>& diag, index_t k);

// sum_{j<=r} sigma_j * A(d)_j (x) ... (x) A(1)_j.
DenseTensor reconstructKP(const TkpsvdResult& res, index_t r);
DenseTensor reconstructKP(const TkpsvdResult& res);

// sqrt(sum_{j>r} sigma_j^2) / sqrt(sum_j sigma_j^2), no reconstruction.
double relativeError(const std::vector<double>& sigmas, index_t r);

} // namespace tkp
