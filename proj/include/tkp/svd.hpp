#pragma once

#include <vector>

#include "tkp/tensor.hpp"

namespace tkp {

// Economy-size SVD A = U diag(s) V^T with p = min(m, n) columns.
// Deterministic: s is nonincreasing, and in each column of U the
// largest-magnitude entry (first on ties) is nonnegative, with V's column
// flipped to compensate.
struct SvdResult {
    DenseTensor U;          // m x p
    std::vector<double> s;  // p nonincreasing nonnegative values
    DenseTensor V;          // n x p
};

struct SvdTriple {
    double sigma;
    std::vector<double> u;
    std::vector<double> v;
};

// Input must be an order-2 tensor with finite entries.
SvdResult economySvd(const DenseTensor& a);

// Triples whose sigma is positive and at least tol * s[0], in order.
std::vector<SvdTriple> truncatedTriples(const SvdResult& res, double tol);

} // namespace tkp
