#include "tkp/tkpsvd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tkp {

void FactorGrid::validate() const {
    if (d < 1 || k < 1)
        fail("ShapeMismatch", "grid needs d >= 1 and k >= 1");
    if (static_cast<index_t>(dims.size()) != d)
        fail("ShapeMismatch", "grid has " + std::to_string(dims.size()) + " factor rows, expected " +
                                  std::to_string(d));
    for (const auto& row : dims) {
        if (static_cast<index_t>(row.size()) != k)
            fail("ShapeMismatch", "grid row arity differs from order");
        for (index_t n : row)
            if (n < 1) fail("ShapeMismatch", "grid dimension " + std::to_string(n) + " is < 1");
    }
}

Shape FactorGrid::factorShape(index_t i) const {
    if (i < 1 || i > d)
        fail("IndexOutOfRange", "factor " + std::to_string(i) + " of " + std::to_string(d));
    return Shape(dims[static_cast<std::size_t>(i - 1)]);
}

index_t FactorGrid::factorElementCount(index_t i) const {
    return factorShape(i).elementCount();
}

Shape FactorGrid::regroupedShape() const {
    std::vector<index_t> out(static_cast<std::size_t>(d), 1);
    for (index_t i = 1; i <= d; ++i) out[static_cast<std::size_t>(i - 1)] = factorElementCount(i);
    return Shape(out);
}

Shape FactorGrid::targetShape() const {
    std::vector<index_t> out(static_cast<std::size_t>(k), 1);
    for (index_t r = 0; r < k; ++r) {
        index_t p = 1;
        for (index_t i = 0; i < d; ++i)
            p = checkedMul(p, dims[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)]);
        out[static_cast<std::size_t>(r)] = p;
    }
    return Shape(out);
}

bool FactorGrid::matches(const Shape& target) const {
    if (target.order() != k) return false;
    return targetShape() == target;
}

bool TkpsvdResult::inMultiplet(index_t j) const {
    for (const auto& group : multiplets)
        for (index_t member : group)
            if (member == j) return true;
    return false;
}

PermutationMap buildQPermutation(const FactorGrid& grid) {
    grid.validate();
    const index_t d = grid.d;
    const index_t k = grid.k;
    const index_t kd = checkedMul(k, d);

    // Source modes of the (k*d)-way reshape: mode (r-1)*d + i holds n(i)_r,
    // mode-1 factors first. Target mode q (0-based) takes source mode
    // (q % k) * d + q / k, grouping each factor's k modes together.
    std::vector<index_t> srcDims(static_cast<std::size_t>(kd));
    for (index_t r = 0; r < k; ++r)
        for (index_t i = 0; i < d; ++i)
            srcDims[static_cast<std::size_t>(r * d + i)] =
                grid.dims[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];

    std::vector<index_t> srcStride(static_cast<std::size_t>(kd), 1);
    for (index_t q = 1; q < kd; ++q)
        srcStride[static_cast<std::size_t>(q)] =
            checkedMul(srcStride[static_cast<std::size_t>(q - 1)], srcDims[static_cast<std::size_t>(q - 1)]);

    std::vector<index_t> tgtDims(static_cast<std::size_t>(kd));
    std::vector<index_t> tgtStride(static_cast<std::size_t>(kd));
    for (index_t q = 0; q < kd; ++q) {
        const index_t src = (q % k) * d + q / k;
        tgtDims[static_cast<std::size_t>(q)] = srcDims[static_cast<std::size_t>(src)];
        tgtStride[static_cast<std::size_t>(q)] = srcStride[static_cast<std::size_t>(src)];
    }

    const index_t total = grid.targetShape().elementCount();
    PermutationMap q;
    q.map.resize(static_cast<std::size_t>(total));
    std::vector<index_t> counter(static_cast<std::size_t>(kd), 0);
    index_t src = 0;
    for (index_t pos = 0; pos < total; ++pos) {
        q.map[static_cast<std::size_t>(pos)] = src + 1;
        for (index_t m = 0; m < kd; ++m) {
            auto mm = static_cast<std::size_t>(m);
            if (++counter[mm] < tgtDims[mm]) {
                src += tgtStride[mm];
                break;
            }
            counter[mm] = 0;
            src -= tgtStride[mm] * (tgtDims[mm] - 1);
        }
    }
    return q;
}

std::vector<std::vector<index_t>> detectMultiplets(const std::vector<double>& sigmas,
                                                   double relGap) {
    std::vector<std::vector<index_t>> groups;
    if (sigmas.empty()) return groups;
    const double gap = relGap * sigmas.front();
    std::vector<index_t> current{1};
    for (std::size_t j = 1; j < sigmas.size(); ++j) {
        if (std::abs(sigmas[j - 1] - sigmas[j]) <= gap) {
            current.push_back(static_cast<index_t>(j) + 1);
        } else {
            if (current.size() >= 2) groups.push_back(current);
            current = {static_cast<index_t>(j) + 1};
        }
    }
    if (current.size() >= 2) groups.push_back(current);
    return groups;
}

namespace {

TkpsvdResult fromPolyadic(const FactorGrid& grid, PolyadicDecomposition pd, double sourceNorm) {
    TkpsvdResult res;
    res.grid = grid;
    res.backend = pd.backend;
    res.sourceNorm = sourceNorm;
    res.sigmas.reserve(pd.terms.size());
    res.factors.reserve(pd.terms.size());
    for (auto& term : pd.terms) {
        res.sigmas.push_back(term.sigma);
        std::vector<DenseTensor> row;
        row.reserve(static_cast<std::size_t>(grid.d));
        for (index_t i = 1; i <= grid.d; ++i)
            row.emplace_back(grid.factorShape(i),
                             std::move(term.vectors[static_cast<std::size_t>(i - 1)]));
        res.factors.push_back(std::move(row));
    }
    res.multiplets = detectMultiplets(res.sigmas);
    return res;
}

TkpsvdResult singleFactorResult(const FactorGrid& grid, const Shape& shape,
                                const std::vector<double>& data, Backend backend) {
    TkpsvdResult res;
    res.grid = grid;
    res.backend = backend;
    DenseTensor t(shape, data);
    res.sourceNorm = frobeniusNorm(t);
    if (res.sourceNorm > 0.0) {
        std::vector<double> unit = data;
        for (double& x : unit) x /= res.sourceNorm;
        res.sigmas.push_back(res.sourceNorm);
        res.factors.push_back({DenseTensor(shape, std::move(unit))});
    }
    return res;
}

TkpsvdResult runBackend(const FactorGrid& grid, DenseTensor regrouped, Backend backend,
                        double tol, double sourceNorm) {
    if (grid.d == 1)
        return singleFactorResult(grid, grid.factorShape(1), regrouped.data(), backend);
    PolyadicDecomposition pd = backend == Backend::TTR1
                                   ? ttr1svd(regrouped, tol)
                                   : hosvdTerms(hosvd(regrouped), tol);
    return fromPolyadic(grid, std::move(pd), sourceNorm);
}

} // namespace

TkpsvdResult tkpsvd(const DenseTensor& a, const FactorGrid& grid, Backend backend, double tol) {
    grid.validate();
    if (!grid.matches(a.shape()))
        fail("ShapeMismatch", "factor grid does not multiply out to the tensor shape");

    const PermutationMap q = buildQPermutation(grid);
    DenseTensor regrouped(grid.regroupedShape(), applyPermutation(q, a.data()));
    return runBackend(grid, std::move(regrouped), backend, tol, frobeniusNorm(a));
}

TkpsvdResult tkpsvdDiagonal(const std::vector<double>& diag, const std::vector<index_t>& dims,
                            Backend backend, double tol) {
    if (dims.empty())
        fail("ShapeMismatch", "diagonal grid needs at least one factor");
    FactorGrid grid;
    grid.d = static_cast<index_t>(dims.size());
    grid.k = 1;
    for (index_t n : dims) grid.dims.push_back({n});
    grid.validate();
    if (grid.targetShape().elementCount() != static_cast<index_t>(diag.size()))
        fail("ShapeMismatch", "diagonal length does not match the factor dimension product");

    // Regrouping a vector is the identity permutation: run the backend on the
    // diagonal reshaped to a d-way tensor.
    DenseTensor regrouped(grid.regroupedShape(), diag);
    const double norm = frobeniusNorm(regrouped);
    return runBackend(grid, std::move(regrouped), backend, tol, norm);
}

DenseTensor diagonalTensor(const std::vector<double>& diag, index_t k) {
    if (k < 1)
        fail("ShapeMismatch", "diagonal tensor order must be >= 1");
    if (diag.empty())
        fail("EmptyInput", "diagonal is empty");
    const index_t n = static_cast<index_t>(diag.size());
    std::vector<index_t> dims(static_cast<std::size_t>(k), n);
    DenseTensor out((Shape(dims)));
    index_t stride = 0;  // 1 + n + n^2 + ... + n^(k-1)
    index_t p = 1;
    for (index_t m = 0; m < k; ++m) {
        stride += p;
        p = checkedMul(p, n);
    }
    for (index_t i = 0; i < n; ++i)
        out.data()[static_cast<std::size_t>(i * stride)] = diag[static_cast<std::size_t>(i)];
    return out;
}

DenseTensor reconstructKP(const TkpsvdResult& res, index_t r) {
    if (r < 0 || r > res.termCount())
        fail("IndexOutOfRange", "term count " + std::to_string(r) + " outside 0.." +
                                    std::to_string(res.termCount()));
    DenseTensor acc(res.grid.targetShape());
    for (index_t j = 0; j < r; ++j) {
        const auto& row = res.factors[static_cast<std::size_t>(j)];
        std::vector<DenseTensor> chain(row.rbegin(), row.rend());  // A(d) first
        DenseTensor t = tensorKronChain(chain);
        const double sigma = res.sigmas[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < acc.data().size(); ++i)
            acc.data()[i] += sigma * t.data()[i];
    }
    return acc;
}

DenseTensor reconstructKP(const TkpsvdResult& res) { return reconstructKP(res, res.termCount()); }

double relativeError(const std::vector<double>& sigmas, index_t r) {
    if (sigmas.empty())
        fail("EmptyInput", "sigma list is empty");
    const index_t n = static_cast<index_t>(sigmas.size());
    if (r < 0 || r > n)
        fail("IndexOutOfRange", "truncation " + std::to_string(r) + " outside 0.." +
                                    std::to_string(n));
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j) {
        const double s = sigmas[static_cast<std::size_t>(j)];
        sq[static_cast<std::size_t>(j)] = s * s;
    }
    const double total = pairwiseSum(sq.data(), n);
    if (total == 0.0) return 0.0;
    const double tail = pairwiseSum(sq.data() + r, n - r);
    return std::sqrt(tail) / std::sqrt(total);
}

} // namespace tkp
