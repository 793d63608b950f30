#include "tkp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <string>
#include <utility>

namespace tkp {

namespace {

std::size_t toSize(index_t i) { return static_cast<std::size_t>(i); }

index_t cubicalDim(const Shape& shape, const char* what) {
    const auto& dims = shape.dims();
    for (index_t n : dims)
        if (n != dims[0]) fail("ShapeMismatch", std::string(what) + " needs a cubical shape");
    return dims[0];
}

// pos is a 0-based linear position, idx a 1-based multi-index.
void unravelIndex(index_t pos, const std::vector<index_t>& dims, std::vector<index_t>& idx) {
    for (std::size_t r = 0; r < dims.size(); ++r) {
        idx[r] = pos % dims[r] + 1;
        pos /= dims[r];
    }
}

index_t ravelIndex(const std::vector<index_t>& idx, const std::vector<index_t>& dims) {
    index_t pos = 0;
    index_t stride = 1;
    for (std::size_t r = 0; r < dims.size(); ++r) {
        pos += (idx[r] - 1) * stride;
        stride *= dims[r];
    }
    return pos;
}

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Cycles every equivalence class through its members in ascending order, so
// the fixed vectors of the result are exactly the class-constant ones.
PermutationMap classesToMap(DisjointSets& sets, index_t n) {
    std::vector<std::vector<index_t>> classes(toSize(n));
    for (index_t p = 0; p < n; ++p) classes[sets.find(toSize(p))].push_back(p);
    PermutationMap m;
    m.map.resize(toSize(n));
    for (const auto& members : classes) {
        for (std::size_t t = 0; t < members.size(); ++t) {
            const index_t next = members[(t + 1) % members.size()];
            m.map[toSize(members[t])] = next + 1;
        }
    }
    return m;
}

void validatePattern(const Shape& shape, const ShiftPattern& pattern) {
    if (static_cast<index_t>(pattern.shifts.size()) != shape.order())
        fail("ArityMismatch", "shift pattern has " + std::to_string(pattern.shifts.size()) +
                                  " components for an order-" + std::to_string(shape.order()) +
                                  " tensor");
    index_t magnitude = 0;
    for (index_t s : pattern.shifts) {
        if (s == 0) continue;
        const index_t a = s < 0 ? -s : s;
        if (magnitude == 0)
            magnitude = a;
        else if (a != magnitude)
            fail("BadShiftPattern", "nonzero shifts must share one magnitude");
    }
    if (magnitude == 0) fail("BadShiftPattern", "shift pattern needs a nonzero component");
}

PermutationMap shiftedMapImpl(const Shape& shape, const ShiftPattern& pattern,
                              const StructureKind* base) {
    validatePattern(shape, pattern);
    const auto& dims = shape.dims();
    const index_t n = shape.elementCount();
    DisjointSets sets(toSize(n));
    std::vector<index_t> idx(dims.size());
    std::vector<index_t> moved(dims.size());
    for (index_t p = 0; p < n; ++p) {
        unravelIndex(p, dims, idx);
        bool inside = true;
        for (std::size_t r = 0; r < dims.size(); ++r) {
            moved[r] = idx[r] + pattern.shifts[r];
            if (moved[r] < 1 || moved[r] > dims[r]) {
                inside = false;
                break;
            }
        }
        if (inside) sets.unite(toSize(p), toSize(ravelIndex(moved, dims)));
    }
    if (base != nullptr) {
        if (base->tag == StructureTag::Symmetric) {
            cubicalDim(shape, "symmetric closure");
            for (index_t p = 0; p < n; ++p) {
                unravelIndex(p, dims, idx);
                std::sort(idx.begin(), idx.end());
                sets.unite(toSize(p), toSize(ravelIndex(idx, dims)));
            }
        } else {
            const PermutationMap bmap = structureMap(*base, shape);
            for (index_t p = 0; p < n; ++p) sets.unite(toSize(p), toSize(bmap.map[toSize(p)] - 1));
        }
    }
    return classesToMap(sets, n);
}

ShiftPattern unitDiagonal(index_t order) {
    ShiftPattern p;
    p.shifts.assign(toSize(order), 1);
    return p;
}

ShiftPattern unitAntidiagonal(index_t order) {
    ShiftPattern p;
    p.shifts.assign(toSize(order), 0);
    p.shifts[0] = 1;
    if (order > 1) p.shifts[1] = -1;
    return p;
}

StructureReport checkAgainst(StructureReport report, const DenseTensor& t,
                             const PermutationMap& p, double tol) {
    if (p.size() != t.elementCount())
        fail("ShapeMismatch", "permutation size " + std::to_string(p.size()) +
                                  " differs from element count " +
                                  std::to_string(t.elementCount()));
    const double norm = frobeniusNorm(t);
    if (norm == 0.0) {
        report.sign = +1;
        report.residual = 0.0;
        report.structured = true;
        return report;
    }
    const index_t n = p.size();
    const auto& x = t.data();
    std::vector<double> plusSq(toSize(n));   // terms of ||Pa - a||^2
    std::vector<double> minusSq(toSize(n));  // terms of ||Pa + a||^2
    for (index_t i = 0; i < n; ++i) {
        const double pai = x[toSize(p.map[toSize(i)] - 1)] / norm;
        const double ai = x[toSize(i)] / norm;
        plusSq[toSize(i)] = (pai - ai) * (pai - ai);
        minusSq[toSize(i)] = (pai + ai) * (pai + ai);
    }
    const double residualPlus = std::sqrt(pairwiseSum(plusSq.data(), n));
    const double residualMinus = std::sqrt(pairwiseSum(minusSq.data(), n));
    report.sign = residualPlus <= residualMinus ? +1 : -1;
    report.residual = std::min(residualPlus, residualMinus);
    report.structured = report.residual <= tol;
    return report;
}

}  // namespace

StructureKind StructureKind::symmetric() { return StructureKind{}; }

StructureKind StructureKind::persymmetric() {
    StructureKind k;
    k.tag = StructureTag::Persymmetric;
    return k;
}

StructureKind StructureKind::centrosymmetric() {
    StructureKind k;
    k.tag = StructureTag::Centrosymmetric;
    return k;
}

StructureKind StructureKind::toeplitz() {
    StructureKind k;
    k.tag = StructureTag::Toeplitz;
    return k;
}

StructureKind StructureKind::hankel() {
    StructureKind k;
    k.tag = StructureTag::Hankel;
    return k;
}

StructureKind StructureKind::toeplitz(ShiftPattern custom) {
    StructureKind k = toeplitz();
    k.shift = std::move(custom);
    return k;
}

StructureKind StructureKind::hankel(ShiftPattern custom) {
    StructureKind k = hankel();
    k.shift = std::move(custom);
    return k;
}

StructureKind StructureKind::generalSymmetric(PermutationMap p) {
    p.validate();
    StructureKind k;
    k.tag = StructureTag::GeneralSymmetric;
    k.general = std::move(p);
    return k;
}

std::string StructureKind::name() const {
    switch (tag) {
        case StructureTag::Symmetric: return "symmetric";
        case StructureTag::Persymmetric: return "persymmetric";
        case StructureTag::Centrosymmetric: return "centrosymmetric";
        case StructureTag::Toeplitz: return "toeplitz";
        case StructureTag::Hankel: return "hankel";
        case StructureTag::GeneralSymmetric: return "general";
    }
    return "unknown";
}

double NormalRng::uniform() {
    // 53 uniform bits in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalRng::next() {
    const double u1 = 1.0 - uniform();  // in (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PermutationMap perfectShuffle(index_t n, index_t k) {
    if (n < 1 || k < 1) fail("ShapeMismatch", "perfect shuffle needs n >= 1 and k >= 1");
    index_t block = 1;  // n^(k-1)
    for (index_t i = 1; i < k; ++i) block = checkedMul(block, n);
    const index_t total = checkedMul(block, n);
    PermutationMap s;
    s.map.resize(toSize(total));
    for (index_t o = 0; o < block; ++o)
        for (index_t j = 0; j < n; ++j) s.map[toSize(o * n + j)] = o + j * block + 1;
    return s;
}

PermutationMap exchangeMap(index_t n) {
    if (n < 1) fail("ShapeMismatch", "exchange map needs n >= 1");
    PermutationMap j;
    j.map.resize(toSize(n));
    for (index_t p = 0; p < n; ++p) j.map[toSize(p)] = n - p;
    return j;
}

PermutationMap persymMap(index_t n, index_t k) {
    PermutationMap s = perfectShuffle(n, k);
    PermutationMap j = exchangeMap(s.size());
    return composeMaps(s, j);
}

PermutationMap shiftedIndexMap(const Shape& shape, const ShiftPattern& pattern) {
    return shiftedMapImpl(shape, pattern, nullptr);
}

PermutationMap shiftedIndexMap(const Shape& shape, const ShiftPattern& pattern,
                               const StructureKind& base) {
    return shiftedMapImpl(shape, pattern, &base);
}

PermutationMap structureMap(const StructureKind& kind, const Shape& shape) {
    switch (kind.tag) {
        case StructureTag::Symmetric:
            return perfectShuffle(cubicalDim(shape, "symmetric structure"), shape.order());
        case StructureTag::Persymmetric:
            return persymMap(cubicalDim(shape, "persymmetric structure"), shape.order());
        case StructureTag::Centrosymmetric:
            return exchangeMap(shape.elementCount());
        case StructureTag::Toeplitz:
            return shiftedIndexMap(shape, kind.shift ? *kind.shift : unitDiagonal(shape.order()));
        case StructureTag::Hankel:
            return shiftedIndexMap(shape, kind.shift ? *kind.shift : unitAntidiagonal(shape.order()),
                                   StructureKind::symmetric());
        case StructureTag::GeneralSymmetric:
            if (kind.general.size() != shape.elementCount())
                fail("ShapeMismatch", "permutation size differs from element count");
            return kind.general;
    }
    fail("ShapeMismatch", "unknown structure kind");
}

std::vector<PermutationMap> factorMaps(const StructureKind& kind, const FactorGrid& grid) {
    grid.validate();
    std::vector<PermutationMap> parts;
    parts.reserve(toSize(grid.d));
    for (index_t i = 1; i <= grid.d; ++i) parts.push_back(structureMap(kind, grid.factorShape(i)));
    return parts;
}

PermutationMap composeFactored(const std::vector<PermutationMap>& parts, const FactorGrid& grid) {
    grid.validate();
    if (static_cast<index_t>(parts.size()) != grid.d)
        fail("ShapeMismatch", "expected one permutation per factor");
    std::vector<index_t> counts(toSize(grid.d));
    for (index_t i = 1; i <= grid.d; ++i) {
        counts[toSize(i - 1)] = grid.factorElementCount(i);
        if (parts[toSize(i - 1)].size() != counts[toSize(i - 1)])
            fail("ShapeMismatch", "factor " + std::to_string(i) + " permutation size mismatch");
    }
    const PermutationMap q = buildQPermutation(grid);
    const PermutationMap qinv = inverseMap(q);
    const index_t n = q.size();

    // Kronecker product of the factor permutations on the regrouped space:
    // digit i (factor 1 fastest) moves through parts[i] independently.
    std::vector<index_t> kmap(toSize(n));  // 0-based source positions
    std::vector<index_t> digit(toSize(grid.d), 0);
    for (index_t t = 0; t < n; ++t) {
        index_t src = 0;
        index_t stride = 1;
        for (std::size_t i = 0; i < toSize(grid.d); ++i) {
            src += (parts[i].map[toSize(digit[i])] - 1) * stride;
            stride *= counts[i];
        }
        kmap[toSize(t)] = src;
        for (std::size_t i = 0; i < toSize(grid.d); ++i) {
            if (++digit[i] < counts[i]) break;
            digit[i] = 0;
        }
    }

    PermutationMap total;
    total.map.resize(toSize(n));
    for (index_t t = 0; t < n; ++t)
        total.map[toSize(t)] = q.map[toSize(kmap[toSize(qinv.map[toSize(t)] - 1)])];
    return total;
}

DenseTensor generate(const StructureKind& kind, const Shape& shape, std::uint64_t seed) {
    NormalRng rng(seed);
    const index_t n = shape.elementCount();
    std::vector<double> data(toSize(n), 0.0);
    if (kind.tag == StructureTag::Symmetric) {
        // Full index-permutation symmetry is richer than the cyclic shifts
        // the perfect shuffle encodes, so classes come from sorted tuples.
        cubicalDim(shape, "symmetric structure");
        const auto& dims = shape.dims();
        std::vector<index_t> idx(dims.size());
        std::map<std::vector<index_t>, double> drawn;
        for (index_t p = 0; p < n; ++p) {
            unravelIndex(p, dims, idx);
            std::sort(idx.begin(), idx.end());
            auto it = drawn.find(idx);
            if (it == drawn.end()) it = drawn.emplace(idx, rng.next()).first;
            data[toSize(p)] = it->second;
        }
    } else {
        const PermutationMap pm = structureMap(kind, shape);
        std::vector<char> seen(toSize(n), 0);
        for (index_t p = 0; p < n; ++p) {
            if (seen[toSize(p)]) continue;
            const double value = rng.next();
            index_t cur = p;
            while (!seen[toSize(cur)]) {
                seen[toSize(cur)] = 1;
                data[toSize(cur)] = value;
                cur = pm.map[toSize(cur)] - 1;
            }
        }
    }
    return DenseTensor(shape, std::move(data));
}

DenseTensor permutationMatrix(const PermutationMap& p) {
    const index_t n = p.size();
    if (n < 1) fail("EmptyInput", "permutation is empty");
    if (n > 4096)
        fail("SizeOverflow", "dense form is limited to size 4096; export the index pattern instead");
    DenseTensor m(Shape({n, n}));
    for (index_t row = 1; row <= n; ++row) m.setEntry({row, p.source(row)}, 1.0);
    return m;
}

StructureReport checkStructure(const DenseTensor& t, const PermutationMap& p, double tol) {
    StructureReport report;
    report.kind = StructureKind::generalSymmetric(p);
    return checkAgainst(std::move(report), t, p, tol);
}

StructureReport checkStructure(const DenseTensor& t, const StructureKind& kind, double tol) {
    StructureReport report;
    report.kind = kind;
    return checkAgainst(std::move(report), t, structureMap(kind, t.shape()), tol);
}

std::vector<TermStructureSummary> analyzePreservation(const TkpsvdResult& res,
                                                      const std::vector<PermutationMap>& parts,
                                                      double tol) {
    if (static_cast<index_t>(parts.size()) != res.grid.d)
        fail("ShapeMismatch", "expected one permutation per factor");
    for (index_t i = 1; i <= res.grid.d; ++i)
        if (parts[toSize(i - 1)].size() != res.grid.factorElementCount(i))
            fail("ShapeMismatch", "factor " + std::to_string(i) + " permutation size mismatch");
    std::vector<TermStructureSummary> out;
    out.reserve(res.factors.size());
    for (index_t j = 1; j <= res.termCount(); ++j) {
        const auto& term = res.factors[toSize(j - 1)];
        TermStructureSummary summary;
        summary.allStructured = true;
        for (index_t i = 0; i < res.grid.d; ++i) {
            const StructureReport rep = checkStructure(term[toSize(i)], parts[toSize(i)], tol);
            summary.signs.push_back(rep.sign);
            summary.residuals.push_back(rep.residual);
            if (!rep.structured)
                summary.allStructured = false;
            else if (rep.sign == -1)
                ++summary.skewCount;
        }
        summary.sigmaMultiplet = res.inMultiplet(j);
        out.push_back(std::move(summary));
    }
    return out;
}

std::vector<TermStructureSummary> analyzePreservation(const TkpsvdResult& res,
                                                      const StructureKind& kind, double tol) {
    return analyzePreservation(res, factorMaps(kind, res.grid), tol);
}

}  // namespace tkp
