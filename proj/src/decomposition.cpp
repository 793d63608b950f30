#include "tkp/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tkp {

namespace {

// Running product of path sigmas kept as mantissa in [0.5, 1) plus a base-2
// exponent, so deep trees cannot underflow the comparison against the cutoff.
struct PathScale {
    double mant = 0.5;
    int exp = 1;  // value = ldexp(mant, exp)

    static PathScale one() { return {0.5, 1}; }

    PathScale times(double sigma) const {
        int e = 0;
        const double m = std::frexp(mant * sigma, &e);
        return {m, exp + e};
    }

    double value() const { return std::ldexp(mant, exp); }
};

struct Ttr1State {
    double cutoff = 0.0;  // absolute: tol * top root sigma
    std::vector<Rank1Term> terms;
    std::vector<std::vector<double>> stack;  // mode vectors collected so far
    std::vector<index_t> path;
};

void ttr1Recurse(Ttr1State& st, const std::vector<double>& vec,
                 const std::vector<index_t>& dims, std::size_t level, PathScale scale) {
    const index_t rows = dims[level];
    const index_t cols = static_cast<index_t>(vec.size()) / rows;
    const SvdResult svd = economySvd(DenseTensor(Shape({rows, cols}), vec));

    const bool leaf = (level + 2 == dims.size());
    for (std::size_t j = 0; j < svd.s.size(); ++j) {
        const PathScale child = scale.times(svd.s[j]);
        const double sigma = child.value();
        if (!(sigma > 0.0) || sigma < st.cutoff) continue;

        const double* ucol = svd.U.data().data() + static_cast<index_t>(j) * rows;
        const double* vcol = svd.V.data().data() + static_cast<index_t>(j) * cols;
        st.path.push_back(static_cast<index_t>(j) + 1);
        if (leaf) {
            Rank1Term term;
            term.sigma = sigma;
            term.vectors = st.stack;
            term.vectors.emplace_back(ucol, ucol + rows);
            term.vectors.emplace_back(vcol, vcol + cols);
            term.path = st.path;
            st.terms.push_back(std::move(term));
        } else {
            st.stack.emplace_back(ucol, ucol + rows);
            ttr1Recurse(st, std::vector<double>(vcol, vcol + cols), dims, level + 1, child);
            st.stack.pop_back();
        }
        st.path.pop_back();
    }
}

void sortTerms(std::vector<Rank1Term>& terms) {
    std::stable_sort(terms.begin(), terms.end(), [](const Rank1Term& a, const Rank1Term& b) {
        if (a.sigma != b.sigma) return a.sigma > b.sigma;
        return a.path < b.path;
    });
}

DenseTensor transposed(const DenseTensor& m) {
    const index_t rows = m.dim(1);
    const index_t cols = m.dim(2);
    DenseTensor out(Shape({cols, rows}));
    for (index_t j = 0; j < cols; ++j)
        for (index_t i = 0; i < rows; ++i)
            out.data()[static_cast<std::size_t>(j + i * cols)] =
                m.data()[static_cast<std::size_t>(i + j * rows)];
    return out;
}

// Mode-r unfolding with the remaining modes in increasing order, earliest
// fastest.
DenseTensor unfold(const DenseTensor& t, index_t r) {
    std::vector<index_t> perm;
    perm.reserve(static_cast<std::size_t>(t.order()));
    perm.push_back(r);
    for (index_t m = 1; m <= t.order(); ++m)
        if (m != r) perm.push_back(m);
    DenseTensor moved = permuteModes(t, perm);
    return reshape(moved, Shape({t.dim(r), t.elementCount() / t.dim(r)}));
}

} // namespace

index_t ttr1TermBound(const Shape& shape) {
    const index_t d = shape.order();
    index_t bound = 1;
    for (index_t r = 0; r + 2 <= d; ++r) {
        index_t rest = 1;
        for (index_t i = r + 2; i <= d; ++i) rest = checkedMul(rest, shape.dim(i));
        bound = checkedMul(bound, std::min(shape.dim(r + 1), rest));
    }
    return bound;
}

PolyadicDecomposition ttr1svd(const DenseTensor& t, double tol) {
    if (t.order() < 2)
        fail("OrderTooLow", "TTr1SVD needs an order-2 or higher tensor");

    PolyadicDecomposition pd;
    pd.shape = t.shape();
    pd.backend = Backend::TTR1;

    // Root level: establishes the global pruning cutoff.
    const index_t n1 = t.dim(1);
    const index_t rest = t.elementCount() / n1;
    const SvdResult root = economySvd(DenseTensor(Shape({n1, rest}), t.data()));
    if (root.s.empty() || !(root.s.front() > 0.0)) return pd;  // zero tensor

    Ttr1State st;
    st.cutoff = tol * root.s.front();

    const bool leaf = (t.order() == 2);
    for (std::size_t j = 0; j < root.s.size(); ++j) {
        const double sigma = root.s[j];
        if (!(sigma > 0.0) || sigma < st.cutoff) continue;
        const double* ucol = root.U.data().data() + static_cast<index_t>(j) * n1;
        const double* vcol = root.V.data().data() + static_cast<index_t>(j) * rest;
        st.path.push_back(static_cast<index_t>(j) + 1);
        if (leaf) {
            Rank1Term term;
            term.sigma = sigma;
            term.vectors.emplace_back(ucol, ucol + n1);
            term.vectors.emplace_back(vcol, vcol + rest);
            term.path = st.path;
            st.terms.push_back(std::move(term));
        } else {
            st.stack.emplace_back(ucol, ucol + n1);
            ttr1Recurse(st, std::vector<double>(vcol, vcol + rest), t.shape().dims(), 1,
                        PathScale::one().times(sigma));
            st.stack.pop_back();
        }
        st.path.pop_back();
    }

    sortTerms(st.terms);
    pd.terms = std::move(st.terms);
    return pd;
}

HosvdCore hosvd(const DenseTensor& t) {
    if (t.order() < 2)
        fail("OrderTooLow", "HOSVD needs an order-2 or higher tensor");
    HosvdCore out;
    out.factors.reserve(static_cast<std::size_t>(t.order()));
    DenseTensor core = t;
    for (index_t r = 1; r <= t.order(); ++r) {
        const SvdResult svd = economySvd(unfold(t, r));
        out.factors.push_back(svd.U);
        core = modeProduct(core, r, transposed(svd.U));
    }
    out.core = std::move(core);
    return out;
}

PolyadicDecomposition hosvdTerms(const HosvdCore& core, double tol) {
    const index_t k = core.core.order();
    PolyadicDecomposition pd;
    pd.backend = Backend::HOSVD;
    std::vector<index_t> shapeDims(static_cast<std::size_t>(k));
    for (index_t m = 0; m < k; ++m)
        shapeDims[static_cast<std::size_t>(m)] = core.factors[static_cast<std::size_t>(m)].dim(1);
    pd.shape = Shape(shapeDims);

    double maxAbs = 0.0;
    for (double x : core.core.data()) maxAbs = std::max(maxAbs, std::abs(x));
    const double cutoff = tol * maxAbs;

    const std::vector<index_t>& cdims = core.core.shape().dims();
    std::vector<index_t> idx(static_cast<std::size_t>(k), 1);
    const index_t total = core.core.elementCount();
    for (index_t pos = 0; pos < total; ++pos) {
        const double entry = core.core.data()[static_cast<std::size_t>(pos)];
        const double mag = std::abs(entry);
        if (mag > 0.0 && mag >= cutoff) {
            Rank1Term term;
            term.sigma = mag;
            term.path = idx;
            term.vectors.reserve(static_cast<std::size_t>(k));
            const double flip = entry < 0.0 ? -1.0 : 1.0;
            for (index_t m = 0; m < k; ++m) {
                const DenseTensor& u = core.factors[static_cast<std::size_t>(m)];
                const index_t rows = u.dim(1);
                const double* col =
                    u.data().data() + (idx[static_cast<std::size_t>(m)] - 1) * rows;
                std::vector<double> v(col, col + rows);
                if (m == 0 && flip < 0.0)
                    for (double& x : v) x = -x;
                term.vectors.push_back(std::move(v));
            }
            pd.terms.push_back(std::move(term));
        }
        for (index_t m = 0; m < k; ++m) {
            auto mm = static_cast<std::size_t>(m);
            if (++idx[mm] <= cdims[mm]) break;
            idx[mm] = 1;
        }
    }

    std::stable_sort(pd.terms.begin(), pd.terms.end(),
                     [](const Rank1Term& a, const Rank1Term& b) {
                         if (a.sigma != b.sigma) return a.sigma > b.sigma;
                         return a.path < b.path;
                     });
    return pd;
}

DenseTensor expandTerm(const Rank1Term& term) {
    DenseTensor out = outerRank1(term.vectors);
    for (double& x : out.data()) x *= term.sigma;
    return out;
}

DenseTensor reconstructPD(const PolyadicDecomposition& pd, index_t r) {
    if (r < 0 || r > static_cast<index_t>(pd.terms.size()))
        fail("IndexOutOfRange", "term count " + std::to_string(r) + " outside 0.." +
                                    std::to_string(pd.terms.size()));
    DenseTensor acc(pd.shape);
    for (index_t j = 0; j < r; ++j) {
        const DenseTensor t = expandTerm(pd.terms[static_cast<std::size_t>(j)]);
        for (std::size_t i = 0; i < acc.data().size(); ++i) acc.data()[i] += t.data()[i];
    }
    return acc;
}

DenseTensor reconstructPD(const PolyadicDecomposition& pd) {
    return reconstructPD(pd, static_cast<index_t>(pd.terms.size()));
}

} // namespace tkp
