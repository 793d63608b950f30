#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "oracles.hpp"
#include "tkp/decomposition.hpp"

using namespace tkp;
using oracle::failsWith;

TEST_CASE("ttr1svd recovers a scaled rank-1 tensor") {
    const std::vector<double> u = {0.6, 0.8};
    const std::vector<double> v = {1.0, 0.0, 0.0};
    const std::vector<double> w = {0.0, 1.0};
    DenseTensor t = outerRank1({u, v, w});
    for (double& x : t.data()) x *= 7.0;

    const PolyadicDecomposition pd = ttr1svd(t, 1e-12);
    REQUIRE(pd.terms.size() == 1);
    CHECK(pd.terms[0].sigma == doctest::Approx(7.0).epsilon(1e-12));
    REQUIRE(pd.terms[0].vectors.size() == 3);
    CHECK(std::abs(pd.terms[0].vectors[0][0]) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(oracle::relDiff(reconstructPD(pd), t) <= 1e-12);
}

TEST_CASE("term count hits the structural bound on generic input") {
    CHECK(ttr1TermBound(Shape({8, 27, 64})) == 216);
    DenseTensor t = oracle::randomTensor(Shape({8, 27, 64}), 200);
    const PolyadicDecomposition pd = ttr1svd(t, 1e-12);
    CHECK(pd.terms.size() == 216);
    CHECK(oracle::relDiff(reconstructPD(pd), t) <= 1e-12);

    DenseTensor small = oracle::randomTensor(Shape({2, 2, 2}), 201);
    CHECK(ttr1svd(small, 0.0).terms.size() == 4);
}

TEST_CASE("ttr1TermBound matches the recursive oracle") {
    for (const auto& dims : std::vector<std::vector<index_t>>{
             {2, 2, 2}, {8, 27, 64}, {3, 4, 5}, {5, 4, 3}, {12, 12}, {2, 3}, {2, 2, 2, 2, 2}}) {
        CHECK(ttr1TermBound(Shape(dims)) == oracle::ttr1CountOracle(dims));
    }
}

TEST_CASE("ttr1svd of a matrix is the SVD") {
    DenseTensor a = oracle::randomTensor(Shape({4, 3}), 210);
    const PolyadicDecomposition pd = ttr1svd(a, 0.0);
    const SvdResult svd = economySvd(a);
    REQUIRE(pd.terms.size() == svd.s.size());
    for (std::size_t j = 0; j < pd.terms.size(); ++j) {
        CHECK(pd.terms[j].sigma == doctest::Approx(svd.s[j]).epsilon(1e-12));
        CHECK(pd.terms[j].vectors.size() == 2);
        CHECK(pd.terms[j].path == std::vector<index_t>{static_cast<index_t>(j + 1)});
    }
}

TEST_CASE("terms are mutually orthogonal and carry the energy") {
    DenseTensor t = oracle::randomTensor(Shape({3, 4, 5}), 220);
    const PolyadicDecomposition pd = ttr1svd(t, 0.0);

    std::vector<DenseTensor> expanded;
    for (const auto& term : pd.terms) expanded.push_back(expandTerm(term));
    for (std::size_t i = 0; i < expanded.size(); ++i) {
        for (std::size_t j = i + 1; j < expanded.size(); ++j) {
            const double dot = inner(expanded[i], expanded[j]);
            CHECK(std::abs(dot) <= 1e-10 * pd.terms[i].sigma * pd.terms[j].sigma);
        }
    }

    double energy = 0.0;
    for (const auto& term : pd.terms) energy += term.sigma * term.sigma;
    const double norm = frobeniusNorm(t);
    CHECK(energy == doctest::Approx(norm * norm).epsilon(1e-12));
}

TEST_CASE("terms come out sorted and unit-normalized") {
    DenseTensor t = oracle::randomTensor(Shape({4, 3, 2}), 230);
    const PolyadicDecomposition pd = ttr1svd(t, 0.0);
    for (std::size_t j = 0; j + 1 < pd.terms.size(); ++j)
        CHECK(pd.terms[j].sigma >= pd.terms[j + 1].sigma);
    for (const auto& term : pd.terms) {
        for (const auto& vec : term.vectors) {
            CHECK(oracle::normOf(vec) == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(term.path.size() == 2);
    }
}

TEST_CASE("pruning tolerances only shrink the expansion") {
    DenseTensor diag(Shape({2, 2}), {3, 0, 0, 4});
    CHECK(ttr1svd(diag, 0.9).terms.size() == 1);

    DenseTensor t = oracle::randomTensor(Shape({3, 3, 3}), 240);
    const auto full = ttr1svd(t, 0.0).terms.size();
    const auto mid = ttr1svd(t, 1e-6).terms.size();
    const auto tight = ttr1svd(t, 0.5).terms.size();
    CHECK(tight <= mid);
    CHECK(mid <= full);
    CHECK(tight >= 1);
}

TEST_CASE("degenerate inputs are handled") {
    CHECK(ttr1svd(DenseTensor(Shape({3, 4, 5})), 0.0).terms.empty());
    CHECK(failsWith("OrderTooLow", [] { ttr1svd(DenseTensor(Shape({5})), 0.0); }));
    CHECK(failsWith("OrderTooLow", [] { hosvd(DenseTensor(Shape({5}))); }));
}

TEST_CASE("hosvd produces orthonormal factors and an exact Tucker form") {
    DenseTensor t = oracle::randomTensor(Shape({3, 4, 5}), 250);
    const HosvdCore hc = hosvd(t);
    REQUIRE(hc.factors.size() == 3);
    CHECK(hc.core.shape() == Shape({3, 4, 5}));

    for (std::size_t m = 0; m < hc.factors.size(); ++m) {
        const DenseTensor& u = hc.factors[m];
        for (index_t a = 1; a <= u.dim(2); ++a) {
            for (index_t b = a; b <= u.dim(2); ++b) {
                double dot = 0.0;
                for (index_t i = 1; i <= u.dim(1); ++i) dot += u.entry({i, a}) * u.entry({i, b});
                CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
            }
        }
    }

    DenseTensor recon = hc.core;
    for (index_t r = 1; r <= 3; ++r)
        recon = modeProduct(recon, r, hc.factors[static_cast<std::size_t>(r - 1)]);
    CHECK(oracle::relDiff(recon, t) <= 1e-12);
}

TEST_CASE("hosvd trims the core when one mode dominates") {
    DenseTensor t = oracle::randomTensor(Shape({7, 2, 2}), 251);
    const HosvdCore hc = hosvd(t);
    CHECK(hc.core.shape() == Shape({4, 2, 2}));
    CHECK(hc.factors[0].shape() == Shape({7, 4}));
    CHECK(hc.factors[1].shape() == Shape({2, 2}));

    DenseTensor recon = hc.core;
    for (index_t r = 1; r <= 3; ++r)
        recon = modeProduct(recon, r, hc.factors[static_cast<std::size_t>(r - 1)]);
    CHECK(oracle::relDiff(recon, t) <= 1e-12);
}

TEST_CASE("hosvdTerms on a matrix reproduces the singular values") {
    DenseTensor diag(Shape({2, 2}), {3, 0, 0, 4});
    const PolyadicDecomposition pd = hosvdTerms(hosvd(diag), 1e-12);
    REQUIRE(pd.terms.size() == 2);
    CHECK(pd.backend == Backend::HOSVD);
    CHECK(pd.terms[0].sigma == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(pd.terms[1].sigma == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(oracle::relDiff(reconstructPD(pd), diag) <= 1e-12);
}

TEST_CASE("hosvdTerms expansion reconstructs the input") {
    DenseTensor t = oracle::randomTensor(Shape({3, 4, 5}), 260);
    const HosvdCore hc = hosvd(t);
    const PolyadicDecomposition pd = hosvdTerms(hc, 0.0);
    CHECK(pd.terms.size() <= static_cast<std::size_t>(hc.core.elementCount()));
    CHECK(pd.shape == t.shape());
    CHECK(oracle::relDiff(reconstructPD(pd), t) <= 1e-12);

    // Sigmas are the core magnitudes, largest first, and every sigma is
    // positive with the sign folded into the expansion.
    for (std::size_t j = 0; j + 1 < pd.terms.size(); ++j)
        CHECK(pd.terms[j].sigma >= pd.terms[j + 1].sigma);
    for (const auto& term : pd.terms) {
        CHECK(term.sigma > 0.0);
        const double entry = hc.core.entry(term.path);
        CHECK(std::abs(entry) == doctest::Approx(term.sigma).epsilon(1e-12));
    }
}

TEST_CASE("expandTerm scales the outer product") {
    Rank1Term term;
    term.sigma = 2.0;
    term.vectors = {{1, 0}, {0, 1}};
    CHECK(expandTerm(term).data() == std::vector<double>{0, 0, 2, 0});
}

TEST_CASE("reconstructPD truncation follows the tail energy") {
    DenseTensor t = oracle::randomTensor(Shape({3, 4, 5}), 270);
    const PolyadicDecomposition pd = ttr1svd(t, 0.0);
    const auto total = static_cast<index_t>(pd.terms.size());

    CHECK(frobeniusNorm(reconstructPD(pd, 0)) == 0.0);
    CHECK(failsWith("IndexOutOfRange", [&] { reconstructPD(pd, -1); }));
    CHECK(failsWith("IndexOutOfRange", [&] { reconstructPD(pd, total + 1); }));

    for (index_t r = 0; r <= total; r += 5) {
        const DenseTensor recon = reconstructPD(pd, r);
        double diff = 0.0;
        for (std::size_t i = 0; i < t.data().size(); ++i)
            diff += (t.data()[i] - recon.data()[i]) * (t.data()[i] - recon.data()[i]);
        double tail = 0.0;
        for (index_t j = r; j < total; ++j)
            tail += pd.terms[static_cast<std::size_t>(j)].sigma *
                    pd.terms[static_cast<std::size_t>(j)].sigma;
        CHECK(diff == doctest::Approx(tail).epsilon(1e-10));
    }
}
