#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tkp/structure.hpp"

using namespace tkp;
using oracle::failsWith;

namespace {

FactorGrid makeGrid(std::vector<std::vector<index_t>> rows) {
    FactorGrid g;
    g.d = static_cast<index_t>(rows.size());
    g.k = rows.empty() ? 0 : static_cast<index_t>(rows.front().size());
    g.dims = std::move(rows);
    return g;
}

} // namespace

TEST_CASE("perfectShuffle basics") {
    CHECK(perfectShuffle(2, 2).map == std::vector<index_t>{1, 3, 2, 4});
    CHECK(perfectShuffle(5, 1).map == identityMap(5).map);
    perfectShuffle(3, 3).validate();

    // Applying the shuffle to a cubical tensor cycles its modes, so a
    // symmetric tensor is a fixed vector.
    DenseTensor sym = generate(StructureKind::symmetric(), Shape({3, 3, 3}), 400);
    CHECK(applyPermutation(perfectShuffle(3, 3), sym.data()) == sym.data());

    DenseTensor plain = oracle::randomTensor(Shape({3, 3, 3}), 401);
    DenseTensor cycled = permuteModes(plain, {3, 1, 2});
    CHECK(applyPermutation(perfectShuffle(3, 3), plain.data()) == cycled.data());

    CHECK(failsWith("SizeOverflow", [] { perfectShuffle(1 << 20, 4); }));
}

TEST_CASE("exchangeMap reverses and persymMap composes") {
    CHECK(exchangeMap(4).map == std::vector<index_t>{4, 3, 2, 1});

    // A Toeplitz matrix is persymmetric, a Hankel matrix is symmetric.
    DenseTensor toep = generate(StructureKind::toeplitz(), Shape({4, 4}), 410);
    const StructureReport pr = checkStructure(toep, StructureKind::persymmetric());
    CHECK(pr.structured);
    CHECK(pr.sign == 1);
    CHECK(pr.residual <= 1e-14);

    DenseTensor hank = generate(StructureKind::hankel(), Shape({5, 5}), 411);
    CHECK(checkStructure(hank, StructureKind::symmetric()).structured);

    CHECK(persymMap(4, 2).map ==
          composeMaps(perfectShuffle(4, 2), exchangeMap(16)).map);
}

TEST_CASE("shiftedIndexMap reproduces the published antidiagonal cycling") {
    const std::vector<index_t> frozen = {1,  4,  5,  10, 7,  8,  11, 12, 15, 2,  13, 14, 19, 16,
                                         17, 20, 21, 24, 3,  22, 23, 6,  25, 26, 9,  18, 27};
    CHECK(structureMap(StructureKind::hankel(), Shape({3, 3, 3})).map == frozen);
    CHECK(shiftedIndexMap(Shape({3, 3, 3}), ShiftPattern{{1, -1, 0}},
                          StructureKind::symmetric())
              .map == frozen);
}

TEST_CASE("shiftedIndexMap fixes exactly the shift-constant tensors") {
    DenseTensor toep = generate(StructureKind::toeplitz(), Shape({4, 4}), 420);
    const PermutationMap diag = shiftedIndexMap(Shape({4, 4}), ShiftPattern{{1, 1}});
    CHECK(applyPermutation(diag, toep.data()) == toep.data());

    DenseTensor hank = generate(StructureKind::hankel(), Shape({6, 6}), 421);
    const PermutationMap anti =
        shiftedIndexMap(Shape({6, 6}), ShiftPattern{{1, -1}}, StructureKind::symmetric());
    CHECK(applyPermutation(anti, hank.data()) == hank.data());

    DenseTensor plain = oracle::randomTensor(Shape({4, 4}), 422);
    CHECK(applyPermutation(diag, plain.data()) != plain.data());
}

TEST_CASE("shift patterns are validated") {
    CHECK(failsWith("ArityMismatch",
                    [] { shiftedIndexMap(Shape({3, 3}), ShiftPattern{{1, -1, 0}}); }));
    CHECK(failsWith("BadShiftPattern",
                    [] { shiftedIndexMap(Shape({3, 3}), ShiftPattern{{0, 0}}); }));
    CHECK(failsWith("BadShiftPattern",
                    [] { shiftedIndexMap(Shape({3, 3}), ShiftPattern{{1, -2}}); }));
}

TEST_CASE("structureMap enforces cubical shapes where needed") {
    CHECK(failsWith("ShapeMismatch",
                    [] { structureMap(StructureKind::symmetric(), Shape({3, 4})); }));
    CHECK(failsWith("ShapeMismatch",
                    [] { structureMap(StructureKind::persymmetric(), Shape({3, 4})); }));
    CHECK(failsWith("ShapeMismatch",
                    [] { structureMap(StructureKind::hankel(), Shape({3, 4})); }));
    structureMap(StructureKind::centrosymmetric(), Shape({3, 4})).validate();
    structureMap(StructureKind::toeplitz(), Shape({3, 4})).validate();

    PermutationMap wrong = exchangeMap(5);
    CHECK(failsWith("ShapeMismatch", [&] {
        structureMap(StructureKind::generalSymmetric(wrong), Shape({3, 4}));
    }));
}

TEST_CASE("composeFactored conjugates the factor maps through the grid") {
    const FactorGrid g = makeGrid({{4, 4}, {3, 3}});
    std::vector<PermutationMap> id = {identityMap(16), identityMap(9)};
    CHECK(composeFactored(id, g).map == identityMap(144).map);

    // Cubical symmetric parts compose to the big perfect shuffle.
    const FactorGrid cube = makeGrid({{3, 3, 3}, {3, 3, 3}, {3, 3, 3}});
    const auto parts = factorMaps(StructureKind::symmetric(), cube);
    CHECK(composeFactored(parts, cube).map == perfectShuffle(27, 3).map);

    // Centrosymmetric parts compose to the big reversal.
    const auto centroParts = factorMaps(StructureKind::centrosymmetric(), g);
    CHECK(composeFactored(centroParts, g).map == exchangeMap(144).map);

    CHECK(failsWith("ShapeMismatch", [&] { composeFactored(id, cube); }));
    CHECK(failsWith("ShapeMismatch",
                    [&] { composeFactored({identityMap(16)}, g); }));
}

TEST_CASE("factor-level antidiagonal maps fix the full Hankel tensor") {
    const FactorGrid g = makeGrid({{4, 4}, {3, 3}});
    const auto total = composeFactored(factorMaps(StructureKind::hankel(), g), g);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        DenseTensor h = generate(StructureKind::hankel(), Shape({12, 12}), seed);
        CHECK(applyPermutation(total, h.data()) == h.data());
    }

    const FactorGrid deg3 = makeGrid({{2, 2}, {2, 2}, {2, 2}});
    const auto toepTotal = composeFactored(factorMaps(StructureKind::toeplitz(), deg3), deg3);
    DenseTensor t = generate(StructureKind::toeplitz(), Shape({8, 8}), 430);
    CHECK(applyPermutation(toepTotal, t.data()) == t.data());
}

TEST_CASE("generate draws exact members of every family") {
    struct Case {
        StructureKind kind;
        Shape shape;
    };
    const std::vector<Case> cases = {
        {StructureKind::symmetric(), Shape({8, 8, 8})},
        {StructureKind::persymmetric(), Shape({6, 6})},
        {StructureKind::centrosymmetric(), Shape({4, 6})},
        {StructureKind::toeplitz(), Shape({5, 7})},
        {StructureKind::hankel(), Shape({12, 12})},
        {StructureKind::generalSymmetric(exchangeMap(15)), Shape({3, 5})},
        {StructureKind::toeplitz(ShiftPattern{{2, -2}}), Shape({6, 6})},
        {StructureKind::hankel(ShiftPattern{{1, -1, 0}}), Shape({4, 4, 4})},
    };
    for (const auto& c : cases) {
        CAPTURE(c.kind.name());
        DenseTensor t = generate(c.kind, c.shape, 440);
        const StructureReport rep = checkStructure(t, c.kind);
        CHECK(rep.structured);
        CHECK(rep.sign == 1);
        CHECK(rep.residual <= 1e-14);
        CHECK(frobeniusNorm(t) > 0.0);

        // Same seed, same tensor; different seed, different tensor.
        CHECK(generate(c.kind, c.shape, 440).data() == t.data());
        CHECK(generate(c.kind, c.shape, 441).data() != t.data());
    }
}

TEST_CASE("checkStructure separates plain, skew, and unstructured") {
    DenseTensor b = oracle::randomTensor(Shape({5, 5}), 450);
    DenseTensor skew(Shape({5, 5}));
    for (index_t i = 1; i <= 5; ++i)
        for (index_t j = 1; j <= 5; ++j)
            skew.setEntry({i, j}, b.entry({i, j}) - b.entry({j, i}));
    const StructureReport srep = checkStructure(skew, StructureKind::symmetric());
    CHECK(srep.structured);
    CHECK(srep.sign == -1);
    CHECK(srep.residual <= 1e-14);

    const StructureReport urep = checkStructure(b, StructureKind::symmetric());
    CHECK_FALSE(urep.structured);
    CHECK(urep.residual > 0.1);

    const StructureReport zrep = checkStructure(DenseTensor(Shape({4, 4})),
                                                StructureKind::centrosymmetric());
    CHECK(zrep.structured);
    CHECK(zrep.sign == 1);
    CHECK(zrep.residual == 0.0);

    // The residual is scale invariant.
    DenseTensor almost = generate(StructureKind::symmetric(), Shape({4, 4}), 451);
    almost.data()[1] += 1e-3;
    DenseTensor scaled = almost;
    for (double& x : scaled.data()) x *= 1000.0;
    const double r1 = checkStructure(almost, StructureKind::symmetric()).residual;
    const double r2 = checkStructure(scaled, StructureKind::symmetric()).residual;
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));

    // Map overload matches the kind overload.
    const PermutationMap p = structureMap(StructureKind::symmetric(), skew.shape());
    const StructureReport prep = checkStructure(skew, p);
    CHECK(prep.sign == -1);
    CHECK(prep.kind.tag == StructureTag::GeneralSymmetric);
}

TEST_CASE("permutationMatrix lays out one unit entry per row") {
    const PermutationMap q{{2, 3, 1}};
    const DenseTensor m = permutationMatrix(q);
    CHECK(m.shape() == Shape({3, 3}));
    CHECK(m.entry({1, 2}) == 1.0);
    CHECK(m.entry({2, 3}) == 1.0);
    CHECK(m.entry({3, 1}) == 1.0);
    double total = 0.0;
    for (double x : m.data()) total += x;
    CHECK(total == 3.0);

    // Multiplying by the matrix is the same as applying the map.
    const std::vector<double> x = {10, 20, 30};
    CHECK(oracle::matVec(m, x) == applyPermutation(q, x));

    CHECK(failsWith("EmptyInput", [] { permutationMatrix(PermutationMap{}); }));
    CHECK(failsWith("SizeOverflow", [] { permutationMatrix(identityMap(4097)); }));
}

TEST_CASE("analyzePreservation reports per-factor structure of each term") {
    DenseTensor sym = generate(StructureKind::symmetric(), Shape({8, 8}), 460);
    const FactorGrid g = makeGrid({{2, 2}, {4, 4}});
    const TkpsvdResult res = tkpsvd(sym, g, Backend::TTR1, 1e-12);

    const auto summaries = analyzePreservation(res, StructureKind::symmetric());
    REQUIRE(summaries.size() == static_cast<std::size_t>(res.termCount()));
    for (std::size_t j = 0; j < summaries.size(); ++j) {
        const auto& s = summaries[j];
        REQUIRE(s.signs.size() == 2);
        REQUIRE(s.residuals.size() == 2);
        CHECK(s.sigmaMultiplet == res.inMultiplet(static_cast<index_t>(j + 1)));
        if (s.sigmaMultiplet) continue;
        CHECK(s.allStructured);
        CHECK(s.skewCount % 2 == 0);
        for (double r : s.residuals) CHECK(r <= 1e-10);
    }

    const auto viaParts = analyzePreservation(res, factorMaps(StructureKind::symmetric(), g));
    REQUIRE(viaParts.size() == summaries.size());
    for (std::size_t j = 0; j < summaries.size(); ++j)
        CHECK(viaParts[j].signs == summaries[j].signs);

    CHECK(failsWith("ShapeMismatch",
                    [&] { analyzePreservation(res, {identityMap(3), identityMap(16)}); }));
}

TEST_CASE("structure kinds know their names") {
    CHECK(StructureKind::symmetric().name() == "symmetric");
    CHECK(StructureKind::persymmetric().name() == "persymmetric");
    CHECK(StructureKind::centrosymmetric().name() == "centrosymmetric");
    CHECK(StructureKind::toeplitz().name() == "toeplitz");
    CHECK(StructureKind::hankel().name() == "hankel");
    CHECK(StructureKind::generalSymmetric(exchangeMap(4)).name() == "general");
}

TEST_CASE("NormalRng is reproducible and roughly standard") {
    NormalRng a(123);
    NormalRng b(123);
    double mean = 0.0;
    double var = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = a.next();
        CHECK(x == b.next());
        mean += x;
        var += x * x;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
}
