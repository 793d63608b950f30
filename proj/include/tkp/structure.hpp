#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tkp/tensor.hpp"
#include "tkp/tkpsvd.hpp"

namespace tkp {

// Families of linearly structured tensors. Each family is characterized by a
// permutation P of the vectorized tensor: plain members satisfy
// P vec(A) = vec(A), skew members P vec(A) = -vec(A).
enum class StructureTag {
    Symmetric,         // invariant under index permutations
    Persymmetric,      // symmetric about the main antidiagonal
    Centrosymmetric,   // invariant under full index reversal
    Toeplitz,          // constant along diagonal index shifts
    Hankel,            // constant along antidiagonal index shifts
    GeneralSymmetric,  // fixed vector of a caller-supplied permutation
};

// Index shift tying tensor entries together: positions (i1,...,ik) and
// (i1+s1,...,ik+sk) hold the same value whenever both are inside the tensor.
// At least one component must be nonzero and all nonzero components must
// share one magnitude.
struct ShiftPattern {
    std::vector<index_t> shifts;
};

// A structure family plus its parameters. Toeplitz and Hankel kinds carry an
// optional custom shift pattern (unit diagonal and antidiagonal shifts when
// absent); GeneralSymmetric carries its defining permutation.
struct StructureKind {
    StructureTag tag = StructureTag::Symmetric;
    PermutationMap general;             // GeneralSymmetric only
    std::optional<ShiftPattern> shift;  // Toeplitz/Hankel override

    static StructureKind symmetric();
    static StructureKind persymmetric();
    static StructureKind centrosymmetric();
    static StructureKind toeplitz();
    static StructureKind hankel();
    static StructureKind toeplitz(ShiftPattern custom);
    static StructureKind hankel(ShiftPattern custom);
    static StructureKind generalSymmetric(PermutationMap p);

    std::string name() const;
};

// Verdict of a structure check on one tensor.
struct StructureReport {
    StructureKind kind;
    // +1 for the plain branch, -1 for the skew branch; meaningful only when
    // structured is true. The zero tensor reports +1 with residual 0.
    int sign = +1;
    // min over both branches of ||P a - sign a|| for the unit vectorization.
    double residual = 0.0;
    bool structured = false;
};

// Structure verdicts for every factor of one Kronecker term.
struct TermStructureSummary {
    std::vector<int> signs;         // one per factor, +1 or -1
    std::vector<double> residuals;  // one per factor
    index_t skewCount = 0;          // structured factors with sign -1
    bool allStructured = false;     // every factor matched the family
    bool sigmaMultiplet = false;    // term's sigma lies in a near-multiplet
};

// Deterministic standard-normal generator used for structured test tensors.
// Draws come from the Box-Muller transform over a 64-bit Mersenne Twister,
// so sequences are reproducible across platforms.
class NormalRng {
public:
    explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

    double next();

private:
    double uniform();

    std::mt19937_64 engine_;
};

// Perfect shuffle permutation S(n, k) on vectors of length n^k: stacks the
// n-row slices of the identity taken with stride n^(k-1). Applying it to
// vec(A) of a cubical k-way tensor yields the vec of A with its indices
// cyclically shifted, so S vec(A) = vec(A) characterizes that symmetry.
PermutationMap perfectShuffle(index_t n, index_t k);

// Exchange (reversal) permutation J on vectors of length n. J vec(A) = vec(A)
// characterizes centrosymmetry: invariance when every index i_j of a mode of
// size n_j is replaced by n_j - i_j + 1.
PermutationMap exchangeMap(index_t n);

// Persymmetry permutation SJ of a k-way cubical tensor with mode size n, the
// perfect shuffle composed with the full reversal.
PermutationMap persymMap(index_t n, index_t k);

// Permutation whose fixed vectors are exactly the tensors constant along the
// shift pattern: positions tied by the shifts form equivalence classes and
// the permutation cycles each class through its members in ascending order.
// The overload taking a base kind additionally merges each class with the
// base structure's identifications; a Symmetric base ties every index tuple
// to its sorted rearrangements, which antidiagonal families need.
PermutationMap shiftedIndexMap(const Shape& shape, const ShiftPattern& pattern);
PermutationMap shiftedIndexMap(const Shape& shape, const ShiftPattern& pattern,
                               const StructureKind& base);

// Permutation characterizing the given family on tensors of the given shape.
// Symmetric, Persymmetric, and Hankel kinds require a cubical shape.
PermutationMap structureMap(const StructureKind& kind, const Shape& shape);

// Permutations characterizing the same family on each Kronecker factor of
// the grid, ordered factor 1 first.
std::vector<PermutationMap> factorMaps(const StructureKind& kind, const FactorGrid& grid);

// The permutation induced on the full tensor by applying parts[i-1] to
// factor i of every Kronecker term: with Q the regrouping permutation of the
// grid, this is Q^T (P_d x ... x P_1) Q, computed index-wise. Entries are
// exact integers, so equal maps compare equal directly.
PermutationMap composeFactored(const std::vector<PermutationMap>& parts, const FactorGrid& grid);

// Draws a random member of the family with the given shape: one standard
// normal draw per index class, assigned in first-encounter order, so the
// same seed always yields the same tensor and the structure holds exactly.
DenseTensor generate(const StructureKind& kind, const Shape& shape, std::uint64_t seed);

// Dense 0/1 matrix of a permutation for inspection or export, with
// entry(row, col) = 1 exactly when col = map[row]. Guarded to small sizes;
// large maps should stay in index form.
DenseTensor permutationMatrix(const PermutationMap& p);

// Tests whether the tensor lies in the plain or skew branch of the family
// within a residual tolerance on the unit vectorization. The overload taking
// a map reports the kind as GeneralSymmetric over that map.
StructureReport checkStructure(const DenseTensor& t, const PermutationMap& p, double tol = 1e-10);
StructureReport checkStructure(const DenseTensor& t, const StructureKind& kind, double tol = 1e-10);

// Checks every factor of every term of a decomposition against the family
// (parts[i-1] is the factor-i permutation) and summarizes signs, residuals,
// and skew parity per term. Terms whose sigma lies in a near-multiplet are
// flagged, since factor structure is not guaranteed there.
std::vector<TermStructureSummary> analyzePreservation(const TkpsvdResult& res,
                                                      const std::vector<PermutationMap>& parts,
                                                      double tol = 1e-10);
std::vector<TermStructureSummary> analyzePreservation(const TkpsvdResult& res,
                                                      const StructureKind& kind,
                                                      double tol = 1e-10);

}  // namespace tkp
