#include "tkp/image.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

namespace tkp {

namespace {

constexpr double kPeak = 255.0;

double mseToPsnr(double mse) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(kPeak) - 10.0 * std::log10(mse);
}

}  // namespace

ImageTensor::ImageTensor(DenseTensor t) : tensor_(std::move(t)) {
    if (tensor_.order() != 3)
        fail("ShapeMismatch", "an image tensor is height x width x channels");
    const index_t c = tensor_.dim(3);
    if (c != 1 && c != 3)
        fail("ShapeMismatch", "expected 1 or 3 channels, got " + std::to_string(c));
}

double psnr(const ImageTensor& original, const ImageTensor& approx) {
    const DenseTensor& a = original.tensor();
    const DenseTensor& b = approx.tensor();
    if (a.shape() != b.shape()) fail("ShapeMismatch", "images differ in shape");
    const index_t n = a.elementCount();
    std::vector<double> sq(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) {
        const double d = a.data()[static_cast<std::size_t>(i)] - b.data()[static_cast<std::size_t>(i)];
        sq[static_cast<std::size_t>(i)] = d * d;
    }
    return mseToPsnr(pairwiseSum(sq.data(), n) / static_cast<double>(n));
}

double psnrFromSigmas(const std::vector<double>& sigmas, index_t r, index_t elementCount) {
    if (elementCount < 1) fail("EmptyInput", "element count must be positive");
    if (r < 0) fail("IndexOutOfRange", "negative term count");
    const index_t total = static_cast<index_t>(sigmas.size());
    if (r >= total) return mseToPsnr(0.0);
    std::vector<double> sq(static_cast<std::size_t>(total - r));
    for (index_t j = r; j < total; ++j) {
        const double s = sigmas[static_cast<std::size_t>(j)];
        sq[static_cast<std::size_t>(j - r)] = s * s;
    }
    return mseToPsnr(pairwiseSum(sq.data(), total - r) / static_cast<double>(elementCount));
}

double compressionRate(const FactorGrid& grid, index_t kFactors, index_t r) {
    grid.validate();
    if (kFactors < 1 || kFactors > grid.d)
        fail("IndexOutOfRange", "retained factor count " + std::to_string(kFactors) +
                                    " is outside 1.." + std::to_string(grid.d));
    if (r < 1) fail("EmptyInput", "term count must be positive");
    index_t product = 1;
    index_t sum = 0;
    for (index_t i = grid.d - kFactors + 1; i <= grid.d; ++i) {
        const index_t count = grid.factorElementCount(i);
        product = checkedMul(product, count);
        sum += count;
    }
    return static_cast<double>(product) / (static_cast<double>(r) * static_cast<double>(sum));
}

FactorGrid imageGrid(const Shape& shape, index_t levels) {
    if (levels < 1) fail("IndexOutOfRange", "levels must be at least 1");
    const index_t k = shape.order();
    std::vector<index_t> halvings(static_cast<std::size_t>(k));
    for (index_t r = 1; r <= k; ++r) {
        index_t n = shape.dim(r);
        index_t twos = 0;
        while (n % 2 == 0 && twos < levels - 1) {
            n /= 2;
            ++twos;
        }
        halvings[static_cast<std::size_t>(r - 1)] = twos;
    }
    FactorGrid grid;
    grid.d = levels;
    grid.k = k;
    grid.dims.resize(static_cast<std::size_t>(levels));
    for (index_t i = 1; i <= levels; ++i) {
        std::vector<index_t> row(static_cast<std::size_t>(k));
        for (index_t r = 1; r <= k; ++r) {
            const index_t m = halvings[static_cast<std::size_t>(r - 1)];
            if (i < levels)
                row[static_cast<std::size_t>(r - 1)] = i <= m ? 2 : 1;
            else
                row[static_cast<std::size_t>(r - 1)] = shape.dim(r) >> m;
        }
        grid.dims[static_cast<std::size_t>(i - 1)] = std::move(row);
    }
    return grid;
}

}  // namespace tkp
