#pragma once

#include <vector>

#include "tkp/tensor.hpp"
#include "tkp/tkpsvd.hpp"

namespace tkp {

// 8-bit image held as a height x width x channels tensor of reals, channels
// last: 1 for grayscale, 3 for RGB. Pixel values are nominally in [0, 255];
// intermediate reconstructions may leave that range until quantized.
class ImageTensor {
public:
    ImageTensor() = default;
    explicit ImageTensor(DenseTensor t);

    const DenseTensor& tensor() const { return tensor_; }
    index_t height() const { return tensor_.dim(1); }
    index_t width() const { return tensor_.dim(2); }
    index_t channels() const { return tensor_.dim(3); }

private:
    DenseTensor tensor_;
};

// Peak signal-to-noise ratio in dB against a peak value of 255:
// 20 log10(255) - 10 log10(MSE) with MSE = ||A - B||_F^2 / elementCount.
// Identical images give +infinity.
double psnr(const ImageTensor& original, const ImageTensor& approx);

// PSNR of the r-term truncation computed from the sigma tail alone:
// MSE = (sum_{j>r} sigma_j^2) / elementCount. Matches the reconstruction
// PSNR exactly when the expansion is orthogonal, as at full resolution.
double psnrFromSigmas(const std::vector<double>& sigmas, index_t r, index_t elementCount);

// Storage ratio of the full tensor against r Kronecker terms built from the
// trailing kFactors factors of the grid (the coarse end of the chain):
// product of the retained factor element counts over r times their sum.
double compressionRate(const FactorGrid& grid, index_t kFactors, index_t r);

// Multilevel grid for an image-like tensor: the last factor carries the base
// resolution and each of the levels - 1 factors before it halves every mode
// that still has a factor of 2 available, so mode r is halved by the first
// min(levels - 1, v2(dim_r)) factors. The grid always partitions the shape
// exactly.
FactorGrid imageGrid(const Shape& shape, index_t levels);

}  // namespace tkp
