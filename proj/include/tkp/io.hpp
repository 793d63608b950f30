#pragma once

#include <string>

#include "tkp/image.hpp"
#include "tkp/tensor.hpp"
#include "tkp/tkpsvd.hpp"

namespace tkp {

// Tensor files come in two variants sharing one logical layout (magic,
// order, dims, then values in storage order): ".ten" is whitespace-separated
// text with 17 significant digits, ".tenb" is little-endian binary with
// exact round-trips. Byte-level layouts are specified in FORMATS.md.
// Malformed or unreadable files raise code "BadFile".
DenseTensor readTensor(const std::string& path);  // dispatches on extension
void writeTensor(const std::string& path, const DenseTensor& t);

DenseTensor readTensorText(const std::string& path);
void writeTensorText(const std::string& path, const DenseTensor& t);
DenseTensor readTensorBinary(const std::string& path);
void writeTensorBinary(const std::string& path, const DenseTensor& t);

// Decomposition files (".tkp", binary): grid, backend, source norm, sigmas,
// then factor payloads term-major and factor-major within a term. Multiplet
// groups are recomputed from the sigmas on load.
void writeDecomposition(const std::string& path, const TkpsvdResult& res);
TkpsvdResult readDecomposition(const std::string& path);

// Binary PGM (P5, grayscale) and PPM (P6, RGB) with 8-bit samples; the
// variant is chosen by the file's magic on read and the channel count on
// write. Pixels are re-quantized on write via quantizePixel.
ImageTensor readImage(const std::string& path);
void writeImage(const std::string& path, const ImageTensor& img);

// Clamps to [0, 255] and rounds half to even; NaN maps to 0.
double quantizePixel(double value);

// Sparse pattern of a permutation as one "row col" line per entry, 1-based,
// suitable for spy plots.
void writePermutationPattern(const std::string& path, const PermutationMap& p);

}  // namespace tkp
