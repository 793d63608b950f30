#include "tkp/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace tkp {

namespace {

constexpr index_t kMaxOrder = 255;
constexpr index_t kMaxCount = index_t{1} << 40;

std::size_t toSize(index_t i) { return static_cast<std::size_t>(i); }

void putU64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t getU64(std::istream& in, const char* what) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (in.gcount() != 8) fail("BadFile", std::string("truncated file reading ") + what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void putF64(std::ostream& out, double d) { putU64(out, std::bit_cast<std::uint64_t>(d)); }

double getF64(std::istream& in, const char* what) {
    return std::bit_cast<double>(getU64(in, what));
}

index_t getCount(std::istream& in, const char* what, index_t lo, index_t hi) {
    const std::uint64_t raw = getU64(in, what);
    if (raw > static_cast<std::uint64_t>(hi) || static_cast<index_t>(raw) < lo)
        fail("BadFile", std::string(what) + " " + std::to_string(raw) + " is outside " +
                            std::to_string(lo) + ".." + std::to_string(hi));
    return static_cast<index_t>(raw);
}

void checkMagic(std::istream& in, const char* magic) {
    char buf[4];
    in.read(buf, 4);
    if (in.gcount() != 4 || std::string(buf, 4) != magic)
        fail("BadFile", std::string("missing ") + magic + " magic");
}

void requireEof(std::istream& in) {
    if (in.peek() != std::char_traits<char>::eof()) fail("BadFile", "trailing data after payload");
}

std::ofstream openForWrite(const std::string& path, std::ios::openmode mode) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) fail("BadFile", "cannot open " + path + " for writing");
    return out;
}

std::ifstream openForRead(const std::string& path, std::ios::openmode mode) {
    std::ifstream in(path, mode);
    if (!in) fail("BadFile", "cannot open " + path);
    return in;
}

void finishWrite(std::ostream& out, const std::string& path) {
    out.flush();
    if (!out) fail("BadFile", "write failed: " + path);
}

std::string extensionOf(const std::string& path) {
    const auto dot = path.rfind('.');
    const auto sep = path.find_last_of("/\\");
    if (dot == std::string::npos || (sep != std::string::npos && dot < sep)) return "";
    return path.substr(dot + 1);
}

// One header token of a PNM file: skips whitespace and '#' comments, then
// reads to the next whitespace byte, consuming exactly that one delimiter.
std::string pnmToken(std::istream& in) {
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            break;
        }
    }
    if (c == EOF) fail("BadFile", "truncated image header");
    std::string token(1, static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(static_cast<unsigned char>(c)))
        token.push_back(static_cast<char>(c));
    return token;
}

index_t pnmInt(std::istream& in, const char* what) {
    const std::string token = pnmToken(in);
    index_t value = 0;
    if (token.empty() || token.size() > 9) fail("BadFile", std::string("bad image ") + what);
    for (char ch : token) {
        if (ch < '0' || ch > '9') fail("BadFile", std::string("bad image ") + what);
        value = value * 10 + (ch - '0');
    }
    return value;
}

}  // namespace

DenseTensor readTensor(const std::string& path) {
    const std::string ext = extensionOf(path);
    if (ext == "ten") return readTensorText(path);
    if (ext == "tenb") return readTensorBinary(path);
    fail("BadFile", "unknown tensor extension \"" + ext + "\" (expected .ten or .tenb)");
}

void writeTensor(const std::string& path, const DenseTensor& t) {
    const std::string ext = extensionOf(path);
    if (ext == "ten") return writeTensorText(path, t);
    if (ext == "tenb") return writeTensorBinary(path, t);
    fail("BadFile", "unknown tensor extension \"" + ext + "\" (expected .ten or .tenb)");
}

DenseTensor readTensorText(const std::string& path) {
    std::ifstream in = openForRead(path, std::ios::in);
    std::string magic;
    in >> magic;
    if (!in || magic != "TEN1") fail("BadFile", "missing TEN1 magic");
    index_t order = 0;
    in >> order;
    if (!in || order < 1 || order > kMaxOrder) fail("BadFile", "bad tensor order");
    std::vector<index_t> dims(toSize(order));
    index_t count = 1;
    for (auto& d : dims) {
        in >> d;
        if (!in || d < 1) fail("BadFile", "bad tensor dimension");
        count = checkedMul(count, d);
    }
    if (count > kMaxCount) fail("BadFile", "tensor payload too large");
    std::vector<double> values(toSize(count));
    for (auto& v : values) {
        in >> v;
        if (!in) fail("BadFile", "truncated tensor values");
    }
    std::string extra;
    if (in >> extra) fail("BadFile", "trailing data after payload");
    return DenseTensor(Shape(std::move(dims)), std::move(values));
}

void writeTensorText(const std::string& path, const DenseTensor& t) {
    std::ofstream out = openForWrite(path, std::ios::out);
    out << "TEN1\n" << t.order() << '\n';
    for (index_t r = 1; r <= t.order(); ++r) {
        if (r > 1) out << ' ';
        out << t.dim(r);
    }
    out << '\n';
    char buf[32];
    const auto& data = t.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", data[i]);
        out << buf << ((i + 1) % 8 == 0 || i + 1 == data.size() ? '\n' : ' ');
    }
    finishWrite(out, path);
}

DenseTensor readTensorBinary(const std::string& path) {
    std::ifstream in = openForRead(path, std::ios::binary);
    checkMagic(in, "TEN1");
    const index_t order = getCount(in, "tensor order", 1, kMaxOrder);
    std::vector<index_t> dims(toSize(order));
    index_t count = 1;
    for (auto& d : dims) {
        d = getCount(in, "tensor dimension", 1, kMaxCount);
        count = checkedMul(count, d);
    }
    if (count > kMaxCount) fail("BadFile", "tensor payload too large");
    std::vector<double> values(toSize(count));
    for (auto& v : values) v = getF64(in, "tensor values");
    requireEof(in);
    return DenseTensor(Shape(std::move(dims)), std::move(values));
}

void writeTensorBinary(const std::string& path, const DenseTensor& t) {
    std::ofstream out = openForWrite(path, std::ios::binary);
    out.write("TEN1", 4);
    putU64(out, static_cast<std::uint64_t>(t.order()));
    for (index_t r = 1; r <= t.order(); ++r) putU64(out, static_cast<std::uint64_t>(t.dim(r)));
    for (double v : t.data()) putF64(out, v);
    finishWrite(out, path);
}

void writeDecomposition(const std::string& path, const TkpsvdResult& res) {
    res.grid.validate();
    const index_t terms = res.termCount();
    if (static_cast<index_t>(res.factors.size()) != terms)
        fail("ShapeMismatch", "factor row count differs from sigma count");
    for (const auto& term : res.factors) {
        if (static_cast<index_t>(term.size()) != res.grid.d)
            fail("ShapeMismatch", "term factor count differs from grid degree");
        for (index_t i = 1; i <= res.grid.d; ++i)
            if (term[toSize(i - 1)].elementCount() != res.grid.factorElementCount(i))
                fail("ShapeMismatch", "factor size differs from grid");
    }
    std::ofstream out = openForWrite(path, std::ios::binary);
    out.write("TKP1", 4);
    putU64(out, static_cast<std::uint64_t>(res.grid.d));
    putU64(out, static_cast<std::uint64_t>(res.grid.k));
    for (const auto& row : res.grid.dims)
        for (index_t n : row) putU64(out, static_cast<std::uint64_t>(n));
    out.put(res.backend == Backend::HOSVD ? '\1' : '\0');
    putF64(out, res.sourceNorm);
    putU64(out, static_cast<std::uint64_t>(terms));
    for (double s : res.sigmas) putF64(out, s);
    for (const auto& term : res.factors)
        for (const auto& factor : term)
            for (double v : factor.data()) putF64(out, v);
    finishWrite(out, path);
}

TkpsvdResult readDecomposition(const std::string& path) {
    std::ifstream in = openForRead(path, std::ios::binary);
    checkMagic(in, "TKP1");
    TkpsvdResult res;
    res.grid.d = getCount(in, "grid degree", 1, kMaxOrder);
    res.grid.k = getCount(in, "grid order", 1, kMaxOrder);
    res.grid.dims.assign(toSize(res.grid.d), std::vector<index_t>(toSize(res.grid.k)));
    for (auto& row : res.grid.dims)
        for (auto& n : row) n = getCount(in, "grid dimension", 1, kMaxCount);
    res.grid.validate();
    const int backendByte = in.get();
    if (backendByte == 0)
        res.backend = Backend::TTR1;
    else if (backendByte == 1)
        res.backend = Backend::HOSVD;
    else
        fail("BadFile", "unknown backend tag");
    res.sourceNorm = getF64(in, "source norm");
    const index_t terms = getCount(in, "term count", 0, kMaxCount);
    res.sigmas.resize(toSize(terms));
    for (auto& s : res.sigmas) s = getF64(in, "sigmas");
    res.factors.resize(toSize(terms));
    for (auto& term : res.factors) {
        term.reserve(toSize(res.grid.d));
        for (index_t i = 1; i <= res.grid.d; ++i) {
            const Shape shape = res.grid.factorShape(i);
            std::vector<double> values(toSize(shape.elementCount()));
            for (auto& v : values) v = getF64(in, "factor values");
            term.emplace_back(shape, std::move(values));
        }
    }
    requireEof(in);
    res.multiplets = detectMultiplets(res.sigmas);
    return res;
}

ImageTensor readImage(const std::string& path) {
    std::ifstream in = openForRead(path, std::ios::binary);
    const std::string magic = pnmToken(in);
    index_t channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        fail("BadFile", "expected a binary PGM (P5) or PPM (P6) file");
    const index_t width = pnmInt(in, "width");
    const index_t height = pnmInt(in, "height");
    const index_t maxval = pnmInt(in, "maxval");
    if (width < 1 || height < 1) fail("BadFile", "image has an empty dimension");
    if (maxval != 255) fail("BadFile", "only 8-bit samples (maxval 255) are supported");
    const index_t count = checkedMul(checkedMul(height, width), channels);
    std::vector<unsigned char> bytes(toSize(count));
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
    if (in.gcount() != count) fail("BadFile", "truncated pixel data");
    std::vector<double> data(toSize(count));
    std::size_t b = 0;
    for (index_t i = 0; i < height; ++i)
        for (index_t j = 0; j < width; ++j)
            for (index_t ch = 0; ch < channels; ++ch)
                data[toSize(i + height * (j + width * ch))] = bytes[b++];
    return ImageTensor(DenseTensor(Shape({height, width, channels}), std::move(data)));
}

void writeImage(const std::string& path, const ImageTensor& img) {
    const index_t height = img.height();
    const index_t width = img.width();
    const index_t channels = img.channels();
    std::ofstream out = openForWrite(path, std::ios::binary);
    out << (channels == 1 ? "P5" : "P6") << '\n' << width << ' ' << height << '\n' << "255\n";
    const auto& data = img.tensor().data();
    std::vector<unsigned char> bytes(toSize(img.tensor().elementCount()));
    std::size_t b = 0;
    for (index_t i = 0; i < height; ++i)
        for (index_t j = 0; j < width; ++j)
            for (index_t ch = 0; ch < channels; ++ch)
                bytes[b++] = static_cast<unsigned char>(
                    quantizePixel(data[toSize(i + height * (j + width * ch))]));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    finishWrite(out, path);
}

double quantizePixel(double value) {
    if (std::isnan(value)) return 0.0;
    return std::nearbyint(std::clamp(value, 0.0, 255.0));
}

void writePermutationPattern(const std::string& path, const PermutationMap& p) {
    std::ofstream out = openForWrite(path, std::ios::out);
    for (index_t t = 1; t <= p.size(); ++t) out << t << ' ' << p.source(t) << '\n';
    finishWrite(out, path);
}

}  // namespace tkp
