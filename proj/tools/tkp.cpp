// tkp: command-line front end for the TKPSVD library. Subcommands cover the
// whole workflow: generate structured test tensors, decompose against a
// factor grid, reconstruct truncations, inspect structure preservation, dump
// error curves, export permutation patterns, and run the multilevel image
// demo.
//
// Grids on the command line list factors left to right as A(1),...,A(d); the
// Kronecker chain multiplies them in the reverse order A(d) x ... x A(1), so
// the first grid entry is the innermost, fastest-varying factor.

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tkp/errors.hpp"
#include "tkp/image.hpp"
#include "tkp/io.hpp"
#include "tkp/structure.hpp"
#include "tkp/tkpsvd.hpp"

namespace {

using namespace tkp;

// Bad arguments that CLI11 cannot catch itself (malformed grids, mismatched
// shapes, out-of-range term counts). These and file problems ("BadFile")
// exit with 1; failures inside the numerics exit with 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::vector<index_t> parseDims(const std::string& text) {
    std::vector<index_t> dims;
    std::stringstream in(text);
    std::string piece;
    while (std::getline(in, piece, 'x')) {
        index_t v = 0;
        try {
            std::size_t used = 0;
            v = std::stoll(piece, &used);
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw UsageError("bad dimension '" + piece + "' in '" + text + "'");
        }
        if (v < 1) throw UsageError("dimensions must be positive, got '" + text + "'");
        dims.push_back(v);
    }
    if (dims.empty()) throw UsageError("empty dimension list");
    return dims;
}

FactorGrid parseGrid(const std::string& text) {
    FactorGrid g;
    std::stringstream in(text);
    std::string row;
    while (std::getline(in, row, ',')) {
        const std::vector<index_t> dims = parseDims(row);
        if (!g.dims.empty() && static_cast<index_t>(dims.size()) != g.k)
            throw UsageError("grid rows must share one order; '" + row + "' differs");
        g.k = static_cast<index_t>(dims.size());
        g.dims.push_back(dims);
    }
    g.d = static_cast<index_t>(g.dims.size());
    if (g.d == 0) throw UsageError("empty grid");
    return g;
}

std::string dimsText(const std::vector<index_t>& dims) {
    std::string out;
    for (index_t v : dims) {
        if (!out.empty()) out += "x";
        out += std::to_string(v);
    }
    return out;
}

// Rejects tensors whose per-mode dimensions are not the exact product of the
// grid's factor dimensions. The message names the required products so the
// caller can fix either side.
void requireGridMatch(const FactorGrid& g, const Shape& shape) {
    g.validate();
    if (g.matches(shape)) return;
    throw UsageError("grid per-mode factor products are " + dimsText(g.targetShape().dims()) +
                     " but the tensor is " + dimsText(shape.dims()) +
                     "; factor dimensions must multiply to the tensor dimensions exactly");
}

StructureKind parseKind(const std::string& name) {
    if (name == "symmetric") return StructureKind::symmetric();
    if (name == "centrosymmetric") return StructureKind::centrosymmetric();
    if (name == "persymmetric") return StructureKind::persymmetric();
    if (name == "toeplitz") return StructureKind::toeplitz();
    if (name == "hankel") return StructureKind::hankel();
    throw UsageError("unknown kind '" + name +
                     "' (expected symmetric, centrosymmetric, persymmetric, toeplitz, or hankel)");
}

Backend parseBackend(const std::string& name) {
    return name == "hosvd" ? Backend::HOSVD : Backend::TTR1;
}

double reconResidual(const TkpsvdResult& res, const DenseTensor& source) {
    const DenseTensor recon = reconstructKP(res);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < source.data().size(); ++i) {
        const double d = recon.data()[i] - source.data()[i];
        num += d * d;
        den += source.data()[i] * source.data()[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

int runDecompose(const std::string& input, const std::string& gridText,
                 const std::string& backend, double tol, const std::string& output) {
    const DenseTensor a = readTensor(input);
    const FactorGrid g = parseGrid(gridText);
    requireGridMatch(g, a.shape());
    const TkpsvdResult res = tkpsvd(a, g, parseBackend(backend), tol);
    std::printf("terms: %" PRId64 "\n", res.termCount());
    std::printf("source norm: %.12g\n", res.sourceNorm);
    for (index_t j = 1; j <= std::min<index_t>(5, res.termCount()); ++j)
        std::printf("sigma %" PRId64 ": %.12g\n", j, res.sigmas[static_cast<std::size_t>(j - 1)]);
    std::printf("full reconstruction residual: %.6g\n", reconResidual(res, a));
    if (!output.empty()) {
        writeDecomposition(output, res);
        std::printf("wrote %s\n", output.c_str());
    }
    return 0;
}

int runReconstruct(const std::string& input, index_t terms, const std::string& output) {
    const TkpsvdResult res = readDecomposition(input);
    if (terms < 0 || terms > res.termCount())
        throw UsageError("--terms must be between 0 and " + std::to_string(res.termCount()));
    const index_t r = terms == 0 ? res.termCount() : terms;
    writeTensor(output, reconstructKP(res, r));
    std::printf("wrote %s (%" PRId64 " of %" PRId64 " terms, relative tail error %.6g)\n",
                output.c_str(), r, res.termCount(), relativeError(res.sigmas, r));
    return 0;
}

int runAnalyze(const std::string& input, const std::string& kindName) {
    const TkpsvdResult res = readDecomposition(input);
    const StructureKind kind = parseKind(kindName);
    const auto summaries = analyzePreservation(res, kind);
    std::printf("terms: %" PRId64 ", backend: %s, kind: %s\n", res.termCount(),
                res.backend == Backend::TTR1 ? "ttr1" : "hosvd", kind.name().c_str());
    std::printf("%5s  %-16s  %-8s  %4s  %-9s  %s\n", "term", "sigma", "signs", "skew",
                "multiplet", "max residual");
    bool evenSkew = true;
    bool structured = true;
    for (std::size_t j = 0; j < summaries.size(); ++j) {
        const TermStructureSummary& s = summaries[j];
        std::string signs;
        for (int v : s.signs) signs += v == 1 ? "+ " : "- ";
        double worst = 0.0;
        for (double rres : s.residuals) worst = std::max(worst, rres);
        std::printf("%5zu  %-16.10g  %-8s  %4" PRId64 "  %-9s  %.3g\n", j + 1, res.sigmas[j],
                    signs.c_str(), s.skewCount, s.sigmaMultiplet ? "yes" : "no", worst);
        if (!s.sigmaMultiplet) {
            if (s.skewCount % 2 != 0) evenSkew = false;
            if (!s.allStructured) structured = false;
        }
    }
    std::printf("non-multiplet terms all structured: %s\n", structured ? "yes" : "no");
    std::printf("non-multiplet skew counts all even: %s\n", evenSkew ? "yes" : "no");
    return 0;
}

int runGenerate(const std::string& shapeText, const std::string& kindName, std::uint64_t seed,
                const std::string& output) {
    const Shape shape{parseDims(shapeText)};
    writeTensor(output, generate(parseKind(kindName), shape, seed));
    std::printf("wrote %s\n", output.c_str());
    return 0;
}

int runErrorCurve(const std::string& input, const std::string& output) {
    const TkpsvdResult res = readDecomposition(input);
    std::ostringstream lines;
    for (index_t r = 0; r <= res.termCount(); ++r) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%" PRId64 " %.17g\n", r, relativeError(res.sigmas, r));
        lines << buf;
    }
    if (output.empty()) {
        std::fputs(lines.str().c_str(), stdout);
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) fail("BadFile", "cannot open " + output + " for writing");
        out << lines.str();
        std::printf("wrote %s\n", output.c_str());
    }
    return 0;
}

int runExportPerm(const std::string& shapeText, const std::string& kindName,
                  const std::string& output) {
    const Shape shape{parseDims(shapeText)};
    const PermutationMap map = structureMap(parseKind(kindName), shape);
    writePermutationPattern(output, map);
    std::printf("wrote %s (%" PRId64 " entries)\n", output.c_str(), map.size());
    return 0;
}

int runImageDemo(const std::string& input, index_t levels, std::vector<index_t> terms, double tol,
                 const std::string& prefix) {
    const ImageTensor img = readImage(input);
    const FactorGrid g = imageGrid(img.tensor().shape(), levels);
    const TkpsvdResult res = tkpsvd(img.tensor(), g, Backend::TTR1, tol);
    if (terms.empty()) terms = {res.termCount()};
    for (index_t r : terms)
        if (r < 1 || r > res.termCount())
            throw UsageError("--terms entries must be between 1 and " +
                             std::to_string(res.termCount()));
    std::printf("levels: %" PRId64 ", terms: %" PRId64 ", base resolution %s\n", levels,
                res.termCount(), dimsText(g.dims.back()).c_str());
    std::printf("%6s  %10s  %12s  %s\n", "r", "psnr_db", "compression", "file");
    for (index_t r : terms) {
        const ImageTensor recon(reconstructKP(res, r));
        const std::string path =
            prefix + "_r" + std::to_string(r) + (img.channels() == 3 ? ".ppm" : ".pgm");
        writeImage(path, recon);
        std::printf("%6" PRId64 "  %10.4f  %12.4f  %s\n", r, psnr(img, recon),
                    compressionRate(g, g.d, r), path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Tensor Kronecker product singular value decomposition toolkit.\n"
        "Grids list factors A(1)..A(d) left to right; the Kronecker chain\n"
        "multiplies them in reverse, A(d) x ... x A(1), with A(1) innermost."};
    app.require_subcommand(1);

    std::string input, output, gridText, backend = "ttr1", kindName = "centrosymmetric";
    std::string shapeText, prefix = "demo";
    double tol = 1e-12;
    std::uint64_t seed = 1;
    index_t terms = 0, levels = 4;
    std::vector<index_t> termList;

    CLI::App* decompose = app.add_subcommand("decompose", "Decompose a tensor file against a grid");
    decompose->add_option("input", input, "tensor file (.ten or .tenb)")->required();
    decompose->add_option("--grid", gridText, "factor grid, e.g. 4x4x4,3x3x3,2x2x2")->required();
    decompose->add_option("--backend", backend, "polyadic backend")
        ->check(CLI::IsMember({"ttr1", "hosvd"}));
    decompose->add_option("--tol", tol, "relative truncation tolerance");
    decompose->add_option("-o,--out", output, "decomposition output (.tkp)");

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "Rebuild a truncated tensor");
    reconstruct->add_option("input", input, "decomposition file (.tkp)")->required();
    reconstruct->add_option("--terms", terms, "leading terms to keep (0 = all)");
    reconstruct->add_option("-o,--out", output, "tensor output (.ten or .tenb)")->required();

    CLI::App* analyze = app.add_subcommand("analyze", "Check factor structure preservation");
    analyze->add_option("input", input, "decomposition file (.tkp)")->required();
    analyze->add_option("--kind", kindName, "structure family to test against");

    CLI::App* gen = app.add_subcommand("generate", "Write a seeded structured random tensor");
    gen->add_option("shape", shapeText, "tensor shape, e.g. 12x12x12")->required();
    gen->add_option("--kind", kindName, "structure family");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("-o,--out", output, "tensor output (.ten or .tenb)")->required();

    CLI::App* curve = app.add_subcommand("error-curve", "Relative error for every truncation");
    curve->add_option("input", input, "decomposition file (.tkp)")->required();
    curve->add_option("-o,--out", output, "listing output (default stdout)");

    CLI::App* perm = app.add_subcommand("export-perm", "Export a structure permutation pattern");
    perm->add_option("shape", shapeText, "tensor shape the permutation acts on")->required();
    perm->add_option("--kind", kindName, "structure family");
    perm->add_option("-o,--out", output, "pattern output, one 'row col' line per entry")
        ->required();

    CLI::App* demo = app.add_subcommand("image-demo", "Multilevel image compression demo");
    demo->add_option("input", input, "image file (.pgm or .ppm)")->required();
    demo->add_option("--levels", levels, "grid levels (factors per term)");
    demo->add_option("--terms", termList, "term counts to reconstruct, e.g. 1,5,20")
        ->delimiter(',');
    demo->add_option("--tol", tol, "relative truncation tolerance");
    demo->add_option("--out-prefix", prefix, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*decompose) return runDecompose(input, gridText, backend, tol, output);
        if (*reconstruct) return runReconstruct(input, terms, output);
        if (*analyze) return runAnalyze(input, kindName);
        if (*gen) return runGenerate(shapeText, kindName, seed, output);
        if (*curve) return runErrorCurve(input, output);
        if (*perm) return runExportPerm(shapeText, kindName, output);
        if (*demo) return runImageDemo(input, levels, termList, tol, prefix);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == "BadFile" ? 1 : 2;
    }
    return 0;
}
