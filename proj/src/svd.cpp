#include "tkp/svd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

namespace tkp {

namespace {

// Columns of 64 or fewer go through the Jacobi kernel for accuracy; larger
// blocks use the divide-and-conquer kernel.
constexpr Eigen::Index kJacobiLimit = 64;

void applySignConvention(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index best = 0;
        double bestAbs = -1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double a = std::abs(u(i, j));
            if (a > bestAbs) {
                bestAbs = a;
                best = i;
            }
        }
        if (u(best, j) < 0.0) {
            u.col(j) = -u.col(j);
            v.col(j) = -v.col(j);
        }
    }
}

DenseTensor fromEigen(const Eigen::MatrixXd& m) {
    std::vector<double> data(static_cast<std::size_t>(m.size()));
    // Eigen's default storage is column-major, identical to ours.
    std::memcpy(data.data(), m.data(), sizeof(double) * data.size());
    return DenseTensor(Shape({m.rows(), m.cols()}), std::move(data));
}

} // namespace

SvdResult economySvd(const DenseTensor& a) {
    if (a.order() != 2)
        fail("ShapeMismatch", "SVD input must be a matrix");
    for (double x : a.data())
        if (!std::isfinite(x))
            fail("NonFiniteInput", "SVD input contains a non-finite value");

    const auto m = static_cast<Eigen::Index>(a.dim(1));
    const auto n = static_cast<Eigen::Index>(a.dim(2));
    Eigen::MatrixXd mat = Eigen::Map<const Eigen::MatrixXd>(a.data().data(), m, n);

    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
    Eigen::VectorXd s;
    if (std::min(m, n) <= kJacobiLimit) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    }
    applySignConvention(u, v);

    SvdResult out;
    out.U = fromEigen(u);
    out.V = fromEigen(v);
    out.s.assign(s.data(), s.data() + s.size());
    return out;
}

std::vector<SvdTriple> truncatedTriples(const SvdResult& res, double tol) {
    std::vector<SvdTriple> out;
    if (res.s.empty()) return out;
    const double cutoff = tol * res.s.front();
    const index_t m = res.U.dim(1);
    const index_t n = res.V.dim(1);
    for (std::size_t j = 0; j < res.s.size(); ++j) {
        const double sigma = res.s[j];
        if (!(sigma > 0.0) || sigma < cutoff) continue;
        SvdTriple t;
        t.sigma = sigma;
        const double* ucol = res.U.data().data() + static_cast<index_t>(j) * m;
        const double* vcol = res.V.data().data() + static_cast<index_t>(j) * n;
        t.u.assign(ucol, ucol + m);
        t.v.assign(vcol, vcol + n);
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace tkp
