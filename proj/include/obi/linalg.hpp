#pragma once

// Small dense complex linear algebra helpers shared by the quantum and
// steering modules. Everything here operates on fixed-size Eigen matrices;
// dimensions are tiny (2x2 .. 8x8) so closed forms are used where available.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <random>
#include <vector>

namespace obi {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using MatX = Eigen::MatrixXcd;
using Vec2 = Eigen::Vector2cd;
using VecX = Eigen::VectorXcd;

inline MatX kron(const MatX& a, const MatX& b) {
    MatX out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline bool is_hermitian(const MatX& m, double tol = 1e-12) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const MatX& m) {
    Eigen::SelfAdjointEigenSolver<MatX> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Partial trace of an operator on a tensor product of qubits, keeping the
// subsystems flagged in `keep`. dims are all 2; index convention is
// big-endian (subsystem 0 is the most significant bit).
inline MatX partial_trace(const MatX& m, const std::vector<bool>& keep) {
    const int n = static_cast<int>(keep.size());
    int keep_dim = 1, drop_dim = 1;
    std::vector<int> keep_idx, drop_idx;
    for (int s = 0; s < n; ++s) {
        if (keep[s]) { keep_dim *= 2; keep_idx.push_back(s); }
        else         { drop_dim *= 2; drop_idx.push_back(s); }
    }
    auto assemble = [&](int k, int d) {
        int full = 0;
        for (size_t i = 0; i < keep_idx.size(); ++i)
            full |= ((k >> (static_cast<int>(keep_idx.size()) - 1 - static_cast<int>(i))) & 1) << (n - 1 - keep_idx[i]);
        for (size_t i = 0; i < drop_idx.size(); ++i)
            full |= ((d >> (static_cast<int>(drop_idx.size()) - 1 - static_cast<int>(i))) & 1) << (n - 1 - drop_idx[i]);
        return full;
    };
    MatX out = MatX::Zero(keep_dim, keep_dim);
    for (int i = 0; i < keep_dim; ++i)
        for (int j = 0; j < keep_dim; ++j)
            for (int d = 0; d < drop_dim; ++d)
                out(i, j) += m(assemble(i, d), assemble(j, d));
    return out;
}

// --- closed-form 2x2 Hermitian eigenstructure -------------------------------

struct Eig2 {
    double lo = 0, hi = 0; // eigenvalues, lo <= hi
    Mat2 p_lo, p_hi;       // orthogonal projectors onto the eigenspaces
};

inline Eig2 eig2(const Mat2& h) {
    Eig2 e;
    const double a = h(0, 0).real(), b = h(1, 1).real();
    const cplx c = h(0, 1);
    const double mean = 0.5 * (a + b);
    const double rad = std::sqrt(0.25 * (a - b) * (a - b) + std::norm(c));
    e.lo = mean - rad;
    e.hi = mean + rad;
    if (rad < 1e-15) {
        e.p_lo = Mat2::Identity();
        e.p_hi = Mat2::Zero();
    } else {
        e.p_hi = (h - e.lo * Mat2::Identity()) / (e.hi - e.lo);
        e.p_lo = Mat2::Identity() - e.p_hi;
    }
    return e;
}

// Frobenius-nearest PSD matrix: clamp negative eigenvalues at zero.
inline Mat2 psd_project_2x2(const Mat2& h) {
    Eig2 e = eig2(h);
    if (e.lo >= 0) return h;
    return std::max(e.hi, 0.0) * e.p_hi;
}

inline double norm_inf_2x2(const Mat2& h) { // largest |eigenvalue|
    Eig2 e = eig2(h);
    return std::max(std::abs(e.lo), std::abs(e.hi));
}

inline Mat2 negative_part_2x2(const Mat2& h) { // (|H| - H)/2, PSD
    Eig2 e = eig2(h);
    Mat2 out = Mat2::Zero();
    if (e.lo < 0) out -= e.lo * e.p_lo;
    if (e.hi < 0) out -= e.hi * e.p_hi;
    return out;
}

inline Mat2 positive_part_2x2(const Mat2& h) { // (|H| + H)/2, PSD
    Eig2 e = eig2(h);
    Mat2 out = Mat2::Zero();
    if (e.lo > 0) out += e.lo * e.p_lo;
    if (e.hi > 0) out += e.hi * e.p_hi;
    return out;
}

// --- Pauli matrices and common states ---------------------------------------

inline Mat2 pauli_x() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 pauli_y() { Mat2 m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Mat2 pauli_z() { Mat2 m; m << 1, 0, 0, -1; return m; }

// Projector onto (|0> + e^{i phase}|1>)/sqrt(2).
inline Mat2 equatorial_projector(double phase) {
    Vec2 v;
    v << 1.0 / std::sqrt(2.0), std::exp(cplx(0, phase)) / std::sqrt(2.0);
    return v * v.adjoint();
}

// Projector pair for the +-1 eigenspaces of a traceless observable.
inline std::array<Mat2, 2> dichotomic_projectors(const Mat2& observable) {
    Eig2 e = eig2(observable);
    return {e.p_hi, e.p_lo}; // outcome 0 <-> +1 eigenvalue
}

// --- random sampling ---------------------------------------------------------

inline Vec2 random_qubit_state(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec2 v;
    v << cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
    v.normalize();
    return v;
}

inline Mat2 random_projector(std::mt19937_64& rng) {
    Vec2 v = random_qubit_state(rng);
    return v * v.adjoint();
}

inline VecX random_pure_state(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    VecX v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
    v.normalize();
    return v;
}

inline Mat2 random_density_2x2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Mat2 a;
    a << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)),
         cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
    Mat2 rho = a * a.adjoint();
    return rho / rho.trace().real();
}

} // namespace obi
