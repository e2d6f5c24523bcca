#pragma once

// Operator-splitting (ADMM) solver for semidefinite programs whose matrix
// variables are all 2x2 Hermitian PSD blocks, plus free scalars, under linear
// equality constraints. The PSD projection per block is closed form, so each
// iteration is a dense matvec pair plus a cheap cone projection.
//
// Block coordinates: (h00, h11, sqrt2*Re h01, sqrt2*Im h01). In these
// coordinates tr[A B] of two Hermitian matrices is the Euclidean dot product.

#include <obi/linalg.hpp>

#include <Eigen/Dense>

#include <vector>

namespace obi {

struct SdpModel {
    struct Term {
        int index;
        double coef;
    };

    int n_blocks = 0;
    int n_scalars = 0;
    std::vector<std::vector<Term>> rows;
    std::vector<double> rhs;
    std::vector<Term> objective; // minimized
    double objective_constant = 0;

    int block_coord(int block, int comp) const { return 4 * block + comp; }
    int scalar_coord(int k) const { return 4 * n_blocks + k; }
    int n_vars() const { return 4 * n_blocks + n_scalars; }

    int add_block() { return n_blocks++; }
    int add_scalar() { return n_scalars++; }

    // sum_j coef_j X_{b_j} + sum_k gamma_k s_k I = rhs   (one 2x2 equality)
    void add_matrix_equality(const std::vector<std::pair<int, double>>& blocks,
                             const std::vector<std::pair<int, double>>& scalar_identity,
                             const Mat2& rhs_matrix);
    void add_scalar_row(std::vector<Term> terms, double rhs_value);
};

Eigen::Vector4d encode_hermitian(const Mat2& m);
Mat2 decode_hermitian(const Eigen::Vector4d& c);

struct SdpOptions {
    int max_iters = 200000;
    double eps_abs = 1e-10;
    double eps_rel = 0;
    double rho = 1.0;
    double alpha = 1.6; // over-relaxation
    bool adapt_rho = true;
    double feas_target = 1e-9; // required ||Gx - h||_inf at the cone point
};

struct SdpSolution {
    Eigen::VectorXd x;        // cone-feasible point
    Eigen::VectorXd eq_duals; // y with c + G^T y in the normal cone at x
    double objective = 0;
    double primal_residual = 0; // ||G x - h||_inf
    double dual_residual = 0;
    int iterations = 0;
    bool converged = false;
    int n_blocks = 0;

    Mat2 block(int j) const {
        return decode_hermitian(x.segment<4>(4 * j));
    }
    double scalar(int k) const { return x(4 * n_blocks + k); }
};

// Optional warm-start state carried between related solves.
struct SdpState {
    Eigen::VectorXd v, w;
    double rho = 1.0;
    bool valid = false;
};

SdpSolution sdp_solve(const SdpModel& model, const SdpOptions& opts = {}, SdpState* state = nullptr);

} // namespace obi
