#include <obi/solver/sdp.hpp>

#include <obi/errors.hpp>

namespace obi {

Eigen::Vector4d encode_hermitian(const Mat2& m) {
    Eigen::Vector4d c;
    const double s = std::sqrt(2.0);
    c << m(0, 0).real(), m(1, 1).real(), s * m(0, 1).real(), s * m(0, 1).imag();
    return c;
}

Mat2 decode_hermitian(const Eigen::Vector4d& c) {
    Mat2 m;
    const double s = 1.0 / std::sqrt(2.0);
    const cplx off(c(2) * s, c(3) * s);
    m << c(0), off, std::conj(off), c(1);
    return m;
}

void SdpModel::add_matrix_equality(const std::vector<std::pair<int, double>>& blocks,
                                   const std::vector<std::pair<int, double>>& scalar_identity,
                                   const Mat2& rhs_matrix) {
    const Eigen::Vector4d r = encode_hermitian(rhs_matrix);
    for (int comp = 0; comp < 4; ++comp) {
        std::vector<Term> terms;
        for (const auto& [b, coef] : blocks)
            if (coef != 0.0) terms.push_back({block_coord(b, comp), coef});
        if (comp < 2)
            for (const auto& [s, gamma] : scalar_identity)
                if (gamma != 0.0) terms.push_back({scalar_coord(s), gamma});
        rows.push_back(std::move(terms));
        rhs.push_back(r(comp));
    }
}

void SdpModel::add_scalar_row(std::vector<Term> terms, double rhs_value) {
    rows.push_back(std::move(terms));
    rhs.push_back(rhs_value);
}

SdpSolution sdp_solve(const SdpModel& model, const SdpOptions& opts, SdpState* state) {
    const int nv = model.n_vars();
    const int m = static_cast<int>(model.rows.size());
    if (nv == 0) throw StructuralError("sdp: empty model");
    for (const auto& row : model.rows)
        for (const auto& t : row)
            if (t.index < 0 || t.index >= nv) throw StructuralError("sdp: constraint references unknown variable");

    // Dense constraint matrix with unit-norm row scaling.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, nv);
    Eigen::VectorXd h(m), row_scale(m);
    for (int i = 0; i < m; ++i) {
        for (const auto& t : model.rows[i]) g(i, t.index) += t.coef;
        double nrm = g.row(i).norm();
        row_scale(i) = (nrm > 1e-14) ? 1.0 / nrm : 1.0;
        g.row(i) *= row_scale(i);
        h(i) = model.rhs[i] * row_scale(i);
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
    for (const auto& t : model.objective) c(t.index) += t.coef;

    Eigen::MatrixXd gram = g * g.transpose();
    gram.diagonal().array() += 1e-12;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw SolverError("sdp: constraint Gram factorization failed");

    double rho = opts.rho;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(nv);
    if (state && state->valid && state->v.size() == nv) {
        v = state->v;
        w = state->w;
        rho = state->rho;
    }

    auto project_cone = [&](Eigen::VectorXd& t) {
        for (int j = 0; j < model.n_blocks; ++j) {
            Eigen::Vector4d blk = t.segment<4>(4 * j);
            const double a = blk(0), b = blk(1);
            const double rad2 = 0.25 * (a - b) * (a - b) + 0.5 * (blk(2) * blk(2) + blk(3) * blk(3));
            const double mean = 0.5 * (a + b);
            const double rad = std::sqrt(rad2);
            if (mean - rad >= 0) continue;           // already PSD
            if (mean + rad <= 0) { t.segment<4>(4 * j).setZero(); continue; }
            t.segment<4>(4 * j) = encode_hermitian(psd_project_2x2(decode_hermitian(blk)));
        }
    };

    SdpSolution sol;
    sol.n_blocks = model.n_blocks;
    Eigen::VectorXd u(nv), z(nv), lambda(m), t(nv), v_prev(nv), gv(m);
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        z = v - w - c / rho;
        lambda = ldlt.solve(g * z - h);
        u = z - g.transpose() * lambda;
        t = opts.alpha * u + (1.0 - opts.alpha) * v + w;
        v_prev = v;
        v = t;
        project_cone(v);
        w = t - v;

        if ((it % 25) == 0 || it == opts.max_iters - 1) {
            gv = g * v - h;
            double feas = 0;
            for (int i = 0; i < m; ++i) feas = std::max(feas, std::abs(gv(i)) / row_scale(i));
            const double gap = (u - v).lpNorm<Eigen::Infinity>();
            const double dres = rho * (v - v_prev).lpNorm<Eigen::Infinity>();
            const double scale = std::max(1.0, v.lpNorm<Eigen::Infinity>());
            const double tol = opts.eps_abs + opts.eps_rel * scale;
            if (feas <= std::max(opts.feas_target, tol) && gap <= tol && dres <= tol) {
                sol.converged = true;
                ++it;
                break;
            }
            if (opts.adapt_rho && it > 0 && (it % 100) == 0) {
                const double pr = std::max(feas, gap);
                if (pr > 10 * dres && rho < 1e6) { rho *= 2; w *= 0.5; }
                else if (dres > 10 * pr && rho > 1e-6) { rho *= 0.5; w *= 2.0; }
            }
        }
    }

    gv = g * v - h;
    double feas = 0;
    for (int i = 0; i < m; ++i) feas = std::max(feas, std::abs(gv(i)) / row_scale(i));
    sol.x = v;
    sol.primal_residual = std::max(feas, (u - v).lpNorm<Eigen::Infinity>());
    sol.dual_residual = rho * (v - v_prev).lpNorm<Eigen::Infinity>();
    sol.iterations = it;
    sol.objective = c.dot(v) + model.objective_constant;
    sol.eq_duals.resize(m);
    for (int i = 0; i < m; ++i) sol.eq_duals(i) = rho * lambda(i) * row_scale(i);
    if (state) {
        state->v = v;
        state->w = w;
        state->rho = rho;
        state->valid = true;
    }
    return sol;
}

} // namespace obi
