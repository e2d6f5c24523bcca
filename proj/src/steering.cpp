#include <obi/steering.hpp>

#include <obi/errors.hpp>

#include <json.hpp>

#include <cmath>

namespace obi {

namespace {

const Mat2 kId2 = Mat2::Identity();

int response(int lambda, int x) { return (lambda >> x) & 1; }

Mat2 ptrace_first(const Mat4& m) { return partial_trace(m, {false, true}); }

nlohmann::json mat2_json(const Mat2& m) {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < 2; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < 2; ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        j.push_back(row);
    }
    return j;
}

Mat2 mat2_from_json(const nlohmann::json& j) {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            m(i, k) = cplx(j.at(i).at(k).at(0).get<double>(), j.at(i).at(k).at(1).get<double>());
    return m;
}

} // namespace

std::vector<std::string> validate_assemblage(const ExtendedAssemblage& e) {
    std::vector<std::string> out;
    if (e.nx < 1 || static_cast<int>(e.obs.size()) != e.nx) throw StructuralError("assemblage: wrong shape");
    for (int x = 0; x < e.nx; ++x) {
        double tr = 0;
        for (int a = 0; a < 2; ++a) {
            const Mat2& s = e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)];
            if (!is_hermitian(s, 1e-10)) out.push_back("obs block not Hermitian");
            if (eig2(s).lo < -1e-10) out.push_back("obs block not PSD");
            tr += s.trace().real();
        }
        if (std::abs(tr - 1.0) > 1e-10) out.push_back("obs blocks at x=" + std::to_string(x) + " trace to " + std::to_string(tr));
    }
    for (int a = 0; a < 2; ++a) {
        const Mat2& s = e.do_[static_cast<size_t>(a)];
        if (!is_hermitian(s, 1e-10)) out.push_back("do block not Hermitian");
        if (eig2(s).lo < -1e-10) out.push_back("do block not PSD");
        if (std::abs(s.trace().real() - 1.0) > 1e-10) out.push_back("do block a=" + std::to_string(a) + " not trace one");
    }
    return out;
}

std::vector<std::string> validate_tripartite(const TripartiteAssemblage& t) {
    std::vector<std::string> out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            double tr = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const Mat2& s = t.o(x, y, a, b);
                    if (!is_hermitian(s, 1e-10)) out.push_back("obs block not Hermitian");
                    if (eig2(s).lo < -1e-10) out.push_back("obs block not PSD");
                    tr += s.trace().real();
                }
            if (std::abs(tr - 1.0) > 1e-10) out.push_back("obs blocks (x,y) do not trace to one");
        }
    for (int x = 0; x < 2; ++x)
        for (int b = 0; b < 2; ++b) {
            double tr = 0;
            for (int a = 0; a < 2; ++a) {
                const Mat2& s = t.d(x, a, b);
                if (eig2(s).lo < -1e-10) out.push_back("do block not PSD");
                tr += s.trace().real();
            }
            if (std::abs(tr - 1.0) > 1e-10) out.push_back("do blocks (x,b) do not trace to one");
        }
    return out;
}

// --- channels and generators ------------------------------------------------------

QuantumChannel QuantumChannel::identity() { return from_unitary(kId2); }

QuantumChannel QuantumChannel::from_unitary(const Mat2& u) {
    QuantumChannel c;
    c.kraus = {u};
    return c;
}

Mat2 QuantumChannel::apply(const Mat2& rho) const {
    Mat2 out = Mat2::Zero();
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
}

bool QuantumChannel::trace_preserving(double tol) const {
    Mat2 s = Mat2::Zero();
    for (const auto& k : kraus) s += k.adjoint() * k;
    return (s - kId2).cwiseAbs().maxCoeff() <= tol;
}

ExtendedAssemblage assemblage_from_model(const Mat4& rho, const std::vector<std::array<Mat2, 2>>& alice,
                                         const std::array<QuantumChannel, 2>& channels) {
    if (!is_hermitian(rho, 1e-10) || std::abs(rho.trace().real() - 1.0) > 1e-9 || min_eigenvalue(rho) < -1e-10)
        throw ModelError("assemblage_from_model: invalid state");
    for (const auto& c : channels)
        if (!c.trace_preserving()) throw ModelError("assemblage_from_model: channel not trace preserving");
    ExtendedAssemblage e(static_cast<int>(alice.size()));
    for (int x = 0; x < e.nx; ++x) {
        Mat2 sum = Mat2::Zero();
        for (const auto& m : alice[static_cast<size_t>(x)]) sum += m;
        if ((sum - kId2).cwiseAbs().maxCoeff() > 1e-10) throw ModelError("assemblage_from_model: POVM incomplete");
        for (int a = 0; a < 2; ++a) {
            const Mat2 steered = ptrace_first(Mat4(kron(alice[static_cast<size_t>(x)][static_cast<size_t>(a)], kId2) * rho));
            e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)] = channels[static_cast<size_t>(a)].apply(steered);
        }
    }
    const Mat2 rho_b = ptrace_first(rho);
    for (int a = 0; a < 2; ++a) e.do_[static_cast<size_t>(a)] = channels[static_cast<size_t>(a)].apply(rho_b);
    const auto problems = validate_assemblage(e);
    if (!problems.empty()) throw ModelError("assemblage_from_model: " + problems.front());
    return e;
}

ExtendedAssemblage rsp_assemblage(double phi) {
    VecX psi(4); // singlet
    psi << 0, 1, -1, 0;
    psi /= std::sqrt(2.0);
    const Mat4 rho = psi * psi.adjoint();
    std::vector<std::array<Mat2, 2>> alice(2);
    const double phases[2] = {0.0, phi};
    for (int x = 0; x < 2; ++x) {
        alice[static_cast<size_t>(x)][0] = equatorial_projector(phases[x]);
        alice[static_cast<size_t>(x)][1] = kId2 - alice[static_cast<size_t>(x)][0];
    }
    return assemblage_from_model(rho, alice, {QuantumChannel::identity(), QuantumChannel::from_unitary(pauli_z())});
}

ExtendedAssemblage rsp_entanglement_assemblage(double theta) {
    VecX psi(4);
    psi << std::cos(theta), 0, 0, std::sin(theta);
    const Mat4 rho = psi * psi.adjoint();
    std::vector<std::array<Mat2, 2>> alice(2);
    alice[0] = dichotomic_projectors(pauli_x());
    alice[1] = dichotomic_projectors(pauli_y());
    return assemblage_from_model(rho, alice, {QuantumChannel::identity(), QuantumChannel::from_unitary(pauli_z())});
}

ExtendedAssemblage x3_assemblage(double v) {
    if (v < 0 || v > 1) throw DomainError("x3_assemblage: visibility outside [0,1]");
    VecX phi(4);
    phi << 1, 0, 0, 1;
    phi /= std::sqrt(2.0);
    Mat4 rho = v * (phi * phi.adjoint());
    rho(0, 0) += (1 - v) * 0.5;
    rho(3, 3) += (1 - v) * 0.5;
    std::vector<std::array<Mat2, 2>> alice(3);
    alice[0] = dichotomic_projectors(Mat2(-(pauli_x() + pauli_z()) / std::sqrt(2.0)));
    alice[1] = dichotomic_projectors(pauli_x());
    alice[2] = dichotomic_projectors(pauli_z());
    return assemblage_from_model(rho, alice, {QuantumChannel::identity(), QuantumChannel::identity()});
}

TripartiteAssemblage tripartite_assemblage(double v) {
    if (v < 0 || v > 1) throw DomainError("tripartite_assemblage: visibility outside [0,1]");
    VecX g3 = VecX::Zero(8);
    {
        VecX plus(2), minus(2), zero(2), one(2);
        plus << 1, 1;
        plus /= std::sqrt(2.0);
        minus << 1, -1;
        minus /= std::sqrt(2.0);
        zero << 1, 0;
        one << 0, 1;
        auto triple = [](const VecX& a, const VecX& b, const VecX& c) {
            VecX out(8);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k) out(4 * i + 2 * j + k) = a(i) * b(j) * c(k);
            return out;
        };
        g3 = (triple(plus, zero, plus) + triple(minus, one, minus)) / std::sqrt(2.0);
    }
    MatX rho = v * (g3 * g3.adjoint()) + (1 - v) * MatX::Identity(8, 8) / 8.0;

    std::array<std::array<Mat2, 2>, 2> alice; // [x][a]
    alice[0] = dichotomic_projectors(pauli_x());
    alice[1] = dichotomic_projectors(pauli_y());
    auto bob = [&](int y, int a) { // [y][a] -> projector array over b
        const double ang = (y == 0 ? M_PI / 4 : 3 * M_PI / 4) * (a == 0 ? 1.0 : -1.0);
        return dichotomic_projectors(Mat2(std::cos(ang) * pauli_x() + std::sin(ang) * pauli_y()));
    };

    TripartiteAssemblage t;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a) {
                const auto nb = bob(y, a);
                for (int b = 0; b < 2; ++b) {
                    const MatX op = kron(kron(alice[static_cast<size_t>(x)][static_cast<size_t>(a)],
                                              nb[static_cast<size_t>(b)]),
                                         MatX::Identity(2, 2));
                    t.o(x, y, a, b) = partial_trace(MatX(op * rho), {false, false, true});
                }
            }
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
            const MatX op = kron(kron(alice[static_cast<size_t>(x)][static_cast<size_t>(a)], Mat2(kId2)),
                                 MatX::Identity(2, 2));
            const Mat2 red = partial_trace(MatX(op * rho), {false, false, true});
            for (int b = 0; b < 2; ++b) t.d(x, a, b) = red;
        }
    return t;
}

ExtendedAssemblage classical_assemblage(const std::vector<double>& weights,
                                        const std::vector<std::array<Mat2, 2>>& states_by_a, int nx) {
    const size_t nl = size_t(1) << nx;
    if (weights.size() != nl || states_by_a.size() != nl) throw StructuralError("classical_assemblage: size mismatch");
    ExtendedAssemblage e(nx);
    for (size_t lam = 0; lam < nl; ++lam)
        for (int a = 0; a < 2; ++a) {
            const Mat2 s = weights[lam] * states_by_a[lam][static_cast<size_t>(a)];
            for (int x = 0; x < nx; ++x)
                if (response(static_cast<int>(lam), x) == a) e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)] += s;
            e.do_[static_cast<size_t>(a)] += s;
        }
    return e;
}

ExtendedAssemblage random_classical_assemblage(int nx, std::mt19937_64& rng) {
    const size_t nl = size_t(1) << nx;
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> w(nl);
    double tot = 0;
    for (auto& v : w) {
        v = exp1(rng) + 1e-6;
        tot += v;
    }
    for (auto& v : w) v /= tot;
    std::vector<std::array<Mat2, 2>> states(nl);
    for (auto& pair : states) pair = {random_density_2x2(rng), random_density_2x2(rng)};
    return classical_assemblage(w, states, nx);
}

ExtendedAssemblage random_quantum_assemblage(int nx, std::mt19937_64& rng) {
    const VecX psi = random_pure_state(4, rng);
    std::vector<std::array<Mat2, 2>> alice(static_cast<size_t>(nx));
    for (auto& povm : alice) {
        povm[0] = random_projector(rng);
        povm[1] = kId2 - povm[0];
    }
    std::normal_distribution<double> g;
    std::array<QuantumChannel, 2> chans;
    for (auto& c : chans) {
        Mat2 h;
        h << g(rng), cplx(g(rng), g(rng)), 0, g(rng);
        h(1, 0) = std::conj(h(0, 1));
        Eigen::SelfAdjointEigenSolver<Mat2> es(h);
        const Mat2 u = es.eigenvectors() *
                       (Eigen::Vector2cd(std::exp(cplx(0, es.eigenvalues()(0))), std::exp(cplx(0, es.eigenvalues()(1))))).asDiagonal() *
                       es.eigenvectors().adjoint();
        c = QuantumChannel::from_unitary(u);
    }
    return assemblage_from_model(psi * psi.adjoint(), alice, chans);
}

ExtendedAssemblage mix(const ExtendedAssemblage& a, const ExtendedAssemblage& b, double p) {
    if (a.nx != b.nx) throw StructuralError("mix: setting count mismatch");
    ExtendedAssemblage out(a.nx);
    for (int x = 0; x < a.nx; ++x)
        for (int i = 0; i < 2; ++i)
            out.obs[static_cast<size_t>(x)][static_cast<size_t>(i)] =
                p * a.obs[static_cast<size_t>(x)][static_cast<size_t>(i)] +
                (1 - p) * b.obs[static_cast<size_t>(x)][static_cast<size_t>(i)];
    for (int i = 0; i < 2; ++i)
        out.do_[static_cast<size_t>(i)] = p * a.do_[static_cast<size_t>(i)] + (1 - p) * b.do_[static_cast<size_t>(i)];
    return out;
}

// --- primal robustness -------------------------------------------------------------

namespace {

struct PrimalLayout {
    SdpModel model;
    int tau = 0;
};

// Blocks zeta_{a,lambda}, xi_{a,lambda}; scalars f_lambda, g_lambda, tau.
PrimalLayout build_primal(const ExtendedAssemblage& e, bool include_do) {
    const int nl = 1 << e.nx;
    PrimalLayout lay;
    SdpModel& m = lay.model;
    auto zeta = [&](int a, int lam) { return 2 * lam + a; };
    auto xi = [&](int a, int lam) { return 2 * nl + 2 * lam + a; };
    m.n_blocks = 4 * nl;
    const int f0 = 0, g0 = nl;
    lay.tau = 2 * nl;
    m.n_scalars = 2 * nl + 1;

    for (int x = 0; x < e.nx; ++x)
        for (int a = 0; a < 2; ++a) {
            std::vector<std::pair<int, double>> blocks;
            for (int lam = 0; lam < nl; ++lam)
                if (response(lam, x) == a) {
                    blocks.push_back({zeta(a, lam), 1.0});
                    blocks.push_back({xi(a, lam), -1.0});
                }
            m.add_matrix_equality(blocks, {}, Mat2(-e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)]));
        }
    if (include_do)
        for (int a = 0; a < 2; ++a) {
            std::vector<std::pair<int, double>> blocks;
            for (int lam = 0; lam < nl; ++lam) {
                blocks.push_back({zeta(a, lam), 1.0});
                blocks.push_back({xi(a, lam), -1.0});
            }
            m.add_matrix_equality(blocks, {}, Mat2(-e.do_[static_cast<size_t>(a)]));
        }
    for (int lam = 0; lam < nl; ++lam)
        for (int a = 0; a < 2; ++a) {
            m.add_scalar_row({{m.block_coord(zeta(a, lam), 0), 1.0},
                              {m.block_coord(zeta(a, lam), 1), 1.0},
                              {m.scalar_coord(f0 + lam), -1.0}},
                             0.0);
            m.add_scalar_row({{m.block_coord(xi(a, lam), 0), 1.0},
                              {m.block_coord(xi(a, lam), 1), 1.0},
                              {m.scalar_coord(g0 + lam), -1.0}},
                             0.0);
        }
    std::vector<SdpModel::Term> sum;
    for (int lam = 0; lam < nl; ++lam) sum.push_back({m.scalar_coord(f0 + lam), 1.0});
    sum.push_back({m.scalar_coord(lay.tau), -1.0});
    m.add_scalar_row(std::move(sum), 0.0);
    m.objective = {{m.scalar_coord(lay.tau), 1.0}};
    return lay;
}

} // namespace

RobustnessResult robustness_primal(const ExtendedAssemblage& e, const RobustnessOptions& opts, SdpState* warm) {
    const auto problems = validate_assemblage(e);
    if (!problems.empty()) throw DomainError("robustness: invalid assemblage: " + problems.front());
    auto lay = build_primal(e, opts.include_do);
    const auto sol = sdp_solve(lay.model, opts.sdp, warm);
    if (!sol.converged && sol.primal_residual > 1e-6)
        throw SolverError("robustness: splitting solver stalled, residual " + std::to_string(sol.primal_residual));
    RobustnessResult r;
    r.tau = sol.scalar(lay.tau);
    r.classical = r.tau <= 1e-7;
    r.residual = sol.primal_residual;
    r.iterations = sol.iterations;
    r.capped = r.tau > 1e3;
    return r;
}

RobustnessResult standard_steering_robustness(const ExtendedAssemblage& e, const SdpOptions& sdp, SdpState* warm) {
    const auto problems = validate_assemblage(e);
    if (!problems.empty()) throw DomainError("steering robustness: invalid assemblage: " + problems.front());
    const int nl = 1 << e.nx;
    SdpModel m;
    m.n_blocks = 2 * nl; // zeta_lambda, xi_lambda
    m.n_scalars = 1;     // tau
    const int tau = 0;
    for (int x = 0; x < e.nx; ++x)
        for (int a = 0; a < 2; ++a) {
            std::vector<std::pair<int, double>> blocks;
            for (int lam = 0; lam < nl; ++lam)
                if (response(lam, x) == a) {
                    blocks.push_back({lam, 1.0});
                    blocks.push_back({nl + lam, -1.0});
                }
            m.add_matrix_equality(blocks, {}, Mat2(-e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)]));
        }
    std::vector<SdpModel::Term> sum;
    for (int lam = 0; lam < nl; ++lam) {
        sum.push_back({m.block_coord(lam, 0), 1.0});
        sum.push_back({m.block_coord(lam, 1), 1.0});
    }
    sum.push_back({m.scalar_coord(tau), -1.0});
    m.add_scalar_row(std::move(sum), 0.0);
    m.objective = {{m.scalar_coord(tau), 1.0}};
    const auto sol = sdp_solve(m, sdp, warm);
    RobustnessResult r;
    r.tau = sol.scalar(tau);
    r.classical = r.tau <= 1e-7;
    r.residual = sol.primal_residual;
    r.iterations = sol.iterations;
    return r;
}

// --- tripartite -------------------------------------------------------------------

RobustnessResult tripartite_robustness(const TripartiteAssemblage& t, const TripartiteOptions& opts, SdpState* warm) {
    const auto problems = validate_tripartite(t);
    if (!problems.empty()) throw DomainError("tripartite robustness: invalid assemblage: " + problems.front());
    // lambda = (f: X->A, g: YxA->B): f bits 0..1, g bits 2..5 indexed by (y,a).
    const int nl = 64;
    auto fresp = [](int lam, int x) { return (lam >> x) & 1; };
    auto gresp = [](int lam, int y, int a) { return (lam >> (2 + 2 * y + a)) & 1; };

    SdpModel m;
    const bool bdep = !opts.no_direct_influence;
    const int blocks_per_side = bdep ? 2 * nl : nl;
    m.n_blocks = 2 * blocks_per_side;
    auto zeta = [&](int b, int lam) { return bdep ? 2 * lam + b : lam; };
    auto xi = [&](int b, int lam) { return blocks_per_side + (bdep ? 2 * lam + b : lam); };
    const int f0 = 0;
    const int tau = bdep ? 2 * nl : nl; // scalars: f_lambda (per lambda), tau
    m.n_scalars = tau + 1;

    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    std::vector<std::pair<int, double>> bl;
                    for (int lam = 0; lam < nl; ++lam)
                        if (fresp(lam, x) == a && gresp(lam, y, a) == b) {
                            bl.push_back({zeta(b, lam), 1.0});
                            bl.push_back({xi(b, lam), -1.0});
                        }
                    m.add_matrix_equality(bl, {}, Mat2(-t.o(x, y, a, b)));
                }
    if (opts.include_do)
        for (int x = 0; x < 2; ++x)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    std::vector<std::pair<int, double>> bl;
                    for (int lam = 0; lam < nl; ++lam)
                        if (fresp(lam, x) == a) {
                            bl.push_back({zeta(b, lam), 1.0});
                            bl.push_back({xi(b, lam), -1.0});
                        }
                    m.add_matrix_equality(bl, {}, Mat2(-t.d(x, a, b)));
                }

    if (bdep) {
        for (int lam = 0; lam < nl; ++lam)
            for (int b = 0; b < 2; ++b) {
                m.add_scalar_row({{m.block_coord(zeta(b, lam), 0), 1.0},
                                  {m.block_coord(zeta(b, lam), 1), 1.0},
                                  {m.scalar_coord(f0 + lam), -1.0}},
                                 0.0);
            }
        // xi traces are tied across b per lambda; their total is 1 + tau
        // automatically, so only the cross-b tie is needed.
        for (int lam = 0; lam < nl; ++lam)
            m.add_scalar_row({{m.block_coord(xi(0, lam), 0), 1.0},
                              {m.block_coord(xi(0, lam), 1), 1.0},
                              {m.block_coord(xi(1, lam), 0), -1.0},
                              {m.block_coord(xi(1, lam), 1), -1.0}},
                             0.0);
        std::vector<SdpModel::Term> sum;
        for (int lam = 0; lam < nl; ++lam) sum.push_back({m.scalar_coord(f0 + lam), 1.0});
        sum.push_back({m.scalar_coord(tau), -1.0});
        m.add_scalar_row(std::move(sum), 0.0);
    } else {
        std::vector<SdpModel::Term> sum;
        for (int lam = 0; lam < nl; ++lam) {
            sum.push_back({m.block_coord(zeta(0, lam), 0), 1.0});
            sum.push_back({m.block_coord(zeta(0, lam), 1), 1.0});
        }
        sum.push_back({m.scalar_coord(tau), -1.0});
        m.add_scalar_row(std::move(sum), 0.0);
    }
    m.objective = {{m.scalar_coord(tau), 1.0}};

    const auto sol = sdp_solve(m, opts.sdp, warm);
    RobustnessResult r;
    r.tau = sol.scalar(tau);
    r.classical = r.tau <= 1e-7;
    r.residual = sol.primal_residual;
    r.iterations = sol.iterations;
    r.capped = r.tau > 1e3;
    return r;
}

// --- dual ---------------------------------------------------------------------------

DualResult witness_dual(const ExtendedAssemblage& e, const RobustnessOptions& opts, SdpState* warm) {
    const auto problems = validate_assemblage(e);
    if (!problems.empty()) throw DomainError("witness_dual: invalid assemblage: " + problems.front());
    const int nl = 1 << e.nx;
    SdpModel m;
    // Blocks: S_xi(a,lam), S_zeta(a,lam). Scalars: W (4 per (a,x)), V (4 per a),
    // delta_xi(a,lam), delta_zeta(a,lam).
    m.n_blocks = 4 * nl;
    auto sxi = [&](int a, int lam) { return 2 * lam + a; };
    auto szeta = [&](int a, int lam) { return 2 * nl + 2 * lam + a; };
    const int w0 = 0;                    // 4 * (x * 2 + a)
    const int v0 = 8 * e.nx;             // 4 * a
    const int dxi0 = v0 + (opts.include_do ? 8 : 0);
    const int dzeta0 = dxi0 + 2 * nl;
    m.n_scalars = dzeta0 + 2 * nl;
    auto wcoord = [&](int a, int x, int comp) { return m.scalar_coord(w0 + 4 * (2 * x + a) + comp); };
    auto vcoord = [&](int a, int comp) { return m.scalar_coord(v0 + 4 * a + comp); };

    for (int lam = 0; lam < nl; ++lam)
        for (int a = 0; a < 2; ++a)
            for (int comp = 0; comp < 4; ++comp) {
                // S_xi + sum_x D W + V - delta_xi I = 0
                std::vector<SdpModel::Term> row{{m.block_coord(sxi(a, lam), comp), 1.0}};
                for (int x = 0; x < e.nx; ++x)
                    if (response(lam, x) == a) row.push_back({wcoord(a, x, comp), 1.0});
                if (opts.include_do) row.push_back({vcoord(a, comp), 1.0});
                if (comp < 2) row.push_back({m.scalar_coord(dxi0 + 2 * lam + a), -1.0});
                m.add_scalar_row(std::move(row), 0.0);
                // S_zeta - sum_x D W - V - delta_zeta I = 0
                std::vector<SdpModel::Term> row2{{m.block_coord(szeta(a, lam), comp), 1.0}};
                for (int x = 0; x < e.nx; ++x)
                    if (response(lam, x) == a) row2.push_back({wcoord(a, x, comp), -1.0});
                if (opts.include_do) row2.push_back({vcoord(a, comp), -1.0});
                if (comp < 2) row2.push_back({m.scalar_coord(dzeta0 + 2 * lam + a), -1.0});
                m.add_scalar_row(std::move(row2), 0.0);
            }
    for (int lam = 0; lam < nl; ++lam) {
        m.add_scalar_row({{m.scalar_coord(dxi0 + 2 * lam), 1.0}, {m.scalar_coord(dxi0 + 2 * lam + 1), 1.0}}, 0.0);
        m.add_scalar_row({{m.scalar_coord(dzeta0 + 2 * lam), 1.0}, {m.scalar_coord(dzeta0 + 2 * lam + 1), 1.0}}, 1.0);
    }
    // max sum tr[W sigma] (+ sum tr[V sigma_do])  ->  min the negation
    for (int x = 0; x < e.nx; ++x)
        for (int a = 0; a < 2; ++a) {
            const Eigen::Vector4d s = encode_hermitian(e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)]);
            for (int comp = 0; comp < 4; ++comp)
                if (s(comp) != 0) m.objective.push_back({wcoord(a, x, comp), -s(comp)});
        }
    if (opts.include_do)
        for (int a = 0; a < 2; ++a) {
            const Eigen::Vector4d s = encode_hermitian(e.do_[static_cast<size_t>(a)]);
            for (int comp = 0; comp < 4; ++comp)
                if (s(comp) != 0) m.objective.push_back({vcoord(a, comp), -s(comp)});
        }

    const auto sol = sdp_solve(m, opts.sdp, warm);
    DualResult out;
    out.witness.nx = e.nx;
    out.witness.w.resize(static_cast<size_t>(e.nx));
    for (int x = 0; x < e.nx; ++x)
        for (int a = 0; a < 2; ++a) {
            Eigen::Vector4d c;
            for (int comp = 0; comp < 4; ++comp) c(comp) = sol.x(wcoord(a, x, comp));
            out.witness.w[static_cast<size_t>(x)][static_cast<size_t>(a)] = decode_hermitian(c);
        }
    for (int a = 0; a < 2; ++a) {
        Eigen::Vector4d c = Eigen::Vector4d::Zero();
        if (opts.include_do)
            for (int comp = 0; comp < 4; ++comp) c(comp) = sol.x(vcoord(a, comp));
        out.witness.v[static_cast<size_t>(a)] = decode_hermitian(c);
    }
    out.witness.delta_xi.resize(static_cast<size_t>(nl));
    out.witness.delta_zeta.resize(static_cast<size_t>(nl));
    for (int lam = 0; lam < nl; ++lam)
        for (int a = 0; a < 2; ++a) {
            out.witness.delta_xi[static_cast<size_t>(lam)][static_cast<size_t>(a)] = sol.x(m.scalar_coord(dxi0 + 2 * lam + a));
            out.witness.delta_zeta[static_cast<size_t>(lam)][static_cast<size_t>(a)] = sol.x(m.scalar_coord(dzeta0 + 2 * lam + a));
        }
    out.objective = -sol.objective;
    for (int x = 0; x < e.nx; ++x)
        for (int a = 0; a < 2; ++a)
            out.obs_value += (out.witness.w[static_cast<size_t>(x)][static_cast<size_t>(a)] *
                              e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)])
                                 .trace()
                                 .real();
    for (int a = 0; a < 2; ++a)
        out.do_value += (out.witness.v[static_cast<size_t>(a)] * e.do_[static_cast<size_t>(a)]).trace().real();
    out.residual = sol.primal_residual;
    out.iterations = sol.iterations;
    return out;
}

WitnessReport verify_witness(const SteeringWitness& w, const ExtendedAssemblage& e, double tol) {
    if (w.nx != e.nx) throw StructuralError("verify_witness: setting count mismatch");
    const int nl = 1 << w.nx;
    WitnessReport rep;
    double worst = std::numeric_limits<double>::infinity();
    for (int lam = 0; lam < nl; ++lam) {
        double sum_max = 0, sum_min = 0;
        for (int a = 0; a < 2; ++a) {
            Mat2 g = w.v[static_cast<size_t>(a)];
            for (int x = 0; x < w.nx; ++x)
                if (response(lam, x) == a) g += w.w[static_cast<size_t>(x)][static_cast<size_t>(a)];
            const Eig2 ev = eig2(g);
            sum_max += ev.hi;
            sum_min += ev.lo;
        }
        worst = std::min(worst, -sum_max);      // need sum_a lambda_max <= 0
        worst = std::min(worst, 1.0 + sum_min); // need sum_a (-lambda_min) <= 1
    }
    rep.worst_margin = worst;
    rep.feasible = worst >= -tol;
    for (int x = 0; x < e.nx; ++x)
        for (int a = 0; a < 2; ++a)
            rep.obs_value += (w.w[static_cast<size_t>(x)][static_cast<size_t>(a)] *
                              e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)])
                                 .trace()
                                 .real();
    for (int a = 0; a < 2; ++a)
        rep.do_value += (w.v[static_cast<size_t>(a)] * e.do_[static_cast<size_t>(a)]).trace().real();
    rep.total_value = rep.obs_value + rep.do_value;
    return rep;
}

Prop3Result prop3_bound(const SteeringWitness& w) {
    Prop3Result out;
    for (int a = 0; a < 2; ++a) out.rhs += norm_inf_2x2(negative_part_2x2(w.v[static_cast<size_t>(a)]));
    for (int x = 0; x < w.nx; ++x) {
        double best = 0;
        for (int a = 0; a < 2; ++a)
            best = std::max(best, norm_inf_2x2(positive_part_2x2(w.w[static_cast<size_t>(x)][static_cast<size_t>(a)])));
        out.lhs += best;
    }
    out.useful = out.lhs >= out.rhs;
    return out;
}

// --- critical visibility --------------------------------------------------------------

double critical_visibility(SteeringScenario scenario, const VisibilityOptions& opts) {
    SdpState warm;
    auto tau_of = [&](double v) {
        if (scenario == SteeringScenario::X3) {
            RobustnessOptions ro;
            ro.include_do = opts.include_do;
            ro.sdp = opts.sdp;
            return robustness_primal(x3_assemblage(v), ro, &warm).tau;
        }
        TripartiteOptions to;
        to.include_do = opts.include_do;
        to.no_direct_influence = opts.no_direct_influence;
        to.sdp = opts.sdp;
        return tripartite_robustness(tripartite_assemblage(v), to, &warm).tau;
    };
    double lo = 0.0, hi = 1.0;
    if (tau_of(hi) <= opts.tau_threshold) return 1.0;
    while (hi - lo > opts.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if (tau_of(mid) > opts.tau_threshold) hi = mid;
        else lo = mid;
    }
    return hi;
}

// --- serialization ----------------------------------------------------------------------

std::string assemblage_to_json(const ExtendedAssemblage& e) {
    nlohmann::json j;
    j["nx"] = e.nx;
    for (int x = 0; x < e.nx; ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < 2; ++a) row.push_back(mat2_json(e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)]));
        j["obs"].push_back(row);
    }
    for (int a = 0; a < 2; ++a) j["do"].push_back(mat2_json(e.do_[static_cast<size_t>(a)]));
    return j.dump(2);
}

ExtendedAssemblage assemblage_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExtendedAssemblage e(j.at("nx").get<int>());
    for (int x = 0; x < e.nx; ++x)
        for (int a = 0; a < 2; ++a)
            e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)] = mat2_from_json(j.at("obs").at(x).at(a));
    for (int a = 0; a < 2; ++a) e.do_[static_cast<size_t>(a)] = mat2_from_json(j.at("do").at(a));
    return e;
}

std::string witness_to_json(const SteeringWitness& w) {
    nlohmann::json j;
    j["nx"] = w.nx;
    for (int x = 0; x < w.nx; ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (int a = 0; a < 2; ++a) row.push_back(mat2_json(w.w[static_cast<size_t>(x)][static_cast<size_t>(a)]));
        j["W"].push_back(row);
    }
    for (int a = 0; a < 2; ++a) j["V"].push_back(mat2_json(w.v[static_cast<size_t>(a)]));
    return j.dump(2);
}

SteeringWitness witness_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SteeringWitness w;
    w.nx = j.at("nx").get<int>();
    w.w.resize(static_cast<size_t>(w.nx));
    for (int x = 0; x < w.nx; ++x)
        for (int a = 0; a < 2; ++a)
            w.w[static_cast<size_t>(x)][static_cast<size_t>(a)] = mat2_from_json(j.at("W").at(x).at(a));
    for (int a = 0; a < 2; ++a) w.v[static_cast<size_t>(a)] = mat2_from_json(j.at("V").at(a));
    return w;
}

} // namespace obi
