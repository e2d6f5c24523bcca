#include <obi/quantum.hpp>

#include <cmath>
#include <limits>

namespace obi {

namespace {

const Mat2 kId2 = Mat2::Identity();

Mat2 keep_a(const Mat4& rho, const Mat2& n) { // tr_B[(1 (x) N) rho]
    const Mat4 m = kron(kId2, n) * rho;
    return partial_trace(m, {true, false});
}

Mat2 keep_b(const Mat4& rho, const Mat2& m) { // tr_A[(M (x) 1) rho]
    const Mat4 t = kron(m, kId2) * rho;
    return partial_trace(t, {false, true});
}

Mat2 negative_eigenspace_projector(const Mat2& h) {
    const Eig2 e = eig2(h);
    Mat2 p = Mat2::Zero();
    if (e.lo < 0) p += e.p_lo;
    if (e.hi < 0) p += e.p_hi;
    return p;
}

QuantumInstrumentalModel random_model(int l, std::mt19937_64& rng) {
    QuantumInstrumentalModel m;
    const VecX psi = random_pure_state(4, rng);
    m.rho = psi * psi.adjoint();
    m.alice.resize(l);
    for (int x = 0; x < l; ++x) {
        m.alice[x][0] = random_projector(rng);
        m.alice[x][1] = kId2 - m.alice[x][0];
    }
    for (int a = 0; a < 2; ++a) {
        m.bob[a][0] = random_projector(rng);
        m.bob[a][1] = kId2 - m.bob[a][0];
    }
    return m;
}

} // namespace

void check_model(const QuantumInstrumentalModel& m) {
    if (m.alice.empty()) throw ModelError("model: no settings");
    if (!is_hermitian(m.rho)) throw ModelError("model: rho not Hermitian");
    if (std::abs(m.rho.trace().real() - 1.0) > 1e-10) throw ModelError("model: rho trace != 1");
    if (min_eigenvalue(m.rho) < -1e-10) throw ModelError("model: rho not PSD");
    auto check_povm = [](const std::array<Mat2, 2>& povm, const char* who) {
        Mat2 sum = Mat2::Zero();
        for (const auto& e : povm) {
            if (!is_hermitian(e)) throw ModelError(std::string(who) + ": POVM element not Hermitian");
            if (min_eigenvalue(e) < -1e-10) throw ModelError(std::string(who) + ": POVM element not PSD");
            sum += e;
        }
        if ((sum - Mat2::Identity()).cwiseAbs().maxCoeff() > 1e-10)
            throw ModelError(std::string(who) + ": POVM does not sum to identity");
    };
    for (const auto& povm : m.alice) check_povm(povm, "alice");
    for (const auto& povm : m.bob) check_povm(povm, "bob");
}

ExtendedBehavior born_behavior(const QuantumInstrumentalModel& m) {
    check_model(m);
    const int l = m.settings();
    ExtendedBehavior beh(l);
    for (int x = 0; x < l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                beh.o(x, a, b) = (kron(m.alice[x][a], m.bob[a][b]) * m.rho).trace().real();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) beh.d(a, b) = (kron(kId2, m.bob[a][b]) * m.rho).trace().real();
    return beh;
}

double qace(const QuantumInstrumentalModel& m) {
    check_model(m);
    double best = 0;
    for (int a = 0; a < 2; ++a)
        for (int a2 = 0; a2 < 2; ++a2)
            for (int b = 0; b < 2; ++b) {
                const double v = (kron(kId2, Mat2(m.bob[a][b] - m.bob[a2][b])) * m.rho).trace().real();
                best = std::max(best, v);
            }
    return best;
}

QuantumInstrumentalModel maximal_violation_model() {
    QuantumInstrumentalModel m;
    VecX phi(4);
    phi << 1, 0, 0, 1;
    phi /= std::sqrt(2.0);
    m.rho = phi * phi.adjoint();
    m.alice.resize(2);
    m.alice[0][0] = equatorial_projector(M_PI / 4);
    m.alice[1][0] = equatorial_projector(3 * M_PI / 4);
    m.bob[0][0] = equatorial_projector(-M_PI / 2);
    m.bob[1][0] = equatorial_projector(M_PI);
    for (int x = 0; x < 2; ++x) m.alice[x][1] = kId2 - m.alice[x][0];
    for (int a = 0; a < 2; ++a) m.bob[a][1] = kId2 - m.bob[a][0];
    return m;
}

SeesawResult seesaw_optimize(int l, const LinearFunctional& objective, const SeesawOptions& opts,
                             const std::vector<QuantumInstrumentalModel>* warm_starts) {
    if (objective.l != l) throw StructuralError("seesaw: objective/scenario mismatch");
    LinearFunctional f = objective;
    if (opts.maximize) {
        for (auto& v : f.obs_c) v = -v;
        for (auto& v : f.do_c) v = -v;
        f.constant = -f.constant;
    }

    std::mt19937_64 rng(opts.seed);
    std::vector<QuantumInstrumentalModel> starts;
    if (warm_starts)
        for (const auto& w : *warm_starts)
            if (w.settings() == l) starts.push_back(w);
    for (int r = 0; r < opts.restarts; ++r) starts.push_back(random_model(l, rng));
    if (starts.empty()) throw DomainError("seesaw: no starting points");

    auto eval_model = [&](const QuantumInstrumentalModel& m) {
        double v = f.constant;
        for (int x = 0; x < l; ++x)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (f.oc(x, a, b) != 0)
                        v += f.oc(x, a, b) * (kron(m.alice[x][a], m.bob[a][b]) * m.rho).trace().real();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (f.dc(a, b) != 0) v += f.dc(a, b) * (kron(kId2, m.bob[a][b]) * m.rho).trace().real();
        return v;
    };

    SeesawResult best;
    best.value = std::numeric_limits<double>::infinity();

    for (auto& m : starts) {
        double prev = eval_model(m);
        bool monotone = true, converged = false;
        int it = 0;
        for (; it < opts.max_iters; ++it) {
            // State step: rho is the bottom eigenvector of the effective operator.
            Mat4 g = Mat4::Zero();
            for (int x = 0; x < l; ++x)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        if (f.oc(x, a, b) != 0) g += f.oc(x, a, b) * kron(m.alice[x][a], m.bob[a][b]);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (f.dc(a, b) != 0) g += f.dc(a, b) * kron(kId2, m.bob[a][b]);
            Eigen::SelfAdjointEigenSolver<Mat4> es(g);
            const VecX psi = es.eigenvectors().col(0);
            m.rho = psi * psi.adjoint();

            // A step, one setting at a time.
            for (int x = 0; x < l; ++x) {
                std::array<Mat2, 2> h = {Mat2::Zero(), Mat2::Zero()};
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        if (f.oc(x, a, b) != 0) h[a] += f.oc(x, a, b) * keep_a(m.rho, m.bob[a][b]);
                m.alice[x][0] = negative_eigenspace_projector(h[0] - h[1]);
                m.alice[x][1] = kId2 - m.alice[x][0];
            }

            // B step, one received input at a time.
            const Mat2 rho_b = partial_trace(m.rho, {false, true});
            for (int a = 0; a < 2; ++a) {
                std::array<Mat2, 2> lmat = {Mat2::Zero(), Mat2::Zero()};
                for (int b = 0; b < 2; ++b) {
                    for (int x = 0; x < l; ++x)
                        if (f.oc(x, a, b) != 0) lmat[b] += f.oc(x, a, b) * keep_b(m.rho, m.alice[x][a]);
                    lmat[b] += f.dc(a, b) * rho_b;
                }
                m.bob[a][0] = negative_eigenspace_projector(lmat[0] - lmat[1]);
                m.bob[a][1] = kId2 - m.bob[a][0];
            }

            const double cur = eval_model(m);
            if (cur > prev + 1e-12) monotone = false;
            if (prev - cur < opts.tol) {
                prev = cur;
                converged = true;
                ++it;
                break;
            }
            prev = cur;
        }
        if (prev < best.value) {
            best.value = prev;
            best.model = m;
            best.converged = converged;
            best.iterations = it;
            best.monotone = monotone;
        }
    }
    if (opts.maximize) best.value = -best.value;
    return best;
}

// --- inefficiency model --------------------------------------------------------

ExtendedBehavior noisy_behavior(const ExtendedBehavior& ideal, const EfficiencyPoint& e, const StarConvention& star) {
    if (e.eta1 < 0 || e.eta1 > 1 || e.eta2 < 0 || e.eta2 > 1)
        throw DomainError("efficiency point outside the unit square");
    if (!is_valid(ideal)) throw DomainError("noisy_behavior: invalid ideal behavior");
    const double n1 = e.eta1, n2 = e.eta2;
    const int as = star.a_star, bs = star.b_star;
    ExtendedBehavior out(ideal.l);
    for (int x = 0; x < ideal.l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double p = n1 * n2 * ideal.o(x, a, b);
                if (a == as) p += (1 - n1) * n2 * ideal.d(as, b);
                if (b == bs) p += n1 * (1 - n2) * (ideal.o(x, a, 0) + ideal.o(x, a, 1));
                if (a == as && b == bs) p += (1 - n1) * (1 - n2);
                out.o(x, a, b) = p;
            }
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out.d(a, b) = n2 * ideal.d(a, b) + (b == bs ? (1 - n2) : 0.0);
    return out;
}

LinearFunctional pull_through_noise(const LinearFunctional& f, const EfficiencyPoint& e, const StarConvention& star) {
    if (e.eta1 < 0 || e.eta1 > 1 || e.eta2 < 0 || e.eta2 > 1)
        throw DomainError("efficiency point outside the unit square");
    const double n1 = e.eta1, n2 = e.eta2;
    const int as = star.a_star, bs = star.b_star;
    LinearFunctional g(f.l);
    for (int x = 0; x < f.l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                g.oc(x, a, b) = n1 * n2 * f.oc(x, a, b) + n1 * (1 - n2) * f.oc(x, a, bs);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            double v = n2 * f.dc(a, b);
            if (a == as) {
                double cs = 0;
                for (int x = 0; x < f.l; ++x) cs += f.oc(x, as, b);
                v += (1 - n1) * n2 * cs;
            }
            g.dc(a, b) = v;
        }
    g.constant = f.constant + (1 - n2) * (f.dc(0, bs) + f.dc(1, bs));
    double cs = 0;
    for (int x = 0; x < f.l; ++x) cs += f.oc(x, as, bs);
    g.constant += (1 - n1) * (1 - n2) * cs;
    return g;
}

QuantumInstrumentalModel model_of(const RealFamilyPoint& f) {
    QuantumInstrumentalModel m;
    VecX psi(4);
    psi << std::cos(f.theta), 0, 0, std::sin(f.theta);
    m.rho = psi * psi.adjoint();
    auto proj = [](double ang) { // Bloch vector in the X-Z plane
        Mat2 p;
        const double c = std::cos(ang / 2), s = std::sin(ang / 2);
        p << c * c, c * s, c * s, s * s;
        return p;
    };
    m.alice.resize(2);
    m.alice[0][0] = proj(f.alice0);
    m.alice[1][0] = proj(f.alice1);
    m.bob[0][0] = proj(f.bob0);
    m.bob[1][0] = proj(f.bob1);
    for (int x = 0; x < 2; ++x) m.alice[x][1] = kId2 - m.alice[x][0];
    for (int a = 0; a < 2; ++a) m.bob[a][1] = kId2 - m.bob[a][0];
    return m;
}

namespace {

double family_value(const LinearFunctional& obj, const RealFamilyPoint& f) {
    const QuantumInstrumentalModel m = model_of(f);
    double v = obj.constant;
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (obj.oc(x, a, b) != 0)
                    v += obj.oc(x, a, b) * (kron(m.alice[x][a], m.bob[a][b]) * m.rho).trace().real();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            if (obj.dc(a, b) != 0) v += obj.dc(a, b) * (kron(kId2, m.bob[a][b]) * m.rho).trace().real();
    return v;
}

// Plain Nelder-Mead on the 5 family parameters.
template <class Fn>
double simplex_refine(const Fn& objective, RealFamilyPoint& f, int max_evals) {
    auto pack = [](const RealFamilyPoint& p) {
        return std::array<double, 5>{p.theta, p.alice0, p.alice1, p.bob0, p.bob1};
    };
    auto unpack = [](const std::array<double, 5>& v) {
        RealFamilyPoint p;
        p.theta = v[0];
        p.alice0 = v[1];
        p.alice1 = v[2];
        p.bob0 = v[3];
        p.bob1 = v[4];
        return p;
    };
    auto eval = [&](const std::array<double, 5>& v) { return objective(unpack(v)); };

    std::array<std::array<double, 5>, 6> pts;
    std::array<double, 6> val;
    pts[0] = pack(f);
    for (int i = 1; i < 6; ++i) {
        pts[i] = pts[0];
        pts[i][i - 1] += (i == 1 ? 0.05 : 0.15);
    }
    for (int i = 0; i < 6; ++i) val[i] = eval(pts[i]);
    int evals = 6;
    while (evals < max_evals) {
        std::array<int, 6> order{0, 1, 2, 3, 4, 5};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return val[a] < val[b]; });
        if (val[order[5]] - val[order[0]] < 1e-15) break;
        std::array<double, 5> centroid{};
        for (int i = 0; i < 5; ++i)
            for (int d = 0; d < 5; ++d) centroid[d] += pts[order[i]][d] / 5.0;
        const int worst = order[5];
        auto mix = [&](double t) {
            std::array<double, 5> p;
            for (int d = 0; d < 5; ++d) p[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
            return p;
        };
        auto refl = mix(-1.0);
        double vr = eval(refl);
        ++evals;
        if (vr < val[order[0]]) {
            auto expd = mix(-2.0);
            const double ve = eval(expd);
            ++evals;
            if (ve < vr) { pts[worst] = expd; val[worst] = ve; }
            else { pts[worst] = refl; val[worst] = vr; }
        } else if (vr < val[order[4]]) {
            pts[worst] = refl;
            val[worst] = vr;
        } else {
            auto con = mix(0.5);
            const double vc = eval(con);
            ++evals;
            if (vc < val[worst]) { pts[worst] = con; val[worst] = vc; }
            else {
                for (int i = 1; i < 6; ++i) {
                    for (int d = 0; d < 5; ++d)
                        pts[order[i]][d] = pts[order[0]][d] + 0.5 * (pts[order[i]][d] - pts[order[0]][d]);
                    val[order[i]] = eval(pts[order[i]]);
                    evals += 1;
                }
            }
        }
    }
    int bi = 0;
    for (int i = 1; i < 6; ++i)
        if (val[i] < val[bi]) bi = i;
    f = unpack(pts[bi]);
    return val[bi];
}

} // namespace

double best_noisy_violation(const EfficiencyPoint& e, const SeesawOptions& base,
                            std::vector<QuantumInstrumentalModel>* warm, RealFamilyPoint* cont) {
    const LinearFunctional ineq = il22_functional(2, 0, 0, 0, 1);
    double best = std::numeric_limits<double>::infinity();
    QuantumInstrumentalModel best_model;
    for (int asx = 0; asx < 2; ++asx)
        for (int bsx = 0; bsx < 2; ++bsx) {
            const LinearFunctional obj = pull_through_noise(ineq, e, {asx, bsx});
            SeesawOptions so = base;
            so.seed = base.seed + 1000003ull * static_cast<uint64_t>(2 * asx + bsx);
            auto r = seesaw_optimize(2, obj, so, warm);
            if (r.value < best) {
                best = r.value;
                best_model = r.model;
            }
        }
    // Direct refinement in the real family. The family absorbs outcome
    // relabelings through its angles, so one star convention suffices.
    {
        const LinearFunctional obj = pull_through_noise(ineq, e, {1, 1});
        std::vector<RealFamilyPoint> starts;
        if (cont) starts.push_back(*cont);
        for (double th : {0.6, 0.3, 0.12, 0.05, 0.02}) {
            RealFamilyPoint p;
            const double scale = std::min(1.0, 3.0 * th);
            p.theta = th;
            p.alice0 = 0;
            p.alice1 = scale * M_PI / 2;
            p.bob0 = scale * M_PI / 4;
            p.bob1 = -scale * M_PI / 4;
            starts.push_back(p);
        }
        RealFamilyPoint best_f;
        double best_fv = std::numeric_limits<double>::infinity();
        auto fn = [&obj](const RealFamilyPoint& p) { return family_value(obj, p); };
        for (auto& s : starts) {
            RealFamilyPoint p = s;
            const double v = simplex_refine(fn, p, 1500);
            if (v < best_fv) {
                best_fv = v;
                best_f = p;
            }
        }
        if (cont && best_fv < -1e-10) *cont = best_f;
        if (best_fv < best) {
            best = best_fv;
            best_model = model_of(best_f);
        }
    }
    if (warm && best < -1e-9) {
        warm->push_back(best_model);
        if (warm->size() > 8) warm->erase(warm->begin());
    }
    return best;
}

ThresholdResult efficiency_threshold(ThresholdMode mode, const ThresholdOptions& opts) {
    auto point = [&](double eta) {
        switch (mode) {
        case ThresholdMode::Symmetric: return EfficiencyPoint{eta, eta};
        case ThresholdMode::AsymmetricFixEta1: return EfficiencyPoint{1.0, eta};
        case ThresholdMode::AsymmetricFixEta2: return EfficiencyPoint{eta, 1.0};
        }
        return EfficiencyPoint{eta, eta};
    };
    std::vector<QuantumInstrumentalModel> warm{maximal_violation_model()};
    RealFamilyPoint cont;
    double last_mag = 1.0; // magnitude of the most recent violation
    auto violation = [&](double eta) {
        SeesawOptions so;
        so.seed = opts.seed;
        so.restarts = opts.restarts;
        // The landscape flattens out close to the threshold: spend more
        // effort there, mostly on refining the continuation seeds.
        if (last_mag < 3e-4) {
            so.restarts = 3 * opts.restarts;
            so.max_iters = 4000;
            so.tol = 1e-13;
        }
        const double v = best_noisy_violation(point(eta), so, &warm, &cont);
        if (v < -opts.violation_eps) last_mag = -v;
        return v;
    };

    // Continuation descent: the near-threshold optimum sits on a narrow
    // branch (weakly entangled states), so walk down in small steps keeping
    // the previous optimizers as seeds before bisecting the last bracket.
    double hi = 1.0;
    double v_hi = violation(hi);
    if (v_hi > -opts.violation_eps) return {1.0, v_hi}; // no violation anywhere
    double lo = hi;
    while (lo > 0.3) {
        const double step = last_mag < 3e-4 ? 0.008 : 0.04;
        const double next = lo - step;
        const double v = violation(next);
        if (v < -opts.violation_eps) {
            hi = next;
            v_hi = v;
            lo = next;
        } else {
            lo = next;
            break;
        }
    }
    if (hi - lo < opts.bisect_tol) return {hi, v_hi};
    while (hi - lo > opts.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        const double v = violation(mid);
        if (v < -opts.violation_eps) {
            hi = mid;
            v_hi = v;
        } else {
            lo = mid;
        }
    }
    return {hi, v_hi};
}

CausalGapResult causal_gap_search(int restarts, uint64_t seed) {
    const LinearFunctional c1 = ace_bound_functional(1, 2);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    // The gap C1 - ACE is piecewise smooth (ACE is a max of linear branches),
    // so a derivative-free simplex over the real family is the reliable
    // route; the linearized alternating step collapses to deterministic
    // corners where the gap vanishes.
    auto neg_gap = [&c1](const RealFamilyPoint& p) {
        const ExtendedBehavior beh = born_behavior(model_of(p));
        return -(c1.eval(beh) - ace(beh));
    };
    CausalGapResult best;
    best.gap = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        RealFamilyPoint p;
        p.theta = 0.5 * u(rng);
        p.alice0 = u(rng);
        p.alice1 = u(rng);
        p.bob0 = u(rng);
        p.bob1 = u(rng);
        const double v = simplex_refine(neg_gap, p, 2500);
        if (-v > best.gap) {
            best.gap = -v;
            best.model = model_of(p);
            const ExtendedBehavior beh = born_behavior(best.model);
            best.c1 = c1.eval(beh);
            best.qace = qace(best.model);
        }
    }
    return best;
}

} // namespace obi
