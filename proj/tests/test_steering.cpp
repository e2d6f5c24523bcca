#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <obi/errors.hpp>
#include <obi/steering.hpp>

#include <fstream>
#include <sstream>

using namespace obi;

namespace {

SteeringWitness load_fixture() {
    std::ifstream in(std::string(OBI_DATA_DIR) + "/witness_x3_v1.json");
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return witness_from_json(ss.str());
}

} // namespace

TEST_CASE("generators produce valid assemblages") {
    CHECK(validate_assemblage(rsp_assemblage(1.1)).empty());
    CHECK(validate_assemblage(rsp_entanglement_assemblage(0.4)).empty());
    CHECK(validate_assemblage(x3_assemblage(0.8)).empty());
    CHECK(validate_tripartite(tripartite_assemblage(0.6)).empty());
    CHECK_THROWS_AS(x3_assemblage(1.5), DomainError);
    CHECK_THROWS_AS(tripartite_assemblage(-0.1), DomainError);
}

TEST_CASE("assemblage_from_model rejects broken ingredients") {
    Mat4 rho = Mat4::Identity(); // trace 4, not a state
    std::vector<std::array<Mat2, 2>> alice(2);
    alice[0] = {Mat2::Identity() * 0.5, Mat2::Identity() * 0.5};
    alice[1] = alice[0];
    CHECK_THROWS_AS(assemblage_from_model(rho, alice, {QuantumChannel::identity(), QuantumChannel::identity()}),
                    ModelError);
    QuantumChannel bad;
    bad.kraus = {Mat2::Identity() * 2.0};
    CHECK_THROWS_AS(assemblage_from_model(Mat4::Identity() / 4.0, alice, {bad, QuantumChannel::identity()}),
                    ModelError);
}

TEST_CASE("classically built assemblages have zero robustness") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 8; ++i) {
        const auto e = random_classical_assemblage(2 + (i % 2), rng);
        const auto r = robustness_primal(e);
        CHECK(r.tau <= 1e-7);
        CHECK(r.classical);
        CHECK(r.residual < 1e-8);
    }
}

TEST_CASE("x-independent assemblages are classical: the aligned preparation") {
    const auto r = robustness_primal(rsp_assemblage(0.0));
    CHECK(r.tau <= 1e-7);
    const auto r2 = robustness_primal(rsp_entanglement_assemblage(0.0));
    CHECK(r2.tau <= 1e-7);
}

TEST_CASE("remote preparation robustness peaks at orthogonal settings") {
    const double t_quarter = robustness_primal(rsp_assemblage(M_PI / 4)).tau;
    const double t_half = robustness_primal(rsp_assemblage(M_PI / 2)).tau;
    CHECK(t_quarter > 0.01);
    CHECK(t_half > t_quarter + 0.01);
    // curve shape: zero at aligned settings on both ends, single interior peak
    CHECK(robustness_primal(rsp_assemblage(M_PI)).tau <= 1e-7);
    CHECK(t_half == doctest::Approx((std::sqrt(2.0) - 1) / 2).epsilon(1e-6));
    double prev = -1;
    for (double phi : {0.4, 0.9, 1.3, M_PI / 2}) {
        const double t = robustness_primal(rsp_assemblage(phi)).tau;
        CHECK(t > prev);
        prev = t;
    }
    CHECK(robustness_primal(rsp_assemblage(2.4)).tau < t_half);
}

TEST_CASE("entanglement sweep vanishes at the product point") {
    const double t0 = robustness_primal(rsp_entanglement_assemblage(0.0)).tau;
    const double t1 = robustness_primal(rsp_entanglement_assemblage(M_PI / 4)).tau;
    CHECK(t0 <= 1e-7);
    CHECK(t1 > 0.05);
}

TEST_CASE("three-setting assemblage is nonclassical at full visibility") {
    const auto r = robustness_primal(x3_assemblage(1.0));
    CHECK(r.tau > 0.2);
}

TEST_CASE("strong duality holds instance by instance") {
    std::mt19937_64 rng(2030);
    for (int i = 0; i < 10; ++i) {
        const auto e = (i % 2 == 0) ? random_classical_assemblage(2, rng) : random_quantum_assemblage(2, rng);
        const auto p = robustness_primal(e);
        const auto d = witness_dual(e);
        CHECK(std::abs(p.tau - d.objective) <= 1e-6);
        CHECK(d.obs_value + d.do_value == doctest::Approx(d.objective).epsilon(1e-9));
    }
}

TEST_CASE("mixtures of classical assemblages stay classical") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 8; ++i) {
        const auto a = random_classical_assemblage(2, rng);
        const auto b = random_classical_assemblage(2, rng);
        const auto r = robustness_primal(mix(a, b, u(rng)));
        CHECK(r.tau <= 1e-7);
    }
}

TEST_CASE("feasible witnesses cannot score on classical assemblages") {
    std::mt19937_64 rng(21);
    const auto d = witness_dual(x3_assemblage(1.0));
    const auto self = verify_witness(d.witness, x3_assemblage(1.0), 1e-7);
    CHECK(self.feasible);
    CHECK(self.total_value > 0.2);
    const auto p3 = prop3_bound(d.witness);
    for (int i = 0; i < 6; ++i) {
        const auto cls = random_classical_assemblage(3, rng);
        const auto rep = verify_witness(d.witness, cls, 1e-7);
        CHECK(rep.total_value <= 1e-7);
        // the observational part alone stays under the interventional bound
        CHECK(rep.obs_value <= p3.rhs + 1e-7);
    }
}

TEST_CASE("observational bound from the interventional witness part") {
    SteeringWitness w;
    w.nx = 2;
    w.w.resize(2);
    for (auto& pair : w.w) pair = {Mat2::Identity(), Mat2::Identity()};
    w.v = {Mat2::Identity(), Mat2::Identity() * 0.3}; // both PSD
    CHECK(prop3_bound(w).rhs == doctest::Approx(0.0));

    Mat2 diag_neg;
    diag_neg << -0.7, 0, 0, 0;
    w.v = {diag_neg, diag_neg};
    CHECK(prop3_bound(w).rhs == doctest::Approx(1.4));
}

TEST_CASE("the published witness tables check out") {
    const auto w = load_fixture();
    const auto e = x3_assemblage(1.0);
    const auto rep = verify_witness(w, e, 0.01); // tolerance absorbs the 3-digit rounding
    CHECK(rep.feasible);
    CHECK(rep.worst_margin > -0.01);
    // the tables are a dual optimizer: their total value reproduces tau
    const auto p = robustness_primal(e);
    CHECK(rep.total_value == doctest::Approx(p.tau).epsilon(0.02));
    const auto p3 = prop3_bound(w);
    CHECK(p3.rhs == doctest::Approx(0.542).epsilon(0.01));
    CHECK(p3.lhs == doctest::Approx(0.672).epsilon(0.01));
    CHECK(p3.useful);
    // the observational part of the witness beats the classical ceiling
    CHECK(rep.obs_value > p3.rhs + 0.1);
}

TEST_CASE("zero witness is feasible and worthless") {
    SteeringWitness w;
    w.nx = 3;
    w.w.assign(3, {Mat2::Zero(), Mat2::Zero()});
    w.v = {Mat2::Zero(), Mat2::Zero()};
    const auto rep = verify_witness(w, x3_assemblage(1.0), 1e-9);
    CHECK(rep.feasible);
    CHECK(rep.total_value == doctest::Approx(0.0));
}

TEST_CASE("interventional data reduces to a standard steering test here") {
    SdpState w1, w2;
    for (double v : {0.3, 0.7, 1.0}) {
        const auto e = x3_assemblage(v);
        const double t_do = robustness_primal(e, {}, &w1).tau;
        const double t_std = standard_steering_robustness(e, {}, &w2).tau;
        CHECK(t_do == doctest::Approx(t_std).epsilon(1e-5));
    }
    // observational data alone detects strictly less
    const auto e = x3_assemblage(0.15);
    RobustnessOptions obs_only;
    obs_only.include_do = false;
    CHECK(robustness_primal(e).tau > 1e-3);
    CHECK(robustness_primal(e, obs_only).tau <= 1e-7);
}

TEST_CASE("tripartite generator satisfies the no-influence consistency") {
    const auto t = tripartite_assemblage(0.9);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const Mat2 dev = t.o(x, y, a, 0) + t.o(x, y, a, 1) - t.d(x, a, b);
                    CHECK(dev.cwiseAbs().maxCoeff() < 1e-12);
                }
}

TEST_CASE("tripartite robustness at full visibility, both data regimes") {
    const auto t = tripartite_assemblage(1.0);
    TripartiteOptions to;
    const auto with_do = tripartite_robustness(t, to);
    CHECK(with_do.tau > 0.3);
    to.include_do = false;
    const auto obs_only = tripartite_robustness(t, to);
    CHECK(obs_only.tau > 0.1);
    CHECK(with_do.tau > obs_only.tau + 0.05);
}

TEST_CASE("restricting the model to no direct influence equalizes the regimes") {
    const auto t = tripartite_assemblage(0.8);
    TripartiteOptions a;
    a.no_direct_influence = true;
    TripartiteOptions b;
    b.no_direct_influence = true;
    b.include_do = false;
    const double t1 = tripartite_robustness(t, a).tau;
    const double t2 = tripartite_robustness(t, b).tau;
    CHECK(t1 == doctest::Approx(t2).epsilon(1e-5));
}

TEST_CASE("serialization round trips") {
    std::mt19937_64 rng(5);
    const auto e = random_quantum_assemblage(3, rng);
    const auto back = assemblage_from_json(assemblage_to_json(e));
    for (int x = 0; x < 3; ++x)
        for (int a = 0; a < 2; ++a)
            CHECK((back.obs[static_cast<size_t>(x)][static_cast<size_t>(a)] -
                   e.obs[static_cast<size_t>(x)][static_cast<size_t>(a)])
                      .cwiseAbs()
                      .maxCoeff() < 1e-12);
    const auto w = load_fixture();
    const auto wback = witness_from_json(witness_to_json(w));
    CHECK((wback.v[0] - w.v[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("invalid assemblages are rejected up front") {
    ExtendedAssemblage e(2);
    e.obs[0] = {Mat2::Identity(), Mat2::Identity()}; // traces to 4
    CHECK_THROWS_AS(robustness_primal(e), DomainError);
}
