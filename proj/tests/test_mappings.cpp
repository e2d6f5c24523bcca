#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <obi/dag.hpp>
#include <obi/mappings.hpp>
#include <obi/polytope.hpp>

#include "test_util.hpp"

#include <set>

using namespace obi;

namespace {

// Behavior satisfying the trivial class: mixtures and quantum points both do.
ExtendedBehavior trivial_safe_behavior(int i, std::mt19937_64& rng) {
    if (i % 2 == 0) return testutil::random_classical_mixture(2, 4, rng);
    SeesawOptions so;
    so.restarts = 1;
    so.max_iters = 3 + (i % 7);
    so.seed = rng();
    return born_behavior(seesaw_optimize(2, il22_functional(2, 0, 0, 0, 1), so).model);
}

} // namespace

TEST_CASE("uniform tables map to uniform tables") {
    const auto b = bell_to_instrumental(BellBehavior::uniform());
    for (double v : b.obs) CHECK(v == doctest::Approx(0.25));
    for (double v : b.do_) CHECK(v == doctest::Approx(0.5));
    const auto back = instrumental_to_bell(ExtendedBehavior::uniform(2));
    for (double v : back.p) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("product tables map with the expected do-part") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const double pa[2] = {u(rng), u(rng)};  // p(a=0|x)
    const double pb[2] = {u(rng), u(rng)};  // p(b=0|y)
    BellBehavior p;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb)
                    p.at(x, y, a, bb) = (a == 0 ? pa[x] : 1 - pa[x]) * (bb == 0 ? pb[y] : 1 - pb[y]);
    const auto inst = bell_to_instrumental(p);
    for (int a = 0; a < 2; ++a) CHECK(inst.d(a, 0) == doctest::Approx(pb[a]));
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) CHECK(inst.o(x, a, 0) == doctest::Approx((a == 0 ? pa[x] : 1 - pa[x]) * pb[a]));
}

TEST_CASE("local deterministic tables map onto strategy images") {
    for (int am = 0; am < 4; ++am)
        for (int bm = 0; bm < 4; ++bm) {
            const std::array<int, 2> f = {am & 1, (am >> 1) & 1};
            const std::array<int, 2> g = {bm & 1, (bm >> 1) & 1};
            const auto inst = bell_to_instrumental(bell_from_responses(f, g));
            const auto want = from_strategy({{f[0], f[1]}, g}, {2, 2, 2});
            for (size_t k = 0; k < want.obs.size(); ++k) CHECK(inst.obs[k] == doctest::Approx(want.obs[k]));
            for (int k = 0; k < 4; ++k) CHECK(inst.do_[k] == doctest::Approx(want.do_[k]));
        }
}

TEST_CASE("signaling do-parts are rejected") {
    BellBehavior p = BellBehavior::uniform();
    // make B's marginal depend on x for fixed y
    p.at(0, 0, 0, 0) = 0.4;
    p.at(0, 0, 0, 1) = 0.1;
    CHECK_THROWS_AS(bell_to_instrumental(p), DomainError);
}

TEST_CASE("behaviors violating the trivial class have no Bell image") {
    ExtendedBehavior b = from_strategy({{0, 1}, {0, 1}}, {2, 2, 2});
    b.do_ = {0.0, 1.0, 1.0, 0.0}; // contradicts obs: p(0,0|0)=1 > p(0|do(0))=0
    CHECK_THROWS_AS(instrumental_to_bell(b), DomainError);
}

TEST_CASE("round trips are the identity") {
    std::mt19937_64 rng(2029);
    for (int i = 0; i < 1000; ++i) {
        const auto b = trivial_safe_behavior(i, rng);
        const auto img = instrumental_to_bell(b);
        CHECK(signaling_deviation(img) < 1e-9);
        const auto back = bell_to_instrumental(img);
        for (size_t k = 0; k < b.obs.size(); ++k) CHECK(std::abs(back.obs[k] - b.obs[k]) < 1e-12);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(back.do_[k] - b.do_[k]) < 1e-12);
        // reverse composition on the image
        const auto img2 = instrumental_to_bell(back);
        for (int k = 0; k < 16; ++k) CHECK(std::abs(img2.p[static_cast<size_t>(k)] - img.p[static_cast<size_t>(k)]) < 1e-12);
    }
}

TEST_CASE("hardy inequalities hold on the local polytope") {
    CHECK(hardy_family().size() == 64);
    for (const auto& v : local_deterministic_vertices()) {
        CHECK(hardy_min(v) >= -1e-12);
        CHECK(chsh_max(v) <= 2 + 1e-12);
    }
}

TEST_CASE("the il22 image evaluates identically through the bijection") {
    std::mt19937_64 rng(88);
    for (int i = 0; i < 300; ++i) {
        const auto b = trivial_safe_behavior(i, rng);
        const auto img = instrumental_to_bell(b);
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb)
                for (int x = 0; x < 2; ++x) {
                    const int xp = 1 - x;
                    CHECK(hardy_value(img, hardy_from_il22_indices(a, bb, x, xp)) ==
                          doctest::Approx(eval_il22(b, a, bb, x, xp)).epsilon(1e-12));
                }
    }
}

TEST_CASE("the analytic quantum point reaches the known extremes") {
    const auto m = maximal_violation_model();
    const auto bp = bell_behavior_of(m);
    CHECK(signaling_deviation(bp) < 1e-12);
    CHECK(chsh_max(bp) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(hardy_min(bp) == doctest::Approx(-(std::sqrt(2.0) - 1) / 2).epsilon(1e-9));
    const auto img = instrumental_to_bell(born_behavior(m));
    CHECK(hardy_min(img) == doctest::Approx(-(std::sqrt(2.0) - 1) / 2).epsilon(1e-9));
}

TEST_CASE("a state with the three zeros still fires the fourth probability") {
    // parameters found by a direct search over the real two-qubit family
    const RealFamilyPoint f{2.001700114027, -1.173492898957, 0.615504836691, -1.209899784709, 0.593223308511};
    const auto p = bell_behavior_of(model_of(f));
    CHECK(p.at(0, 1, 1, 0) < 1e-6); // p(1,0|0,1)
    CHECK(p.at(1, 0, 0, 1) < 1e-6); // p(0,1|1,0)
    CHECK(p.at(0, 0, 0, 0) < 1e-6); // p(0,0|0,0)
    CHECK(p.at(1, 1, 0, 0) > 0.08); // p(0,0|1,1), ceiling (5 sqrt 5 - 11)/2
    CHECK(hardy_canonical().eval(p) < -0.08);
}

TEST_CASE("difference-of-hardy identity and the chsh consequence") {
    std::mt19937_64 rng(1990);
    std::exponential_distribution<double> e(1.0);
    for (int i = 0; i < 2000; ++i) {
        BellBehavior p;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                double s = 0;
                double v[4];
                for (auto& q : v) {
                    q = e(rng);
                    s += q;
                }
                for (int k = 0; k < 4; ++k) p.at(x, y, k >> 1, k & 1) = v[k] / s;
            }
        const auto rep = hardy_implies_chsh_check(p);
        CHECK(rep.identity_residual < 1e-12);
        CHECK(rep.implication_ok);
    }
    std::uniform_int_distribution<int> pick(0, 15);
    const auto verts = local_deterministic_vertices();
    for (int i = 0; i < 50; ++i) {
        const auto rep = hardy_implies_chsh_check(verts[static_cast<size_t>(pick(rng))]);
        CHECK(rep.chsh_max <= 2 + 1e-12);
        CHECK(rep.hardy_min >= -1e-12);
    }
    const auto rep = hardy_implies_chsh_check(bell_behavior_of(maximal_violation_model()));
    CHECK(rep.chsh_max == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(rep.hardy_min < 0);
    CHECK(rep.implication_ok); // the premise fails, so the implication stands
}

TEST_CASE("chsh locality matches the membership verdict through the bijection") {
    std::mt19937_64 rng(666);
    int nonlocal = 0;
    for (int i = 0; i < 300; ++i) {
        const auto b = trivial_safe_behavior(i, rng);
        const auto img = instrumental_to_bell(b);
        const bool local = chsh_max(img) <= 2 + 1e-9;
        const bool member = membership_lp(b).member;
        CHECK(local == member);
        nonlocal += !local;
    }
    CHECK(nonlocal > 20);
}

// --- graphs ----------------------------------------------------------------

TEST_CASE("exogenizing the instrumental graph yields the two-input graph") {
    const Dag inst = instrumental_dag();
    const Dag exo = exogenize(inst, {inst.index_of("A")});
    CHECK(exo.nodes.size() == inst.nodes.size() + 1);
    CHECK(isomorphic(exo, bell_dag()));
}

TEST_CASE("exogenizing the five-node chain splits across the middle node") {
    Dag chain;
    const int a = chain.add_node("A"), b = chain.add_node("B"), c = chain.add_node("C");
    const int l = chain.add_node("L", true), n = chain.add_node("N", true);
    chain.add_edge(a, b);
    chain.add_edge(b, c);
    chain.add_edge(l, a);
    chain.add_edge(l, b);
    chain.add_edge(n, b);
    chain.add_edge(n, c);
    const Dag got = exogenize(chain, {b});

    Dag want;
    const int wa = want.add_node("A"), wb = want.add_node("B"), wbb = want.add_node("B_bar");
    const int wc = want.add_node("C"), wl = want.add_node("L", true), wn = want.add_node("N", true);
    want.add_edge(wa, wb);
    want.add_edge(wbb, wc);
    want.add_edge(wl, wa);
    want.add_edge(wl, wb);
    want.add_edge(wn, wb);
    want.add_edge(wn, wc);
    CHECK(isomorphic(got, want));
    CHECK(got.acyclic());
}

TEST_CASE("exogenize edge cases") {
    const Dag inst = instrumental_dag();
    CHECK(isomorphic(exogenize(inst, {}), inst));
    CHECK_THROWS_AS(exogenize(inst, {inst.index_of("Lambda")}), DomainError);
}

TEST_CASE("dag json round trip") {
    const Dag inst = instrumental_dag();
    const Dag back = dag_from_json(dag_to_json(inst));
    CHECK(isomorphic(inst, back));
}

TEST_CASE("the exogenization map reproduces the instrumental reading of Bell data") {
    const Dag inst = instrumental_dag();
    const int a_node = inst.index_of("A");
    const auto bp = bell_behavior_of(maximal_violation_model());
    JointTable q({2, 2, 2, 2}); // (X, A, B, A_bar) with uniform inputs
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int aa = 0; aa < 2; ++aa)
                for (int bb = 0; bb < 2; ++bb) q.at({x, aa, bb, y}) = 0.25 * bp.at(x, y, aa, bb);
    const auto res = exo_map_g(inst, {a_node}, q);
    REQUIRE(res.obs_defined);
    const auto want = bell_to_instrumental(bp);
    for (int x = 0; x < 2; ++x)
        for (int aa = 0; aa < 2; ++aa)
            for (int bb = 0; bb < 2; ++bb)
                CHECK(res.obs.at({x, aa, bb}) == doctest::Approx(0.5 * want.o(x, aa, bb)).epsilon(1e-12));
    for (const auto& entry : res.do_) {
        REQUIRE(entry.defined);
        for (int x = 0; x < 2; ++x)
            for (int bb = 0; bb < 2; ++bb)
                CHECK(entry.table.at({x, bb}) == doctest::Approx(0.5 * want.d(entry.assignment[0], bb)).epsilon(1e-12));
    }
}

TEST_CASE("deterministic product inputs map onto strategy images") {
    const Dag inst = instrumental_dag();
    const int a_node = inst.index_of("A");
    // q = deterministic responses a = f(x), b = g(abar) with uniform inputs
    const std::array<int, 2> f = {1, 0}, g = {0, 1};
    JointTable q({2, 2, 2, 2});
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) q.at({x, f[static_cast<size_t>(x)], g[static_cast<size_t>(y)], y}) = 0.25;
    const auto res = exo_map_g(inst, {a_node}, q);
    const auto want = from_strategy({{f[0], f[1]}, g}, {2, 2, 2});
    for (int x = 0; x < 2; ++x)
        for (int aa = 0; aa < 2; ++aa)
            for (int bb = 0; bb < 2; ++bb)
                CHECK(res.obs.at({x, aa, bb}) == doctest::Approx(0.5 * want.o(x, aa, bb)));
}

TEST_CASE("zero-probability conditioning is flagged as undefined") {
    const Dag inst = instrumental_dag();
    JointTable q({2, 2, 2, 2});
    // all mass on A_bar = 0 and A = 1: conditioning on A_bar = A has zero mass
    q.at({0, 1, 0, 0}) = 1.0;
    const auto res = exo_map_g(inst, {inst.index_of("A")}, q);
    CHECK(!res.obs_defined);
    bool some_undefined = false;
    for (const auto& entry : res.do_) some_undefined |= !entry.defined;
    CHECK(some_undefined);
}

TEST_CASE("every deterministic extended behavior has a deterministic preimage") {
    const Dag inst = instrumental_dag();
    const int a_node = inst.index_of("A");
    std::set<std::vector<long long>> images;
    for (const auto& bellv : local_deterministic_vertices()) {
        JointTable q({2, 2, 2, 2});
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int aa = 0; aa < 2; ++aa)
                    for (int bb = 0; bb < 2; ++bb) q.at({x, aa, bb, y}) = 0.25 * bellv.at(x, y, aa, bb);
        const auto r = exo_map_g(inst, {a_node}, q);
        REQUIRE(r.obs_defined);
        ExtendedBehavior eb(2);
        for (int x = 0; x < 2; ++x)
            for (int aa = 0; aa < 2; ++aa)
                for (int bb = 0; bb < 2; ++bb) eb.o(x, aa, bb) = 2.0 * r.obs.at({x, aa, bb});
        for (const auto& entry : r.do_)
            for (int bb = 0; bb < 2; ++bb)
                eb.d(entry.assignment[0], bb) = entry.table.at({0, bb}) + entry.table.at({1, bb});
        std::vector<long long> key;
        for (double v : behavior_coords(eb)) key.push_back(std::llround(v * 1e9));
        images.insert(std::move(key));
    }
    int covered = 0;
    for (const auto& v : polytope_vertices(2)) {
        std::vector<long long> key;
        for (double q : behavior_coords(v)) key.push_back(std::llround(q * 1e9));
        covered += images.count(key) ? 1 : 0;
    }
    CHECK(covered == 16);
}
