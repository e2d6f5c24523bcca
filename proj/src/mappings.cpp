#include <obi/mappings.hpp>

#include <json.hpp>

#include <cmath>
#include <map>

namespace obi {

std::vector<std::string> validate_bell(const BellBehavior& b) {
    std::vector<std::string> out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            double sum = 0;
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) {
                    const double p = b.at(x, y, a, bb);
                    if (p < -kNormTol || p > 1 + kNormTol)
                        out.push_back("p(" + std::to_string(a) + "," + std::to_string(bb) + "|" + std::to_string(x) +
                                      "," + std::to_string(y) + ") outside [0,1]");
                    sum += p;
                }
            if (std::abs(sum - 1) > kNormTol)
                out.push_back("block (x,y)=(" + std::to_string(x) + "," + std::to_string(y) + ") sums to " +
                              std::to_string(sum));
        }
    return out;
}

double signaling_deviation(const BellBehavior& b) {
    double dev = 0;
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) {
            const double m0 = b.at(x, 0, a, 0) + b.at(x, 0, a, 1);
            const double m1 = b.at(x, 1, a, 0) + b.at(x, 1, a, 1);
            dev = std::max(dev, std::abs(m0 - m1));
        }
    for (int y = 0; y < 2; ++y)
        for (int bb = 0; bb < 2; ++bb) {
            const double m0 = b.at(0, y, 0, bb) + b.at(0, y, 1, bb);
            const double m1 = b.at(1, y, 0, bb) + b.at(1, y, 1, bb);
            dev = std::max(dev, std::abs(m0 - m1));
        }
    return dev;
}

ExtendedBehavior bell_to_instrumental(const BellBehavior& p) {
    ExtendedBehavior out(2);
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) out.o(x, a, bb) = p.at(x, a, a, bb);
    for (int y = 0; y < 2; ++y)
        for (int bb = 0; bb < 2; ++bb) {
            const double v0 = p.at(0, y, 0, bb) + p.at(0, y, 1, bb);
            const double v1 = p.at(1, y, 0, bb) + p.at(1, y, 1, bb);
            if (std::abs(v0 - v1) > kEqTol)
                throw DomainError("bell_to_instrumental: do-part depends on x (signaling input)");
            out.d(y, bb) = 0.5 * (v0 + v1);
        }
    return out;
}

BellBehavior instrumental_to_bell(const ExtendedBehavior& b) {
    if (b.l != 2) throw DomainError("instrumental_to_bell: needs exactly two settings");
    BellBehavior out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) {
                    if (a == y) {
                        out.at(x, y, a, bb) = b.o(x, a, bb);
                    } else {
                        const double v = b.d(y, bb) - b.o(x, y, bb);
                        if (v < -kEqTol)
                            throw DomainError("instrumental_to_bell: p(b|do(a)) - p(a,b|x) < 0, no Bell image");
                        out.at(x, y, a, bb) = v;
                    }
                }
    return out;
}

BellBehavior bell_from_responses(const std::array<int, 2>& a_of_x, const std::array<int, 2>& b_of_y) {
    BellBehavior out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) out.at(x, y, a_of_x[x], b_of_y[y]) = 1.0;
    return out;
}

std::vector<BellBehavior> local_deterministic_vertices() {
    std::vector<BellBehavior> out;
    for (int am = 0; am < 4; ++am)
        for (int bm = 0; bm < 4; ++bm)
            out.push_back(bell_from_responses({am & 1, (am >> 1) & 1}, {bm & 1, (bm >> 1) & 1}));
    return out;
}

BellBehavior bell_behavior_of(const QuantumInstrumentalModel& m) {
    check_model(m);
    if (m.settings() != 2) throw DomainError("bell_behavior_of: needs two settings");
    BellBehavior out;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    out.at(x, y, a, b) = (kron(m.alice[x][a], m.bob[y][b]) * m.rho).trace().real();
    return out;
}

BellFunctional hardy_canonical() {
    BellFunctional f;
    f.c[8 * 0 + 4 * 1 + 2 * 1 + 0] = 1;  // p(1,0|0,1)
    f.c[8 * 1 + 4 * 0 + 2 * 0 + 1] = 1;  // p(0,1|1,0)
    f.c[8 * 0 + 4 * 0 + 2 * 0 + 0] = 1;  // p(0,0|0,0)
    f.c[8 * 1 + 4 * 1 + 2 * 0 + 0] = -1; // p(0,0|1,1)
    return f;
}

const std::vector<BellFunctional>& hardy_family() {
    static const std::vector<BellFunctional> family = [] {
        const BellFunctional canon = hardy_canonical();
        std::vector<BellFunctional> out;
        std::map<std::array<long long, 16>, bool> seen;
        for (int sx = 0; sx < 2; ++sx)
            for (int sy = 0; sy < 2; ++sy)
                for (int fm = 0; fm < 4; ++fm)
                    for (int gm = 0; gm < 4; ++gm) {
                        const std::array<int, 2> fa = {fm & 1, (fm >> 1) & 1};
                        const std::array<int, 2> fb = {gm & 1, (gm >> 1) & 1};
                        BellFunctional img;
                        for (int x = 0; x < 2; ++x)
                            for (int y = 0; y < 2; ++y)
                                for (int a = 0; a < 2; ++a)
                                    for (int b = 0; b < 2; ++b) {
                                        const int x2 = x ^ sx, y2 = y ^ sy;
                                        img.c[static_cast<size_t>(8 * x2 + 4 * y2 + 2 * (a ^ fa[x2]) + (b ^ fb[y2]))] =
                                            canon.c[static_cast<size_t>(8 * x + 4 * y + 2 * a + b)];
                                    }
                        std::array<long long, 16> key{};
                        for (int i = 0; i < 16; ++i) key[static_cast<size_t>(i)] = std::llround(img.c[static_cast<size_t>(i)]);
                        if (seen.emplace(key, true).second) out.push_back(img);
                    }
        return out;
    }();
    return family;
}

double hardy_value(const BellBehavior& p, const BellFunctional& instance) { return instance.eval(p); }

double hardy_min(const BellBehavior& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : hardy_family()) best = std::min(best, f.eval(p));
    return best;
}

BellFunctional hardy_from_il22_indices(int a, int b, int x, int xp) {
    if (x == xp) throw DomainError("hardy_from_il22_indices: needs two distinct settings");
    // p(~a,b|x,~a) + p(~a,b|x',a) + p(a,~b|x,a) - p(~a,b|x',~a) >= 0
    BellFunctional f;
    const int na = 1 - a, nb = 1 - b;
    f.c[static_cast<size_t>(8 * x + 4 * na + 2 * na + b)] += 1;
    f.c[static_cast<size_t>(8 * xp + 4 * a + 2 * na + b)] += 1;
    f.c[static_cast<size_t>(8 * x + 4 * a + 2 * a + nb)] += 1;
    f.c[static_cast<size_t>(8 * xp + 4 * na + 2 * na + b)] -= 1;
    return f;
}

double bell_correlator(const BellBehavior& p, int x, int y) {
    double v = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) v += ((a + b) % 2 == 0 ? 1.0 : -1.0) * p.at(x, y, a, b);
    return v;
}

double chsh_value(const BellBehavior& p, int x, int y) {
    const int xp = 1 - x, yp = 1 - y;
    return bell_correlator(p, xp, y) + bell_correlator(p, x, yp) + bell_correlator(p, xp, yp) -
           bell_correlator(p, x, y);
}

double chsh_max(const BellBehavior& p) {
    double best = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) best = std::max(best, chsh_value(p, x, y));
    return best;
}

HardyChshReport hardy_implies_chsh_check(const BellBehavior& p) {
    HardyChshReport r;
    auto p_eq = [&](int x, int y) { return p.at(x, y, 0, 0) + p.at(x, y, 1, 1); };
    auto p_ne = [&](int x, int y) { return p.at(x, y, 0, 1) + p.at(x, y, 1, 0); };
    r.d0 = p_ne(0, 1) + p_ne(1, 0) + p_eq(0, 0) - p_eq(1, 1);
    r.d1 = p_eq(0, 1) + p_eq(1, 0) + p_ne(0, 0) - p_ne(1, 1);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) r.chsh[static_cast<size_t>(2 * x + y)] = chsh_value(p, x, y);
    r.identity_residual = std::abs(r.d1 - r.d0 - chsh_value(p, 0, 0));
    r.hardy_min = hardy_min(p);
    r.chsh_max = chsh_max(p);
    r.implication_ok = !(r.hardy_min >= -kEqTol && r.chsh_max > 2 + kEqTol);
    return r;
}

std::string bell_to_json(const BellBehavior& b) {
    nlohmann::json j;
    for (int x = 0; x < 2; ++x) {
        nlohmann::json jx;
        for (int y = 0; y < 2; ++y) {
            nlohmann::json jy;
            for (int a = 0; a < 2; ++a) jy.push_back({b.at(x, y, a, 0), b.at(x, y, a, 1)});
            jx.push_back(jy);
        }
        j["p"].push_back(jx);
    }
    return j.dump(2);
}

BellBehavior bell_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    BellBehavior b;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 2; ++a)
                for (int bb = 0; bb < 2; ++bb) b.at(x, y, a, bb) = j.at("p").at(x).at(y).at(a).at(bb).get<double>();
    return b;
}

} // namespace obi
