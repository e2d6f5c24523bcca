#include <obi/core.hpp>

#include <json.hpp>

#include <cmath>
#include <ostream>
#include <sstream>

namespace obi {

std::vector<std::string> validate(const ExtendedBehavior& b) {
    std::vector<std::string> out;
    if (b.l < 1 || b.obs.size() != static_cast<size_t>(b.l) * 4)
        throw StructuralError("behavior: obs tensor has wrong shape");
    auto note = [&out](const std::string& s) { out.push_back(s); };
    for (int x = 0; x < b.l; ++x) {
        double sum = 0;
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) {
                const double p = b.o(x, a, bb);
                if (p < -kNormTol || p > 1 + kNormTol)
                    note("obs[" + std::to_string(x) + "][" + std::to_string(a) + "][" + std::to_string(bb) +
                         "] outside [0,1]: " + std::to_string(p));
                sum += p;
            }
        if (std::abs(sum - 1.0) > kNormTol)
            note("obs row x=" + std::to_string(x) + " sums to " + std::to_string(sum));
    }
    for (int a = 0; a < 2; ++a) {
        double sum = 0;
        for (int bb = 0; bb < 2; ++bb) {
            const double p = b.d(a, bb);
            if (p < -kNormTol || p > 1 + kNormTol)
                note("do[" + std::to_string(a) + "][" + std::to_string(bb) + "] outside [0,1]: " + std::to_string(p));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kNormTol)
            note("do row a=" + std::to_string(a) + " sums to " + std::to_string(sum));
    }
    return out;
}

ExtendedBehavior from_strategy(const DeterministicStrategy& s, const Scenario& scenario) {
    scenario.check();
    if (static_cast<int>(s.f.size()) != scenario.l) throw StructuralError("strategy: f not defined on all settings");
    for (int v : s.f)
        if (v != 0 && v != 1) throw DomainError("strategy: f value out of range");
    for (int v : s.g)
        if (v != 0 && v != 1) throw DomainError("strategy: g value out of range");
    ExtendedBehavior b(scenario.l);
    for (int x = 0; x < scenario.l; ++x) b.o(x, s.f[x], s.g[s.f[x]]) = 1.0;
    for (int a = 0; a < 2; ++a) b.d(a, s.g[a]) = 1.0;
    return b;
}

double ace(const ExtendedBehavior& b) {
    double best = 0;
    for (int a = 0; a < 2; ++a)
        for (int a2 = 0; a2 < 2; ++a2)
            for (int bb = 0; bb < 2; ++bb)
                best = std::max(best, std::abs(b.d(a, bb) - b.d(a2, bb)));
    return best;
}

Correlators to_correlators(const ExtendedBehavior& b) {
    Correlators c;
    c.ab.resize(b.l);
    c.a.resize(b.l);
    c.b.resize(b.l);
    for (int x = 0; x < b.l; ++x) {
        double ab = 0, ma = 0, mb = 0;
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) {
                const double p = b.o(x, a, bb);
                ab += ((a + bb) % 2 == 0 ? p : -p);
                ma += (a == 0 ? p : -p);
                mb += (bb == 0 ? p : -p);
            }
        c.ab[x] = ab;
        c.a[x] = ma;
        c.b[x] = mb;
    }
    for (int a = 0; a < 2; ++a) c.b_do[a] = b.d(a, 0) - b.d(a, 1);
    return c;
}

ExtendedBehavior from_correlators(const Correlators& c) {
    const int l = static_cast<int>(c.ab.size());
    if (static_cast<int>(c.a.size()) != l || static_cast<int>(c.b.size()) != l)
        throw StructuralError("correlators: inconsistent lengths");
    ExtendedBehavior out(l);
    auto checked = [](double p, const char* what) {
        if (p < -kEqTol || p > 1 + kEqTol)
            throw DomainError(std::string("correlators imply probability outside [0,1] for ") + what);
        return std::min(1.0, std::max(0.0, p));
    };
    for (int x = 0; x < l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) {
                const double sa = (a == 0) ? 1 : -1, sb = (bb == 0) ? 1 : -1;
                out.o(x, a, bb) = checked(0.25 * (1 + sa * c.a[x] + sb * c.b[x] + sa * sb * c.ab[x]), "obs");
            }
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
            const double sb = (bb == 0) ? 1 : -1;
            out.d(a, bb) = checked(0.5 * (1 + sb * c.b_do[a]), "do");
        }
    return out;
}

ExtendedBehavior mix(const std::vector<ExtendedBehavior>& parts, const std::vector<double>& weights) {
    if (parts.empty() || parts.size() != weights.size()) throw StructuralError("mix: size mismatch");
    ExtendedBehavior out(parts[0].l);
    for (size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].l != out.l) throw StructuralError("mix: mismatched scenarios");
        for (size_t i = 0; i < out.obs.size(); ++i) out.obs[i] += weights[k] * parts[k].obs[i];
        for (int i = 0; i < 4; ++i) out.do_[i] += weights[k] * parts[k].do_[i];
    }
    return out;
}

std::string behavior_to_json(const ExtendedBehavior& b) {
    nlohmann::json j;
    j["l"] = b.l;
    auto& obs = j["obs"];
    for (int x = 0; x < b.l; ++x) {
        nlohmann::json row;
        for (int a = 0; a < 2; ++a) row.push_back({b.o(x, a, 0), b.o(x, a, 1)});
        obs.push_back(row);
    }
    j["do"] = {{b.d(0, 0), b.d(0, 1)}, {b.d(1, 0), b.d(1, 1)}};
    return j.dump(2);
}

ExtendedBehavior behavior_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const int l = j.at("l").get<int>();
    ExtendedBehavior b(l);
    const auto& obs = j.at("obs");
    if (static_cast<int>(obs.size()) != l) throw StructuralError("behavior json: obs has wrong length");
    for (int x = 0; x < l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) b.o(x, a, bb) = obs.at(x).at(a).at(bb).get<double>();
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) b.d(a, bb) = j.at("do").at(a).at(bb).get<double>();
    return b;
}

void behavior_to_csv(const ExtendedBehavior& b, std::ostream& out) {
    char buf[64];
    out << "x,a,b,p\n";
    for (int x = 0; x < b.l; ++x)
        for (int a = 0; a < 2; ++a)
            for (int bb = 0; bb < 2; ++bb) {
                std::snprintf(buf, sizeof buf, "%d,%d,%d,%.12g\n", x, a, bb, b.o(x, a, bb));
                out << buf;
            }
    out << "\na,b,p_do\n";
    for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.12g\n", a, bb, b.d(a, bb));
            out << buf;
        }
}

} // namespace obi
