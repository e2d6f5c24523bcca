#pragma once

// Instrumental-scenario domain types: hybrid observational/interventional
// behavior tables, deterministic strategies, correlator conversion and the
// average causal effect. All types are immutable values in practice;
// operations return new objects and are safe to call concurrently.

#include <obi/errors.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace obi {

inline constexpr double kEqTol = 1e-9;       // default equality tolerance
inline constexpr double kNormTol = 1e-12;    // normalization tolerance

struct Scenario {
    int l = 2; // number of instrument settings |X|
    int m = 2; // |A|
    int n = 2; // |B|

    void check() const {
        if (l < 2) throw DomainError("scenario: need at least two settings");
        if (m != 2 || n != 2) throw DomainError("scenario: outcomes must be binary");
    }
};

// Observational table p(a,b|x) plus interventional table p(b|do(a)),
// binary outcomes.
struct ExtendedBehavior {
    int l = 0;
    std::vector<double> obs;    // l*4 entries, layout 4x + 2a + b
    std::array<double, 4> do_{}; // 2a + b

    ExtendedBehavior() = default;
    explicit ExtendedBehavior(int settings) : l(settings), obs(static_cast<size_t>(settings) * 4, 0.0) {
        if (settings < 1) throw StructuralError("behavior: need at least one setting");
    }

    double o(int x, int a, int b) const { return obs[static_cast<size_t>(4 * x + 2 * a + b)]; }
    double& o(int x, int a, int b) { return obs[static_cast<size_t>(4 * x + 2 * a + b)]; }
    double d(int a, int b) const { return do_[static_cast<size_t>(2 * a + b)]; }
    double& d(int a, int b) { return do_[static_cast<size_t>(2 * a + b)]; }

    static ExtendedBehavior uniform(int settings) {
        ExtendedBehavior b(settings);
        for (auto& v : b.obs) v = 0.25;
        b.do_ = {0.5, 0.5, 0.5, 0.5};
        return b;
    }
};

struct DeterministicStrategy {
    std::vector<int> f;      // X -> A
    std::array<int, 2> g{};  // A -> B
};

struct Correlators {
    std::vector<double> ab; // <AB>_x
    std::vector<double> a;  // <A>_x
    std::vector<double> b;  // <B>_x
    std::array<double, 2> b_do{}; // <B>_do(a)
};

// Returns human-readable constraint violations; empty means valid.
std::vector<std::string> validate(const ExtendedBehavior& b);
inline bool is_valid(const ExtendedBehavior& b) { return validate(b).empty(); }

ExtendedBehavior from_strategy(const DeterministicStrategy& s, const Scenario& scenario);

// max_{a,a',b} |p(b|do(a)) - p(b|do(a'))|
double ace(const ExtendedBehavior& b);

Correlators to_correlators(const ExtendedBehavior& b);
ExtendedBehavior from_correlators(const Correlators& c);

// Convex combination helper used all over the test suites.
ExtendedBehavior mix(const std::vector<ExtendedBehavior>& parts, const std::vector<double>& weights);

// JSON object {"l": int, "obs": [[[..]]], "do": [[..]]}
std::string behavior_to_json(const ExtendedBehavior& b);
ExtendedBehavior behavior_from_json(const std::string& text);

// CSV: a "x,a,b,p" table followed by a blank line and an "a,b,p_do" table.
void behavior_to_csv(const ExtendedBehavior& b, std::ostream& out);

} // namespace obi
