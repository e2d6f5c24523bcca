#pragma once

// The dictionary between extended instrumental data and two-input Bell data:
// the bijection p(a,b|x,y=a) = p(a,b|x), p(~a,b|x,y=a) = p(b|do(a)) - p(a,b|x),
// Hardy-type inequalities and their CHSH consequences.

#include <obi/core.hpp>
#include <obi/quantum.hpp>

namespace obi {

struct BellBehavior {
    std::array<double, 16> p{}; // layout 8x + 4y + 2a + b

    double at(int x, int y, int a, int b) const { return p[static_cast<size_t>(8 * x + 4 * y + 2 * a + b)]; }
    double& at(int x, int y, int a, int b) { return p[static_cast<size_t>(8 * x + 4 * y + 2 * a + b)]; }

    static BellBehavior uniform() {
        BellBehavior b;
        b.p.fill(0.25);
        return b;
    }
};

std::vector<std::string> validate_bell(const BellBehavior& b);
double signaling_deviation(const BellBehavior& b); // max marginal mismatch across the other party's input
inline bool is_non_signaling(const BellBehavior& b, double tol = kEqTol) { return signaling_deviation(b) <= tol; }

// Throws DomainError when the do-part read off the Bell table depends on x
// beyond 1e-9 (signaling input).
ExtendedBehavior bell_to_instrumental(const BellBehavior& p);

// Throws DomainError when some p(b|do(a)) - p(a,b|x) < -1e-9 (no Bell image).
BellBehavior instrumental_to_bell(const ExtendedBehavior& b);

BellBehavior bell_from_responses(const std::array<int, 2>& a_of_x, const std::array<int, 2>& b_of_y);
std::vector<BellBehavior> local_deterministic_vertices(); // all 16

// Bell behavior of a two-qubit model, reading bob's POVM index as the input y.
BellBehavior bell_behavior_of(const QuantumInstrumentalModel& m);

struct BellFunctional {
    std::array<double, 16> c{};
    double constant = 0;
    double eval(const BellBehavior& b) const {
        double v = constant;
        for (int i = 0; i < 16; ++i) v += c[i] * b.p[static_cast<size_t>(i)];
        return v;
    }
};

// p(1,0|0,1) + p(0,1|1,0) + p(0,0|0,0) - p(0,0|1,1) >= 0 on local behaviors.
BellFunctional hardy_canonical();

// Full relabeling orbit of the canonical inequality (input swaps on both
// sides, outcome flips conditioned on the local input).
const std::vector<BellFunctional>& hardy_family();

double hardy_value(const BellBehavior& p, const BellFunctional& instance);
double hardy_min(const BellBehavior& p); // min over the family

// Bell image of the il22 instance (a,b,x,x'): evaluates identically on
// instrumental data pushed through instrumental_to_bell.
BellFunctional hardy_from_il22_indices(int a, int b, int x, int xp);

double bell_correlator(const BellBehavior& p, int x, int y); // <A_x B_y>

// Symmetrized CHSH combination with the (x,y) term negated:
// <A_x' B_y> + <A_x B_y'> + <A_x' B_y'> - <A_x B_y>, local bound 2.
double chsh_value(const BellBehavior& p, int x, int y);
double chsh_max(const BellBehavior& p);

struct HardyChshReport {
    double d0 = 0; // p(!=|01) + p(!=|10) + p(=|00) - p(=|11)
    double d1 = 0; // p(=|01) + p(=|10) + p(!=|00) - p(!=|11)
    std::array<double, 4> chsh{}; // negated pair (0,0),(0,1),(1,0),(1,1)
    double identity_residual = 0; // |d1 - d0 - chsh(0,0)|
    double hardy_min = 0;
    double chsh_max = 0;
    bool implication_ok = true; // all Hardy >= 0 forces all CHSH <= 2
};

HardyChshReport hardy_implies_chsh_check(const BellBehavior& p);

std::string bell_to_json(const BellBehavior& b);
BellBehavior bell_from_json(const std::string& text);

} // namespace obi
