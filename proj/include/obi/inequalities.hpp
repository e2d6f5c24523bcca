#pragma once

// Every inequality family of the scenario as affine functionals on extended
// behaviors: the classical instrumental inequalities, the causal ACE bounds,
// the trivial class p(b|do(a)) - p(a,b|x) >= 0, the il22 class, and the
// correlator form of both.

#include <obi/core.hpp>
#include <obi/relabeling.hpp>

namespace obi {

struct LinearFunctional {
    int l = 0;
    std::vector<double> obs_c;    // l*4
    std::array<double, 4> do_c{}; // 2a + b
    double constant = 0;

    LinearFunctional() = default;
    explicit LinearFunctional(int settings) : l(settings), obs_c(static_cast<size_t>(settings) * 4, 0.0) {}

    double oc(int x, int a, int b) const { return obs_c[static_cast<size_t>(4 * x + 2 * a + b)]; }
    double& oc(int x, int a, int b) { return obs_c[static_cast<size_t>(4 * x + 2 * a + b)]; }
    double dc(int a, int b) const { return do_c[static_cast<size_t>(2 * a + b)]; }
    double& dc(int a, int b) { return do_c[static_cast<size_t>(2 * a + b)]; }

    double eval(const ExtendedBehavior& b) const;
};

// p(b|do(a)) - p(a,b|x) >= 0 on classical and quantum behaviors.
LinearFunctional trivial_functional(int l, int a, int b, int x);

// p(b|do(a)) - p(a,b|x') + p(a,~b|x) + p(~a,b|x) - p(~a,b|x') >= 0 classically.
LinearFunctional il22_functional(int l, int a, int b, int x, int xp);

// The three classical instrumental inequalities, value <= 0 on classical
// behaviors. which in {1,2,3}; they need l >= 2, 3, 4 respectively.
LinearFunctional instrumental_functional(int which, int l);

// Observational lower bounds C_i on the ACE. which in {1,2,3}; l >= 2, 3, 3.
LinearFunctional ace_bound_functional(int which, int l);

double eval_trivial(const ExtendedBehavior& b, int a, int bb, int x);
double eval_il22(const ExtendedBehavior& b, int a, int bb, int x, int xp);
double eval_instrumental(const ExtendedBehavior& b, int which, const Relabeling& r);

struct AceBoundResult {
    double bound = 0;   // C_i
    double ace = 0;     // ace(b)
    bool satisfied = false; // ace >= C_i - tol
};
AceBoundResult eval_ace_bound(const ExtendedBehavior& b, int which);

// Correlator form, for x != x':
//   first:  |<AB>_x - <B>_x + 2<B>_do(1)| - 1 - <A>_x          (trivial class)
//   second: |<AB>_x - <B>_x' + <B>_do(1)| - 1                  (il22 class)
// Both are <= 0 on classical behaviors.
std::pair<double, double> eval_il22_correlator(const Correlators& c, int x, int xp);

// Pushforward: relabel(F, r).eval(apply(r, b)) == F.eval(b).
LinearFunctional relabel(const LinearFunctional& f, const Relabeling& r);

// All distinct images of f under the full relabeling group.
std::vector<LinearFunctional> orbit(const LinearFunctional& f);

// Minima over the full index families (equivalently, orbits).
double min_trivial(const ExtendedBehavior& b);
double min_il22(const ExtendedBehavior& b);

} // namespace obi
