#pragma once

// Two-qubit quantum models of the scenario: Born-rule behaviors, the quantum
// do-distribution and ACE, the known analytic maximally violating strategy,
// seesaw lower bounds on inequality values, and the one-detector inefficiency
// model with its threshold search.

#include <obi/core.hpp>
#include <obi/inequalities.hpp>
#include <obi/linalg.hpp>

#include <cstdint>

namespace obi {

struct QuantumInstrumentalModel {
    Mat4 rho = Mat4::Zero();                       // shared state on A (x) B
    std::vector<std::array<Mat2, 2>> alice;        // [x][a], POVM per setting
    std::array<std::array<Mat2, 2>, 2> bob{};      // [a][b], POVM per received a

    int settings() const { return static_cast<int>(alice.size()); }
};

// Throws ModelError when rho is not a PSD trace-one Hermitian operator or a
// POVM fails completeness (tolerances 1e-12 hermiticity, 1e-10 otherwise).
void check_model(const QuantumInstrumentalModel& m);

ExtendedBehavior born_behavior(const QuantumInstrumentalModel& m);

// max_{a,a',b} tr[(1 (x) (N_a^b - N_a'^b)) rho]; equals ace(born_behavior(m)).
double qace(const QuantumInstrumentalModel& m);

// Bell state |00>+|11> with equatorial projectors at phases pi/4, 3pi/4 for
// the two settings and -pi/2, pi for B's two inputs: reaches the il22 value
// -(sqrt(2)-1)/2, the quantum optimum.
QuantumInstrumentalModel maximal_violation_model();

struct SeesawOptions {
    int restarts = 20;
    int max_iters = 500;
    double tol = 1e-10;
    uint64_t seed = 1;
    bool maximize = false; // default minimizes the functional
};

struct SeesawResult {
    double value = 0;
    QuantumInstrumentalModel model;
    bool converged = false;
    int iterations = 0; // of the best restart
    bool monotone = true; // objective never worsened between iterations
};

SeesawResult seesaw_optimize(int l, const LinearFunctional& objective, const SeesawOptions& opts,
                             const std::vector<QuantumInstrumentalModel>* warm_starts = nullptr);

// --- detection-inefficiency model ---------------------------------------------

struct EfficiencyPoint {
    double eta1 = 1; // A side
    double eta2 = 1; // B side
};

// Which outcome index absorbs the undetected events on each side.
struct StarConvention {
    int a_star = 1;
    int b_star = 1;
};

// One-detector noise model: undetected events are recorded as the starred
// outcome; on the A side the recorded outcome also drives B's input, and on
// the interventional side only B's detector matters.
ExtendedBehavior noisy_behavior(const ExtendedBehavior& ideal, const EfficiencyPoint& e,
                                const StarConvention& star = {});

// Pullback of a functional through the (affine) noise map, so that
// pull(F).eval(ideal) == F.eval(noisy_behavior(ideal)).
LinearFunctional pull_through_noise(const LinearFunctional& f, const EfficiencyPoint& e,
                                    const StarConvention& star = {});

enum class ThresholdMode { Symmetric, AsymmetricFixEta1, AsymmetricFixEta2 };

struct ThresholdOptions {
    int restarts = 12;
    uint64_t seed = 7;
    double bisect_tol = 0.004;
    double violation_eps = 1e-6;
};

struct ThresholdResult {
    double eta = 1;
    double violation_at_eta = 0; // best (most negative) value found at eta
};

// Smallest detection efficiency admitting an il22 violation below
// -violation_eps, by bisection with a seesaw oracle at each efficiency.
ThresholdResult efficiency_threshold(ThresholdMode mode, const ThresholdOptions& opts = {});

// Real two-qubit family cos(theta)|00> + sin(theta)|11> with X-Z-plane
// projective angles; rich enough for every violation optimum used here.
struct RealFamilyPoint {
    double theta = M_PI / 4;
    double alice0 = 0, alice1 = M_PI / 2;
    double bob0 = M_PI / 4, bob1 = -M_PI / 4;
};
QuantumInstrumentalModel model_of(const RealFamilyPoint& f);

// Best il22 violation at a fixed efficiency point: seesaw over the star
// conventions plus a direct simplex refinement within the real family.
// `cont`, when given, carries the refined family point between calls.
double best_noisy_violation(const EfficiencyPoint& e, const SeesawOptions& base,
                            std::vector<QuantumInstrumentalModel>* warm = nullptr,
                            RealFamilyPoint* cont = nullptr);

// --- ACE-bound violation -------------------------------------------------------

struct CausalGapResult {
    double c1 = 0;   // observational bound C_1 of the found model
    double qace = 0; // its quantum ACE
    double gap = 0;  // c1 - qace, positive means the classical bound fails
    QuantumInstrumentalModel model;
};

// Searches two-qubit models for qACE < C_1, alternating seesaw passes on the
// currently active branch of the ACE maximum.
CausalGapResult causal_gap_search(int restarts = 24, uint64_t seed = 11);

} // namespace obi
