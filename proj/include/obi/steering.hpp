#pragma once

// Extended assemblages (observational conditional states plus interventional
// states), the robustness SDP deciding classical decomposability, its dual
// witness form, the observational bound derived from a witness, and the
// application scenarios (remote state preparation, the three-setting test,
// and the adaptive tripartite test).

#include <obi/linalg.hpp>
#include <obi/solver/sdp.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace obi {

struct ExtendedAssemblage {
    int nx = 0;
    std::vector<std::array<Mat2, 2>> obs; // [x][a] -> sigma_{a|x}
    std::array<Mat2, 2> do_{};            // sigma_{do(a)}

    explicit ExtendedAssemblage(int settings = 0) : nx(settings), obs(static_cast<size_t>(settings)) {
        for (auto& pair : obs) pair = {Mat2::Zero(), Mat2::Zero()};
        do_ = {Mat2::Zero(), Mat2::Zero()};
    }
};

std::vector<std::string> validate_assemblage(const ExtendedAssemblage& e);

struct TripartiteAssemblage {
    // sigma_{a,b|x,y} indexed [x][y][a][b]; sigma_{a,do(b)|x} indexed [x][a][b].
    std::array<Mat2, 16> obs{};
    std::array<Mat2, 8> do_{};

    Mat2& o(int x, int y, int a, int b) { return obs[static_cast<size_t>(8 * x + 4 * y + 2 * a + b)]; }
    const Mat2& o(int x, int y, int a, int b) const { return obs[static_cast<size_t>(8 * x + 4 * y + 2 * a + b)]; }
    Mat2& d(int x, int a, int b) { return do_[static_cast<size_t>(4 * x + 2 * a + b)]; }
    const Mat2& d(int x, int a, int b) const { return do_[static_cast<size_t>(4 * x + 2 * a + b)]; }
};

std::vector<std::string> validate_tripartite(const TripartiteAssemblage& t);

// --- quantum generators ---------------------------------------------------------

struct QuantumChannel {
    std::vector<Mat2> kraus;
    static QuantumChannel identity();
    static QuantumChannel from_unitary(const Mat2& u);
    Mat2 apply(const Mat2& rho) const;
    bool trace_preserving(double tol = 1e-10) const;
};

// sigma_{a|x} = E_a(tr_A[(M_x^a (x) 1) rho]), sigma_do(a) = E_a(tr_A rho).
ExtendedAssemblage assemblage_from_model(const Mat4& rho, const std::vector<std::array<Mat2, 2>>& alice,
                                         const std::array<QuantumChannel, 2>& channels);

// Singlet, equatorial projections at phases {0, phi}, Z-correction channel.
ExtendedAssemblage rsp_assemblage(double phi);

// cos(theta)|00> + sin(theta)|11>, X / Y projections, Z-correction channel.
ExtendedAssemblage rsp_entanglement_assemblage(double theta);

// v |Phi+><Phi+| + (1-v)(|00><00| + |11><11|)/2 with projections along the
// eigenbases of {-(X+Z)/sqrt(2), X, Z}.
ExtendedAssemblage x3_assemblage(double v);

// Noisy three-qubit graph state (|+0+> + |-1->)/sqrt(2) with X/Y settings for
// the first party and the +-pi/4 / +-3pi/4 equatorial, outcome-adapted
// settings for the second; the third party is trusted.
TripartiteAssemblage tripartite_assemblage(double v);

// Classically decomposable extended assemblage from explicit ingredients.
ExtendedAssemblage classical_assemblage(const std::vector<double>& weights,
                                        const std::vector<std::array<Mat2, 2>>& states_by_a,
                                        int nx); // lambda indexes response functions x -> a

ExtendedAssemblage random_classical_assemblage(int nx, std::mt19937_64& rng);
ExtendedAssemblage random_quantum_assemblage(int nx, std::mt19937_64& rng);
ExtendedAssemblage mix(const ExtendedAssemblage& a, const ExtendedAssemblage& b, double p);

// --- robustness SDPs --------------------------------------------------------------

struct RobustnessOptions {
    bool include_do = true;   // drop the interventional constraints when false
    SdpOptions sdp{};
};

struct RobustnessResult {
    double tau = 0;
    bool classical = false;   // tau <= 1e-7
    double residual = 0;      // worst constraint violation of the returned point
    int iterations = 0;
    bool capped = false;      // tau exceeded the diagnostic cap of 1e3
};

RobustnessResult robustness_primal(const ExtendedAssemblage& e, const RobustnessOptions& opts = {},
                                   SdpState* warm = nullptr);

// Standard one-way steering robustness (no communication, observational only).
RobustnessResult standard_steering_robustness(const ExtendedAssemblage& e, const SdpOptions& sdp = {},
                                              SdpState* warm = nullptr);

struct TripartiteOptions {
    bool include_do = true;
    bool no_direct_influence = false; // restrict the model: C's states ignore b
    SdpOptions sdp{};
};

RobustnessResult tripartite_robustness(const TripartiteAssemblage& t, const TripartiteOptions& opts = {},
                                       SdpState* warm = nullptr);

// --- dual witnesses ---------------------------------------------------------------

struct SteeringWitness {
    int nx = 0;
    std::vector<std::array<Mat2, 2>> w; // [x][a] -> W_{a,x}
    std::array<Mat2, 2> v{};            // V_a
    std::vector<std::array<double, 2>> delta_xi;   // [lambda][a]
    std::vector<std::array<double, 2>> delta_zeta; // [lambda][a]
};

struct DualResult {
    SteeringWitness witness;
    double objective = 0;  // equals the primal tau at optimum
    double obs_value = 0;  // sum_a,x tr[W sigma]
    double do_value = 0;   // sum_a tr[V sigma_do]
    double residual = 0;
    int iterations = 0;
};

DualResult witness_dual(const ExtendedAssemblage& e, const RobustnessOptions& opts = {}, SdpState* warm = nullptr);

struct WitnessReport {
    bool feasible = false;
    double worst_margin = 0; // most-violated dual constraint (>= 0 when feasible)
    double obs_value = 0;
    double do_value = 0;
    double total_value = 0;
};

// Feasibility via per-lambda eigenvalue bounds; tol absorbs table rounding.
WitnessReport verify_witness(const SteeringWitness& w, const ExtendedAssemblage& e, double tol = 1e-9);

struct Prop3Result {
    double rhs = 0;  // sum_a ||V_a^-||_inf: what classical observational data can reach
    double lhs = 0;  // sum_x max_a ||W_{a,x}^+||_inf: what the observational part can attain at all
    bool useful = false; // lhs >= rhs
};
Prop3Result prop3_bound(const SteeringWitness& w);

// --- critical visibilities ---------------------------------------------------------

enum class SteeringScenario { X3, Tripartite };

struct VisibilityOptions {
    bool include_do = true;
    bool no_direct_influence = false;
    double bisect_tol = 0.002;
    double tau_threshold = 1e-7;
    SdpOptions sdp{};
};

// Smallest v whose assemblage has tau above the threshold.
double critical_visibility(SteeringScenario scenario, const VisibilityOptions& opts = {});

// --- serialization -------------------------------------------------------------------

std::string assemblage_to_json(const ExtendedAssemblage& e);
ExtendedAssemblage assemblage_from_json(const std::string& text);
std::string witness_to_json(const SteeringWitness& w);
SteeringWitness witness_from_json(const std::string& text);

} // namespace obi
