#pragma once

// Geometry of the classically attainable observational/interventional data:
// deterministic vertices, LP membership with separating certificates, the
// constructive joint-distribution membership test, and exact facet
// enumeration with orbit classification.

#include <obi/inequalities.hpp>
#include <obi/solver/dd.hpp>

#include <map>
#include <optional>

namespace obi {

std::vector<DeterministicStrategy> all_strategies(int l);
std::vector<ExtendedBehavior> polytope_vertices(int l);

// Full coordinate vector (4l + 4 entries: obs then do).
std::vector<double> behavior_coords(const ExtendedBehavior& b);

// Reduced affine coordinates (3l + 2): per setting (p00, p01, p10), then
// p(0|do(0)), p(0|do(1)). Normalization makes the dropped entries redundant.
std::vector<double> reduced_coords(const ExtendedBehavior& b);

struct MembershipResult {
    bool member = false;
    std::vector<double> weights;  // over polytope_vertices(l) when member
    LinearFunctional certificate; // when non-member: >= classical_min on every vertex
    double certificate_value = 0; // certificate evaluated on the queried behavior
    double classical_min = 0;     // min of the certificate over the vertices
};

MembershipResult membership_lp(const ExtendedBehavior& b);

// Joint distribution over (a_1..a_l, b_0, b_1); index bits: a_x at bit
// (l-1-x)+2 block... layout: idx = (a-bits << 2) | (b0 << 1) | b1.
struct JointDistribution {
    int l = 0;
    std::vector<double> q;

    explicit JointDistribution(int settings)
        : l(settings), q(size_t(1) << (settings + 2), 0.0) {}
    double& at(const std::vector<int>& a_of_x, int b0, int b1) {
        size_t idx = 0;
        for (int x = 0; x < l; ++x) idx |= static_cast<size_t>(a_of_x[x]) << (2 + x);
        return q[idx | static_cast<size_t>(b0 << 1) | static_cast<size_t>(b1)];
    }
};

struct ConstructiveResult {
    bool feasible = false;
    bool boundary = false; // some inequality within +-1e-9 of tight
    std::optional<JointDistribution> joint;
    double max_marginal_error = 0; // reproduction error of obs/do marginals
    double slack = 0;              // width of the feasible interval for s
};

ConstructiveResult membership_constructive(const ExtendedBehavior& b);

struct ClassifiedFacet {
    LinearFunctional functional;    // full-coordinate affine form, >= 0 on the polytope
    std::string family;             // "positivity", "trivial", "il22" or "other"
    int orbit_id = -1;
    std::vector<int> tight_vertices;
};

struct FacetEnumeration {
    int dimension = 0;                       // affine dimension of the polytope
    std::vector<ClassifiedFacet> facets;
    std::map<std::string, int> family_counts;
    int orbit_count = 0;
    std::map<std::string, std::vector<int>> orbits_by_family; // family -> orbit sizes
};

FacetEnumeration enumerate_facets(const Scenario& scenario);

std::string facets_to_json(const FacetEnumeration& fe);

} // namespace obi
