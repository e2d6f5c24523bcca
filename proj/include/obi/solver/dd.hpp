#pragma once

// Exact double description: convert a vertex list into the complete,
// irredundant facet list of its convex hull. Arithmetic is exact rational
// throughout, so the output is certified, not approximate. Desk-scale caps:
// at most 64 vertices, ambient dimension at most 14.

#include <obi/solver/lp.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace obi {

struct Facet {
    std::vector<Rational> coeffs; // a
    Rational offset;              // a0, inequality reads a0 + a.x >= 0
    std::vector<int> tight;       // input vertices lying on the facet
};

struct DdResult {
    bool full_dimensional = true;
    std::vector<Facet> facets;
    // Nonempty only when the input is not full dimensional: equalities
    // a0 + a.x = 0 satisfied by every input vertex (a basis of them).
    std::vector<std::pair<Rational, std::vector<Rational>>> affine_equalities;
};

DdResult double_description(const std::vector<std::vector<Rational>>& vertices);

// Rank of {p_i - p_0} over the rationals, i.e. the affine-hull dimension.
int affine_rank(const std::vector<std::vector<Rational>>& points);

} // namespace obi
