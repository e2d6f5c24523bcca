#include <obi/solver/dd.hpp>

#include <algorithm>

namespace obi {

namespace {

using BigInt = boost::multiprecision::cpp_int;

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Scale to a primitive integer vector; keeps orientation.
void normalize(std::vector<Rational>& v) {
    BigInt l = 1;
    for (const auto& q : v) l = boost::multiprecision::lcm(l, denominator(q));
    BigInt g = 0;
    std::vector<BigInt> ints(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        ints[i] = numerator(v[i]) * (l / denominator(v[i]));
        g = boost::multiprecision::gcd(g, ints[i]);
    }
    if (g == 0) return;
    for (size_t i = 0; i < v.size(); ++i) v[i] = Rational(ints[i] / g);
}

struct Ray {
    std::vector<Rational> v;
    uint64_t zero = 0; // bit i set <=> constraint i is tight
};

} // namespace

int affine_rank(const std::vector<std::vector<Rational>>& points) {
    if (points.size() < 2) return 0;
    const size_t d = points[0].size();
    std::vector<std::vector<Rational>> rows;
    for (size_t i = 1; i < points.size(); ++i) {
        std::vector<Rational> r(d);
        for (size_t j = 0; j < d; ++j) r[j] = points[i][j] - points[0][j];
        rows.push_back(std::move(r));
    }
    int rank = 0;
    size_t col = 0;
    for (; col < d && rank < static_cast<int>(rows.size()); ++col) {
        int piv = -1;
        for (size_t i = rank; i < rows.size(); ++i)
            if (rows[i][col] != 0) { piv = static_cast<int>(i); break; }
        if (piv < 0) continue;
        std::swap(rows[rank], rows[piv]);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<int>(i) == rank || rows[i][col] == 0) continue;
            const Rational f = rows[i][col] / rows[rank][col];
            for (size_t j = col; j < d; ++j) rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

DdResult double_description(const std::vector<std::vector<Rational>>& vertices) {
    const int n = static_cast<int>(vertices.size());
    if (n == 0) throw StructuralError("dd: empty vertex set");
    const int d = static_cast<int>(vertices[0].size());
    if (n > 64) throw CapacityError("dd: more than 64 vertices");
    if (d > 14) throw CapacityError("dd: dimension above 14");
    for (const auto& v : vertices)
        if (static_cast<int>(v.size()) != d) throw StructuralError("dd: ragged vertex list");

    // Work in the polar picture: facets (a0, a) of conv(V) are the extreme
    // rays of the cone { y in R^{d+1} : <(1, v_i), y> >= 0 for all i }.
    std::vector<std::vector<Rational>> constraint(n, std::vector<Rational>(d + 1));
    for (int i = 0; i < n; ++i) {
        constraint[i][0] = 1;
        for (int j = 0; j < d; ++j) constraint[i][j + 1] = vertices[i][j];
    }

    std::vector<std::vector<Rational>> lin; // current lineality basis
    for (int j = 0; j <= d; ++j) {
        std::vector<Rational> e(d + 1, Rational(0));
        e[j] = 1;
        lin.push_back(std::move(e));
    }
    std::vector<Ray> rays;

    for (int k = 0; k < n; ++k) {
        const auto& c = constraint[k];

        int piv = -1;
        for (size_t j = 0; j < lin.size(); ++j)
            if (dot(c, lin[j]) != 0) { piv = static_cast<int>(j); break; }

        if (piv >= 0) {
            std::vector<Rational> l = lin[piv];
            Rational dl = dot(c, l);
            if (dl < 0) { for (auto& q : l) q = -q; dl = -dl; }
            std::vector<std::vector<Rational>> new_lin;
            for (size_t j = 0; j < lin.size(); ++j) {
                if (static_cast<int>(j) == piv) continue;
                const Rational f = dot(c, lin[j]) / dl;
                std::vector<Rational> w = lin[j];
                for (int t = 0; t <= d; ++t) w[t] -= f * l[t];
                normalize(w);
                new_lin.push_back(std::move(w));
            }
            lin = std::move(new_lin);
            for (auto& r : rays) {
                const Rational f = dot(c, r.v) / dl;
                if (f != 0) {
                    for (int t = 0; t <= d; ++t) r.v[t] -= f * l[t];
                    normalize(r.v);
                }
                r.zero |= (uint64_t(1) << k); // now tight at k
            }
            Ray nr;
            nr.v = std::move(l);
            normalize(nr.v);
            nr.zero = (k == 0) ? 0 : ((uint64_t(1) << k) - 1); // tight at all previous
            rays.push_back(std::move(nr));
            continue;
        }

        // Lineality orthogonal to c: classic positive/zero/negative split.
        std::vector<Rational> val(rays.size());
        bool any_neg = false;
        for (size_t i = 0; i < rays.size(); ++i) {
            val[i] = dot(c, rays[i].v);
            if (val[i] < 0) any_neg = true;
            if (val[i] == 0) rays[i].zero |= (uint64_t(1) << k);
        }
        if (!any_neg) continue;

        std::vector<Ray> next;
        for (size_t i = 0; i < rays.size(); ++i)
            if (val[i] >= 0) next.push_back(rays[i]);

        for (size_t p = 0; p < rays.size(); ++p) {
            if (val[p] <= 0) continue;
            for (size_t q = 0; q < rays.size(); ++q) {
                if (val[q] >= 0) continue;
                const uint64_t common = rays[p].zero & rays[q].zero;
                bool adjacent = true;
                for (size_t r = 0; r < rays.size(); ++r) {
                    if (r == p || r == q) continue;
                    if ((common & rays[r].zero) == common) { adjacent = false; break; }
                }
                if (!adjacent) continue;
                Ray w;
                w.v.assign(d + 1, Rational(0));
                for (int t = 0; t <= d; ++t)
                    w.v[t] = val[p] * rays[q].v[t] - val[q] * rays[p].v[t];
                normalize(w.v);
                w.zero = common | (uint64_t(1) << k);
                next.push_back(std::move(w));
            }
        }
        rays = std::move(next);
    }

    DdResult res;
    if (!lin.empty()) {
        res.full_dimensional = false;
        for (auto& l : lin) {
            std::vector<Rational> a(l.begin() + 1, l.end());
            res.affine_equalities.emplace_back(l[0], std::move(a));
        }
    }
    for (const auto& r : rays) {
        Facet f;
        f.offset = r.v[0];
        f.coeffs.assign(r.v.begin() + 1, r.v.end());
        for (int i = 0; i < n; ++i)
            if (r.zero & (uint64_t(1) << i)) f.tight.push_back(i);
        res.facets.push_back(std::move(f));
    }
    return res;
}

} // namespace obi
