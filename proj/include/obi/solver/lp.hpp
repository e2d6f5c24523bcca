#pragma once

// Dense two-phase simplex with Bland's rule, templated on the scalar type so
// the same pivoting code runs in double precision or exact rational
// arithmetic (boost cpp_rational). Problems here are desk scale: tens of
// rows, at most ~1100 columns for the largest membership instance.

#include <obi/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

namespace obi {

using Rational = boost::multiprecision::cpp_rational;

template <class T> struct LpTraits;

template <> struct LpTraits<double> {
    static constexpr double rc_eps = 1e-9;     // reduced-cost threshold
    static constexpr double pivot_eps = 1e-11; // pivot magnitude threshold
    static double abs(double v) { return v < 0 ? -v : v; }
};

template <> struct LpTraits<Rational> {
    static inline const Rational rc_eps = 0;
    static inline const Rational pivot_eps = 0;
    static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Core standard form: min c.x  s.t.  A x = b,  x >= 0.
template <class T> struct StandardLp {
    std::vector<std::vector<T>> a; // m rows of length n
    std::vector<T> b;              // m
    std::vector<T> c;              // n
};

template <class T> struct StandardLpResult {
    LpStatus status = LpStatus::Optimal;
    std::vector<T> x;      // primal point (n), valid when Optimal
    std::vector<T> y;      // equality duals (m) when Optimal; Farkas vector when Infeasible
    T objective{};
    T duality_gap{};       // |c.x - y.b| at optimum
    int iterations = 0;
};

namespace detail {

template <class T> class SimplexTableau {
public:
    SimplexTableau(const StandardLp<T>& p) : n_(static_cast<int>(p.c.size())), m_(static_cast<int>(p.b.size())) {
        for (const auto& row : p.a)
            if (static_cast<int>(row.size()) != n_) throw StructuralError("lp: ragged constraint matrix");
        rows_.assign(m_, std::vector<T>(n_ + m_ + 1, T(0)));
        row_sign_.assign(m_, 1);
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            T s = p.b[i] < 0 ? T(-1) : T(1);
            row_sign_[i] = p.b[i] < 0 ? -1 : 1;
            for (int j = 0; j < n_; ++j) rows_[i][j] = s * p.a[i][j];
            rows_[i][n_ + i] = T(1);
            rows_[i][n_ + m_] = s * p.b[i];
            basis_[i] = n_ + i;
        }
        deleted_.assign(m_, false);
    }

    // Phase 1: drive the artificial objective to zero. Returns the phase-1
    // optimum (sum of artificials) and, through y(), the Farkas duals.
    T phase1(int& iters) {
        std::vector<T> cost(n_ + m_, T(0));
        for (int j = 0; j < m_; ++j) cost[n_ + j] = T(1);
        price_out(cost);
        run(/*allow_artificial=*/true, iters);
        return obj_value_;
    }

    void drop_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (deleted_[i] || basis_[i] < n_) continue;
            int enter = -1;
            for (int j = 0; j < n_; ++j)
                if (LpTraits<T>::abs(rows_[i][j]) > LpTraits<T>::pivot_eps) { enter = j; break; }
            if (enter >= 0) pivot(i, enter);
            else deleted_[i] = true; // redundant constraint
        }
    }

    void phase2(const std::vector<T>& c_struct, int& iters) {
        std::vector<T> cost(n_ + m_, T(0));
        for (int j = 0; j < n_; ++j) cost[j] = c_struct[j];
        price_out(cost);
        run(/*allow_artificial=*/false, iters);
    }

    bool unbounded() const { return unbounded_; }

    std::vector<T> primal() const {
        std::vector<T> x(n_, T(0));
        for (int i = 0; i < m_; ++i)
            if (!deleted_[i] && basis_[i] < n_) x[basis_[i]] = rows_[i][n_ + m_];
        return x;
    }

    // Duals y_i = cost(artificial_i) - rc(artificial_i), mapped back through
    // the row sign normalization.
    std::vector<T> duals(const T& artificial_cost) const {
        std::vector<T> y(m_, T(0));
        for (int i = 0; i < m_; ++i) {
            T v = artificial_cost - obj_row_[n_ + i];
            y[i] = row_sign_[i] < 0 ? T(-v) : v;
        }
        return y;
    }

    T objective() const { return obj_value_; }

private:
    void price_out(const std::vector<T>& cost) {
        obj_row_.assign(n_ + m_, T(0));
        obj_value_ = T(0);
        for (int j = 0; j < n_ + m_; ++j) obj_row_[j] = cost[j];
        for (int i = 0; i < m_; ++i) {
            if (deleted_[i]) continue;
            const T cb = cost[basis_[i]];
            if (cb == T(0)) continue;
            for (int j = 0; j < n_ + m_; ++j) obj_row_[j] -= cb * rows_[i][j];
            obj_value_ += cb * rows_[i][n_ + m_];
        }
    }

    void run(bool allow_artificial, int& iters) {
        const long cap = 2000L + 60L * (n_ + m_);
        unbounded_ = false;
        for (long it = 0;; ++it) {
            if (it > cap) throw SolverError("lp: iteration cap hit (cycling guard)");
            int enter = -1;
            for (int j = 0; j < n_ + m_; ++j) {
                if (!allow_artificial && j >= n_) continue;
                if (obj_row_[j] < -LpTraits<T>::rc_eps) { enter = j; break; } // Bland: lowest index
            }
            if (enter < 0) break; // optimal
            int leave = -1;
            for (int i = 0; i < m_; ++i) {
                if (deleted_[i]) continue;
                if (rows_[i][enter] > LpTraits<T>::pivot_eps) {
                    if (leave < 0) { leave = i; continue; }
                    // ratio test with Bland tie-break on basis index
                    const T lhs = rows_[i][n_ + m_] * rows_[leave][enter];
                    const T rhs = rows_[leave][n_ + m_] * rows_[i][enter];
                    if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
                }
            }
            if (leave < 0) { unbounded_ = true; return; }
            pivot(leave, enter);
            ++iters;
        }
    }

    void pivot(int r, int col) {
        const T piv = rows_[r][col];
        for (auto& v : rows_[r]) v /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == r || deleted_[i]) continue;
            const T f = rows_[i][col];
            if (f == T(0)) continue;
            for (int j = 0; j <= n_ + m_; ++j) rows_[i][j] -= f * rows_[r][j];
        }
        const T fo = obj_row_[col];
        if (fo != T(0)) {
            for (int j = 0; j < n_ + m_; ++j) obj_row_[j] -= fo * rows_[r][j];
            obj_value_ += fo * rows_[r][n_ + m_];
        }
        basis_[r] = col;
    }

    int n_, m_;
    std::vector<std::vector<T>> rows_;
    std::vector<T> obj_row_;
    T obj_value_{};
    std::vector<int> basis_;
    std::vector<int> row_sign_;
    std::vector<bool> deleted_;
    bool unbounded_ = false;
};

} // namespace detail

template <class T>
StandardLpResult<T> lp_solve_standard(const StandardLp<T>& p) {
    StandardLpResult<T> res;
    detail::SimplexTableau<T> tab(p);
    int iters = 0;
    const T p1 = tab.phase1(iters);
    const T feas_tol = std::is_same_v<T, double> ? T(1e-7) : T(0);
    if (p1 > feas_tol) {
        res.status = LpStatus::Infeasible;
        res.y = tab.duals(T(1)); // Farkas: y.A <= 0 componentwise, y.b > 0
        res.objective = p1;
        res.iterations = iters;
        return res;
    }
    tab.drop_artificials();
    tab.phase2(p.c, iters);
    if (tab.unbounded()) {
        res.status = LpStatus::Unbounded;
        res.iterations = iters;
        return res;
    }
    res.status = LpStatus::Optimal;
    res.x = tab.primal();
    res.y = tab.duals(T(0));
    res.objective = tab.objective();
    T yb(0);
    for (size_t i = 0; i < p.b.size(); ++i) yb += res.y[i] * p.b[i];
    res.duality_gap = LpTraits<T>::abs(res.objective - yb);
    res.iterations = iters;
    return res;
}

// General form used by callers:
//   min c.x   s.t.  a_eq x = b_eq,  a_ge x >= b_ge,  lower <= x <= upper
// Missing bound entries mean free below / unbounded above.
template <class T> struct LpProblem {
    std::vector<T> c;
    std::vector<std::vector<T>> a_eq;
    std::vector<T> b_eq;
    std::vector<std::vector<T>> a_ge;
    std::vector<T> b_ge;
    std::vector<std::optional<T>> lower; // empty vector => all zero
    std::vector<std::optional<T>> upper; // empty vector => all +inf
};

template <class T> struct LpResult {
    LpStatus status = LpStatus::Optimal;
    std::vector<T> x;       // original variables
    std::vector<T> y_eq;    // duals of equality rows
    std::vector<T> y_ge;    // duals of inequality rows
    T objective{};
    T duality_gap{};
    int iterations = 0;
};

template <class T>
LpResult<T> lp_solve(const LpProblem<T>& p) {
    const int n = static_cast<int>(p.c.size());
    const int me = static_cast<int>(p.b_eq.size());
    const int mg = static_cast<int>(p.b_ge.size());
    std::vector<std::optional<T>> lower = p.lower, upper = p.upper;
    if (lower.empty()) lower.assign(n, T(0));
    if (upper.empty()) upper.assign(n, std::optional<T>{});

    // Column layout: for each variable either one shifted column (finite lower
    // bound) or a split pair (free). Upper bounds become extra rows.
    struct Col { int var; int sign; };
    std::vector<Col> cols;
    std::vector<T> shift(n, T(0));
    for (int j = 0; j < n; ++j) {
        if (lower[j].has_value()) {
            shift[j] = *lower[j];
            cols.push_back({j, +1});
        } else {
            cols.push_back({j, +1});
            cols.push_back({j, -1});
        }
    }
    std::vector<int> upper_rows;
    for (int j = 0; j < n; ++j)
        if (upper[j].has_value()) upper_rows.push_back(j);

    const int nc = static_cast<int>(cols.size());
    const int slacks = mg;
    const int ub_slacks = static_cast<int>(upper_rows.size());
    StandardLp<T> sp;
    const int total_cols = nc + slacks + ub_slacks;
    const int total_rows = me + mg + ub_slacks;
    sp.a.assign(total_rows, std::vector<T>(total_cols, T(0)));
    sp.b.assign(total_rows, T(0));
    sp.c.assign(total_cols, T(0));
    for (int k = 0; k < nc; ++k) sp.c[k] = T(cols[k].sign) * p.c[cols[k].var];

    auto fill_row = [&](int row, const std::vector<T>& coefs, const T& rhs) {
        T adj = rhs;
        for (int j = 0; j < n; ++j) adj -= coefs[j] * shift[j];
        for (int k = 0; k < nc; ++k) sp.a[row][k] = T(cols[k].sign) * coefs[cols[k].var];
        sp.b[row] = adj;
    };
    for (int i = 0; i < me; ++i) fill_row(i, p.a_eq[i], p.b_eq[i]);
    for (int i = 0; i < mg; ++i) {
        fill_row(me + i, p.a_ge[i], p.b_ge[i]);
        sp.a[me + i][nc + i] = T(-1); // surplus
    }
    for (int u = 0; u < ub_slacks; ++u) {
        const int j = upper_rows[u];
        std::vector<T> coefs(n, T(0));
        coefs[j] = T(1);
        fill_row(me + mg + u, coefs, *upper[j]);
        sp.a[me + mg + u][nc + slacks + u] = T(1); // slack
    }

    auto raw = lp_solve_standard(sp);
    LpResult<T> res;
    res.status = raw.status;
    res.iterations = raw.iterations;
    res.duality_gap = raw.duality_gap;
    if (raw.status == LpStatus::Optimal) {
        res.x.assign(n, T(0));
        for (int k = 0; k < nc; ++k) res.x[cols[k].var] += T(cols[k].sign) * raw.x[k];
        for (int j = 0; j < n; ++j) res.x[j] += shift[j];
        res.objective = T(0);
        for (int j = 0; j < n; ++j) res.objective += p.c[j] * res.x[j];
    }
    if (!raw.y.empty()) {
        res.y_eq.assign(raw.y.begin(), raw.y.begin() + me);
        res.y_ge.assign(raw.y.begin() + me, raw.y.begin() + me + mg);
    }
    return res;
}

} // namespace obi
