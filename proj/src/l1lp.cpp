#include "cubelab/l1lp.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "cubelab/errors.hpp"
#include "cubelab/orthopoly.hpp"

namespace cubelab {

// ==========================================================================
// Exact two-phase dense tableau simplex, Bland's rule throughout.
// ==========================================================================

namespace {

struct Tableau {
    // rows 0..m-1 constraints, row m = reduced-cost row; col n_total = rhs.
    std::vector<std::vector<Rat>> t;
    std::vector<int> basis;  // basis[i] = column basic in row i
    int m, n;                // constraint rows, structural+artificial columns

    Rat& at(int i, int j) { return t[i][j]; }
    Rat& rhs(int i) { return t[i][n]; }

    void pivot(int r, int j) {
        const Rat piv = t[r][j];
        for (int c = 0; c <= n; ++c) t[r][c] /= piv;
        for (int i = 0; i <= m; ++i) {
            if (i == r) continue;
            const Rat f = t[i][j];
            if (f == 0) continue;
            for (int c = 0; c <= n; ++c) t[i][c] -= f * t[r][c];
        }
        basis[r] = j;
    }

    // One simplex phase; eligible(j) gates entering columns.
    // Returns: 0 optimal, 1 unbounded, 2 iteration limit.
    template <class Eligible>
    int run(Eligible&& eligible, long limit, long& iterations) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < n; ++j) {
                if (!eligible(j)) continue;
                if (t[m][j] < 0) {
                    enter = j;  // Bland: first negative reduced cost
                    break;
                }
            }
            if (enter < 0) return 0;
            int leave = -1;
            Rat best;
            for (int i = 0; i < m; ++i) {
                if (t[i][enter] > 0) {
                    Rat ratio = t[i][n] / t[i][enter];
                    if (leave < 0 || ratio < best ||
                        (ratio == best && basis[i] < basis[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return 1;
            pivot(leave, enter);
            if (++iterations >= limit) return 2;
        }
    }
};

}  // namespace

StandardLPResult solve_standard_lp(const StandardLP& lp, long iteration_limit) {
    const int m = static_cast<int>(lp.a.size());
    const int n = static_cast<int>(lp.c.size());
    Tableau tb;
    tb.m = m;
    tb.n = n + m;  // structural + one artificial per row
    tb.t.assign(m + 1, std::vector<Rat>(tb.n + 1, Rat(0)));
    tb.basis.resize(m);

    std::vector<bool> flipped(m);
    for (int i = 0; i < m; ++i) {
        const bool flip = lp.b[i] < 0;
        flipped[i] = flip;
        for (int j = 0; j < n; ++j) tb.t[i][j] = flip ? Rat(-lp.a[i][j]) : lp.a[i][j];
        tb.t[i][n + i] = Rat(1);
        tb.t[i][tb.n] = flip ? Rat(-lp.b[i]) : lp.b[i];
        tb.basis[i] = n + i;
    }
    // Phase-1 reduced costs: artificials cost 1, so row m = -sum of rows.
    for (int j = 0; j <= tb.n; ++j) {
        Rat acc(0);
        for (int i = 0; i < m; ++i) acc += tb.t[i][j];
        if (j < n || j == tb.n) tb.t[m][j] = -acc;
        else tb.t[m][j] = Rat(0);
    }

    StandardLPResult res;
    int rc = tb.run([&](int j) { return j < n; }, iteration_limit, res.iterations);
    if (rc == 2) {
        res.status = LPStatus::iteration_limit;
        return res;
    }
    if (tb.t[m][tb.n] != 0) {  // phase-1 optimum -0 means feasible
        res.status = LPStatus::infeasible;
        return res;
    }
    // Drive basic artificials out where possible (redundant rows stay).
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] < n) continue;
        for (int j = 0; j < n; ++j) {
            if (tb.t[i][j] != 0) {
                tb.pivot(i, j);
                break;
            }
        }
    }

    // Phase-2 cost row.
    for (int j = 0; j <= tb.n; ++j) tb.t[m][j] = Rat(0);
    for (int j = 0; j < n; ++j) tb.t[m][j] = lp.c[j];
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] >= n) continue;
        const Rat cb = lp.c[tb.basis[i]];
        if (cb == 0) continue;
        for (int j = 0; j <= tb.n; ++j) tb.t[m][j] -= cb * tb.t[i][j];
    }

    rc = tb.run([&](int j) { return j < n; }, iteration_limit, res.iterations);
    res.objective = -tb.t[m][tb.n];
    if (rc == 2) {
        res.status = LPStatus::iteration_limit;
        return res;
    }
    if (rc == 1) throw std::domain_error("solve_standard_lp: objective unbounded below");

    res.status = LPStatus::optimal;
    res.x.assign(n, Rat(0));
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.t[i][tb.n];
    // Artificial column j of row i still carries B^{-1} e_i; with zero phase-2
    // cost its reduced-cost entry is -y_i (sign-adjusted for rows the
    // normalization flipped).
    res.duals.resize(m);
    for (int i = 0; i < m; ++i) {
        res.duals[i] = -tb.t[m][n + i];
        if (flipped[i]) res.duals[i] = -res.duals[i];
    }
    return res;
}

// ==========================================================================
// Weighted L1 distance LP over the symmetric profile.
// ==========================================================================

LPInstance make_l1_instance(const SymmetricFn& target, int m) {
    const int n = target.n();
    if (m < 0 || m > n) throw std::domain_error("make_l1_instance: 0 <= m <= n required");
    LPInstance inst;
    inst.n = n;
    inst.m = m;
    const Rat two_n(int_pow(Int(2), n));
    KrawtchoukTable K(n);
    inst.weights.resize(n + 1);
    inst.target = target.values();
    inst.design.assign(n + 1, std::vector<Rat>(m + 1));
    for (int d = 0; d <= n; ++d) {
        inst.weights[d] = Rat(binom(n, d)) / two_n;
        for (int j = 0; j <= m; ++j) inst.design[d][j] = K.normalized(j, d);
    }
    return inst;
}

LPResult l1_distance(const SymmetricFn& target, int m, long iteration_limit) {
    LPInstance inst = make_l1_instance(target, m);
    const int n = inst.n;
    const int nf = m + 1;  // polynomial coefficients
    // Columns: a+ (nf), a- (nf), t (n+1), s1 (n+1), s2 (n+1).
    const int cols = 2 * nf + 3 * (n + 1);
    const int col_t = 2 * nf, col_s1 = 2 * nf + (n + 1), col_s2 = 2 * nf + 2 * (n + 1);

    StandardLP lp;
    lp.c.assign(cols, Rat(0));
    for (int d = 0; d <= n; ++d) lp.c[col_t + d] = inst.weights[d];
    lp.a.assign(2 * (n + 1), std::vector<Rat>(cols, Rat(0)));
    lp.b.assign(2 * (n + 1), Rat(0));
    for (int d = 0; d <= n; ++d) {
        //  t_d + p(r_d) - s1_d = f_d    and    t_d - p(r_d) - s2_d = -f_d
        auto& r1 = lp.a[2 * d];
        auto& r2 = lp.a[2 * d + 1];
        for (int j = 0; j < nf; ++j) {
            r1[j] = inst.design[d][j];
            r1[nf + j] = -inst.design[d][j];
            r2[j] = -inst.design[d][j];
            r2[nf + j] = inst.design[d][j];
        }
        r1[col_t + d] = Rat(1);
        r2[col_t + d] = Rat(1);
        r1[col_s1 + d] = Rat(-1);
        r2[col_s2 + d] = Rat(-1);
        lp.b[2 * d] = inst.target[d];
        lp.b[2 * d + 1] = -inst.target[d];
    }

    StandardLPResult raw = solve_standard_lp(lp, iteration_limit);
    LPResult res;
    res.status = raw.status;
    res.iterations = raw.iterations;
    res.optimum = raw.objective;
    res.duals = raw.duals;
    if (raw.status != LPStatus::optimal) return res;

    res.coefficients.resize(nf);
    for (int j = 0; j < nf; ++j) res.coefficients[j] = raw.x[j] - raw.x[nf + j];

    // Certificate: the reported optimum must be achieved by the returned
    // coefficients when the objective is recomputed from scratch.
    Rat recomputed(0);
    for (int d = 0; d <= n; ++d) {
        Rat p(0);
        for (int j = 0; j < nf; ++j) p += res.coefficients[j] * inst.design[d][j];
        recomputed += inst.weights[d] * rat_abs(inst.target[d] - p);
    }
    if (recomputed != res.optimum)
        throw ConsistencyError("l1_distance: optimum certificate failed (objective recomputation)");
    return res;
}

// ==========================================================================
// Float L1 regression: primal exchange simplex.
//
// The iterate is always an interpolation vertex: a set B of p rows with
// phi_B c = y_B. A step swaps one basis row for the row at the weighted
// median of the residual breakpoints along the exchange direction, which
// passes through many sign changes per pivot; this is the classical simplex
// specialization for L1 fitting. Most-violated pivoting with a smallest-index
// fallback after degenerate steps provides anti-cycling in practice, with an
// iteration cap as the final guard.
// ==========================================================================

namespace {

constexpr double kDualTol = 1e-9;
constexpr double kPivTol = 1e-10;
constexpr double kResZero = 1e-13;

inline bool zero_resid(double r) { return std::fabs(r) <= kResZero; }

struct ExchangeState {
    const FeatureSource& src;
    int p, n;
    long iterations = 0;
    bool rank_flagged = false;

    std::vector<int> basis;        // p row ids; anchors get id n + j
    std::vector<double> binv;      // inverse of the matrix whose ROWS are phi_{basis};
                                   // binv[j*p + slot] solves coef j from rhs slot
    std::vector<double> coef;
    std::vector<double> resid;     // residuals y_i - phi_i c, real rows
    std::vector<int8_t> in_basis;
    std::vector<double> g;         // sum over off-basis rows of w_i sign(r_i) phi_i
    std::vector<double> scratch;
    std::vector<double> anchor_y;  // pinned coefficient values for anchor rows
    std::vector<double> warm_coef; // coordinate-descent solution (fallback)
    std::vector<int8_t> anchor_pinned;

    explicit ExchangeState(const FeatureSource& s)
        : src(s), p(s.cols()), n(s.rows()), scratch(s.cols()) {}

    void row_of(int id, double* out) const {
        if (id < n) {
            src.write(id, out);
        } else {
            std::fill(out, out + p, 0.0);
            out[id - n] = 1.0;  // rank anchor
        }
    }

    double y_of(int id) const { return id < n ? src.y(id) : anchor_y[id - n]; }

    // Exact coordinate descent: each coefficient's subproblem is a weighted
    // median, solved by expected-linear-time selection. Lands on a
    // coordinate-wise optimum that interpolates many rows; used as the
    // starting point of the exchange phase.
    static double weighted_median(std::vector<std::pair<double, double>>& vw) {
        // smallest v with cumulative weight(<= v) >= half the total
        double total = 0;
        for (const auto& [v, w] : vw) total += w;
        const double half = total / 2;
        size_t lo = 0, hi = vw.size();
        double below = 0;  // weight strictly left of [lo, hi)
        while (hi - lo > 1) {
            const size_t mid = lo + (hi - lo) / 2;
            std::nth_element(vw.begin() + lo, vw.begin() + mid, vw.begin() + hi,
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            double left = below;
            for (size_t i = lo; i < mid; ++i) left += vw[i].second;
            if (left + vw[mid].second >= half && left < half) return vw[mid].first;
            if (left >= half) {
                hi = mid;
            } else {
                below = left + vw[mid].second;
                lo = mid + 1;
                if (lo == hi) return vw[mid].first;
            }
        }
        return vw[lo].first;
    }

    // Iteratively reweighted least squares with conjugate-gradient solves:
    // smooth surrogate minimization that is immune to the lattice kink
    // structure. Monomial designs are near-orthogonal, so CG needs few
    // iterations.
    std::vector<double> irls_coef() {
        std::vector<double> c(p, 0.0), r(p), z(p), q(p), pred(n, 0.0);
        std::vector<double> omega(n), rhs(p);
        auto matvec = [&](const std::vector<double>& x, std::vector<double>& out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                const double t = omega[i] * src.dot(i, x.data());
                if (t == 0) continue;
                src.write(i, scratch.data());
                for (int j = 0; j < p; ++j) out[j] += t * scratch[j];
            }
        };
        double eps = 1.0;
        for (int outer = 0; outer < 6; ++outer) {
            for (int i = 0; i < n; ++i)
                omega[i] = src.w(i) / std::max(std::fabs(src.y(i) - pred[i]), eps);
            std::fill(rhs.begin(), rhs.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                const double t = omega[i] * src.y(i);
                if (t == 0) continue;
                src.write(i, scratch.data());
                for (int j = 0; j < p; ++j) rhs[j] += t * scratch[j];
            }
            matvec(c, q);
            for (int j = 0; j < p; ++j) r[j] = rhs[j] - q[j];
            z = r;
            double rho_old = 0;
            for (int j = 0; j < p; ++j) rho_old += r[j] * r[j];
            const double cg_tol = 1e-12 * (1 + rho_old);
            for (int it = 0; it < 50 && rho_old > cg_tol; ++it) {
                matvec(z, q);
                double zq = 0;
                for (int j = 0; j < p; ++j) zq += z[j] * q[j];
                if (zq <= 0) break;
                const double a = rho_old / zq;
                double rho_new = 0;
                for (int j = 0; j < p; ++j) {
                    c[j] += a * z[j];
                    r[j] -= a * q[j];
                    rho_new += r[j] * r[j];
                }
                const double beta = rho_new / rho_old;
                for (int j = 0; j < p; ++j) z[j] = r[j] + beta * z[j];
                rho_old = rho_new;
            }
            for (int i = 0; i < n; ++i) pred[i] = src.dot(i, c.data());
            eps *= 0.1;
        }
        return c;
    }

    std::vector<double> cd_warm_coef(std::vector<double>& resid_out) {
        std::vector<double> c = irls_coef();
        std::vector<double> col(n);
        resid_out.resize(n);
        for (int i = 0; i < n; ++i) resid_out[i] = src.y(i) - src.dot(i, c.data());
        std::vector<std::pair<double, double>> vw;
        vw.reserve(n);
        double prev_obj = -1;
        for (int sweep = 0; sweep < 12; ++sweep) {
            for (int j = 0; j < p; ++j) {
                // The step minimizing sum_i w_i |r_i - delta phi_ij| is the
                // weighted median of r_i / phi_ij with weights w_i |phi_ij|.
                vw.clear();
                for (int i = 0; i < n; ++i) col[i] = src.at(i, j);
                for (int i = 0; i < n; ++i) {
                    if (col[i] == 0 || src.w(i) == 0) continue;
                    vw.emplace_back(resid_out[i] / col[i], src.w(i) * std::fabs(col[i]));
                }
                if (vw.empty()) continue;
                const double delta = weighted_median(vw);
                if (delta == 0) continue;
                c[j] += delta;
                for (int i = 0; i < n; ++i) resid_out[i] -= delta * col[i];
            }
            double obj = 0;
            for (int i = 0; i < n; ++i) obj += src.w(i) * std::fabs(resid_out[i]);
            if (std::getenv("CUBELAB_LP_DEBUG"))
                std::fprintf(stderr, "[l1_fit]   cd sweep %d obj %.9f\n", sweep, obj);
            if (prev_obj >= 0 && prev_obj - obj <= 1e-12 * (1 + obj)) break;
            prev_obj = obj;
        }
        return c;
    }

    // Starting basis at the coordinate-descent point: greedily pick
    // independent rows it interpolates exactly; pin the remaining
    // coefficients with zero-weight anchor rows carrying the CD values, so
    // the initial vertex *is* the CD point. Anchors have weight zero and
    // leave the basis on their own once the exchange frees those
    // coefficients.
    void initial_basis() {
        std::vector<double> resid_cd;
        std::vector<double> c_cd = cd_warm_coef(resid_cd);
        anchor_y.assign(p, 0.0);
        anchor_pinned.assign(p, 0);

        std::vector<int> order;
        order.reserve(n);
        for (int i = 0; i < n; ++i)
            if (std::fabs(resid_cd[i]) <= 1e-7) order.push_back(i);

        std::vector<std::vector<double>> ortho;
        basis.clear();
        std::vector<double> row(p);
        for (int i : order) {
            if (static_cast<int>(basis.size()) == p) break;
            src.write(i, row.data());
            double norm0 = 0;
            for (int j = 0; j < p; ++j) norm0 += row[j] * row[j];
            if (norm0 == 0) continue;
            for (const auto& q : ortho) {
                double f = 0;
                for (int j = 0; j < p; ++j) f += q[j] * row[j];
                if (f == 0) continue;
                for (int j = 0; j < p; ++j) row[j] -= f * q[j];
            }
            double norm1 = 0;
            for (int j = 0; j < p; ++j) norm1 += row[j] * row[j];
            // Strong independence required: a skipped row merely leaves its
            // coefficients anchored at the warm point, while a nearly
            // dependent row would blow the starting vertex up.
            if (norm1 < 0.01 * norm0) continue;
            const double inv = 1.0 / std::sqrt(norm1);
            for (int j = 0; j < p; ++j) row[j] *= inv;
            ortho.push_back(row);
            basis.push_back(i);
        }
        // Pin the uncovered directions at the CD coefficients. Anchors need
        // the same strong-independence gate: a weakly independent anchor on
        // top of nearly consistent rows amplifies their 1e-7 residuals into
        // O(1) coefficient error.
        for (int a = 0; a < p && static_cast<int>(basis.size()) < p; ++a) {
            std::fill(row.begin(), row.end(), 0.0);
            row[a] = 1.0;
            for (const auto& q : ortho) {
                double f = 0;
                for (int j = 0; j < p; ++j) f += q[j] * row[j];
                if (f == 0) continue;
                for (int j = 0; j < p; ++j) row[j] -= f * q[j];
            }
            double norm1 = 0;
            for (int j = 0; j < p; ++j) norm1 += row[j] * row[j];
            if (norm1 < 0.01) continue;
            const double inv = 1.0 / std::sqrt(norm1);
            for (int j = 0; j < p; ++j) row[j] *= inv;
            ortho.push_back(row);
            anchor_y[a] = c_cd[a];
            basis.push_back(n + a);
        }
        if (static_cast<int>(basis.size()) < p) {
            // Conditioning gates left holes; fall back to the all-anchor
            // basis, whose vertex is exactly the warm point.
            basis.clear();
            for (int a = 0; a < p; ++a) {
                anchor_y[a] = c_cd[a];
                basis.push_back(n + a);
            }
        }
        warm_coef = std::move(c_cd);
    }

    double objective_at(const double* c) const {
        double obj = 0;
        for (int i = 0; i < n; ++i) obj += src.w(i) * std::fabs(src.y(i) - src.dot(i, c));
        return obj;
    }

    // Build the starting vertex; if the mixed rows+anchors system still came
    // out worse than the warm point, restart from the all-anchor basis.
    void start() {
        initial_basis();
        refactor();
        const double warm_obj = objective_at(warm_coef.data());
        if (objective_at(coef.data()) > warm_obj + 1e-9 * (1 + warm_obj)) {
            basis.clear();
            for (int a = 0; a < p; ++a) {
                anchor_y[a] = warm_coef[a];
                basis.push_back(n + a);
            }
            refactor();
        }
    }

    // Rebuild binv (Gauss-Jordan), coefficients, residuals and g.
    void refactor() {
        std::vector<double> mat(static_cast<size_t>(p) * p);
        std::vector<double> row(p);
        for (int r = 0; r < p; ++r) {
            row_of(basis[r], row.data());
            for (int j = 0; j < p; ++j) mat[static_cast<size_t>(r) * p + j] = row[j];
        }
        std::vector<double> inv(static_cast<size_t>(p) * p, 0.0);
        for (int r = 0; r < p; ++r) inv[static_cast<size_t>(r) * p + r] = 1.0;
        for (int c = 0; c < p; ++c) {
            int piv = -1;
            double best = kPivTol;
            for (int r = c; r < p; ++r) {
                const double v = std::fabs(mat[static_cast<size_t>(r) * p + c]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (piv < 0) throw ConsistencyError("l1_fit: basis became singular");
            if (piv != c) {
                for (int j = 0; j < p; ++j) {
                    std::swap(mat[static_cast<size_t>(piv) * p + j],
                              mat[static_cast<size_t>(c) * p + j]);
                    std::swap(inv[static_cast<size_t>(piv) * p + j],
                              inv[static_cast<size_t>(c) * p + j]);
                }
                std::swap(basis[piv], basis[c]);
            }
            const double d = 1.0 / mat[static_cast<size_t>(c) * p + c];
            for (int j = 0; j < p; ++j) {
                mat[static_cast<size_t>(c) * p + j] *= d;
                inv[static_cast<size_t>(c) * p + j] *= d;
            }
            for (int r = 0; r < p; ++r) {
                if (r == c) continue;
                const double f = mat[static_cast<size_t>(r) * p + c];
                if (f == 0) continue;
                for (int j = 0; j < p; ++j) {
                    mat[static_cast<size_t>(r) * p + j] -= f * mat[static_cast<size_t>(c) * p + j];
                    inv[static_cast<size_t>(r) * p + j] -= f * inv[static_cast<size_t>(c) * p + j];
                }
            }
        }
        binv = std::move(inv);

        std::vector<double> yb(p);
        for (int r = 0; r < p; ++r) yb[r] = y_of(basis[r]);
        coef.assign(p, 0.0);
        for (int j = 0; j < p; ++j) {
            double acc = 0;
            for (int r = 0; r < p; ++r) acc += binv[static_cast<size_t>(j) * p + r] * yb[r];
            coef[j] = acc;
        }
        in_basis.assign(n, 0);
        for (int id : basis)
            if (id < n) in_basis[id] = 1;
        recompute_residuals();
        recompute_g();
    }

    void recompute_residuals() {
        resid.resize(n);
        for (int i = 0; i < n; ++i)
            resid[i] = in_basis[i] ? 0.0 : src.y(i) - src.dot(i, coef.data());
    }

    void recompute_g() {
        g.assign(p, 0.0);
        for (int i = 0; i < n; ++i) {
            if (in_basis[i] || zero_resid(resid[i])) continue;
            add_row_to_g(i, resid[i] > 0 ? src.w(i) : -src.w(i));
        }
    }

    void add_row_to_g(int i, double factor) {
        src.write(i, scratch.data());
        for (int j = 0; j < p; ++j) g[j] += factor * scratch[j];
    }

    // One exchange step. Returns the step length taken, or nullopt when
    // dual-feasible (optimal).
    std::optional<double> step(bool bland) {
        // u = B^{-T} g: basis multipliers are -u.
        std::vector<double> u(p, 0.0);
        for (int j = 0; j < p; ++j) {
            const double gj = g[j];
            if (gj == 0) continue;
            const double* brow = &binv[static_cast<size_t>(j) * p];
            for (int slot = 0; slot < p; ++slot) u[slot] += gj * brow[slot];
        }

        // Steepest-edge-style selection: scale the dual violation by the
        // length of the exchange direction for that slot.
        int leave_slot = -1;
        double worst = 0;
        std::vector<double> colnorm_sq(p, 0.0);
        for (int j = 0; j < p; ++j) {
            const double* brow = &binv[static_cast<size_t>(j) * p];
            for (int slot = 0; slot < p; ++slot) colnorm_sq[slot] += brow[slot] * brow[slot];
        }
        for (int slot = 0; slot < p; ++slot) {
            const int id = basis[slot];
            if (id >= n && anchor_pinned[id - n]) continue;
            const double wj = id < n ? src.w(id) : 0.0;
            const double excess = std::fabs(u[slot]) - wj;
            if (excess <= kDualTol) continue;
            const double score = excess * excess / std::max(colnorm_sq[slot], 1e-300);
            if (leave_slot < 0 || score > worst) {
                worst = score;
                leave_slot = slot;
                if (bland) break;  // smallest slot with a violation
            }
        }
        if (leave_slot < 0) return std::nullopt;

        // Direction d with phi_B d = s e_slot; descent rate w_j - |u| < 0.
        const double s = u[leave_slot] > 0 ? 1.0 : -1.0;
        std::vector<double> d(p);
        for (int j = 0; j < p; ++j) d[j] = s * binv[static_cast<size_t>(j) * p + leave_slot];

        std::vector<double> h(n);
        for (int i = 0; i < n; ++i) h[i] = in_basis[i] ? 0.0 : src.dot(i, d.data());

        const int leave_row = basis[leave_slot];
        const double leave_w = leave_row < n ? src.w(leave_row) : 0.0;
        double slope = leave_w - std::fabs(u[leave_slot]);

        // Zero-residual off-basis rows contribute +w|h| for any t > 0.
        struct Breakpoint {
            double t;
            int row;
        };
        std::vector<Breakpoint> bps;
        for (int i = 0; i < n; ++i) {
            if (in_basis[i] || h[i] == 0) continue;
            if (zero_resid(resid[i])) {
                slope += src.w(i) * std::fabs(h[i]);
                continue;
            }
            const double t = resid[i] / h[i];
            if (t > 0) bps.push_back({t, i});
        }
        std::sort(bps.begin(), bps.end(), [](const Breakpoint& a, const Breakpoint& b) {
            return a.t < b.t || (a.t == b.t && a.row < b.row);
        });

        int enter = -1;
        double T = 0;
        size_t crossed_until = 0;
        for (size_t bi = 0; bi < bps.size(); ++bi) {
            slope += 2 * src.w(bps[bi].row) * std::fabs(h[bps[bi].row]);
            if (slope >= 0) {
                enter = bps[bi].row;
                T = bps[bi].t;
                crossed_until = bi;  // rows before bi flip sign
                break;
            }
        }
        if (enter < 0) {
            if (slope >= -kDualTol && !bps.empty()) {
                enter = bps.back().row;
                T = bps.back().t;
                crossed_until = bps.size() - 1;
            } else if (leave_row >= n) {
                // Freeing this pinned coefficient found no blocking row: the
                // direction is outside the row span. Pin the anchor for good.
                anchor_pinned[leave_row - n] = 1;
                rank_flagged = true;
                return 0.0;
            } else {
                throw ConsistencyError("l1_fit: unbounded descent direction");
            }
        }

        // g bookkeeping: strictly crossed rows flip sign; rows stopping
        // exactly at T land on zero residual and drop out of the sum, as does
        // the entering row; the leaving row joins it with sign -s.
        for (size_t bi = 0; bi < crossed_until; ++bi) {
            const int i = bps[bi].row;
            const double w = src.w(i);
            const double out_sign = resid[i] > 0 ? w : -w;
            add_row_to_g(i, bps[bi].t == T ? -out_sign : -2 * out_sign);
        }
        add_row_to_g(enter, resid[enter] > 0 ? -src.w(enter) : src.w(enter));
        if (leave_row < n) add_row_to_g(leave_row, -s * src.w(leave_row));
        // (a leaving anchor has zero weight and never contributes to g)

        for (int j = 0; j < p; ++j) coef[j] += T * d[j];
        for (int i = 0; i < n; ++i)
            if (!in_basis[i]) resid[i] -= T * h[i];
        for (size_t bi = 0; bi < crossed_until; ++bi)
            if (bps[bi].t == T) resid[bps[bi].row] = 0;
        resid[enter] = 0;
        if (leave_row < n) {
            in_basis[leave_row] = 0;
            resid[leave_row] = -T * s;
        }
        in_basis[enter] = 1;

        // Row replacement: Bm_new = Bm + e_slot (phi_enter - phi_leave)^T.
        // With alpha = binv-weighted image of the new row, update the inverse
        // in place.
        src.write(enter, scratch.data());
        std::vector<double> alpha(p, 0.0);
        for (int j = 0; j < p; ++j) {
            const double f = scratch[j];
            if (f == 0) continue;
            const double* brow = &binv[static_cast<size_t>(j) * p];
            for (int slot = 0; slot < p; ++slot) alpha[slot] += f * brow[slot];
        }
        const double piv = alpha[leave_slot];
        basis[leave_slot] = enter;
        if (std::fabs(piv) < kPivTol) {
            rank_flagged = true;
            refactor();  // bad exchange numerically; rebuild from scratch
        } else {
            const double inv_piv = 1.0 / piv;
            for (int j = 0; j < p; ++j) {
                double* brow = &binv[static_cast<size_t>(j) * p];
                const double bj = brow[leave_slot] * inv_piv;
                if (bj == 0) continue;
                for (int slot = 0; slot < p; ++slot) brow[slot] -= bj * alpha[slot];
                brow[leave_slot] = bj;
            }
        }
        ++iterations;
        return T;
    }
};

}  // namespace

L1FitResult l1_fit(const FeatureSource& src, long iteration_limit) {
    const int p = src.cols();
    const int n = src.rows();
    if (p < 1 || n < 1) throw std::domain_error("l1_fit: empty problem");
    if (p > n) throw std::domain_error("l1_fit: feature count exceeds row count");

    const bool debug = std::getenv("CUBELAB_LP_DEBUG") != nullptr;
    const auto t0 = std::chrono::steady_clock::now();

    // Boolean-lattice instances are massively degenerate (whole blocks of
    // rows sit at zero residual); a deterministic micro-perturbation of the
    // labels breaks the ties and shortens the vertex path. The objective
    // shift is at most 2^-31 times the total weight.
    struct Perturbed final : FeatureSource {
        const FeatureSource& base;
        explicit Perturbed(const FeatureSource& b) : base(b) {}
        int rows() const override { return base.rows(); }
        int cols() const override { return base.cols(); }
        double w(int i) const override { return base.w(i); }
        double dot(int i, const double* v) const override { return base.dot(i, v); }
        void write(int i, double* out) const override { base.write(i, out); }
        double at(int i, int j) const override { return base.at(i, j); }
        double y(int i) const override {
            uint64_t h = 0x9e3779b97f4a7c15ull * (static_cast<uint64_t>(i) + 1);
            h ^= h >> 29;
            h *= 0xbf58476d1ce4e5b9ull;
            h ^= h >> 32;
            return base.y(i) + (static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5) * 0x1.0p-30;
        }
    } perturbed(src);

    ExchangeState st(perturbed);
    st.start();
    if (debug) {
        double obj0 = 0;
        for (int i = 0; i < n; ++i)
            obj0 += src.w(i) * std::fabs(src.y(i) - src.dot(i, st.coef.data()));
        std::fprintf(stderr, "[l1_fit] start obj %.9f\n", obj0);
    }

    L1FitResult res;
    res.converged = false;
    long since_refresh = 0;
    int degenerate_run = 0;
    while (st.iterations < iteration_limit) {
        const auto moved = st.step(degenerate_run > 32);
        if (!moved) {
            res.converged = true;
            break;
        }
        degenerate_run = (*moved <= kResZero) ? degenerate_run + 1 : 0;
        if (++since_refresh >= 64) {
            st.recompute_residuals();
            st.recompute_g();
            since_refresh = 0;
        }
        if (debug && st.iterations % 1000 == 0) {
            double obj = 0;
            for (int i = 0; i < n; ++i)
                obj += src.w(i) * std::fabs(src.y(i) - src.dot(i, st.coef.data()));
            std::fprintf(stderr, "[l1_fit]   iter %ld obj %.9f\n", st.iterations, obj);
        }
    }
    if (debug)
        std::fprintf(stderr, "[l1_fit] n=%d p=%d iters=%ld %.2fs%s\n", n, p, st.iterations,
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                     res.converged ? "" : " (iteration limit)");

    res.iterations = st.iterations;
    res.rank_flagged = st.rank_flagged;
    res.coefficients = st.coef;

    double primal = 0;
    for (int i = 0; i < n; ++i) primal += src.w(i) * std::fabs(src.y(i) - src.dot(i, st.coef.data()));
    res.objective = primal;
    if (!res.converged) {
        // Iteration limit: report the better of the final vertex and the
        // coordinate-descent point (best bound semantics).
        double warm_obj = 0;
        for (int i = 0; i < n; ++i)
            warm_obj += src.w(i) * std::fabs(src.y(i) - src.dot(i, st.warm_coef.data()));
        if (warm_obj < primal) {
            res.coefficients = st.warm_coef;
            res.objective = warm_obj;
        }
    }

    // Dual certificate: lambda_i = w_i sign(r_i) off-basis and -u on the
    // basis satisfy the equality constraint by construction; their objective
    // matches the primal value at optimality.
    {
        std::vector<double> u(p, 0.0);
        for (int j = 0; j < p; ++j) {
            const double gj = st.g[j];
            if (gj == 0) continue;
            const double* brow = &st.binv[static_cast<size_t>(j) * p];
            for (int slot = 0; slot < p; ++slot) u[slot] += gj * brow[slot];
        }
        double dual = 0;
        for (int i = 0; i < n; ++i) {
            if (st.in_basis[i] || zero_resid(st.resid[i])) continue;
            dual += (st.resid[i] > 0 ? src.w(i) : -src.w(i)) * src.y(i);
        }
        for (int slot = 0; slot < p; ++slot)
            dual -= u[slot] * st.y_of(st.basis[slot]);
        res.dual_objective = dual;
    }
    return res;
}

namespace {

class DenseSource final : public FeatureSource {
public:
    DenseSource(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                const std::vector<double>& w)
        : x_(X), y_(y), w_(w) {}
    int rows() const override { return static_cast<int>(x_.size()); }
    int cols() const override { return static_cast<int>(x_.front().size()); }
    double y(int i) const override { return y_[i]; }
    double w(int i) const override { return w_[i]; }
    double dot(int i, const double* v) const override {
        const auto& row = x_[i];
        double acc = 0;
        for (size_t j = 0; j < row.size(); ++j) acc += row[j] * v[j];
        return acc;
    }
    void write(int i, double* out) const override {
        const auto& row = x_[i];
        std::copy(row.begin(), row.end(), out);
    }
    double at(int i, int j) const override { return x_[i][j]; }

private:
    const std::vector<std::vector<double>>& x_;
    const std::vector<double>& y_;
    const std::vector<double>& w_;
};

}  // namespace

L1FitResult l1_fit(const std::vector<std::vector<double>>& features, const std::vector<double>& y,
                   const std::vector<double>& w, long iteration_limit) {
    if (features.empty()) throw std::domain_error("l1_fit: no rows");
    if (features.size() != y.size() || y.size() != w.size())
        throw std::domain_error("l1_fit: row/label/weight size mismatch");
    DenseSource src(features, y, w);
    return l1_fit(src, iteration_limit);
}

}  // namespace cubelab
