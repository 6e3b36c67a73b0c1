#include "mobai/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include <gmpxx.h>

#include "mobai/error.hpp"

namespace mobai {

void LinearProgram::validate() const {
    const std::size_t n = variables();
    if (lower_bounds.size() != n) throw InvalidShape("lower_bounds length must match objective");
    for (double lb : lower_bounds) {
        if (!std::isfinite(lb)) throw InvalidShape("lower bounds must be finite");
    }
    for (const auto* rows : {&equalities, &inequalities}) {
        for (const auto& row : *rows) {
            if (row.coeffs.size() != n) throw InvalidShape("constraint row length mismatch");
        }
    }
}

namespace {

// Scalar policy for the simplex. Doubles use tolerances; rationals are exact.
template <typename T>
struct Arith;

template <>
struct Arith<double> {
    static constexpr double pivot_tol = 1e-9;
    static constexpr double cost_tol = 1e-9;
    static double tie(double best) { return 1e-12 * (1.0 + std::abs(best)); }
    static bool nonzero(double v) { return std::abs(v) > 1e-9; }
    static double abs(double v) { return std::abs(v); }
};

template <>
struct Arith<mpq_class> {
    static inline const mpq_class pivot_tol{0};
    static inline const mpq_class cost_tol{0};
    static mpq_class tie(const mpq_class&) { return 0; }
    static bool nonzero(const mpq_class& v) { return sgn(v) != 0; }
    static mpq_class abs(const mpq_class& v) { return ::abs(v); }
};

double to_double(double v) { return v; }
double to_double(const mpq_class& v) { return v.get_d(); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Tableau with an objective row holding reduced costs z_j - c_j and the
// current objective value in the rhs slot.
template <typename T>
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), cells_((rows + 1) * (cols + 1), T(0)), basis_(rows, 0) {}

    T& at(std::size_t r, std::size_t c) { return cells_[r * (cols_ + 1) + c]; }
    const T& at(std::size_t r, std::size_t c) const { return cells_[r * (cols_ + 1) + c]; }
    T& rhs(std::size_t r) { return at(r, cols_); }
    const T& rhs(std::size_t r) const { return at(r, cols_); }
    const T& cost(std::size_t c) const { return at(rows_, c); }
    const T& objective() const { return at(rows_, cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }
    const std::vector<std::size_t>& basis() const { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const std::size_t width = cols_ + 1;
        T* prow = &cells_[pr * width];
        const T inv = T(1) / prow[pc];
        // Rationals are expensive enough that skipping zeros pays; doubles
        // vectorize better without the branch.
        constexpr bool sparse = !std::is_floating_point_v<T>;
        for (std::size_t c = 0; c < width; ++c) {
            if (!sparse || prow[c] != 0) prow[c] *= inv;
        }
        prow[pc] = 1;
        T f;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            T* row = &cells_[r * width];
            if (row[pc] == 0) continue;
            f = row[pc];
            for (std::size_t c = 0; c < width; ++c) {
                if (!sparse || prow[c] != 0) row[c] -= f * prow[c];
            }
            row[pc] = 0;
        }
        basis_[pr] = pc;
        ++pivots_;
    }

    // Rebuild the objective row for cost vector c (maximization).
    void set_costs(const std::vector<T>& c) {
        for (std::size_t j = 0; j <= cols_; ++j) at(rows_, j) = 0;
        for (std::size_t j = 0; j < cols_; ++j) at(rows_, j) = -c[j];
        for (std::size_t r = 0; r < rows_; ++r) {
            const T& cb = c[basis_[r]];
            if (cb == 0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) at(rows_, j) += cb * at(r, j);
        }
    }

    void drop_row(std::size_t r) {
        const std::size_t width = cols_ + 1;
        cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(r * width),
                     cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

    std::size_t pivots() const { return pivots_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<T> cells_;
    std::vector<std::size_t> basis_;
    std::size_t pivots_ = 0;
};

enum class Outcome { optimal, unbounded, stalled };

// Primal simplex with Bland's rule over columns [0, allowed).
template <typename T>
Outcome run_simplex(Tableau<T>& t, std::size_t allowed, const T& cost_tol, std::size_t limit) {
    using A = Arith<T>;
    for (std::size_t iter = 0; iter < limit; ++iter) {
        std::size_t enter = allowed;
        for (std::size_t j = 0; j < allowed; ++j) {
            if (t.cost(j) < -cost_tol) {
                enter = j;
                break;
            }
        }
        if (enter == allowed) return Outcome::optimal;

        std::size_t leave = t.rows();
        T best_ratio = T(0);
        T ratio;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const T& a = t.at(r, enter);
            if (a <= A::pivot_tol) continue;
            ratio = t.rhs(r) > 0 ? T(t.rhs(r) / a) : T(0);
            if (leave == t.rows()) {
                best_ratio = ratio;
                leave = r;
                continue;
            }
            const T tie = A::tie(best_ratio);
            if (ratio < best_ratio - tie) {
                best_ratio = ratio;
                leave = r;
            } else if (ratio <= best_ratio + tie && t.basis()[r] < t.basis()[leave]) {
                if (ratio < best_ratio) best_ratio = ratio;
                leave = r;
            }
        }
        if (leave == t.rows()) return Outcome::unbounded;
        t.pivot(leave, enter);
    }
    return Outcome::stalled;
}

// Standard form: x = y + lb with y >= 0, every row oriented to rhs >= 0.
template <typename T>
struct StandardForm {
    struct Row {
        std::vector<T> a;
        T b;
        int slack;  // +1 slack, -1 surplus, 0 none
        bool artificial;
    };
    std::vector<Row> rows;
    std::size_t n = 0;
    std::size_t n_slack = 0;
    std::size_t n_art = 0;

    explicit StandardForm(const LinearProgram& lp) : n(lp.variables()) {
        const std::vector<T> lb(lp.lower_bounds.begin(), lp.lower_bounds.end());
        auto add = [&](const LinearConstraint& c, bool equality) {
            Row row{std::vector<T>(c.coeffs.begin(), c.coeffs.end()), T(c.rhs),
                    equality ? 0 : 1, equality};
            for (std::size_t j = 0; j < n; ++j) {
                if (row.a[j] != 0 && lb[j] != 0) row.b -= row.a[j] * lb[j];
            }
            if (row.b < 0) {
                for (T& v : row.a) v = -v;
                row.b = -row.b;
                if (!equality) {
                    row.slack = -1;
                    row.artificial = true;
                }
            }
            n_art += row.artificial ? 1 : 0;
            rows.push_back(std::move(row));
        };
        rows.reserve(lp.inequalities.size() + lp.equalities.size());
        for (const auto& c : lp.inequalities) add(c, false);
        for (const auto& c : lp.equalities) add(c, true);
        n_slack = lp.inequalities.size();
    }

    std::size_t art_begin() const { return n + n_slack; }
    std::size_t cols() const { return art_begin() + n_art; }
};

template <typename T>
struct Solved {
    LpStatus status = LpStatus::infeasible;
    bool stalled = false;
    std::size_t pivots = 0;
    std::vector<std::size_t> basis;
    std::vector<std::size_t> origin;  // tableau row -> standard-form row
    std::vector<std::size_t> art_col;
    std::vector<T> basic;
};

template <typename T>
Solved<T> simplex_two_phase(const LinearProgram& lp, const StandardForm<T>& sf,
                            std::size_t limit) {
    using A = Arith<T>;
    const std::size_t n = sf.n;
    const std::size_t art_begin = sf.art_begin();
    const std::size_t cols = sf.cols();
    const auto& rows = sf.rows;

    Solved<T> out;
    Tableau<T> t(rows.size(), cols);
    std::size_t art = art_begin;
    out.art_col.assign(rows.size(), cols);
    out.origin.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.origin[r] = r;
        for (std::size_t j = 0; j < n; ++j) t.at(r, j) = rows[r].a[j];
        if (r < sf.n_slack) t.at(r, n + r) = rows[r].slack;
        t.rhs(r) = rows[r].b;
        if (rows[r].artificial) {
            t.at(r, art) = 1;
            out.art_col[r] = art;
            t.basis()[r] = art++;
        } else {
            t.basis()[r] = n + r;
        }
    }

    if (sf.n_art > 0) {
        std::vector<T> phase1(cols, T(0));
        for (std::size_t j = art_begin; j < cols; ++j) phase1[j] = -1;
        t.set_costs(phase1);
        if (run_simplex(t, cols, A::cost_tol, limit) == Outcome::stalled) {
            out.stalled = true;
            return out;
        }
        T scale = 1;
        for (const auto& r : rows) {
            if (A::abs(r.b) > scale) scale = A::abs(r.b);
        }
        if (t.objective() < -(A::pivot_tol * scale)) {
            out.pivots = t.pivots();
            return out;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        for (std::size_t r = 0; r < t.rows();) {
            if (t.basis()[r] < art_begin) {
                ++r;
                continue;
            }
            std::size_t col = art_begin;
            for (std::size_t j = 0; j < art_begin; ++j) {
                if (A::nonzero(t.at(r, j))) {
                    col = j;
                    break;
                }
            }
            if (col == art_begin) {
                t.drop_row(r);
                out.origin.erase(out.origin.begin() + static_cast<std::ptrdiff_t>(r));
            } else {
                t.pivot(r, col);
                ++r;
            }
        }
    }

    std::vector<T> phase2(cols, T(0));
    T cmax = 1;
    for (std::size_t j = 0; j < n; ++j) {
        phase2[j] = lp.objective[j];
        if (A::abs(phase2[j]) > cmax) cmax = A::abs(phase2[j]);
    }
    t.set_costs(phase2);
    const Outcome outcome = run_simplex(t, art_begin, T(A::cost_tol * cmax), limit);
    out.pivots = t.pivots();
    if (outcome == Outcome::stalled) {
        out.stalled = true;
        return out;
    }
    if (outcome == Outcome::unbounded) {
        out.status = LpStatus::unbounded;
        return out;
    }
    out.status = LpStatus::optimal;
    out.basis = t.basis();
    out.basic.resize(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) out.basic[r] = t.rhs(r);
    return out;
}

// Solves a x = b in place (a is n x n row-major) by Gaussian elimination with
// partial pivoting. Returns false if a is numerically singular.
bool dense_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
        }
        if (std::abs(a[p * n + c]) < 1e-300) return false;
        if (p != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[p * n + k], a[c * n + k]);
            std::swap(b[p], b[c]);
        }
        const double inv = 1.0 / a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] * inv;
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = n; c-- > 0;) {
        double v = b[c];
        for (std::size_t k = c + 1; k < n; ++k) v -= a[c * n + k] * b[k];
        b[c] = v / a[c * n + c];
    }
    return true;
}

// Recompute the basic values from the original rows so that rounding
// accumulated over the pivots does not leak into the solution.
void reinvert(const StandardForm<double>& sf, Solved<double>& s) {
    const std::size_t m = s.basis.size();
    const std::size_t n = sf.n;
    const std::size_t art_begin = sf.art_begin();
    auto entry = [&](std::size_t row, std::size_t col) {
        if (col < n) return sf.rows[row].a[col];
        if (col < art_begin) return col - n == row ? static_cast<double>(sf.rows[row].slack) : 0.0;
        return s.art_col[row] == col ? 1.0 : 0.0;
    };
    std::vector<double> b_mat(m * m);
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        rhs[i] = sf.rows[s.origin[i]].b;
        for (std::size_t k = 0; k < m; ++k) b_mat[i * m + k] = entry(s.origin[i], s.basis[k]);
    }
    if (dense_solve(b_mat, rhs, m)) s.basic = std::move(rhs);
}

template <typename T>
LpSolution to_solution(const LinearProgram& lp, const Solved<T>& s) {
    LpSolution sol;
    sol.status = s.status;
    sol.pivots = s.pivots;
    if (s.status != LpStatus::optimal) return sol;
    const std::size_t n = lp.variables();
    std::vector<T> x(lp.lower_bounds.begin(), lp.lower_bounds.end());
    for (std::size_t r = 0; r < s.basis.size(); ++r) {
        if (s.basis[r] < n && s.basic[r] > 0) x[s.basis[r]] += s.basic[r];
    }
    sol.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = to_double(x[j]);
    sol.value = dot(lp.objective, sol.x);
    return sol;
}

constexpr double kFeasTol = 1e-9;
// Tableau values this close to feasible are kept without re-inversion.
constexpr double kCleanTol = 1e-12;

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    lp.validate();
    for (const auto* rows : {&lp.equalities, &lp.inequalities}) {
        for (const auto& row : *rows) {
            for (double v : row.coeffs) {
                if (!std::isfinite(v)) throw InvalidShape("constraint coefficients must be finite");
            }
            if (!std::isfinite(row.rhs)) throw InvalidShape("constraint rhs must be finite");
        }
    }
    for (double c : lp.objective) {
        if (!std::isfinite(c)) throw InvalidShape("objective coefficients must be finite");
    }

    // Fast path in floating point. Bland's rule only guarantees termination in
    // exact arithmetic; on badly scaled degenerate vertices rounding in the
    // reduced costs can still send it round a loop. When that happens, or the
    // answer fails its own feasibility check, the same pivoting is redone over
    // the rationals.
    {
        const StandardForm<double> sf(lp);
        const std::size_t limit = 50 * (sf.rows.size() + sf.cols()) + 1000;
        Solved<double> s = simplex_two_phase(lp, sf, limit);
        if (!s.stalled && s.status == LpStatus::optimal) {
            LpSolution sol = to_solution(lp, s);
            if (max_violation(lp, sol.x) <= kCleanTol) return sol;
            reinvert(sf, s);
            sol = to_solution(lp, s);
            if (max_violation(lp, sol.x) <= kFeasTol) return sol;
        }
    }
    const StandardForm<mpq_class> sf(lp);
    const Solved<mpq_class> s =
        simplex_two_phase(lp, sf, std::numeric_limits<std::size_t>::max());
    return to_solution(lp, s);
}

double max_violation(const LinearProgram& lp, std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) worst = std::max(worst, lp.lower_bounds[j] - x[j]);
    for (const auto& c : lp.equalities) worst = std::max(worst, std::abs(dot(c.coeffs, x) - c.rhs));
    for (const auto& c : lp.inequalities) worst = std::max(worst, dot(c.coeffs, x) - c.rhs);
    return worst;
}

LinearProgram build_linearized_lp(const AllocationObjective& objective, std::span<const double> w,
                                  double floor) {
    const std::size_t k = objective.arms();
    if (w.size() != k) throw InvalidShape("weight vector length must equal arm count");
    const std::size_t t_index = k;

    LinearProgram lp;
    lp.objective.assign(k + 1, 0.0);
    lp.objective[t_index] = 1.0;
    lp.lower_bounds.assign(k + 1, floor);

    LinearConstraint simplex{std::vector<double>(k + 1, 1.0), 1.0};
    simplex.coeffs[t_index] = 0.0;
    lp.equalities.push_back(std::move(simplex));

    // t never needs to go below the smallest pair's value at the floor point,
    // since every gradient is non-negative.
    double t_floor = std::numeric_limits<double>::infinity();
    lp.inequalities.reserve(objective.terms().size());
    for (const auto& term : objective.terms()) {
        const double wa = w[term.arm];
        const double wb = w[term.best];
        double da;
        double db;
        if (wa + wb == 0.0 && floor == 0.0) {
            da = db = 0.25 * term.half_sq_gap;
        } else {
            std::tie(da, db) = objective.term_gradient(term, w);
        }
        // Each term is homogeneous of degree one, so its tangent plane passes
        // through the origin: g_p(w) - <grad, w> is zero. Computing it would
        // only add rounding noise to rows that are all degenerate at s = 0,
        // which is enough to make Bland's rule cycle.
        const double base = 0.0;
        LinearConstraint row{std::vector<double>(k + 1, 0.0), base};
        row.coeffs[t_index] = 1.0;
        row.coeffs[term.arm] = -da;
        row.coeffs[term.best] = -db;
        lp.inequalities.push_back(std::move(row));
        t_floor = std::min(t_floor, base + (da + db) * floor);
    }
    lp.lower_bounds[t_index] = std::isfinite(t_floor) ? t_floor : 0.0;
    return lp;
}

LinearProgram build_surrogate_lp(const Instance& inst, std::span<const double> w, double eta) {
    if (!(eta > 0.0)) throw Error("surrogate LP needs eta > 0");
    return build_linearized_lp(AllocationObjective(inst), w, eta_floor(inst.arms(), eta));
}

Surrogate maximize_linearization(const AllocationObjective& objective, std::span<const double> w,
                                 double floor) {
    const LinearProgram lp = build_linearized_lp(objective, w, floor);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal) {
        throw LpInfeasible("linearized allocation LP did not reach an optimum");
    }
    Surrogate out;
    out.proportion.weights.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(objective.arms()));
    out.value = sol.value;
    return out;
}

Surrogate surrogate_proportion(const AllocationObjective& objective, std::span<const double> w,
                               double eta) {
    if (!(eta > 0.0)) throw Error("surrogate proportion needs eta > 0");
    return maximize_linearization(objective, w, eta_floor(objective.arms(), eta));
}

Surrogate surrogate_proportion(const Instance& inst, std::span<const double> w, double eta) {
    if (w.size() != inst.arms()) throw InvalidShape("weight vector length must equal arm count");
    return surrogate_proportion(AllocationObjective(inst), w, eta);
}

}  // namespace mobai
