#include "menuforge/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "menuforge/errors.hpp"

namespace menuforge {
namespace {

constexpr double kPivotTol = 1e-9;        // degeneracy tolerance for pivot selection
constexpr double kRelPivotTol = 1e-7;     // admissible pivots relative to their column scale
constexpr double kStrictRelPivotTol = 1e-5;  // retry admission after a basis decay
constexpr double kRatioTol = 1e-12;       // a ratio this small counts as a degenerate step
constexpr double kPhase1Tol = 1e-8;       // residual artificial mass that still counts as feasible
constexpr double kNoiseTol = 1e-6;        // reduced costs this small are roundoff, not improvement
constexpr double kSingularTol = 1e-11;    // rebuild pivots below this mean the basis decayed
constexpr int kDegenerateStreakLimit = 64;
constexpr int kRebuildBudget = 256;       // refactorizations allowed per phase

// Tightened when a first pass pivots itself into a dependent basis.
struct Knobs {
    double rel_pivot;
    long rebuild_interval;
};

// Internal signal: the recorded basis turned out numerically singular, so the
// whole solve restarts under stricter pivot admission.
struct BasisDecayed {};

// How each original variable maps into the non-negative standard-form space:
// x = offset + sign * z[col] (+ optionally - z[neg_col] for split frees).
struct VarMap {
    double offset = 0.0;
    double sign = 1.0;
    int col = -1;
    int neg_col = -1;  // >= 0 only for split free variables
};

struct Tableau {
    std::size_t rows = 0, cols = 0;        // cols excludes the rhs column
    std::vector<std::vector<double>> t;    // rows x (cols + 1)
    std::vector<double> obj;               // cols + 1; obj[cols] == -objective value
    std::vector<int> basis;                // basic column per row
    std::vector<char> blocked;             // columns barred from entering

    double rhs(std::size_t i) const { return t[i][cols]; }

    void pivot(std::size_t r, std::size_t c) {
        double piv = t[r][c];
        double inv = 1.0 / piv;
        for (auto& v : t[r]) v *= inv;
        t[r][c] = 1.0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            double f = t[i][c];
            if (f == 0.0) continue;
            auto& row = t[i];
            const auto& prow = t[r];
            for (std::size_t j = 0; j <= cols; ++j) row[j] -= f * prow[j];
            row[c] = 0.0;
        }
        double f = obj[c];
        if (f != 0.0) {
            const auto& prow = t[r];
            for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * prow[j];
            obj[c] = 0.0;
        }
        basis[r] = static_cast<int>(c);
    }
};

// Recomputes the tableau for the current basis straight from the pristine
// setup-time rows, discarding error accumulated across pivots. Rows (and the
// basis entries with them) may come out permuted.
void rebuild(Tableau& tb,
             const std::vector<std::vector<double>>& pristine,
             const std::vector<double>& phase_cost) {
    const std::size_t nrows = tb.rows;
    const std::size_t ncols = tb.cols;
    std::vector<std::vector<double>> w = pristine;
    std::vector<int> new_basis(nrows, -1);
    std::vector<char> used(nrows, 0);
    for (int bc : tb.basis) {
        const auto c = static_cast<std::size_t>(bc);
        std::size_t r = nrows;
        double best = kSingularTol;
        for (std::size_t i = 0; i < nrows; ++i) {
            if (used[i]) continue;
            double a = std::fabs(w[i][c]);
            if (a > best) { best = a; r = i; }
        }
        if (r == nrows) throw BasisDecayed{};
        double inv = 1.0 / w[r][c];
        for (auto& v : w[r]) v *= inv;
        w[r][c] = 1.0;
        for (std::size_t i = 0; i < nrows; ++i) {
            if (i == r) continue;
            double f = w[i][c];
            if (f == 0.0) continue;
            auto& row = w[i];
            const auto& prow = w[r];
            for (std::size_t j = 0; j <= ncols; ++j) row[j] -= f * prow[j];
            row[c] = 0.0;
        }
        used[r] = 1;
        new_basis[r] = bc;
    }
    tb.t = std::move(w);
    tb.basis = std::move(new_basis);
    std::fill(tb.obj.begin(), tb.obj.end(), 0.0);
    for (std::size_t j = 0; j < ncols; ++j) tb.obj[j] = phase_cost[j];
    for (std::size_t i = 0; i < nrows; ++i) {
        double cb = phase_cost[static_cast<std::size_t>(tb.basis[i])];
        if (cb == 0.0) continue;
        const auto& row = tb.t[i];
        for (std::size_t j = 0; j <= ncols; ++j) tb.obj[j] -= cb * row[j];
    }
}

// One simplex phase on the current objective row. Returns false when the
// entering column proves the problem unbounded. Verdicts are only trusted on
// a freshly rebuilt tableau: an apparent optimum or unbounded direction found
// after intervening pivots triggers a refactorization and another look. With
// unbounded_impossible set (phase 1, whose objective is bounded below by
// zero) a clean column with no usable pivot entry can only be roundoff, so it
// is retired and the phase goes on.
bool run_phase(Tableau& tb,
               const std::vector<std::vector<double>>& pristine,
               const std::vector<double>& phase_cost,
               bool unbounded_impossible,
               const Knobs& kb) {
    const std::vector<char> entry_blocked = tb.blocked;
    bool bland = false;
    int degenerate_streak = 0;
    int rebuilds_left = kRebuildBudget;
    long since_rebuild = 0;
    auto refresh = [&] {
        rebuild(tb, pristine, phase_cost);
        tb.blocked = entry_blocked;  // noise retirements were basis-relative
        bland = false;
        degenerate_streak = 0;
        --rebuilds_left;
        since_rebuild = 0;
    };
    const long iter_limit = 50000 + 200L * static_cast<long>(tb.rows + tb.cols);
    for (long iter = 0; iter < iter_limit; ++iter) {
        std::size_t enter = tb.cols;
        if (bland) {
            for (std::size_t j = 0; j < tb.cols; ++j) {
                if (tb.blocked[j]) continue;
                if (tb.obj[j] < -kPivotTol) { enter = j; break; }
            }
        } else {
            double best = -kPivotTol;
            for (std::size_t j = 0; j < tb.cols; ++j) {
                if (tb.blocked[j]) continue;
                if (tb.obj[j] < best) { best = tb.obj[j]; enter = j; }
            }
        }
        if (enter == tb.cols) {  // optimal for this phase
            if (since_rebuild == 0 || rebuilds_left <= 0) return true;
            refresh();
            continue;
        }

        // Entries tiny relative to their column are roundoff; letting one
        // become a pivot silently corrupts the basis.
        double col_scale = 0.0;
        for (std::size_t i = 0; i < tb.rows; ++i)
            col_scale = std::max(col_scale, std::fabs(tb.t[i][enter]));
        const double admit = std::max(kPivotTol, kb.rel_pivot * col_scale);

        std::size_t leave = tb.rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tb.rows; ++i) {
            double a = tb.t[i][enter];
            if (a <= admit) continue;
            double ratio = tb.rhs(i) / a;
            bool better;
            if (ratio < best_ratio - kRatioTol) {
                better = true;
            } else if (ratio < best_ratio + kRatioTol && leave != tb.rows) {
                // Among (near-)tied ratios prefer the stablest pivot entry;
                // under Bland's rule fall back to the lowest basis index so
                // the anti-cycling argument stays intact.
                better = bland ? tb.basis[i] < tb.basis[leave]
                               : a > tb.t[leave][enter];
            } else {
                better = leave == tb.rows;
            }
            if (better) {
                best_ratio = std::min(best_ratio, ratio);
                leave = i;
            }
        }
        if (leave == tb.rows) {
            if (since_rebuild > 0 && rebuilds_left > 0) {
                refresh();
                continue;
            }
            if (unbounded_impossible || tb.obj[enter] > -kNoiseTol) {
                tb.blocked[enter] = 1;
                continue;
            }
            return false;  // unbounded direction
        }

        if (best_ratio <= kRatioTol) {
            if (++degenerate_streak >= kDegenerateStreakLimit) bland = true;
        } else {
            degenerate_streak = 0;
        }
        tb.pivot(leave, enter);
        if (++since_rebuild >= kb.rebuild_interval && rebuilds_left > 0) refresh();
    }
    throw Error("simplex iteration limit exceeded");
}

}  // namespace

LpOutcome solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.variable_count();
    if (n == 0) throw ValidationError("linear program has no variables");
    for (const auto& c : lp.constraints)
        if (c.coeffs.size() != n)
            throw DimensionError("constraint coefficient count", n, c.coeffs.size());
    if (!lp.bounds.empty() && lp.bounds.size() != n)
        throw DimensionError("bounds count", n, lp.bounds.size());
    for (double c : lp.objective)
        if (!std::isfinite(c)) throw ValidationError("objective coefficient is not finite");

    // Map every variable into the non-negative orthant, collecting extra
    // rows for two-sided bounds.
    std::vector<VarMap> vmap(n);
    std::size_t zcols = 0;
    struct BoundRow { int col; double rhs; };
    std::vector<BoundRow> bound_rows;
    for (std::size_t j = 0; j < n; ++j) {
        LpBounds b = lp.bounds.empty() ? LpBounds{} : lp.bounds[j];
        VarMap& m = vmap[j];
        if (b.lower && b.upper && *b.upper < *b.lower)
            return LpOutcome{LpStatus::Infeasible, 0.0, {}};
        if (b.lower) {
            m.offset = *b.lower;
            m.sign = 1.0;
            m.col = static_cast<int>(zcols++);
            if (b.upper) bound_rows.push_back({m.col, *b.upper - *b.lower});
        } else if (b.upper) {
            m.offset = *b.upper;
            m.sign = -1.0;
            m.col = static_cast<int>(zcols++);
        } else {
            m.col = static_cast<int>(zcols++);
            m.neg_col = static_cast<int>(zcols++);
        }
    }

    const std::size_t nrows = lp.constraints.size() + bound_rows.size();
    // Row image in z-space plus the relation and shifted rhs.
    std::vector<std::vector<double>> rowz(nrows);
    std::vector<LpRelation> rel(nrows);
    std::vector<double> rhs(nrows);
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& c = lp.constraints[i];
        rowz[i].assign(zcols, 0.0);
        double shift = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double a = c.coeffs[j];
            if (a == 0.0) continue;
            const VarMap& m = vmap[j];
            rowz[i][m.col] += a * m.sign;
            if (m.neg_col >= 0) rowz[i][m.neg_col] -= a;
            shift += a * m.offset;
        }
        rel[i] = c.relation;
        rhs[i] = c.rhs - shift;
    }
    for (std::size_t k = 0; k < bound_rows.size(); ++k) {
        std::size_t i = lp.constraints.size() + k;
        rowz[i].assign(zcols, 0.0);
        rowz[i][bound_rows[k].col] = 1.0;
        rel[i] = LpRelation::LessEq;
        rhs[i] = bound_rows[k].rhs;
    }

    // Count slacks, then lay out columns: z | slacks | artificials | rhs.
    std::size_t nslack = 0;
    for (auto r : rel)
        if (r != LpRelation::Equal) ++nslack;

    // First pass decides, per row, whether its slack can seed the basis
    // (coefficient +1 after making rhs non-negative); otherwise the row gets
    // an artificial.
    std::vector<int> slack_col(nrows, -1);
    std::vector<char> negate(nrows, 0);
    std::size_t next_slack = zcols;
    std::size_t nart = 0;
    for (std::size_t i = 0; i < nrows; ++i) {
        // Negating a >= row with zero rhs flips its slack to +1 so it can
        // seed the basis without an artificial.
        negate[i] = rhs[i] < 0.0 || (rhs[i] == 0.0 && rel[i] == LpRelation::GreaterEq);
        if (rel[i] != LpRelation::Equal) slack_col[i] = static_cast<int>(next_slack++);
        bool slack_plus_one =
            rel[i] != LpRelation::Equal &&
            ((rel[i] == LpRelation::LessEq) == !negate[i]);
        if (!slack_plus_one) ++nart;
    }
    const std::size_t ncols = zcols + nslack + nart;

    auto attempt = [&](const Knobs& kb) -> LpOutcome {
        Tableau tb;
        tb.rows = nrows;
        tb.cols = ncols;
        tb.t.assign(nrows, std::vector<double>(ncols + 1, 0.0));
        tb.basis.assign(nrows, -1);
        tb.blocked.assign(ncols, 0);
        tb.obj.assign(ncols + 1, 0.0);

        std::vector<int> art_col(nrows, -1);
        std::size_t next_art = zcols + nslack;
        for (std::size_t i = 0; i < nrows; ++i) {
            double s = negate[i] ? -1.0 : 1.0;
            for (std::size_t j = 0; j < zcols; ++j) tb.t[i][j] = s * rowz[i][j];
            tb.t[i][ncols] = s * rhs[i];
            if (slack_col[i] >= 0)
                tb.t[i][slack_col[i]] = s * (rel[i] == LpRelation::LessEq ? 1.0 : -1.0);
            if (slack_col[i] >= 0 && tb.t[i][slack_col[i]] == 1.0) {
                tb.basis[i] = slack_col[i];
            } else {
                art_col[i] = static_cast<int>(next_art++);
                tb.t[i][art_col[i]] = 1.0;
                tb.basis[i] = art_col[i];
            }
        }

        // Untouched copy of the setup-time rows, kept for refactorization.
        const std::vector<std::vector<double>> pristine = tb.t;

        // Phase 1: minimize the sum of artificials.
        if (nart > 0) {
            std::vector<double> art_cost(ncols, 0.0);
            for (std::size_t j = zcols + nslack; j < ncols; ++j) art_cost[j] = 1.0;
            for (std::size_t i = 0; i < nrows; ++i) {
                if (art_col[i] < 0) continue;
                const auto& row = tb.t[i];
                for (std::size_t j = 0; j <= ncols; ++j) tb.obj[j] -= row[j];
                tb.obj[art_col[i]] += 1.0;
            }
            if (!run_phase(tb, pristine, art_cost, true, kb))
                throw Error("phase 1 reported an unbounded direction");
            double infeasibility = -tb.obj[ncols];
            if (infeasibility > kPhase1Tol) return LpOutcome{LpStatus::Infeasible, 0.0, {}};

            // Drive leftover artificials out of the basis where possible;
            // rows that cannot pivot on a sound entry are redundant and keep
            // a zero-valued artificial.
            for (std::size_t i = 0; i < nrows; ++i) {
                if (tb.basis[i] < static_cast<int>(zcols + nslack)) continue;
                std::size_t pick = zcols + nslack;
                double pick_mag = 0.0;
                for (std::size_t j = 0; j < zcols + nslack; ++j) {
                    double mag = std::fabs(tb.t[i][j]);
                    if (mag <= kPivotTol || mag <= pick_mag) continue;
                    double col_scale = 0.0;
                    for (std::size_t r = 0; r < nrows; ++r)
                        col_scale = std::max(col_scale, std::fabs(tb.t[r][j]));
                    if (mag <= kb.rel_pivot * col_scale) continue;
                    pick = j;
                    pick_mag = mag;
                }
                if (pick < zcols + nslack) tb.pivot(i, pick);
            }
            // Columns retired as noise were only null against phase-1 bases;
            // phase 2 starts from a clean slate with just the artificials
            // barred.
            std::fill(tb.blocked.begin(), tb.blocked.end(), 0);
            for (std::size_t j = zcols + nslack; j < ncols; ++j) tb.blocked[j] = 1;
        }

        // Phase 2 objective in z-space (minimization; flip for Maximize).
        double dir = lp.direction == LpDirection::Maximize ? -1.0 : 1.0;
        std::vector<double> cost(ncols, 0.0);
        double const_term = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double c = dir * lp.objective[j];
            if (c == 0.0) continue;
            const VarMap& m = vmap[j];
            cost[m.col] += c * m.sign;
            if (m.neg_col >= 0) cost[m.neg_col] -= c;
            const_term += c * m.offset;
        }
        std::fill(tb.obj.begin(), tb.obj.end(), 0.0);
        for (std::size_t j = 0; j < ncols; ++j) tb.obj[j] = cost[j];
        for (std::size_t i = 0; i < nrows; ++i) {
            double cb = tb.basis[i] >= 0 ? cost[tb.basis[i]] : 0.0;
            if (cb == 0.0) continue;
            const auto& row = tb.t[i];
            for (std::size_t j = 0; j <= ncols; ++j) tb.obj[j] -= cb * row[j];
        }
        (void)const_term;  // folded back in below via the recovered solution

        if (!run_phase(tb, pristine, cost, false, kb))
            return LpOutcome{LpStatus::Unbounded, 0.0, {}};

        std::vector<double> z(ncols, 0.0);
        for (std::size_t i = 0; i < nrows; ++i)
            if (tb.basis[i] >= 0) z[tb.basis[i]] = tb.rhs(i);

        LpOutcome out;
        out.status = LpStatus::Optimal;
        out.solution.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const VarMap& m = vmap[j];
            double x = m.offset + m.sign * z[m.col];
            if (m.neg_col >= 0) x -= z[m.neg_col];
            out.solution[j] = x;
        }
        out.value = 0.0;
        for (std::size_t j = 0; j < n; ++j) out.value += lp.objective[j] * out.solution[j];
        return out;
    };

    const long base_interval = std::max<long>(100, static_cast<long>(nrows));
    try {
        return attempt(Knobs{kRelPivotTol, base_interval});
    } catch (const BasisDecayed&) {
        // Marginal pivots let the first pass walk into a numerically
        // dependent basis; refuse them outright and try once more.
        try {
            return attempt(Knobs{kStrictRelPivotTol, std::max<long>(50, base_interval / 2)});
        } catch (const BasisDecayed&) {
            throw Error("simplex basis decayed beyond repair");
        }
    }
}

}  // namespace menuforge
