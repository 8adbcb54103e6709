#pragma once

#include "cutpack/errors.hpp"
#include "cutpack/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cutpack {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct LinearProgram {
    struct Row {
        std::vector<std::pair<int, Rational>> coeffs;
        Sense sense = Sense::LessEqual;
        Rational rhs;
    };

    int num_vars = 0;
    bool maximize = false;
    std::vector<Rational> objective;
    std::vector<Row> rows;
    // Per-variable bounds; lower defaults to 0, upper to +infinity.
    std::vector<Rational> lower;
    std::vector<std::optional<Rational>> upper;

    int add_var(Rational cost, Rational lo = 0, std::optional<Rational> hi = std::nullopt) {
        objective.push_back(std::move(cost));
        lower.push_back(std::move(lo));
        upper.push_back(std::move(hi));
        return num_vars++;
    }
    void add_row(std::vector<std::pair<int, Rational>> coeffs, Sense sense, Rational rhs) {
        rows.push_back({std::move(coeffs), sense, std::move(rhs)});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rational objective;
    std::vector<Rational> values;
};

/// Dense simplex tableau in minimization form, pivoting with Bland's rule.
/// Row i reads  x_{basis[i]} + sum_j a[i][j] x_j = b[i]  over the nonbasic j.
class Tableau {
public:
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    std::vector<Rational> cost;
    std::vector<Rational> reduced;
    std::vector<int> basis;
    Rational value = 0;
    long pivots = 0;

    int num_rows() const { return static_cast<int>(a.size()); }
    int num_cols() const { return static_cast<int>(cost.size()); }

    /// Recomputes reduced costs and objective from `cost` and the basis.
    void price() {
        reduced = cost;
        value = 0;
        for (int i = 0; i < num_rows(); ++i) {
            const Rational& cb = cost[basis[i]];
            if (cb == 0) continue;
            value += cb * b[i];
            for (int j = 0; j < num_cols(); ++j) {
                if (a[i][j] != 0) reduced[j] -= cb * a[i][j];
            }
        }
    }

    void pivot(int r, int col) {
        ++pivots;
        Rational inv = 1 / a[r][col];
        std::vector<int> nz;
        for (int j = 0; j < num_cols(); ++j) {
            if (a[r][j] != 0) {
                a[r][j] *= inv;
                nz.push_back(j);
            }
        }
        b[r] *= inv;
        for (int i = 0; i < num_rows(); ++i) {
            if (i == r || a[i][col] == 0) continue;
            Rational f = a[i][col];
            for (int j : nz) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        if (reduced[col] != 0) {
            Rational f = reduced[col];
            for (int j : nz) reduced[j] -= f * a[r][j];
            value += f * b[r];
        }
        basis[r] = col;
    }

    /// Runs primal simplex from the current feasible basis. Returns false if
    /// the objective is unbounded below.
    bool optimize(long max_pivots) {
        for (;;) {
            int col = -1;
            for (int j = 0; j < num_cols(); ++j) {
                if (reduced[j] < 0) {
                    col = j;
                    break;
                }
            }
            if (col < 0) return true;
            int row = -1;
            Rational best;
            for (int i = 0; i < num_rows(); ++i) {
                if (a[i][col] <= 0) continue;
                Rational ratio = b[i] / a[i][col];
                if (row < 0 || ratio < best || (ratio == best && basis[i] < basis[row])) {
                    row = i;
                    best = std::move(ratio);
                }
            }
            if (row < 0) return false;
            if (pivots >= max_pivots) {
                throw BudgetExceeded("simplex pivot limit reached");
            }
            pivot(row, col);
        }
    }

    /// Appends a column given in original coordinates; `binv_cols` are the
    /// tableau columns that held the identity in the starting basis, so
    /// their current contents are the columns of the basis inverse.
    int add_column(const std::vector<std::pair<int, Rational>>& original, Rational c,
                   const std::vector<int>& binv_cols) {
        std::vector<Rational> col(num_rows(), Rational(0));
        for (const auto& [row, coef] : original) {
            int k = binv_cols[row];
            for (int i = 0; i < num_rows(); ++i) {
                if (a[i][k] != 0) col[i] += coef * a[i][k];
            }
        }
        Rational red = c;
        for (int i = 0; i < num_rows(); ++i) {
            a[i].push_back(col[i]);
            if (col[i] != 0) red -= cost[basis[i]] * col[i];
        }
        cost.push_back(std::move(c));
        reduced.push_back(std::move(red));
        return num_cols() - 1;
    }
};

/// Exact two-phase primal simplex with Bland's rule.
inline LpResult simplex_solve(const LinearProgram& lp, long max_pivots = 1000000) {
    const int n = lp.num_vars;
    if (static_cast<int>(lp.objective.size()) != n || static_cast<int>(lp.lower.size()) != n ||
        static_cast<int>(lp.upper.size()) != n) {
        throw std::invalid_argument("linear program: per-variable vectors do not match num_vars");
    }

    // Shift x = lower + x' so every structural variable is >= 0, and turn
    // finite upper bounds into rows.
    struct StdRow {
        std::vector<std::pair<int, Rational>> coeffs;
        Sense sense;
        Rational rhs;
    };
    std::vector<StdRow> rows;
    for (std::size_t r = 0; r < lp.rows.size(); ++r) {
        const auto& row = lp.rows[r];
        Rational rhs = row.rhs;
        for (const auto& [j, c] : row.coeffs) {
            if (j < 0 || j >= n) {
                throw std::invalid_argument("linear program: row " + std::to_string(r) + " references unknown variable");
            }
            rhs -= c * lp.lower[j];
        }
        rows.push_back({row.coeffs, row.sense, rhs});
    }
    for (int j = 0; j < n; ++j) {
        if (lp.upper[j]) {
            rows.push_back({{{j, Rational(1)}}, Sense::LessEqual, *lp.upper[j] - lp.lower[j]});
        }
    }
    for (auto& row : rows) {
        if (row.rhs < 0) {
            row.rhs = -row.rhs;
            for (auto& kv : row.coeffs) kv.second = -kv.second;
            if (row.sense == Sense::LessEqual) {
                row.sense = Sense::GreaterEqual;
            } else if (row.sense == Sense::GreaterEqual) {
                row.sense = Sense::LessEqual;
            }
        }
    }

    const int m = static_cast<int>(rows.size());
    int cols = n;
    std::vector<int> slack(m, -1);
    std::vector<int> artificial(m, -1);
    for (int i = 0; i < m; ++i) {
        if (rows[i].sense != Sense::Equal) slack[i] = cols++;
    }
    const int first_artificial = cols;
    for (int i = 0; i < m; ++i) {
        if (rows[i].sense != Sense::LessEqual) artificial[i] = cols++;
    }

    Tableau t;
    t.a.assign(m, std::vector<Rational>(cols, Rational(0)));
    t.b.resize(m);
    t.basis.resize(m);
    for (int i = 0; i < m; ++i) {
        for (const auto& [j, c] : rows[i].coeffs) t.a[i][j] += c;
        t.b[i] = rows[i].rhs;
        if (slack[i] >= 0) t.a[i][slack[i]] = rows[i].sense == Sense::LessEqual ? 1 : -1;
        if (artificial[i] >= 0) {
            t.a[i][artificial[i]] = 1;
            t.basis[i] = artificial[i];
        } else {
            t.basis[i] = slack[i];
        }
    }

    LpResult result;
    if (first_artificial < cols) {
        t.cost.assign(cols, Rational(0));
        for (int j = first_artificial; j < cols; ++j) t.cost[j] = 1;
        t.price();
        t.optimize(max_pivots);
        if (t.value > 0) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Drive remaining artificials out of the basis; rows where that is
        // impossible are redundant and dropped.
        for (int i = 0; i < t.num_rows();) {
            if (t.basis[i] < first_artificial) {
                ++i;
                continue;
            }
            int col = -1;
            for (int j = 0; j < first_artificial; ++j) {
                if (t.a[i][j] != 0) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                t.pivot(i, col);
                ++i;
            } else {
                t.a.erase(t.a.begin() + i);
                t.b.erase(t.b.begin() + i);
                t.basis.erase(t.basis.begin() + i);
            }
        }
        for (auto& row : t.a) row.resize(first_artificial);
    }

    t.cost.assign(first_artificial, Rational(0));
    for (int j = 0; j < n; ++j) t.cost[j] = lp.maximize ? Rational(-lp.objective[j]) : lp.objective[j];
    t.price();
    if (!t.optimize(max_pivots)) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    result.status = LpStatus::Optimal;
    result.values.assign(n, Rational(0));
    for (int i = 0; i < t.num_rows(); ++i) {
        if (t.basis[i] < n) result.values[t.basis[i]] = t.b[i];
    }
    result.objective = 0;
    for (int j = 0; j < n; ++j) {
        result.values[j] += lp.lower[j];
        result.objective += lp.objective[j] * result.values[j];
    }
    return result;
}

} // namespace cutpack
