#include "cutpack/simplex.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <optional>
#include <random>

using namespace cutpack;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

// Dense inequality a.x >= b used by the vertex enumerator.
struct Halfspace {
    std::vector<Rational> a;
    Rational b;
};

std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> m, std::vector<Rational> rhs) {
    const int n = static_cast<int>(m.size());
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int r = c; r < n; ++r) {
            if (m[r][c] != 0) {
                p = r;
                break;
            }
        }
        if (p < 0) return std::nullopt;
        std::swap(m[p], m[c]);
        std::swap(rhs[p], rhs[c]);
        for (int r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0) continue;
            Rational f = m[r][c] / m[c][c];
            for (int j = c; j < n; ++j) m[r][j] -= f * m[c][j];
            rhs[r] -= f * rhs[c];
        }
    }
    std::vector<Rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
    return x;
}

// Minimum of c.x over a bounded polyhedron by trying every basis of tight
// constraints. Exponential, fine for three or four variables.
std::optional<Rational> enumerate_vertices(const std::vector<Halfspace>& hs, const std::vector<Rational>& c) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(hs.size());
    std::optional<Rational> best;
    std::vector<int> pick(n);
    std::function<void(int, int)> rec = [&](int depth, int start) {
        if (depth == n) {
            std::vector<std::vector<Rational>> mat;
            std::vector<Rational> rhs;
            for (int i : pick) {
                mat.push_back(hs[i].a);
                rhs.push_back(hs[i].b);
            }
            auto x = solve_square(mat, rhs);
            if (!x) return;
            for (const auto& h : hs) {
                Rational lhs = 0;
                for (int j = 0; j < n; ++j) lhs += h.a[j] * (*x)[j];
                if (lhs < h.b) return;
            }
            Rational val = 0;
            for (int j = 0; j < n; ++j) val += c[j] * (*x)[j];
            if (!best || val < *best) best = val;
            return;
        }
        for (int i = start; i < m; ++i) {
            pick[depth] = i;
            rec(depth + 1, i + 1);
        }
    };
    rec(0, 0);
    return best;
}

} // namespace

TEST(Simplex, MaxSingleBound) {
    LinearProgram lp;
    lp.maximize = true;
    int x = lp.add_var(q(1));
    lp.add_row({{x, q(1)}}, Sense::LessEqual, q(3));
    auto r = simplex_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.values[x], q(3));
    EXPECT_EQ(r.objective, q(3));
}

TEST(Simplex, MinOfLowerBounds) {
    LinearProgram lp;
    int l = lp.add_var(q(1));
    lp.add_row({{l, q(1)}}, Sense::GreaterEqual, q(1));
    lp.add_row({{l, q(1)}}, Sense::GreaterEqual, q(2));
    auto r = simplex_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.values[l], q(2));
}

TEST(Simplex, PathLpMatchesVertexEnumeration) {
    // min lambda s.t. d1 + d2 >= 1, d_i <= lambda, 0 <= d_i <= 1
    LinearProgram lp;
    int d1 = lp.add_var(q(0), q(0), q(1));
    int d2 = lp.add_var(q(0), q(0), q(1));
    int lam = lp.add_var(q(1));
    lp.add_row({{d1, q(1)}, {d2, q(1)}}, Sense::GreaterEqual, q(1));
    lp.add_row({{d1, q(1)}, {lam, q(-1)}}, Sense::LessEqual, q(0));
    lp.add_row({{d2, q(1)}, {lam, q(-1)}}, Sense::LessEqual, q(0));
    auto r = simplex_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);

    std::vector<Halfspace> hs{
        {{q(1), q(1), q(0)}, q(1)},   {{q(-1), q(0), q(1)}, q(0)}, {{q(0), q(-1), q(1)}, q(0)},
        {{q(1), q(0), q(0)}, q(0)},   {{q(0), q(1), q(0)}, q(0)},  {{q(-1), q(0), q(0)}, q(-1)},
        {{q(0), q(-1), q(0)}, q(-1)}, {{q(0), q(0), q(1)}, q(0)},  {{q(0), q(0), q(-1)}, q(-5)},
    };
    auto expected = enumerate_vertices(hs, {q(0), q(0), q(1)});
    ASSERT_TRUE(expected.has_value());
    EXPECT_EQ(*expected, q(1, 2));
    EXPECT_EQ(r.objective, *expected);
}

TEST(Simplex, Infeasible) {
    LinearProgram lp;
    int x = lp.add_var(q(1));
    lp.add_row({{x, q(1)}}, Sense::LessEqual, q(1));
    lp.add_row({{x, q(1)}}, Sense::GreaterEqual, q(2));
    EXPECT_EQ(simplex_solve(lp).status, LpStatus::Infeasible);
}

TEST(Simplex, Unbounded) {
    LinearProgram lp;
    lp.maximize = true;
    int x = lp.add_var(q(1));
    int y = lp.add_var(q(0));
    lp.add_row({{x, q(1)}, {y, q(-1)}}, Sense::LessEqual, q(1));
    EXPECT_EQ(simplex_solve(lp).status, LpStatus::Unbounded);
}

TEST(Simplex, EqualityAndShiftedBounds) {
    // min x + 2y s.t. x + y = 5, x in [1, 3], y >= 1
    LinearProgram lp;
    int x = lp.add_var(q(1), q(1), q(3));
    int y = lp.add_var(q(2), q(1));
    lp.add_row({{x, q(1)}, {y, q(1)}}, Sense::Equal, q(5));
    auto r = simplex_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.values[x], q(3));
    EXPECT_EQ(r.values[y], q(2));
    EXPECT_EQ(r.objective, q(7));
}

TEST(Simplex, RedundantEqualityRows) {
    LinearProgram lp;
    int x = lp.add_var(q(1));
    int y = lp.add_var(q(1));
    lp.add_row({{x, q(1)}, {y, q(1)}}, Sense::Equal, q(2));
    lp.add_row({{x, q(2)}, {y, q(2)}}, Sense::Equal, q(4));
    lp.add_row({{x, q(1)}}, Sense::GreaterEqual, q(1, 2));
    auto r = simplex_solve(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.objective, q(2));
}

TEST(Simplex, RandomBoxedLpsAgreeWithVertexEnumeration) {
    std::mt19937 rng(2024);
    auto draw = [&](int lo, int hi) { return static_cast<long>(lo + static_cast<int>(rng() % (hi - lo + 1))); };
    int compared = 0;
    for (int round = 0; round < 150; ++round) {
        const int n = 3;
        LinearProgram lp;
        std::vector<Rational> c;
        for (int j = 0; j < n; ++j) {
            c.push_back(q(draw(-4, 4)));
            lp.add_var(c.back(), q(0), q(4));
        }
        std::vector<Halfspace> hs;
        for (int j = 0; j < n; ++j) {
            std::vector<Rational> lo(n, q(0)), hi(n, q(0));
            lo[j] = 1;
            hi[j] = -1;
            hs.push_back({lo, q(0)});
            hs.push_back({hi, q(-4)});
        }
        int rows = static_cast<int>(draw(1, 4));
        for (int i = 0; i < rows; ++i) {
            std::vector<std::pair<int, Rational>> coeffs;
            std::vector<Rational> dense(n);
            for (int j = 0; j < n; ++j) {
                dense[j] = q(draw(-3, 3));
                coeffs.emplace_back(j, dense[j]);
            }
            Rational b = q(draw(-4, 6), draw(1, 3));
            if (rng() % 2) {
                lp.add_row(coeffs, Sense::GreaterEqual, b);
                hs.push_back({dense, b});
            } else {
                lp.add_row(coeffs, Sense::LessEqual, b);
                for (auto& v : dense) v = -v;
                hs.push_back({dense, -b});
            }
        }
        auto r = simplex_solve(lp);
        auto expected = enumerate_vertices(hs, c);
        if (!expected) {
            EXPECT_EQ(r.status, LpStatus::Infeasible);
            continue;
        }
        ASSERT_EQ(r.status, LpStatus::Optimal);
        EXPECT_EQ(r.objective, *expected);
        ++compared;
    }
    EXPECT_GT(compared, 30);
}
