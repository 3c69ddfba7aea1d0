#include <cmath>

#include <gtest/gtest.h>

#include "qosc/errors.hpp"
#include "qosc/regular_solver.hpp"
#include "support.hpp"

using namespace qosc;

namespace {

double psi_exp(double x) { return x - 1 / 0.952; }

// Reference multiplier: bisection on an adaptive Gauss-Kronrod mean.
double reference_beta(const ModelParams& p, const TypeDistribution& d, double lo, double hi) {
    return qtest::bisect(
        [&](double b) {
            return qtest::expect(d, [&](double x) {
                       return std::log((virtual_shift(d, x) + b) / (p.a * p.sigma)) / p.a;
                   }) - p.q_bar;
        },
        lo, hi);
}

// Three-point derivative on a nonuniform grid.
double node_derivative(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    return -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] +
           h1 / (h2 * (h1 + h2)) * y[i + 1];
}

}  // namespace

TEST(Regular, ReputationIntegralIncreasingInBeta) {
    const auto p = qtest::case_params();
    const auto d = qtest::case_dist();
    const double bmin = beta_lower_bound(d);
    EXPECT_NEAR(bmin, 1 / 0.952, 1e-9);
    double prev = reputation_integral(p, d, bmin + 1e-6);
    for (double b = bmin + 0.01; b < bmin + 20; b += 0.37) {
        const double v = reputation_integral(p, d, b);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Regular, ReputationIntegralMatchesReference) {
    const auto p = qtest::case_params();
    for (const auto& d : {qtest::case_dist(), qtest::uniform_dist(), qtest::case_dist_renorm()}) {
        const double b = beta_lower_bound(d) + 0.3;
        const double ref = qtest::expect(d, [&](double x) {
            return std::log((virtual_shift(d, x) + b) / (p.a * p.sigma)) / p.a;
        });
        EXPECT_NEAR(reputation_integral(p, d, b), ref, 1e-10) << d.kind_name();
    }
}

TEST(Regular, SolveBetaAgainstReference) {
    for (double a : {0.47, 0.49, 0.51}) {
        const auto p = qtest::case_params(a);
        const auto d = qtest::case_dist();
        const double beta = solve_beta(p, d);
        EXPECT_NEAR(beta, reference_beta(p, d, 1 / 0.952 + 1e-9, 10.0), 1e-9) << "a=" << a;
        EXPECT_LE(std::abs(reputation_integral(p, d, beta) - p.q_bar), 1e-9);
    }
    const auto up = qtest::uniform_params();
    const auto ud = qtest::uniform_dist();
    EXPECT_NEAR(solve_beta(up, ud), reference_beta(up, ud, 4 + 1e-9, 50.0), 1e-9);
}

TEST(Regular, CaseStudyBottomQuality) {
    const auto p = qtest::case_params();
    const auto s = solve_regular(p, qtest::case_dist());
    EXPECT_TRUE(s.reputation_binding);
    const double expected = std::log((s.beta - 1 / 0.952) / (0.47 * 0.16)) / 0.47;
    EXPECT_NEAR(s.menu.q.front(), expected, 1e-12);
    EXPECT_EQ(s.menu.p.front(), 0.0);
    for (std::size_t i = 1; i < s.menu.q.size(); ++i) {
        EXPECT_GT(s.menu.q[i], s.menu.q[i - 1]);
        EXPECT_GE(s.menu.p[i], s.menu.p[i - 1]);
    }
    for (std::size_t i = 0; i < s.menu.grid.size(); i += 37) {
        const double x = s.menu.grid[i];
        EXPECT_NEAR(s.menu.q[i], std::log((psi_exp(x) + s.beta) / (0.47 * 0.16)) / 0.47, 1e-12);
    }
}

TEST(Regular, SlackRegime) {
    const auto d = qtest::case_dist();
    auto p = qtest::case_params();
    const double unconstrained = qtest::expect(d, [&](double x) {
        const double v = psi_exp(x);
        return v > p.a * p.sigma ? std::log(v / (p.a * p.sigma)) / p.a : 0.0;
    });
    p.q_bar = 0.9 * unconstrained;
    const auto s = solve_regular(p, d);
    EXPECT_FALSE(s.reputation_binding);
    EXPECT_EQ(s.beta, 0.0);
    EXPECT_EQ(s.menu.beta, 0.0);
    EXPECT_EQ(s.menu.q.front(), 0.0);
    EXPECT_GE(verify(p, d, s.menu).reputation_residual, 0.0);
    EXPECT_TRUE(std::is_sorted(s.menu.q.begin(), s.menu.q.end()));
}

TEST(Regular, NegativeBottomQualityWarns) {
    auto p = qtest::case_params();
    p.q_bar = 4.5;
    const auto s = solve_regular(p, qtest::case_dist());
    ASSERT_TRUE(s.reputation_binding);
    EXPECT_LT(s.menu.q.front(), 0.0);
    EXPECT_FALSE(s.warnings.empty());
    EXPECT_LE(std::abs(verify(p, qtest::case_dist(), s.menu).reputation_residual), 1e-6);
}

TEST(Regular, InfeasibleTarget) {
    ModelParams p{0.47, 0.16, 5.0, 0.0, 4.0};
    EXPECT_THROW(solve_regular(p, qtest::uniform_dist()), InfeasibleError);
    EXPECT_THROW(closed_form_uniform(p), InfeasibleError);
}

TEST(Regular, ClosedFormExponentialAgrees) {
    for (double a : {0.47, 0.49, 0.51}) {
        const auto p = qtest::case_params(a);
        const auto g = solve_regular(p, qtest::case_dist());
        const auto c = closed_form_exponential(p, 0.952);
        ASSERT_EQ(g.menu.grid, c.menu.grid);
        EXPECT_NEAR(g.beta, c.beta, 1e-9);
        for (std::size_t i = 0; i < g.menu.grid.size(); ++i) {
            EXPECT_NEAR(g.menu.q[i], c.menu.q[i], 1e-7);
            EXPECT_NEAR(g.menu.p[i], c.menu.p[i], 1e-7);
        }
        EXPECT_EQ(c.menu.p.front(), 0.0);
    }
}

TEST(Regular, ClosedFormUniformAgrees) {
    const auto p = qtest::uniform_params();
    const auto g = solve_regular(p, qtest::uniform_dist());
    const auto c = closed_form_uniform(p);
    EXPECT_NEAR(g.beta, c.beta, 1e-9);
    for (std::size_t i = 0; i < g.menu.grid.size(); ++i) {
        EXPECT_NEAR(g.menu.q[i], c.menu.q[i], 1e-7);
        EXPECT_NEAR(g.menu.p[i], c.menu.p[i], 1e-7);
    }
    // The multiplier solves the explicit transcendental equation as well.
    const double b = c.beta, lo = 0, hi = 4;
    const double lhs = ((b - hi) / 2 + hi) * std::log(b + hi) - ((b - hi) / 2 + lo) * std::log(b - hi + 2 * lo);
    const double rhs = (p.a * p.q_bar + std::log(p.a * p.sigma) + 1) * (hi - lo);
    EXPECT_NEAR(lhs, rhs, 1e-9);
}

TEST(Regular, UniformSupportShift) {
    const double c = 1.5;
    const auto d = TypeDistribution::uniform(c, c + 4);
    const auto d0 = qtest::uniform_dist();
    for (double x : {0.0, 0.7, 2.0, 4.0}) EXPECT_NEAR(virtual_shift(d, x + c), virtual_shift(d0, x) + c, 1e-12);
    ModelParams p{0.47, 0.16, 8.0, c, c + 4};
    const auto g = solve_regular(p, d);
    const auto cf = closed_form_uniform(p);
    EXPECT_NEAR(g.beta, cf.beta, 1e-9);
    for (std::size_t i = 0; i < g.menu.grid.size(); ++i) EXPECT_NEAR(g.menu.q[i], cf.menu.q[i], 1e-7);
    // Bottom price equals bottom valuation (no rent at the bottom).
    EXPECT_NEAR(cf.menu.p.front(), c * cf.menu.q.front(), 1e-12);
    EXPECT_NEAR(g.menu.p.front(), c * g.menu.q.front(), 1e-12);
    // Shifting types by c lowers the multiplier by exactly c.
    EXPECT_NEAR(g.beta, solve_beta(qtest::uniform_params(), d0) - c, 1e-8);
}

TEST(Regular, EnvelopeIdentity) {
    const auto p = qtest::case_params();
    for (const auto& s : {closed_form_exponential(p, 0.952), solve_regular(p, qtest::case_dist()),
                          closed_form_uniform(qtest::uniform_params())}) {
        const auto& m = s.menu;
        std::vector<double> V(m.grid.size());
        for (std::size_t i = 0; i < V.size(); ++i) V[i] = m.grid[i] * m.q[i] - m.p[i];
        for (std::size_t i = 1; i + 1 < V.size(); ++i) {
            // Three-point truncation error is O(h1 h2 q''); bound it from the data.
            const double h1 = m.grid[i] - m.grid[i - 1], h2 = m.grid[i + 1] - m.grid[i];
            const double d2q = 2 * ((m.q[i + 1] - m.q[i]) / h2 - (m.q[i] - m.q[i - 1]) / h1) / (h1 + h2);
            const double tol = 1e-7 + h1 * h2 * std::abs(d2q);
            EXPECT_NEAR(node_derivative(m.grid, V, i), m.q[i], tol) << "i=" << i;
            EXPECT_NEAR(node_derivative(m.grid, m.p, i), m.grid[i] * node_derivative(m.grid, m.q, i), tol);
        }
    }
}

TEST(Regular, RentCurveStartsAtZero) {
    const auto s = solve_regular(qtest::case_params(), qtest::case_dist());
    ASSERT_EQ(s.phi_curve.size(), s.menu.grid.size());
    EXPECT_EQ(s.phi_curve.front(), 0.0);
    for (std::size_t i = 0; i < s.phi_curve.size(); ++i)
        EXPECT_NEAR(s.menu.p[i], s.menu.grid[i] * s.menu.q[i] - s.phi_curve[i], 1e-12);
}

TEST(Regular, ProfitDecreasesInCostCurvature) {
    const auto d = qtest::case_dist();
    double prev = 1e300;
    for (double a : {0.43, 0.45, 0.47, 0.49, 0.51, 0.55}) {
        const auto p = qtest::case_params(a);
        const double profit = verify(p, d, solve_regular(p, d).menu).expected_profit;
        EXPECT_LT(profit, prev) << "a=" << a;
        prev = profit;
    }
}

TEST(Regular, SolvedMenusPassVerification) {
    struct Case { ModelParams p; TypeDistribution d; };
    for (const auto& c : {Case{qtest::case_params(0.47), qtest::case_dist()},
                          Case{qtest::case_params(0.51), qtest::case_dist()},
                          Case{qtest::case_params(), qtest::case_dist_renorm()},
                          Case{qtest::uniform_params(), qtest::uniform_dist()}}) {
        const auto s = solve_regular(c.p, c.d);
        const auto r = verify(c.p, c.d, s.menu);
        EXPECT_TRUE(r.passes()) << c.d.kind_name();
        EXPECT_LE(qtest::brute_ic_regret(s.menu), 1e-6);
    }
}

TEST(Regular, MultiplierBracketFailure) {
    // Mean map that never reaches the target inside the search window.
    EXPECT_THROW(detail::solve_multiplier([](double b) { return std::log1p(b) * 1e-9; }, 0.0, 5.0),
                 InfeasibleError);
    EXPECT_THROW(detail::solve_multiplier([](double) { return 10.0; }, 0.0, 5.0), InfeasibleError);
    EXPECT_NEAR(detail::solve_multiplier([](double b) { return b; }, 0.0, 5.0), 5.0, 1e-10);
}
