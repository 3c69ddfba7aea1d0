#include "qosc/regular_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qosc/errors.hpp"
#include "qosc/numerics.hpp"

namespace qosc {

namespace {

constexpr int kProbeN = 4096;

double q_star(const ModelParams& params, double shifted) {
    return std::log(shifted / (params.a * params.sigma)) / params.a;
}

void warn_negative_bottom(RegularSolution& sol) {
    if (sol.menu.q.front() < 0.0)
        sol.warnings.push_back(fmt::format(
            "q at the lowest type is negative ({:.6g}); menu returned unclipped",
            sol.menu.q.front()));
}

// exp(x) * E1(x) for x > 0.
double scaled_e1(double x) {
    if (x < 600.0) return std::exp(x) * -std::expint(-x);
    double term = 1.0 / x, sum = term;
    for (int k = 1; k < 8; ++k) {
        term *= -k / x;
        sum += term;
    }
    return sum;
}

}  // namespace

namespace detail {

double solve_multiplier(const std::function<double(double)>& mean_qos,
                        double beta_min, double q_bar) {
    const double lo = beta_min;
    const double at_lo = mean_qos(lo);
    if (!(at_lo < q_bar))
        throw InfeasibleError(fmt::format(
            "reputation target {} is below the smallest attainable mean QoS {:.6g}",
            q_bar, at_lo));
    double width = 1.0;
    double hi = lo + width;
    while (!(mean_qos(hi) > q_bar)) {
        width *= 2.0;
        if (width > 1e6)
            throw InfeasibleError("no multiplier bracket within 1e6 of the lower bound");
        hi = lo + width;
    }
    return num::find_root([&](double b) { return mean_qos(b) - q_bar; }, lo, hi);
}

}  // namespace detail

double beta_lower_bound(const TypeDistribution& dist) {
    double worst = -virtual_shift(dist, dist.lo());
    for (int i = 1; i <= kProbeN; ++i) {
        const double x = dist.lo() + (dist.hi() - dist.lo()) * i / kProbeN;
        worst = std::max(worst, -virtual_shift(dist, x));
    }
    return worst + 1e-12;
}

double reputation_integral(const ModelParams& params,
                           const TypeDistribution& dist, double beta) {
    auto integrand = [&](double x) {
        const double s = virtual_shift(dist, x) + beta;
        if (!(s > 0)) return -std::numeric_limits<double>::infinity();
        return q_star(params, s) * dist.pdf(x);
    };
    return num::simpson_refined(integrand, dist.lo(), dist.hi(), 2048, 1e-9,
                                1 << 16);
}

double solve_beta(const ModelParams& params, const TypeDistribution& dist) {
    params.check_support(dist);
    const double bmin = beta_lower_bound(dist);
    return detail::solve_multiplier(
        [&](double b) { return reputation_integral(params, dist, b); }, bmin,
        params.q_bar);
}

RegularSolution solve_regular(const ModelParams& params,
                              const TypeDistribution& dist, int grid_n) {
    params.check_support(dist);
    if (!regularity_check(dist).regular)
        throw DomainError("distribution is not regular; use the general solver");
    RegularSolution sol;
    auto& menu = sol.menu;
    menu.grid = make_menu_grid(dist.lo(), dist.hi(), grid_n);
    menu.provenance = Provenance::RegularClosedForm;
    const double as = params.a * params.sigma;

    // Regime (i): no reputation constraint, excluded users get q = 0.
    auto q_free = [&](double x) {
        const double s = virtual_shift(dist, x);
        return s > as ? q_star(params, s) : 0.0;
    };
    const double free_mean = num::simpson_refined(
        [&](double x) { return q_free(x) * dist.pdf(x); }, dist.lo(), dist.hi(),
        2048, 1e-9, 1 << 16);
    std::function<double(double)> qf;
    if (free_mean >= params.q_bar) {
        sol.reputation_binding = false;
        sol.beta = 0.0;
        qf = q_free;
    } else {
        sol.beta = solve_beta(params, dist);
        const double beta = sol.beta;
        qf = [&params, &dist, beta](double x) {
            return q_star(params, virtual_shift(dist, x) + beta);
        };
    }
    menu.beta = sol.beta;
    menu.q.resize(menu.grid.size());
    for (std::size_t i = 0; i < menu.grid.size(); ++i) menu.q[i] = qf(menu.grid[i]);
    sol.phi_curve = num::cumulative_integral(menu.grid, qf);
    menu.p = envelope_prices(menu.grid, menu.q, sol.phi_curve);
    if (sol.reputation_binding) warn_negative_bottom(sol);
    return sol;
}

RegularSolution closed_form_uniform(const ModelParams& params, int grid_n) {
    params.validate();
    const double lo = params.delta_lo, hi = params.delta_hi, a = params.a;
    const double las = std::log(a * params.sigma);
    const double rhs = (a * params.q_bar + las + 1.0) * (hi - lo);
    auto xlogx = [](double u) { return u > 0 ? u * std::log(u) : 0.0; };
    // Half of u ln u with u = 2 delta - hi + beta, at both ends of the support.
    auto lhs = [&](double beta) {
        return 0.5 * xlogx(beta + hi) - 0.5 * xlogx(beta - hi + 2.0 * lo);
    };
    const double bmin = hi - 2.0 * lo + 1e-12 * std::max(1.0, hi);
    const double beta = detail::solve_multiplier(
        [&](double b) { return lhs(b) - rhs; }, bmin, 0.0);

    RegularSolution sol;
    sol.beta = beta;
    auto& menu = sol.menu;
    menu.beta = beta;
    menu.provenance = Provenance::RegularClosedForm;
    menu.grid = make_menu_grid(lo, hi, grid_n);
    const std::size_t n = menu.grid.size();
    menu.q.resize(n);
    menu.p.resize(n);
    sol.phi_curve.resize(n);
    const double u_lo = beta - hi + 2.0 * lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = menu.grid[i];
        const double u = 2.0 * d - hi + beta;
        menu.q[i] = (std::log(u) - las) / a;
        menu.p[i] = d * menu.q[i] - (0.5 * xlogx(u) - 0.5 * xlogx(u_lo)) / a +
                    (d - lo) * (1.0 + las) / a;
        sol.phi_curve[i] = d * menu.q[i] - menu.p[i];
    }
    sol.phi_curve.front() = 0.0;
    warn_negative_bottom(sol);
    return sol;
}

RegularSolution closed_form_exponential(const ModelParams& params, double rho,
                                        int grid_n) {
    params.validate();
    if (!(rho > 0)) throw DomainError("rate must be > 0");
    const double lo = params.delta_lo, hi = params.delta_hi, a = params.a;
    const double las = std::log(a * params.sigma);
    const double mass = std::exp(-rho * lo) - std::exp(-rho * hi);
    // Integral of ln(delta + c) rho e^{-rho delta} over the support, by parts
    // and the exponential integral E1.
    auto log_moment = [&](double c) {
        const double ul = lo + c, uh = hi + c;
        const double boundary =
            std::exp(-rho * lo) * std::log(ul) - std::exp(-rho * hi) * std::log(uh);
        const double tail = std::exp(-rho * lo) * scaled_e1(rho * ul) -
                            std::exp(-rho * hi) * scaled_e1(rho * uh);
        return boundary + tail;
    };
    auto mean_q = [&](double c) { return (log_moment(c) - las * mass) / a; };
    const double cmin = -lo + 1e-12 * std::max(1.0, hi);
    const double c = detail::solve_multiplier(mean_q, cmin, params.q_bar);
    const double beta = c + 1.0 / rho;
    if (!(lo + c > 0)) throw InfeasibleError("nonpositive log argument");

    RegularSolution sol;
    sol.beta = beta;
    auto& menu = sol.menu;
    menu.beta = beta;
    menu.provenance = Provenance::RegularClosedForm;
    menu.grid = make_menu_grid(lo, hi, grid_n);
    const std::size_t n = menu.grid.size();
    menu.q.resize(n);
    menu.p.resize(n);
    sol.phi_curve.resize(n);
    const double gamma =
        lo / a * (1.0 + las) - (lo + c) * std::log(lo + c) / a;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = menu.grid[i];
        menu.q[i] = (std::log(d + c) - las) / a;
        menu.p[i] = d * menu.q[i] - (d + c) * std::log(d + c) / a +
                    d / a * (1.0 + las) - gamma;
        sol.phi_curve[i] = d * menu.q[i] - menu.p[i];
    }
    sol.phi_curve.front() = 0.0;
    warn_negative_bottom(sol);
    return sol;
}

}  // namespace qosc
