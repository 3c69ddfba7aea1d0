#include "qosc/benchmark_solver.hpp"

#include <cmath>
#include <limits>

#include "qosc/errors.hpp"
#include "qosc/ironing_solver.hpp"
#include "qosc/numerics.hpp"
#include "qosc/regular_solver.hpp"

namespace qosc {

BenchmarkSolution solve_full_info(const ModelParams& params,
                                  const TypeDistribution& dist, int grid_n) {
    params.check_support(dist);
    const double as = params.a * params.sigma;
    auto mean_q = [&](const auto& qf) {
        return num::simpson_refined([&](double x) { return qf(x) * dist.pdf(x); },
                                    dist.lo(), dist.hi(), 2048, 1e-9, 1 << 16);
    };
    BenchmarkSolution sol;
    // Without the reputation constraint each type gets its efficient quality.
    auto q_free = [&](double x) { return x > as ? std::log(x / as) / params.a : 0.0; };
    double beta = 0.0;
    if (mean_q(q_free) >= params.q_bar) {
        sol.reputation_binding = false;
    } else {
        auto mean_at = [&](double b) {
            return mean_q([&](double x) {
                const double s = x + b;
                return s > 0 ? std::log(s / as) / params.a
                             : -std::numeric_limits<double>::infinity();
            });
        };
        beta = detail::solve_multiplier(mean_at, -dist.lo() + 1e-12, params.q_bar);
    }
    sol.beta = beta;
    auto& menu = sol.menu;
    menu.beta = beta;
    menu.provenance = Provenance::FullInfoBenchmark;
    menu.grid = make_menu_grid(dist.lo(), dist.hi(), grid_n);
    menu.q.resize(menu.grid.size());
    menu.p.resize(menu.grid.size());
    for (std::size_t i = 0; i < menu.grid.size(); ++i) {
        const double x = menu.grid[i];
        menu.q[i] = sol.reputation_binding ? std::log((x + beta) / as) / params.a
                                           : q_free(x);
        menu.p[i] = x * menu.q[i];
    }
    return sol;
}

ContractMenu solve_hidden(const ModelParams& params,
                          const TypeDistribution& dist, int grid_n) {
    if (regularity_check(dist).regular)
        return solve_regular(params, dist, grid_n).menu;
    return solve_general(params, dist, grid_n).menu;
}

InformationCost information_cost_detail(const ModelParams& params,
                                        const TypeDistribution& dist,
                                        int grid_n) {
    const auto bench = solve_full_info(params, dist, grid_n);
    const auto hidden = solve_hidden(params, dist, grid_n);
    InformationCost out;
    out.full_info_profit = verify(params, dist, bench.menu).expected_profit;
    out.hidden_profit = verify(params, dist, hidden).expected_profit;
    out.cost = out.full_info_profit - out.hidden_profit;
    return out;
}

double information_cost(const ModelParams& params,
                        const TypeDistribution& dist) {
    return information_cost_detail(params, dist).cost;
}

}  // namespace qosc
