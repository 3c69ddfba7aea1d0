#include "qosc/market_sim.hpp"

#include <algorithm>
#include <cmath>

#include "qosc/benchmark_solver.hpp"
#include "qosc/errors.hpp"

namespace qosc {

namespace {

// Between menu nodes q is linear, so the rent phi = delta*q - p grows
// quadratically; interpolating p linearly would make every posted contract
// inside a cell dominated by one of the cell's endpoints.
double posted_price(const ContractMenu& menu, double x) {
    // Full extraction: the benchmark price is the valuation itself.
    if (menu.provenance == Provenance::FullInfoBenchmark) return x * menu.q_at(x);
    const auto& g = menu.grid;
    if (x <= g.front()) return menu.p.front();
    if (x >= g.back()) return menu.p.back();
    const auto i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin()) - 1;
    const double h = g[i + 1] - g[i], t = x - g[i];
    const double s = (menu.q[i + 1] - menu.q[i]) / h;
    const double rent = g[i] * menu.q[i] - menu.p[i] + menu.q[i] * t + 0.5 * s * t * t;
    return x * (menu.q[i] + s * t) - rent;
}

}  // namespace

SimOutcome simulate(const ContractMenu& menu, const TypeDistribution& dist,
                    const ModelParams& params, const SimConfig& cfg) {
    menu.validate();
    if (cfg.n_users < 1) throw DomainError("n_users must be >= 1");
    if (cfg.menu_resolution < 2) throw DomainError("menu_resolution must be >= 2");
    const double lo = dist.lo(), hi = dist.hi();
    const auto R = static_cast<std::size_t>(cfg.menu_resolution);
    std::vector<double> pd(R), pq(R), pp(R);
    for (std::size_t j = 0; j < R; ++j) {
        pd[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(R - 1);
        pq[j] = menu.q_at(pd[j]);
        pp[j] = posted_price(menu, pd[j]);
    }
    auto same_contract = [&](std::size_t a, std::size_t b) {
        return std::abs(pq[a] - pq[b]) <= 1e-12 * (1.0 + std::abs(pq[a])) &&
               std::abs(pp[a] - pp[b]) <= 1e-12 * (1.0 + std::abs(pp[a]));
    };

    const auto types = sample(dist, cfg.n_users, cfg.seed);
    SimOutcome out;
    out.per_type_histogram.assign(R, 0);
    if (cfg.record_users) out.users.reserve(types.size());
    double sum = 0.0, sum_sq = 0.0, payoff_sum = 0.0;
    std::size_t truthful = 0, joined = 0;
    for (double x : types) {
        const auto designated = static_cast<std::size_t>(
            std::lround((x - lo) / (hi - lo) * static_cast<double>(R - 1)));
        if (cfg.choice == ChoiceRule::Assigned) {
            // The contract written for the exact type.
            const double q = menu.q_at(x), p = posted_price(menu, x);
            UserRecord rec{x, -1, 0.0, 0.0, 0.0, 0.0};
            if (x * q - p >= -1e-9) {
                rec = {x, static_cast<int>(designated), q, p, x * q - p, p - cost(params, q)};
                ++joined;
                ++truthful;
                ++out.per_type_histogram[designated];
            }
            sum += rec.profit;
            sum_sq += rec.profit * rec.profit;
            payoff_sum += rec.payoff;
            if (cfg.record_users) out.users.push_back(rec);
            continue;
        }
        std::size_t best = 0;
        double best_v = x * pq[0] - pp[0];
        for (std::size_t j = 1; j < R; ++j) {
            const double v = x * pq[j] - pp[j];
            const double tol = 1e-12 * (1.0 + std::abs(best_v));
            if (v > best_v + tol) {
                best = j;
                best_v = v;
            } else if (v >= best_v - tol) {
                const bool take = cfg.tie_break == TieBreak::LowestPrice
                    ? pp[j] < pp[best]
                    : std::abs(pd[j] - x) < std::abs(pd[best] - x);
                if (take) {
                    best = j;
                    best_v = std::max(best_v, v);
                }
            }
        }
        UserRecord rec{x, -1, 0.0, 0.0, 0.0, 0.0};
        if (best_v >= -1e-9) {
            rec = {x, static_cast<int>(best), pq[best], pp[best], best_v,
                   pp[best] - cost(params, pq[best])};
            ++joined;
            ++out.per_type_histogram[best];
            if (same_contract(best, designated)) ++truthful;
        }
        sum += rec.profit;
        sum_sq += rec.profit * rec.profit;
        payoff_sum += rec.payoff;
        if (cfg.record_users) out.users.push_back(rec);
    }
    const double n = static_cast<double>(types.size());
    out.realized_profit = sum / n;
    const double var = n > 1 ? (sum_sq - n * out.realized_profit * out.realized_profit) / (n - 1) : 0.0;
    out.profit_std_error = std::sqrt(std::max(var, 0.0) / n);
    out.truthfulness_rate = static_cast<double>(truthful) / n;
    out.mean_user_payoff = payoff_sum / n;
    out.participation_rate = static_cast<double>(joined) / n;
    return out;
}

ScenarioComparison compare_scenarios(const ModelParams& params,
                                     const TypeDistribution& dist,
                                     const SimConfig& cfg) {
    const auto hidden = solve_hidden(params, dist);
    const auto bench = solve_full_info(params, dist).menu;
    SimConfig c = cfg;
    c.record_users = true;
    const auto sh = simulate(hidden, dist, params, c);
    SimConfig cb = c;
    cb.choice = ChoiceRule::Assigned;
    const auto sb = simulate(bench, dist, params, cb);
    ScenarioComparison out{sh.realized_profit, sb.realized_profit,
                           sb.realized_profit - sh.realized_profit, 0.0};
    const double n = static_cast<double>(sh.users.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < sh.users.size(); ++i) {
        const double dlt = sb.users[i].profit - sh.users[i].profit - out.difference;
        ss += dlt * dlt;
    }
    out.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    return out;
}

}  // namespace qosc
