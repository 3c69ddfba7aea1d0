#include "qosc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "qosc/numerics.hpp"

namespace qosc {

void DiscreteInstance::validate() const {
    params.validate();
    if (types.size() < 2 || types.size() != masses.size())
        throw DomainError("discrete instance needs >= 2 types with matching masses");
    double total = 0.0;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i > 0 && !(types[i] > types[i - 1]))
            throw DomainError("discrete types must be strictly increasing");
        if (!(masses[i] > 0)) throw DomainError("discrete masses must be positive");
        if (types[i] < params.delta_lo || types[i] > params.delta_hi)
            throw DomainError("discrete type outside the parameter support");
        total += masses[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete masses must sum to 1");
}

DiscreteInstance discretize(const ModelParams& params,
                            const TypeDistribution& dist, int m) {
    params.check_support(dist);
    if (m < 2) throw DomainError("discretize needs m >= 2");
    DiscreteInstance inst;
    inst.params = params;
    const double lo = dist.lo(), hi = dist.hi();
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const double e0 = lo + (hi - lo) * k / m;
        const double e1 = k + 1 == m ? hi : lo + (hi - lo) * (k + 1) / m;
        inst.types.push_back(e0);
        inst.masses.push_back(dist.cdf(e1) - dist.cdf(e0));
        total += inst.masses.back();
    }
    for (auto& w : inst.masses) w /= total;
    return inst;
}

std::vector<double> envelope_prices(const DiscreteInstance& inst,
                                    const std::vector<double>& q) {
    const auto& d = inst.types;
    std::vector<double> p(q.size());
    double rent = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i > 0) rent += q[i - 1] * (d[i] - d[i - 1]);
        p[i] = d[i] * q[i] - rent;
    }
    return p;
}

double discrete_profit(const DiscreteInstance& inst, const std::vector<double>& q) {
    const auto p = envelope_prices(inst, q);
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        total += inst.masses[i] * (p[i] - cost(inst.params, q[i]));
    return total;
}

namespace {

// Nearest point to y in the h-weighted norm with x nondecreasing and
// sum f x = target.
std::vector<double> project(const std::vector<double>& y, const std::vector<double>& h,
                            const std::vector<double>& f, double target) {
    const std::size_t m = y.size();
    std::vector<double> shifted(m);
    auto at = [&](double mu) {
        for (std::size_t i = 0; i < m; ++i) shifted[i] = y[i] + mu * f[i] / h[i];
        return num::isotonic_fit(shifted, h);
    };
    auto mean = [&](const std::vector<double>& x) {
        return std::inner_product(x.begin(), x.end(), f.begin(), 0.0);
    };
    double lo = -1.0, hi = 1.0;
    while (mean(at(lo)) > target) lo *= 2.0;
    while (mean(at(hi)) < target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean(at(mid)) < target ? lo : hi) = mid;
    }
    auto x = at(0.5 * (lo + hi));
    const double fix = target - mean(x);  // sum f = 1, constant keeps order
    for (auto& v : x) v += fix;
    return x;
}

}  // namespace

DiscreteSolution solve_discrete(const DiscreteInstance& inst, int max_iter) {
    inst.validate();
    const auto& d = inst.types;
    const auto& f = inst.masses;
    const auto& prm = inst.params;
    const std::size_t m = d.size();
    std::vector<double> tail(m, 0.0);  // sum of masses above i
    for (std::size_t i = m - 1; i-- > 0;) tail[i] = tail[i + 1] + f[i + 1];
    const double q_cap = 600.0 / prm.a;

    auto gradient = [&](const std::vector<double>& q) {
        std::vector<double> g(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double gap = j + 1 < m ? d[j + 1] - d[j] : 0.0;
            g[j] = f[j] * (d[j] - marginal_cost(prm, q[j])) - gap * tail[j];
        }
        return g;
    };

    DiscreteSolution sol;
    std::vector<double> q(m, prm.q_bar);
    double J = discrete_profit(inst, q);
    bool converged = false;
    int it = 0;
    for (; it < max_iter; ++it) {
        const auto g = gradient(q);
        std::vector<double> h(m), y(m);
        for (std::size_t j = 0; j < m; ++j) {
            h[j] = f[j] * prm.a * marginal_cost(prm, q[j]);
            y[j] = std::min(q[j] + g[j] / h[j], q_cap);
        }
        const auto x = project(y, h, f, prm.q_bar);
        std::vector<double> dir(m);
        double slope = 0.0, step_norm = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            dir[j] = x[j] - q[j];
            slope += g[j] * dir[j];
            step_norm = std::max(step_norm, std::abs(dir[j]));
        }
        if (!(slope > 0) || step_norm < 1e-14) {
            converged = true;
            break;
        }
        double t = 1.0, J_new = J;
        std::vector<double> trial(m);
        for (; t > 1e-20; t *= 0.5) {
            for (std::size_t j = 0; j < m; ++j) trial[j] = q[j] + t * dir[j];
            J_new = discrete_profit(inst, trial);
            if (J_new >= J + 1e-4 * t * slope) break;
        }
        if (t <= 1e-20) {
            converged = true;  // no ascent left at machine precision
            break;
        }
        q = trial;
        const double change = std::abs(J_new - J);
        J = J_new;
        if (change < 1e-12 && t * step_norm < 1e-9) {
            converged = true;
            ++it;
            break;
        }
    }
    sol.q = q;
    sol.p = envelope_prices(inst, q);
    sol.profit = discrete_profit(inst, q);
    sol.iterations = it;
    const auto g = gradient(q);
    sol.multiplier = -std::accumulate(g.begin(), g.end(), 0.0);
    if (!converged)
        throw ConvergenceError(
            fmt::format("solve_discrete did not converge in {} iterations", max_iter), sol);
    return sol;
}

LinearMenuObjective::LinearMenuObjective(const ModelParams& params,
                                         const TypeDistribution& dist,
                                         std::vector<double> grid)
    : params_(params), grid_(std::move(grid)) {
    const std::size_t n = grid_.size();
    if (n < 2) throw DomainError("objective needs at least 2 grid points");
    dF_.resize(n - 1);
    f_.resize((n - 1) * num::kGaussPoints);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        dF_[i] = dist.cdf(grid_[i + 1]) - dist.cdf(grid_[i]);
        const double h = grid_[i + 1] - grid_[i];
        for (int k = 0; k < num::kGaussPoints; ++k)
            f_[i * num::kGaussPoints + static_cast<std::size_t>(k)] =
                dist.pdf(grid_[i] + 0.5 * h * (num::kGaussNodes[k] + 1.0));
    }
    mass_ = std::accumulate(dF_.begin(), dF_.end(), 0.0);
}

double LinearMenuObjective::profit(const std::vector<double>& q) const {
    double total = 0.0, rent = 0.0;
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        const double x0 = grid_[i], h = grid_[i + 1] - x0;
        const double dq = q[i + 1] - q[i];
        const double u0 = x0 * q[i] - rent - cost(params_, q[i]);
        double corr = 0.0;
        for (int k = 0; k < num::kGaussPoints; ++k) {
            const double s = 0.5 * (num::kGaussNodes[k] + 1.0);
            const double t = x0 + s * h;
            const double qt = q[i] + s * dq;
            const double rt = rent + h * (q[i] * s + 0.5 * dq * s * s);
            const double ut = t * qt - rt - cost(params_, qt);
            corr += num::kGaussWeights[k] * (ut - u0) *
                    f_[i * num::kGaussPoints + static_cast<std::size_t>(k)];
        }
        total += u0 * dF_[i] + 0.5 * h * corr;
        rent += 0.5 * h * (q[i] + q[i + 1]);
    }
    return total;
}

double LinearMenuObjective::mean_qos(const std::vector<double>& q) const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        const double h = grid_[i + 1] - grid_[i];
        const double dq = q[i + 1] - q[i];
        double corr = 0.0;
        for (int k = 0; k < num::kGaussPoints; ++k) {
            const double s = 0.5 * (num::kGaussNodes[k] + 1.0);
            corr += num::kGaussWeights[k] * s * dq *
                    f_[i * num::kGaussPoints + static_cast<std::size_t>(k)];
        }
        total += q[i] * dF_[i] + 0.5 * h * corr;
    }
    return total;
}

double adversarial_probe(const ContractMenu& menu, const DiscreteInstance& instance,
                         const TypeDistribution& dist, int trials,
                         std::uint64_t seed) {
    if (trials <= 0) return 0.0;
    menu.validate();
    instance.validate();
    const LinearMenuObjective obj(instance.params, dist, menu.grid);
    const auto& grid = menu.grid;
    const std::size_t n = grid.size();
    const double lo = grid.front(), hi = grid.back();
    const double base = obj.profit(menu.q);
    const double target = obj.mean_qos(menu.q);

    std::vector<double> knots = instance.types;
    if (knots.front() > lo) knots.insert(knots.begin(), lo);
    if (knots.back() < hi) knots.push_back(hi);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i == 0 ? grid[0] : 0.5 * (grid[i - 1] + grid[i]);
        const double b = i + 1 == n ? grid[n - 1] : 0.5 * (grid[i] + grid[i + 1]);
        w[i] = std::max(dist.cdf(b) - dist.cdf(a), 1e-300);
    }

    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double best = 0.0;
    std::vector<double> v(knots.size()), q(n);
    for (int t = 0; t < trials; ++t) {
        const double eps = std::pow(10.0, -4.0 + 3.5 * unit(gen));
        std::fill(v.begin(), v.end(), 0.0);
        switch (t % 3) {
            case 0:  // independent noise at every knot
                for (auto& x : v) x = eps * normal(gen);
                break;
            case 1: {  // a few tent bumps
                const int bumps = 1 + static_cast<int>(4 * unit(gen));
                for (int b = 0; b < bumps; ++b) {
                    const double c = lo + (hi - lo) * unit(gen);
                    const double width = (hi - lo) * std::pow(10.0, -2.0 + 1.7 * unit(gen));
                    const double amp = eps * normal(gen);
                    for (std::size_t k = 0; k < knots.size(); ++k)
                        v[k] += amp * std::max(0.0, 1.0 - std::abs(knots[k] - c) / width);
                }
                break;
            }
            default: {  // a single knot
                const auto k = static_cast<std::size_t>(unit(gen) * static_cast<double>(knots.size()));
                v[std::min(k, knots.size() - 1)] = eps * normal(gen);
            }
        }
        for (std::size_t i = 0; i < n; ++i) q[i] = menu.q[i] + num::interp(knots, v, grid[i]);
        if (!std::is_sorted(q.begin(), q.end())) q = num::isotonic_fit(q, w);
        const double shift = (target - obj.mean_qos(q)) / obj.support_mass();
        for (auto& x : q) x += shift;
        best = std::max(best, obj.profit(q) - base);
    }
    return best;
}

}  // namespace qosc
