#include "qosc/ironing_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "qosc/errors.hpp"
#include "qosc/numerics.hpp"
#include "qosc/regular_solver.hpp"

namespace qosc {

std::string to_string(IntervalCase c) {
    switch (c) {
        case IntervalCase::Interior: return "interior";
        case IntervalCase::Left: return "left";
        case IntervalCase::Right: return "right";
        case IntervalCase::Full: return "full";
    }
    return "interior";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double q_of(const ModelParams& params, double shifted) {
    if (!(shifted > 0)) return kNaN;
    return std::log(shifted / (params.a * params.sigma)) / params.a;
}

struct Refiner {
    const TypeDistribution& d;
    double lo, hi, h;

    double psi(double x) const { return virtual_shift(d, x); }
    double moment(double a, double b) const { return psi_moment(d, a, b); }
    double mass(double a, double b) const { return d.cdf(b) - d.cdf(a); }

    // Upper end b of a block starting at lo: psi(b) equals the block mean.
    std::optional<double> left(double b_est) const {
        auto k = [&](double b) { return moment(lo, b) - psi(b) * mass(lo, b); };
        for (double w = 4 * h; w <= 512 * h; w *= 2) {
            const double bl = std::max(lo + 0.5 * h, b_est - w);
            const double bh = std::min(hi, b_est + w);
            if (k(bl) > 0 && k(bh) < 0) return num::find_root(k, bl, bh);
        }
        return std::nullopt;
    }

    // Lower end a of a block ending at hi.
    std::optional<double> right(double a_est) const {
        auto k = [&](double a) { return moment(a, hi) - psi(a) * mass(a, hi); };
        for (double w = 4 * h; w <= 512 * h; w *= 2) {
            const double al = std::max(lo, a_est - w);
            const double ah = std::min(hi - 0.5 * h, a_est + w);
            if (k(al) > 0 && k(ah) < 0) return num::find_root(k, al, ah);
        }
        return std::nullopt;
    }

    // Interior block: psi(a) = psi(b) = m with m the mean of psi over [a, b].
    std::optional<std::pair<double, double>> interior(double a_est,
                                                      double b_est) const {
        for (double w = 4 * h; w <= 512 * h; w *= 2) {
            const double a0 = std::max(lo, a_est - w), a1 = a_est + w;
            const double b0 = b_est - w, b1 = std::min(hi, b_est + w);
            if (a1 >= b0) break;
            const double m_lo = std::max(psi(a0), psi(b0));
            const double m_hi = std::min(psi(a1), psi(b1));
            if (!(m_lo < m_hi)) continue;
            auto ends = [&](double m) {
                const double a = num::find_root([&](double x) { return psi(x) - m; }, a0, a1);
                const double b = num::find_root([&](double x) { return psi(x) - m; }, b0, b1);
                return std::pair{a, b};
            };
            auto k = [&](double m) {
                const auto [a, b] = ends(m);
                return moment(a, b) - m * mass(a, b);
            };
            try {
                const double k_lo = k(m_lo), k_hi = k(m_hi);
                if (!(k_lo > 0 && k_hi < 0)) continue;
                return ends(num::find_root(k, m_lo, m_hi));
            } catch (const NumericError&) {
                continue;  // psi not monotone across this window
            }
        }
        return std::nullopt;
    }
};

}  // namespace

double psi_moment(const TypeDistribution& dist, double a, double b) {
    return -b * dist.survival(b) + a * dist.survival(a);
}

IroningResult iron(const TypeDistribution& dist, int n) {
    if (n < 16) throw DomainError("ironing grid needs at least 16 points");
    IroningResult res;
    const double lo = dist.lo(), hi = dist.hi();
    const double h = (hi - lo) / (n - 1);
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> x(un), psi(un), w(un);
    for (std::size_t i = 0; i < un; ++i) {
        x[i] = lo + h * static_cast<double>(i);
        psi[i] = virtual_shift(dist, x[i]);
    }
    x.back() = hi;
    for (std::size_t i = 0; i < un; ++i) {
        const double e0 = i == 0 ? lo : 0.5 * (x[i - 1] + x[i]);
        const double e1 = i + 1 == un ? hi : 0.5 * (x[i] + x[i + 1]);
        w[i] = dist.cdf(e1) - dist.cdf(e0);
    }
    std::vector<num::IsotonicBlock> pooled;
    for (const auto& b : num::isotonic_blocks(psi, w)) {
        if (b.end - b.begin < 2) continue;
        if (!pooled.empty() && b.begin - pooled.back().end < 2) {
            pooled.back().end = b.end;
            ++res.merge_count;
            continue;
        }
        pooled.push_back(b);
    }

    const Refiner rf{dist, lo, hi, h};
    for (const auto& b : pooled) {
        IroningBlock blk{};
        const bool at_lo = b.begin == 0, at_hi = b.end == un;
        const double a_est = x[b.begin], b_est = x[b.end - 1];
        bool refined = true;
        if (at_lo && at_hi) {
            blk = {lo, hi, 0.0, IntervalCase::Full};
        } else if (at_lo) {
            const auto e = rf.left(b_est);
            blk = {lo, e.value_or(b_est), 0.0, IntervalCase::Left};
            refined = e.has_value();
        } else if (at_hi) {
            const auto s = rf.right(a_est);
            blk = {s.value_or(a_est), hi, 0.0, IntervalCase::Right};
            refined = s.has_value();
        } else {
            const auto ab = rf.interior(a_est, b_est);
            blk = {ab ? ab->first : a_est, ab ? ab->second : b_est, 0.0,
                   IntervalCase::Interior};
            refined = ab.has_value();
        }
        if (!refined)
            res.warnings.push_back(fmt::format(
                "block near [{:.6g}, {:.6g}] kept at grid resolution", a_est, b_est));
        blk.level = psi_moment(dist, blk.start, blk.end) /
                    (dist.cdf(blk.end) - dist.cdf(blk.start));
        if (!res.blocks.empty() && blk.start <= res.blocks.back().end) {
            // Refined ends collided: pool the two blocks.
            auto& prev = res.blocks.back();
            prev.end = blk.end;
            if (blk.kind == IntervalCase::Right || blk.kind == IntervalCase::Full)
                prev.kind = prev.kind == IntervalCase::Left ? IntervalCase::Full
                                                            : IntervalCase::Right;
            prev.level = psi_moment(dist, prev.start, prev.end) /
                         (dist.cdf(prev.end) - dist.cdf(prev.start));
            ++res.merge_count;
            continue;
        }
        res.blocks.push_back(blk);
    }
    return res;
}

std::optional<IronedSolution> check_full_pooling(const ModelParams& params,
                                                 const TypeDistribution& dist,
                                                 int grid_n) {
    params.check_support(dist);
    if (!regularity_check(dist).fully_pooling) return std::nullopt;
    // q = q_bar only meets the reputation constraint when the support carries all the mass.
    if (std::abs(dist.support_mass() - 1.0) > 1e-6) return std::nullopt;
    IronedSolution sol;
    auto& menu = sol.menu;
    menu.provenance = Provenance::FullPooling;
    menu.grid = make_menu_grid(dist.lo(), dist.hi(), grid_n);
    const std::size_t n = menu.grid.size();
    menu.q.assign(n, params.q_bar);
    menu.p.assign(n, dist.lo() * params.q_bar);
    menu.pooling_intervals = {{dist.lo(), dist.hi(), params.q_bar}};
    menu.beta = 0.0;
    sol.beta = 0.0;
    sol.phi_curve.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        sol.phi_curve[i] = (menu.grid[i] - dist.lo()) * params.q_bar;
    sol.warnings.push_back("full pooling: no reputation multiplier, beta reported as 0");
    return sol;
}

IronedSolution solve_general(const ModelParams& params,
                             const TypeDistribution& dist, int grid_n) {
    if (auto fp = check_full_pooling(params, dist, grid_n)) return *fp;
    const double lo = dist.lo(), hi = dist.hi();
    const IroningResult ir = iron(dist);
    const auto& blocks = ir.blocks;

    std::vector<double> block_mass;
    for (const auto& b : blocks) block_mass.push_back(dist.cdf(b.end) - dist.cdf(b.start));
    auto block_of = [&](double x) -> int {
        for (std::size_t k = 0; k < blocks.size(); ++k)
            if (x >= blocks[k].start && x <= blocks[k].end) return static_cast<int>(k);
        return -1;
    };
    std::vector<std::pair<double, double>> segments;
    double cur = lo;
    for (const auto& b : blocks) {
        if (b.start > cur) segments.emplace_back(cur, b.start);
        cur = b.end;
    }
    if (cur < hi) segments.emplace_back(cur, hi);

    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) worst = std::max(worst, -b.level);
    for (int i = 0; i <= 4096; ++i) {
        const double x = lo + (hi - lo) * i / 4096.0;
        if (block_of(x) < 0) worst = std::max(worst, -virtual_shift(dist, x));
    }
    for (const auto& s : segments)
        worst = std::max({worst, -virtual_shift(dist, s.first), -virtual_shift(dist, s.second)});
    const double beta_min = worst + 1e-12;

    auto mean_qos = [&](double beta) {
        double total = 0.0;
        for (const auto& [s0, s1] : segments)
            total += num::simpson_refined(
                [&](double x) {
                    const double v = q_of(params, virtual_shift(dist, x) + beta);
                    return std::isnan(v) ? -std::numeric_limits<double>::infinity()
                                         : v * dist.pdf(x);
                },
                s0, s1, 2048, 1e-10, 1 << 16);
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const double v = q_of(params, blocks[k].level + beta);
            total += (std::isnan(v) ? -std::numeric_limits<double>::infinity() : v) *
                     block_mass[k];
        }
        return total;
    };
    const double beta = detail::solve_multiplier(mean_qos, beta_min, params.q_bar);

    IronedSolution sol;
    sol.beta = beta;
    sol.merge_count = ir.merge_count;
    sol.warnings = ir.warnings;
    auto& menu = sol.menu;
    menu.beta = beta;
    menu.provenance = Provenance::Ironed;
    std::vector<double> ends;
    for (const auto& b : blocks) {
        ends.push_back(b.start);
        ends.push_back(b.end);
        menu.pooling_intervals.push_back({b.start, b.end, q_of(params, b.level + beta)});
    }
    menu.grid = merge_nodes(make_menu_grid(lo, hi, grid_n), ends);
    auto qf = [&](double x) {
        const int k = block_of(x);
        return k >= 0 ? menu.pooling_intervals[static_cast<std::size_t>(k)].level
                      : q_of(params, virtual_shift(dist, x) + beta);
    };
    menu.q.resize(menu.grid.size());
    for (std::size_t i = 0; i < menu.grid.size(); ++i) menu.q[i] = qf(menu.grid[i]);
    sol.phi_curve = num::cumulative_integral(menu.grid, qf);
    menu.p = envelope_prices(menu.grid, menu.q, sol.phi_curve);
    if (menu.q.front() < 0.0)
        sol.warnings.push_back(fmt::format(
            "q at the lowest type is negative ({:.6g}); menu returned unclipped",
            menu.q.front()));
    sol.interval_certificates = interval_certificates(params, dist, sol);
    return sol;
}

std::vector<IntervalCertificate> interval_certificates(
    const ModelParams& params, const TypeDistribution& dist,
    const IronedSolution& solution) {
    std::vector<IntervalCertificate> out;
    if (solution.menu.provenance == Provenance::FullPooling) return out;
    const double beta = solution.beta;
    const double as = params.a * params.sigma;
    const double lo = dist.lo(), hi = dist.hi();
    const double tol = 1e-12 * std::max(1.0, hi);
    auto q_star = [&](double x) { return q_of(params, virtual_shift(dist, x) + beta); };
    int idx = 0;
    for (const auto& iv : solution.menu.pooling_intervals) {
        IntervalCertificate c;
        c.index = ++idx;
        c.start = iv.start;
        c.end = iv.end;
        c.level = iv.level;
        const double cn = as * std::exp(params.a * iv.level);
        c.integral_residual = num::adaptive_simpson(
            [&](double x) {
                const double f = dist.pdf(x);
                return (x - cn) * f - dist.survival(x) + beta * f;
            },
            iv.start, iv.end, 1e-13);
        const bool at_lo = std::abs(iv.start - lo) <= tol;
        const bool at_hi = std::abs(iv.end - hi) <= tol;
        c.kind = at_lo && at_hi ? IntervalCase::Full
                 : at_lo        ? IntervalCase::Left
                 : at_hi        ? IntervalCase::Right
                                : IntervalCase::Interior;
        c.gap_start = iv.level - q_star(iv.start);
        c.gap_end = iv.level - q_star(iv.end);
        constexpr double eps = 1e-6;
        switch (c.kind) {
            case IntervalCase::Interior:
                c.endpoint_ok = std::abs(c.gap_start) <= eps && std::abs(c.gap_end) <= eps;
                break;
            case IntervalCase::Left:
                c.endpoint_ok = std::abs(c.gap_end) <= eps && c.gap_start <= eps;
                break;
            case IntervalCase::Right:
                c.endpoint_ok = std::abs(c.gap_start) <= eps && c.gap_end >= -eps;
                break;
            case IntervalCase::Full:
                c.endpoint_ok = true;
                break;
        }
        out.push_back(c);
    }
    return out;
}

ContractMenu naive_clamp_menu(const ModelParams& params,
                              const TypeDistribution& dist, int n) {
    params.check_support(dist);
    const double lo = dist.lo(), hi = dist.hi();
    ContractMenu menu;
    menu.provenance = Provenance::RegularClosedForm;
    menu.grid.resize(static_cast<std::size_t>(n));
    std::vector<double> psi(menu.grid.size());
    for (std::size_t i = 0; i < menu.grid.size(); ++i) {
        menu.grid[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        psi[i] = virtual_shift(dist, menu.grid[i]);
    }
    menu.grid.back() = hi;
    auto clamp_q = [&](double beta) {
        std::vector<double> q(psi.size());
        double run = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double v = q_of(params, psi[i] + beta);
            if (!std::isnan(v)) run = std::max(run, v);
            q[i] = run;
        }
        return q;
    };
    auto mean_qos = [&](double beta) {
        ContractMenu m = menu;
        m.q = clamp_q(beta);
        for (double v : m.q)
            if (!std::isfinite(v)) return -std::numeric_limits<double>::infinity();
        return integrate_against_density(dist, m, m.q);
    };
    const double beta = detail::solve_multiplier(mean_qos, -psi.front() + 1e-12, params.q_bar);
    menu.beta = beta;
    menu.q = clamp_q(beta);
    std::vector<double> rent(menu.grid.size(), 0.0);
    for (std::size_t i = 1; i < rent.size(); ++i)
        rent[i] = rent[i - 1] + 0.5 * (menu.q[i] + menu.q[i - 1]) *
                                    (menu.grid[i] - menu.grid[i - 1]);
    menu.p = envelope_prices(menu.grid, menu.q, rent);
    return menu;
}

}  // namespace qosc
