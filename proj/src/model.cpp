#include "qosc/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qosc/errors.hpp"
#include "qosc/numerics.hpp"

namespace qosc {

void ModelParams::validate() const {
    if (!(a > 0 && std::isfinite(a))) throw DomainError("a must be > 0");
    if (!(sigma > 0 && std::isfinite(sigma))) throw DomainError("sigma must be > 0");
    if (!(q_bar > 0 && std::isfinite(q_bar))) throw DomainError("q_bar must be > 0");
    if (!(delta_lo >= 0 && delta_hi > delta_lo && std::isfinite(delta_hi)))
        throw DomainError("need delta_hi > delta_lo >= 0");
}

void ModelParams::check_support(const TypeDistribution& d) const {
    validate();
    const double tol = 1e-12 * std::max(1.0, delta_hi);
    if (std::abs(d.lo() - delta_lo) > tol || std::abs(d.hi() - delta_hi) > tol)
        throw DomainError(fmt::format(
            "params support [{}, {}] differs from distribution support [{}, {}]",
            delta_lo, delta_hi, d.lo(), d.hi()));
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::RegularClosedForm: return "RegularClosedForm";
        case Provenance::Ironed: return "Ironed";
        case Provenance::FullInfoBenchmark: return "FullInfoBenchmark";
        case Provenance::FullPooling: return "FullPooling";
        case Provenance::Discretized: return "Discretized";
    }
    return "RegularClosedForm";
}

Provenance provenance_from_string(const std::string& s) {
    for (auto p : {Provenance::RegularClosedForm, Provenance::Ironed,
                   Provenance::FullInfoBenchmark, Provenance::FullPooling,
                   Provenance::Discretized})
        if (to_string(p) == s) return p;
    throw DomainError("unknown provenance: " + s);
}

double ContractMenu::q_at(double delta) const { return num::interp(grid, q, delta); }
double ContractMenu::p_at(double delta) const { return num::interp(grid, p, delta); }

bool ContractMenu::pooled_at(double delta) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(delta));
    for (const auto& iv : pooling_intervals)
        if (delta >= iv.start - tol && delta <= iv.end + tol) return true;
    return false;
}

void ContractMenu::validate() const {
    if (grid.size() < 2) throw DomainError("menu needs at least 2 grid points");
    if (q.size() != grid.size() || p.size() != grid.size())
        throw DomainError("menu columns differ in length");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError("menu grid must be strictly increasing");
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!std::isfinite(q[i]) || !std::isfinite(p[i]))
            throw DomainError("menu has non-finite entries");
    for (std::size_t k = 0; k < pooling_intervals.size(); ++k) {
        const auto& iv = pooling_intervals[k];
        if (!(iv.end >= iv.start))
            throw DomainError("pooling interval has end before start");
        if (k > 0 && iv.start < pooling_intervals[k - 1].end)
            throw DomainError("pooling intervals overlap or are unsorted");
    }
}

bool VerificationReport::passes(double ic_tol, double ir_tol,
                                double rep_tol) const {
    return monotone && max_ic_regret <= ic_tol && min_ir_slack >= ir_tol &&
           reputation_residual >= -rep_tol;
}

double phi(double delta, double q) { return delta * q; }

double cost(const ModelParams& params, double q) {
    const double x = params.a * q;
    if (x > 700.0) throw NumericError(fmt::format("cost overflow at q = {}", q));
    return params.sigma * std::expm1(x);
}

double marginal_cost(const ModelParams& params, double q) {
    const double x = params.a * q;
    if (x > 700.0) throw NumericError(fmt::format("cost overflow at q = {}", q));
    return params.a * params.sigma * std::exp(x);
}

namespace {

void check_type(const ContractMenu& menu, double t) {
    const double slack = 1e-12 * std::max(1.0, std::abs(menu.grid.back()));
    if (!(t >= menu.grid.front() - slack && t <= menu.grid.back() + slack))
        throw DomainError(fmt::format("type {} outside menu support", t));
}

}  // namespace

double user_payoff(const ContractMenu& menu, double true_type,
                   double claimed_type) {
    check_type(menu, true_type);
    check_type(menu, claimed_type);
    return true_type * menu.q_at(claimed_type) - menu.p_at(claimed_type);
}

double sp_utility(const ModelParams& params, const ContractMenu& menu,
                  double delta) {
    check_type(menu, delta);
    return menu.p_at(delta) - cost(params, menu.q_at(delta));
}

double integrate_against_density(const TypeDistribution& dist,
                                 const ContractMenu& menu,
                                 const std::vector<double>& g) {
    const auto& x = menu.grid;
    const std::size_t n = x.size();
    // Nodes where the menu may have a kink: quadratic stencils never straddle them.
    std::vector<bool> kink(n, false);
    for (const auto& iv : menu.pooling_intervals) {
        for (double e : {iv.start, iv.end}) {
            const auto it = std::lower_bound(x.begin(), x.end(), e - 1e-12);
            if (it != x.end() && std::abs(*it - e) <= 1e-10 * std::max(1.0, std::abs(e)))
                kink[static_cast<std::size_t>(it - x.begin())] = true;
        }
    }
    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i) F[i] = dist.cdf(x[i]);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        total += g[i] * (F[i + 1] - F[i]);
        // Lagrange stencil containing [x_i, x_{i+1}] whose inner nodes are
        // smooth: 4 nodes preferred, then 3, then linear.
        std::size_t s = i, len = 2;
        auto smooth_window = [&](long start, std::size_t width) {
            if (start < 0 || static_cast<std::size_t>(start) + width > n) return false;
            for (std::size_t k = 1; k + 1 < width; ++k)
                if (kink[static_cast<std::size_t>(start) + k]) return false;
            return true;
        };
        const long li = static_cast<long>(i);
        for (auto [start, width] : {std::pair{li - 1, std::size_t{4}}, {li, 4}, {li - 2, 4},
                                    {li, 3}, {li - 1, 3}}) {
            if (smooth_window(start, width)) {
                s = static_cast<std::size_t>(start);
                len = width;
                break;
            }
        }
        const double a = x[i], b = x[i + 1], h = b - a;
        double corr = 0.0;
        for (int k = 0; k < num::kGaussPoints; ++k) {
            const double t = a + 0.5 * h * (num::kGaussNodes[k] + 1.0);
            double gt = 0.0;
            for (std::size_t j = s; j < s + len; ++j) {
                double basis = 1.0;
                for (std::size_t l = s; l < s + len; ++l)
                    if (l != j) basis *= (t - x[l]) / (x[j] - x[l]);
                gt += g[j] * basis;
            }
            corr += num::kGaussWeights[k] * (gt - g[i]) * dist.pdf(t);
        }
        total += 0.5 * h * corr;
    }
    return total;
}

VerificationReport verify(const ModelParams& params,
                          const TypeDistribution& dist,
                          const ContractMenu& menu) {
    menu.validate();
    VerificationReport rep;
    const auto& x = menu.grid;
    const auto& q = menu.q;
    const auto& p = menu.p;
    const std::size_t n = x.size();

    rep.monotone = true;
    for (std::size_t i = 1; i < n; ++i)
        if (q[i] < q[i - 1] - 1e-12 * std::max(1.0, std::abs(q[i - 1]))) {
            rep.monotone = false;
            break;
        }

    rep.min_ir_slack = x[0] * q[0] - p[0];
    for (std::size_t i = 1; i < n; ++i)
        rep.min_ir_slack = std::min(rep.min_ir_slack, x[i] * q[i] - p[i]);

    // Exhaustive pairwise check on at most 1024 nodes, adjacent pairs on all.
    constexpr std::size_t kCap = 1024;
    std::vector<std::size_t> idx;
    if (n <= kCap) {
        for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    } else {
        for (std::size_t k = 0; k < kCap; ++k)
            idx.push_back(k * (n - 1) / (kCap - 1));
    }
    double regret = 0.0;
    for (std::size_t i : idx) {
        const double own = x[i] * q[i] - p[i];
        for (std::size_t j : idx) regret = std::max(regret, x[i] * q[j] - p[j] - own);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        regret = std::max(regret, (x[i] * q[i + 1] - p[i + 1]) - (x[i] * q[i] - p[i]));
        regret = std::max(regret, (x[i + 1] * q[i] - p[i]) -
                                      (x[i + 1] * q[i + 1] - p[i + 1]));
    }
    rep.max_ic_regret = regret;

    rep.reputation_residual = integrate_against_density(dist, menu, q) - params.q_bar;
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = p[i] - cost(params, q[i]);
    rep.expected_profit = integrate_against_density(dist, menu, u);
    rep.support_mass = dist.cdf(dist.hi()) - dist.cdf(dist.lo());
    return rep;
}

std::vector<double> make_menu_grid(double lo, double hi, int n) {
    if (n < 2) throw DomainError("grid needs at least 2 points");
    constexpr double kappa = 3.0;
    std::vector<double> g(static_cast<std::size_t>(n));
    const double denom = std::expm1(kappa);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * std::expm1(kappa * t) / denom;
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> merge_nodes(std::vector<double> grid,
                                const std::vector<double>& extra) {
    if (grid.empty()) return grid;
    const double lo = grid.front(), hi = grid.back();
    const double eps = 1e-9 * (hi - lo);
    std::vector<std::pair<double, bool>> all;
    for (double v : grid) all.emplace_back(v, false);
    for (double v : extra)
        if (v >= lo && v <= hi) all.emplace_back(v, true);
    std::sort(all.begin(), all.end());
    std::vector<std::pair<double, bool>> out;
    for (const auto& e : all) {
        if (!out.empty() && e.first - out.back().first <= eps) {
            // Keep inserted nodes and the support ends exactly.
            const bool keep_new = e.second && out.back().first != lo;
            if (keep_new || e.first == hi) out.back() = e;
            continue;
        }
        out.push_back(e);
    }
    std::vector<double> res;
    res.reserve(out.size());
    for (const auto& e : out) res.push_back(e.first);
    return res;
}

std::vector<double> envelope_prices(const std::vector<double>& grid,
                                    const std::vector<double>& q,
                                    const std::vector<double>& phi_curve) {
    std::vector<double> p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        p[i] = grid[i] * q[i] - phi_curve[i];
    return p;
}

}  // namespace qosc
