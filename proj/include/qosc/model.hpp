#pragma once

#include <string>
#include <vector>

#include "qosc/distribution.hpp"

namespace qosc {

struct ModelParams {
    double a = 0.47;        // cost exponent rate
    double sigma = 0.16;    // cost scale
    double q_bar = 5.0;     // mean-QoS target
    double delta_lo = 0.0;
    double delta_hi = 4.0;

    void validate() const;
    // Throws unless the support matches the distribution's.
    void check_support(const TypeDistribution& d) const;
};

enum class Provenance {
    RegularClosedForm,
    Ironed,
    FullInfoBenchmark,
    FullPooling,
    Discretized
};
std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct PoolingInterval {
    double start;
    double end;
    double level;
};

// Contract menu sampled on a grid; evaluated between nodes by linear
// interpolation.
struct ContractMenu {
    std::vector<double> grid;
    std::vector<double> q;
    std::vector<double> p;
    double beta = 0.0;
    std::vector<PoolingInterval> pooling_intervals;
    Provenance provenance = Provenance::RegularClosedForm;

    std::size_t size() const { return grid.size(); }
    double q_at(double delta) const;
    double p_at(double delta) const;
    bool pooled_at(double delta) const;
    // Throws DomainError on malformed grids or lengths.
    void validate() const;
};

struct VerificationReport {
    double max_ic_regret = 0.0;
    double min_ir_slack = 0.0;
    double reputation_residual = 0.0;
    bool monotone = true;
    double expected_profit = 0.0;
    // cdf(hi) - cdf(lo); divides expected_profit into a per-user mean.
    double support_mass = 1.0;

    // The reputation constraint is one-sided: over-delivery passes.
    bool passes(double ic_tol = 1e-6, double ir_tol = -1e-9,
                double rep_tol = 1e-6) const;
};

double phi(double delta, double q);
double cost(const ModelParams& params, double q);
double marginal_cost(const ModelParams& params, double q);
double user_payoff(const ContractMenu& menu, double true_type,
                   double claimed_type);
double sp_utility(const ModelParams& params, const ContractMenu& menu,
                  double delta);
VerificationReport verify(const ModelParams& params,
                          const TypeDistribution& dist,
                          const ContractMenu& menu);

// Expected value of g(delta) over the support with the menu's node values
// g_i, integrating each grid interval against dF (exact for constant g).
double integrate_against_density(const TypeDistribution& dist,
                                 const ContractMenu& menu,
                                 const std::vector<double>& values);

// n points on [lo, hi], denser near lo.
std::vector<double> make_menu_grid(double lo, double hi, int n = 512);
// Sorted union of a grid with extra nodes; drops near-duplicates.
std::vector<double> merge_nodes(std::vector<double> grid,
                                const std::vector<double>& extra);
// p = delta * q - phi.
std::vector<double> envelope_prices(const std::vector<double>& grid,
                                    const std::vector<double>& q,
                                    const std::vector<double>& phi_curve);

}  // namespace qosc
