#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qosc/distribution.hpp"
#include "qosc/model.hpp"

namespace qosc {

struct RegularSolution {
    ContractMenu menu;
    double beta = 0.0;
    std::vector<double> phi_curve;  // information rent, zero at delta_lo
    bool reputation_binding = true;
    std::vector<std::string> warnings;
};

// Smallest multiplier keeping psi + beta > 0 on the support, plus 1e-12.
double beta_lower_bound(const TypeDistribution& dist);
// Mean QoS of the unpooled candidate at multiplier beta.
double reputation_integral(const ModelParams& params,
                           const TypeDistribution& dist, double beta);
double solve_beta(const ModelParams& params, const TypeDistribution& dist);
RegularSolution solve_regular(const ModelParams& params,
                              const TypeDistribution& dist, int grid_n = 512);
// Uniform types on [delta_lo, delta_hi].
RegularSolution closed_form_uniform(const ModelParams& params, int grid_n = 512);
// Exponential types with rate rho, not renormalized.
RegularSolution closed_form_exponential(const ModelParams& params, double rho,
                                        int grid_n = 512);

namespace detail {
// Root of mean_qos(beta) = q_bar for an increasing mean_qos, searching
// (beta_min, beta_min + 1e6]. Throws InfeasibleError without a bracket.
double solve_multiplier(const std::function<double(double)>& mean_qos,
                        double beta_min, double q_bar);
}  // namespace detail

}  // namespace qosc
