#pragma once

#include <cstdint>
#include <vector>

#include "qosc/distribution.hpp"
#include "qosc/errors.hpp"
#include "qosc/model.hpp"

namespace qosc {

// Finite-type version of the screening problem.
struct DiscreteInstance {
    std::vector<double> types;   // strictly increasing
    std::vector<double> masses;  // positive, sum to 1
    ModelParams params;

    void validate() const;
};

struct DiscreteSolution {
    std::vector<double> q;
    std::vector<double> p;
    double profit = 0.0;
    double multiplier = 0.0;  // Lagrange multiplier of the mean-QoS equality
    int iterations = 0;
};

class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, DiscreteSolution last)
        : NumericError(what), last_(std::move(last)) {}
    const DiscreteSolution& last_iterate() const { return last_; }

private:
    DiscreteSolution last_;
};

// m equal cells; each type sits at its cell's left edge and carries the cell's
// probability, renormalized to total 1.
DiscreteInstance discretize(const ModelParams& params,
                            const TypeDistribution& dist, int m);

// Objective sum f_i (p_i - C(q_i)) with p from the envelope: V_1 = 0,
// V_i = sum_{j<i} q_j (d_{j+1} - d_j), p_i = d_i q_i - V_i.
double discrete_profit(const DiscreteInstance& inst, const std::vector<double>& q);
std::vector<double> envelope_prices(const DiscreteInstance& inst,
                                    const std::vector<double>& q);
DiscreteSolution solve_discrete(const DiscreteInstance& inst,
                                int max_iter = 100000);

// Continuum profit of the piecewise-linear menu through (grid, q), with
// prices rebuilt from the envelope.
class LinearMenuObjective {
public:
    LinearMenuObjective(const ModelParams& params, const TypeDistribution& dist,
                        std::vector<double> grid);
    double profit(const std::vector<double>& q) const;
    double mean_qos(const std::vector<double>& q) const;
    const std::vector<double>& grid() const { return grid_; }
    double support_mass() const { return mass_; }

private:
    ModelParams params_;
    std::vector<double> grid_;
    std::vector<double> dF_;  // cell probabilities
    std::vector<double> f_;   // pdf at Gauss points, row-major per cell
    double mass_ = 1.0;
};

// Largest profit gain found by random monotone perturbations of the menu's
// q that keep the mean QoS fixed; knots sit at the instance's types.
// Returns 0 when nothing improves.
double adversarial_probe(const ContractMenu& menu, const DiscreteInstance& instance,
                         const TypeDistribution& dist, int trials,
                         std::uint64_t seed);

}  // namespace qosc
