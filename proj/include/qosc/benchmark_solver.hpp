#pragma once

#include "qosc/distribution.hpp"
#include "qosc/model.hpp"

namespace qosc {

struct BenchmarkSolution {
    ContractMenu menu;
    double beta = 0.0;
    // Filled when computed against a hidden-information solution.
    double information_cost = 0.0;
    bool reputation_binding = true;
};

// Full-information menu: q = ln((delta + beta) / (a sigma)) / a, p = delta q.
BenchmarkSolution solve_full_info(const ModelParams& params,
                                  const TypeDistribution& dist,
                                  int grid_n = 512);

// Hidden-information menu for any distribution: regular inputs use the
// closed-form solver, others the ironing solver.
ContractMenu solve_hidden(const ModelParams& params,
                          const TypeDistribution& dist, int grid_n = 512);

struct InformationCost {
    double full_info_profit;
    double hidden_profit;
    double cost;  // full_info_profit - hidden_profit
};
InformationCost information_cost_detail(const ModelParams& params,
                                        const TypeDistribution& dist,
                                        int grid_n = 512);
double information_cost(const ModelParams& params,
                        const TypeDistribution& dist);

}  // namespace qosc
