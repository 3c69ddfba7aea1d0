#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qosc/distribution.hpp"
#include "qosc/model.hpp"

namespace qosc {

enum class IntervalCase { Interior, Left, Right, Full };
std::string to_string(IntervalCase c);

struct IntervalCertificate {
    int index = 0;
    double start = 0.0;
    double end = 0.0;
    double level = 0.0;              // q_n
    double integral_residual = 0.0;  // flat-interval condition
    IntervalCase kind = IntervalCase::Interior;
    double gap_start = 0.0;  // q_n - q*(start)
    double gap_end = 0.0;    // q_n - q*(end)
    bool endpoint_ok = false;
};

struct IronedSolution {
    ContractMenu menu;
    double beta = 0.0;
    std::vector<IntervalCertificate> interval_certificates;
    std::vector<double> phi_curve;
    int merge_count = 0;  // PAV blocks joined across gaps under 2 cells
    std::vector<std::string> warnings;
};

// Pooled block of psi under the f-measure, endpoints refined off-grid.
struct IroningBlock {
    double start;
    double end;
    double level;  // f-weighted mean of psi over [start, end]
    IntervalCase kind;
};

struct IroningResult {
    std::vector<IroningBlock> blocks;
    int merge_count = 0;
    std::vector<std::string> warnings;
};

// Detect pooled blocks on a uniform grid of n points and refine their ends.
IroningResult iron(const TypeDistribution& dist, int n = 4096);

// Integral of psi f over [a, b] in closed form: b (F(b) - 1) - a (F(a) - 1).
double psi_moment(const TypeDistribution& dist, double a, double b);

std::optional<IronedSolution> check_full_pooling(const ModelParams& params,
                                                 const TypeDistribution& dist,
                                                 int grid_n = 512);
IronedSolution solve_general(const ModelParams& params,
                             const TypeDistribution& dist, int grid_n = 512);
std::vector<IntervalCertificate> interval_certificates(
    const ModelParams& params, const TypeDistribution& dist,
    const IronedSolution& solution);

// Running-maximum clamp of the unpooled candidate, with its own multiplier
// restoring the reputation equality. Baseline for profit comparisons.
ContractMenu naive_clamp_menu(const ModelParams& params,
                              const TypeDistribution& dist, int n = 4097);

}  // namespace qosc
