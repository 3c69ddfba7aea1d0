#pragma once

#include <iosfwd>
#include <string>

#include "qosc/io.hpp"

namespace qosc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kInfeasible = 2;  // also: required artifact missing
inline constexpr int kNumericError = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct VrMetrics {
    double resolution;   // vertical pixels
    double delay_s;      // seconds
    double reliability;  // success probability
};

// Affine back-mapping from QoS to VR metrics, anchored at q = 5 with
// (720p, 0.15 s, 97%) and clamped to the metric ranges.
struct VrMapping {
    double anchor_q = 5.0;
    double resolution_anchor = 720.0, resolution_min = 240.0, resolution_max = 1080.0;
    double delay_anchor = 0.15, delay_min = 0.05, delay_max = 0.5;
    double reliability_anchor = 0.97, reliability_min = 0.95, reliability_max = 0.99;
    double resolution_slope = 0.0;   // per unit q, >= 0
    double delay_slope = 0.0;        // per unit q, <= 0
    double reliability_slope = 0.0;  // per unit q, >= 0
    double q_min = 0.0, q_max = 0.0;  // calibration range

    // Largest slopes that keep [q_min, q_max] inside every metric range.
    static VrMapping calibrated(double q_min, double q_max);
    VrMetrics map(double q) const;
    io::json to_json() const;
};

}  // namespace qosc::cli
