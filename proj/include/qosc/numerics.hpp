#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qosc::num {

using Fn = std::function<double(double)>;

// Composite Simpson with n (even) subintervals.
double simpson(const Fn& f, double a, double b, int n);

// Simpson starting at n0 subintervals, doubling until two successive
// estimates differ by less than tol. Returns the finer estimate.
double simpson_refined(const Fn& f, double a, double b, int n0 = 2048,
                       double tol = 1e-9, int max_n = 1 << 20);

// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const Fn& f, double a, double b, double tol = 1e-12,
                        int max_depth = 50);

// Root of f in [a, b]; f(a) and f(b) must have opposite signs.
double find_root(const Fn& f, double a, double b, double xtol = 0.0,
                 int max_iter = 200);

// phi_i = integral of g from x_0 to x_i, one Simpson panel per interval
// using the exact midpoint value of g.
std::vector<double> cumulative_integral(std::span<const double> x, const Fn& g);

// Piecewise-linear interpolation; x strictly increasing, clamps to ends.
double interp(std::span<const double> x, std::span<const double> y, double t);

struct IsotonicBlock {
    std::size_t begin;  // first index
    std::size_t end;    // one past last index
    double value;
    double weight;
};

// Weighted least-squares nondecreasing fit (pool adjacent violators).
std::vector<IsotonicBlock> isotonic_blocks(std::span<const double> y,
                                           std::span<const double> w);
std::vector<double> isotonic_fit(std::span<const double> y,
                                 std::span<const double> w);

// Gauss-Legendre nodes/weights on [-1, 1] (5 points).
inline constexpr int kGaussPoints = 5;
extern const double kGaussNodes[kGaussPoints];
extern const double kGaussWeights[kGaussPoints];

}  // namespace qosc::num
