#pragma once

// Shared instances and reference computations for the test suites. The
// reference routines use Boost's adaptive Gauss-Kronrod and plain bisection so
// they share no code with the library's Simpson/toms748 paths.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qosc/distribution.hpp"
#include "qosc/model.hpp"

namespace qtest {

using qosc::ModelParams;
using qosc::TypeDistribution;

inline double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

// Integral of g(d) f(d) over [lo, hi] after d = lo + t^2, which removes the
// inverse-square-root singularities of the shape < 1 densities.
inline double expect(const TypeDistribution& d, const std::function<double(double)>& g) {
    const double lo = d.lo(), hi = d.hi();
    return integrate([&](double t) { const double x = std::min(lo + t * t, hi); return g(x) * d.pdf(x) * 2.0 * t; },
                     0.0, std::sqrt(hi - lo));
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Exhaustive pairwise IC regret over the menu's own nodes.
inline double brute_ic_regret(const qosc::ContractMenu& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        const double own = m.grid[i] * m.q[i] - m.p[i];
        for (std::size_t j = 0; j < m.grid.size(); ++j)
            worst = std::max(worst, m.grid[i] * m.q[j] - m.p[j] - own);
    }
    return worst;
}

inline ModelParams case_params(double a = 0.47) { return {a, 0.16, 5.0, 0.0, 4.0}; }
inline TypeDistribution case_dist() { return TypeDistribution::exponential(0.952, 0.0, 4.0); }
inline TypeDistribution case_dist_renorm() {
    return TypeDistribution::exponential(0.952, 0.0, 4.0, true);
}
// q_bar = 8: the smallest integer target that is attainable for the uniform.
inline ModelParams uniform_params() { return {0.47, 0.16, 8.0, 0.0, 4.0}; }
inline TypeDistribution uniform_dist() { return TypeDistribution::uniform(0.0, 4.0); }

inline TypeDistribution bimodal_dist() {
    qosc::Mixture m{{{0.3, qosc::Uniform{}},
                     {0.35, qosc::TruncatedNormal{1.0, 0.25}},
                     {0.35, qosc::TruncatedNormal{3.0, 0.25}}}};
    return TypeDistribution(m, 0.0, 4.0, true);
}
inline ModelParams bimodal_params() { return {0.47, 0.16, 12.0, 0.0, 4.0}; }

// Density spike at the bottom: psi decreases at the left edge.
inline TypeDistribution left_spike_dist() {
    qosc::Mixture m{{{0.4, qosc::Exponential{8.0}}, {0.6, qosc::Uniform{}}}};
    return TypeDistribution(m, 0.0, 4.0, true);
}
inline ModelParams left_spike_params() { return {0.47, 0.16, 6.0, 0.0, 4.0}; }

inline TypeDistribution gamma_dist() { return TypeDistribution(qosc::Gamma{0.5, 4.0}, 0.0, 4.0); }
inline TypeDistribution weibull_dist() { return TypeDistribution(qosc::Weibull{0.5, 10.0}, 0.0, 4.0); }

inline std::string data_path(const std::string& name) {
    return std::string(QOSC_TEST_DATA_DIR) + "/" + name;
}

}  // namespace qtest
