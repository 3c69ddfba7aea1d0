#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qosc {

// Parametric shapes. Gamma and Weibull use a rate parameter:
// Gamma f = r^a x^(a-1) e^(-r x) / Gamma(a), Weibull f = r a x^(a-1) e^(-r x^a).
struct Uniform {};
struct Exponential { double rate; };
struct Gamma { double shape; double rate; };
struct Weibull { double shape; double rate; };
struct TruncatedNormal { double mean; double stddev; };
// Density given at breakpoints, linear in between, floored at 1e-12.
struct EmpiricalPiecewise {
    std::vector<double> breakpoints;
    std::vector<double> densities;
};

using ComponentShape =
    std::variant<Uniform, Exponential, Gamma, Weibull, TruncatedNormal>;
struct MixtureComponent {
    double weight;
    ComponentShape shape;
};
// Weighted sum of component densities; weights are normalized to sum to 1.
struct Mixture { std::vector<MixtureComponent> components; };

using DistKind = std::variant<Uniform, Exponential, Gamma, Weibull,
                              TruncatedNormal, EmpiricalPiecewise, Mixture>;

// User-type distribution on [lo, hi]. Without renormalization pdf/cdf are the
// raw formulas restricted to the support, so cdf(hi) may be below 1.
class TypeDistribution {
public:
    TypeDistribution(DistKind kind, double lo, double hi,
                     bool renormalize = false);

    static TypeDistribution uniform(double lo, double hi);
    static TypeDistribution exponential(double rate, double lo, double hi,
                                        bool renormalize = false);

    const DistKind& kind() const { return kind_; }
    std::string kind_name() const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool renormalized() const { return renormalize_; }

    double pdf(double x) const;
    double cdf(double x) const;
    // 1 - cdf(x), evaluated without cancellation.
    double survival(double x) const;
    double pdf_derivative(double x) const;
    // cdf(hi) - cdf(lo).
    double support_mass() const { return mass_; }
    // Inverse of the distribution conditioned on the support; u in (0, 1).
    double quantile(double u) const;

private:
    double check(double x) const;
    double raw_pdf(double x) const;
    double raw_cdf(double x) const;
    double raw_sf(double x) const;
    double raw_dpdf(double x) const;

    DistKind kind_;
    double lo_, hi_;
    bool renormalize_;
    double raw_lo_ = 0.0, raw_hi_ = 0.0, norm_ = 1.0, mass_ = 1.0;
};

struct RegularityReport {
    bool regular = true;
    std::vector<std::pair<double, double>> violating_intervals;
    bool fully_pooling = false;
};

double pdf(const TypeDistribution& d, double x);
double cdf(const TypeDistribution& d, double x);
// psi(x) = x - (1 - F(x)) / f(x)
double virtual_shift(const TypeDistribution& d, double x);
RegularityReport regularity_check(const TypeDistribution& d, int grid_n = 1024);
std::vector<double> sample(const TypeDistribution& d, std::size_t n,
                           std::uint64_t seed);

struct HistogramBin {
    double bin_center;
    double count;
};
// MLE rate 1 / (count-weighted mean of bin centers). Support defaults to
// [0, largest bin center].
TypeDistribution fit_exponential(const std::vector<HistogramBin>& histogram);
TypeDistribution fit_exponential(const std::vector<HistogramBin>& histogram,
                                 double lo, double hi);

}  // namespace qosc
