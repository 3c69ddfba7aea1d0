#include "qosc/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "qosc/errors.hpp"
#include "qosc/numerics.hpp"

namespace qosc {

namespace {

constexpr double kSingularFloor = 1e-9;
constexpr double kEmpiricalFloor = 1e-12;

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Raw (full-line) formulas for one parametric shape. Uniform needs the owner's
// support.
struct ShapeEval {
    double lo, hi;

    double pdf(const ComponentShape& s, double x) const {
        return std::visit(overloaded{
            [&](const Uniform&) { return 1.0 / (hi - lo); },
            [&](const Exponential& e) {
                return x < 0 ? 0.0 : e.rate * std::exp(-e.rate * x);
            },
            [&](const Gamma& g) {
                if (x < 0) return 0.0;
                const double t = g.shape < 1.0 ? std::max(x, kSingularFloor) : x;
                if (t == 0.0) return g.shape == 1.0 ? g.rate : 0.0;
                return std::exp(g.shape * std::log(g.rate) +
                                (g.shape - 1.0) * std::log(t) - g.rate * t -
                                std::lgamma(g.shape));
            },
            [&](const Weibull& w) {
                if (x < 0) return 0.0;
                const double t = w.shape < 1.0 ? std::max(x, kSingularFloor) : x;
                if (t == 0.0) return w.shape == 1.0 ? w.rate : 0.0;
                return w.rate * w.shape * std::pow(t, w.shape - 1.0) *
                       std::exp(-w.rate * std::pow(t, w.shape));
            },
            [&](const TruncatedNormal& n) {
                const double z = (x - n.mean) / n.stddev;
                return std::exp(-0.5 * z * z) /
                       (n.stddev * std::sqrt(2.0 * std::numbers::pi));
            }}, s);
    }

    double dpdf(const ComponentShape& s, double x) const {
        return std::visit(overloaded{
            [&](const Uniform&) { return 0.0; },
            [&](const Exponential& e) { return -e.rate * pdf(s, x); },
            [&](const Gamma& g) {
                const double t = g.shape < 1.0 ? std::max(x, kSingularFloor) : x;
                if (t <= 0.0) return 0.0;
                return pdf(s, t) * ((g.shape - 1.0) / t - g.rate);
            },
            [&](const Weibull& w) {
                const double t = w.shape < 1.0 ? std::max(x, kSingularFloor) : x;
                if (t <= 0.0) return 0.0;
                return pdf(s, t) * ((w.shape - 1.0) / t -
                                    w.rate * w.shape * std::pow(t, w.shape - 1.0));
            },
            [&](const TruncatedNormal& n) {
                return -pdf(s, x) * (x - n.mean) / (n.stddev * n.stddev);
            }}, s);
    }

    double cdf(const ComponentShape& s, double x) const {
        return std::visit(overloaded{
            [&](const Uniform&) {
                return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
            },
            [&](const Exponential& e) {
                return x <= 0 ? 0.0 : -std::expm1(-e.rate * x);
            },
            [&](const Gamma& g) {
                return x <= 0 ? 0.0 : boost::math::gamma_p(g.shape, g.rate * x);
            },
            [&](const Weibull& w) {
                return x <= 0 ? 0.0 : -std::expm1(-w.rate * std::pow(x, w.shape));
            },
            [&](const TruncatedNormal& n) {
                return 0.5 * std::erfc(-(x - n.mean) / (n.stddev * std::numbers::sqrt2));
            }}, s);
    }

    double sf(const ComponentShape& s, double x) const {
        return std::visit(overloaded{
            [&](const Uniform&) {
                return std::clamp((hi - x) / (hi - lo), 0.0, 1.0);
            },
            [&](const Exponential& e) {
                return x <= 0 ? 1.0 : std::exp(-e.rate * x);
            },
            [&](const Gamma& g) {
                return x <= 0 ? 1.0 : boost::math::gamma_q(g.shape, g.rate * x);
            },
            [&](const Weibull& w) {
                return x <= 0 ? 1.0 : std::exp(-w.rate * std::pow(x, w.shape));
            },
            [&](const TruncatedNormal& n) {
                return 0.5 * std::erfc((x - n.mean) / (n.stddev * std::numbers::sqrt2));
            }}, s);
    }
};

void validate_shape(const ComponentShape& s) {
    std::visit(overloaded{
        [](const Uniform&) {},
        [](const Exponential& e) {
            if (!(e.rate > 0)) throw DomainError("exponential rate must be > 0");
        },
        [](const Gamma& g) {
            if (!(g.shape > 0 && g.rate > 0))
                throw DomainError("gamma shape and rate must be > 0");
        },
        [](const Weibull& w) {
            if (!(w.shape > 0 && w.rate > 0))
                throw DomainError("weibull shape and rate must be > 0");
        },
        [](const TruncatedNormal& n) {
            if (!(n.stddev > 0)) throw DomainError("normal stddev must be > 0");
        }}, s);
}

struct EmpiricalEval {
    const EmpiricalPiecewise& e;

    double density_at(std::size_t i) const {
        return std::max(e.densities[i], kEmpiricalFloor);
    }
    double pdf(double x) const {
        const auto& b = e.breakpoints;
        if (x <= b.front()) return density_at(0);
        if (x >= b.back()) return density_at(b.size() - 1);
        const std::size_t i = static_cast<std::size_t>(
            std::upper_bound(b.begin(), b.end(), x) - b.begin());
        const double s = (x - b[i - 1]) / (b[i] - b[i - 1]);
        return std::max(density_at(i - 1) + s * (density_at(i) - density_at(i - 1)),
                        kEmpiricalFloor);
    }
    double cdf(double x) const {
        const auto& b = e.breakpoints;
        if (x <= b.front()) return 0.0;
        double acc = 0.0;
        for (std::size_t i = 1; i < b.size(); ++i) {
            if (x >= b[i]) {
                acc += 0.5 * (density_at(i - 1) + density_at(i)) * (b[i] - b[i - 1]);
            } else {
                acc += 0.5 * (density_at(i - 1) + pdf(x)) * (x - b[i - 1]);
                break;
            }
        }
        return acc;
    }
};

}  // namespace

TypeDistribution::TypeDistribution(DistKind kind, double lo, double hi,
                                   bool renormalize)
    : kind_(std::move(kind)), lo_(lo), hi_(hi), renormalize_(renormalize) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && hi > lo))
        throw DomainError(fmt::format("invalid support [{}, {}]", lo, hi));
    std::visit(overloaded{
        [](const EmpiricalPiecewise& e) {
            if (e.breakpoints.size() < 2 ||
                e.breakpoints.size() != e.densities.size())
                throw DomainError("empirical density needs >= 2 matching breakpoints/densities");
            for (std::size_t i = 1; i < e.breakpoints.size(); ++i)
                if (!(e.breakpoints[i] > e.breakpoints[i - 1]))
                    throw DomainError("empirical breakpoints must be strictly increasing");
        },
        [](Mixture& m) {
            if (m.components.empty()) throw DomainError("mixture has no components");
            double total = 0.0;
            for (const auto& c : m.components) {
                if (!(c.weight > 0)) throw DomainError("mixture weights must be > 0");
                validate_shape(c.shape);
                total += c.weight;
            }
            if (std::abs(total - 1.0) > 1e-12)
                for (auto& c : m.components) c.weight /= total;
        },
        [](const auto& s) { validate_shape(ComponentShape{s}); }}, kind_);
    if (const auto* e = std::get_if<EmpiricalPiecewise>(&kind_)) {
        if (e->breakpoints.front() > lo + 1e-12 || e->breakpoints.back() < hi - 1e-12)
            throw DomainError("empirical breakpoints must cover the support");
    }
    raw_lo_ = raw_cdf(lo_);
    raw_hi_ = raw_cdf(hi_);
    const double raw_mass = raw_hi_ - raw_lo_;
    if (!(raw_mass > 0))
        throw NumericError("distribution has no mass on the support");
    norm_ = renormalize_ ? raw_mass : 1.0;
    mass_ = renormalize_ ? 1.0 : raw_mass;
}

TypeDistribution TypeDistribution::uniform(double lo, double hi) {
    return TypeDistribution(Uniform{}, lo, hi, false);
}

TypeDistribution TypeDistribution::exponential(double rate, double lo,
                                               double hi, bool renormalize) {
    return TypeDistribution(Exponential{rate}, lo, hi, renormalize);
}

std::string TypeDistribution::kind_name() const {
    return std::visit(overloaded{
        [](const Uniform&) { return std::string("uniform"); },
        [](const Exponential&) { return std::string("exponential"); },
        [](const Gamma&) { return std::string("gamma"); },
        [](const Weibull&) { return std::string("weibull"); },
        [](const TruncatedNormal&) { return std::string("truncated_normal"); },
        [](const EmpiricalPiecewise&) { return std::string("empirical"); },
        [](const Mixture&) { return std::string("mixture"); }}, kind_);
}

double TypeDistribution::check(double x) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(hi_));
    if (!(x >= lo_ - slack && x <= hi_ + slack))
        throw DomainError(fmt::format("type {} outside support [{}, {}]", x, lo_, hi_));
    return std::clamp(x, lo_, hi_);
}

double TypeDistribution::raw_pdf(double x) const {
    const ShapeEval ev{lo_, hi_};
    return std::visit(overloaded{
        [&](const EmpiricalPiecewise& e) { return EmpiricalEval{e}.pdf(x); },
        [&](const Mixture& m) {
            double s = 0.0;
            for (const auto& c : m.components) s += c.weight * ev.pdf(c.shape, x);
            return s;
        },
        [&](const auto& s) { return ev.pdf(ComponentShape{s}, x); }}, kind_);
}

double TypeDistribution::raw_dpdf(double x) const {
    const ShapeEval ev{lo_, hi_};
    return std::visit(overloaded{
        [&](const EmpiricalPiecewise& e) {
            const EmpiricalEval ee{e};
            const double h = (hi_ - lo_) / 1e4;
            const double a = std::max(lo_, x - h), b = std::min(hi_, x + h);
            return (ee.pdf(b) - ee.pdf(a)) / (b - a);
        },
        [&](const Mixture& m) {
            double s = 0.0;
            for (const auto& c : m.components) s += c.weight * ev.dpdf(c.shape, x);
            return s;
        },
        [&](const auto& s) { return ev.dpdf(ComponentShape{s}, x); }}, kind_);
}

double TypeDistribution::raw_cdf(double x) const {
    const ShapeEval ev{lo_, hi_};
    return std::visit(overloaded{
        [&](const EmpiricalPiecewise& e) { return EmpiricalEval{e}.cdf(x); },
        [&](const Mixture& m) {
            double s = 0.0;
            for (const auto& c : m.components) s += c.weight * ev.cdf(c.shape, x);
            return s;
        },
        [&](const auto& s) { return ev.cdf(ComponentShape{s}, x); }}, kind_);
}

double TypeDistribution::raw_sf(double x) const {
    const ShapeEval ev{lo_, hi_};
    return std::visit(overloaded{
        [&](const EmpiricalPiecewise& e) { return 1.0 - EmpiricalEval{e}.cdf(x); },
        [&](const Mixture& m) {
            double s = 0.0;
            for (const auto& c : m.components) s += c.weight * ev.sf(c.shape, x);
            return s;
        },
        [&](const auto& s) { return ev.sf(ComponentShape{s}, x); }}, kind_);
}

double TypeDistribution::pdf(double x) const { return raw_pdf(check(x)) / norm_; }

double TypeDistribution::pdf_derivative(double x) const {
    return raw_dpdf(check(x)) / norm_;
}

double TypeDistribution::cdf(double x) const {
    x = check(x);
    if (!renormalize_) return raw_cdf(x);
    if (x >= hi_) return 1.0;
    return (raw_cdf(x) - raw_lo_) / norm_;
}

double TypeDistribution::survival(double x) const {
    x = check(x);
    if (!renormalize_) return raw_sf(x);
    if (x >= hi_) return 0.0;
    // Upper-tail form keeps precision when cdf is close to 1.
    const double upper = raw_sf(x) - raw_sf(hi_);
    if (upper > 0.5 * norm_ || std::holds_alternative<EmpiricalPiecewise>(kind_))
        return (raw_hi_ - raw_cdf(x)) / norm_;
    return upper / norm_;
}

double TypeDistribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) u = std::clamp(u, 1e-16, 1.0 - 1e-16);
    if (const auto* e = std::get_if<Exponential>(&kind_)) {
        // Invert within the support: F_raw(x) = F_raw(lo) + u * mass.
        const double slo = std::exp(-e->rate * lo_), shi = std::exp(-e->rate * hi_);
        return std::clamp(-std::log(slo - u * (slo - shi)) / e->rate, lo_, hi_);
    }
    if (std::holds_alternative<Uniform>(kind_)) return lo_ + u * (hi_ - lo_);
    const double target = raw_lo_ + u * (raw_hi_ - raw_lo_);
    return num::find_root([&](double x) { return raw_cdf(x) - target; }, lo_,
                          hi_, 1e-13 * std::max(1.0, hi_));
}

double pdf(const TypeDistribution& d, double x) { return d.pdf(x); }
double cdf(const TypeDistribution& d, double x) { return d.cdf(x); }

double virtual_shift(const TypeDistribution& d, double x) {
    const double f = d.pdf(x);
    if (!(f >= 1e-300)) throw NumericError(fmt::format("pdf underflow at {}", x));
    return x - d.survival(x) / f;
}

RegularityReport regularity_check(const TypeDistribution& d, int grid_n) {
    if (grid_n < 16) throw DomainError("regularity_check needs grid_n >= 16");
    RegularityReport rep;
    const double lo = d.lo(), hi = d.hi();
    std::vector<double> ratio(static_cast<std::size_t>(grid_n));
    bool in_violation = false;
    double start = lo, last = lo;
    for (int i = 0; i < grid_n; ++i) {
        const double x = lo + (hi - lo) * i / (grid_n - 1);
        const double f = d.pdf(x), sf = d.survival(x);
        const double g = 2.0 * f * f + sf * d.pdf_derivative(x);
        ratio[static_cast<std::size_t>(i)] = sf / f;
        if (!(g > 0.0)) {
            if (!in_violation) start = x;
            in_violation = true;
            last = x;
        } else if (in_violation) {
            rep.violating_intervals.emplace_back(start, last);
            in_violation = false;
        }
    }
    if (in_violation) rep.violating_intervals.emplace_back(start, last);
    rep.regular = rep.violating_intervals.empty();

    // Strictly increasing (1 - F) / f; a constant ratio (constant hazard) is not.
    double scale = 0.0;
    for (double r : ratio) scale = std::max(scale, std::abs(r));
    const double tol = 1e-12 * std::max(1.0, scale);
    rep.fully_pooling = true;
    for (std::size_t i = 1; i < ratio.size(); ++i)
        if (!(ratio[i] - ratio[i - 1] > tol)) {
            rep.fully_pooling = false;
            break;
        }
    return rep;
}

std::vector<double> sample(const TypeDistribution& d, std::size_t n,
                           std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (auto& x : out) {
        // 53 random bits mapped to the open interval (0, 1).
        const double u = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
        x = d.quantile(u);
    }
    return out;
}

TypeDistribution fit_exponential(const std::vector<HistogramBin>& histogram) {
    double hi = 0.0;
    for (const auto& b : histogram) hi = std::max(hi, b.bin_center);
    return fit_exponential(histogram, 0.0, hi > 0.0 ? hi : 1.0);
}

TypeDistribution fit_exponential(const std::vector<HistogramBin>& histogram,
                                 double lo, double hi) {
    if (histogram.size() < 2) throw FitError("histogram needs at least 2 bins");
    double total = 0.0, weighted = 0.0;
    for (const auto& b : histogram) {
        if (b.count < 0) throw FitError("histogram counts must be >= 0");
        total += b.count;
        weighted += b.count * b.bin_center;
    }
    if (!(total > 0)) throw FitError("histogram has zero total count");
    if (!(weighted > 0)) throw FitError("histogram mean must be positive");
    return TypeDistribution::exponential(total / weighted, lo, hi, false);
}

}  // namespace qosc
