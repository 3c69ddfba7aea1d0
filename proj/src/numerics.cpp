#include "qosc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "qosc/errors.hpp"

namespace qosc::num {

const double kGaussNodes[kGaussPoints] = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
    0.9061798459386640};
const double kGaussWeights[kGaussPoints] = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891};

double simpson(const Fn& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < n; ++i) {
        const double v = f(a + i * h);
        (i % 2 ? odd : even) += v;
    }
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double simpson_refined(const Fn& f, double a, double b, int n0, double tol,
                       int max_n) {
    double coarse = simpson(f, a, b, n0);
    for (int n = 2 * n0; n <= max_n; n *= 2) {
        const double fine = simpson(f, a, b, n);
        if (std::abs(fine - coarse) < tol) return fine;
        coarse = fine;
    }
    return coarse;
}

namespace {

double adaptive_step(const Fn& f, double a, double b, double fa, double fm,
                     double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Fn& f, double a, double b, double tol,
                        int max_depth) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double find_root(const Fn& f, double a, double b, double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb))
        throw NumericError("find_root: interval does not bracket a root");
    auto tol = [xtol](double lo, double hi) {
        if (xtol > 0.0) return std::abs(hi - lo) <= xtol;
        return std::abs(hi - lo) <=
               4.0 * std::numeric_limits<double>::epsilon() *
                   std::max(std::abs(lo), std::abs(hi));
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    // Pick the end with the smaller residual rather than the midpoint.
    const double ra = std::abs(f(r.first)), rb = std::abs(f(r.second));
    return ra <= rb ? r.first : r.second;
}

std::vector<double> cumulative_integral(std::span<const double> x,
                                        const Fn& g) {
    std::vector<double> out(x.size(), 0.0);
    if (x.empty()) return out;
    double prev = g(x[0]);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double h = x[i] - x[i - 1];
        const double mid = g(x[i - 1] + 0.5 * h);
        const double cur = g(x[i]);
        out[i] = out[i - 1] + h / 6.0 * (prev + 4.0 * mid + cur);
        prev = cur;
    }
    return out;
}

double interp(std::span<const double> x, std::span<const double> y, double t) {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double s = (t - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + s * (y[i] - y[i - 1]);
}

std::vector<IsotonicBlock> isotonic_blocks(std::span<const double> y,
                                           std::span<const double> w) {
    std::vector<IsotonicBlock> st;
    st.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        st.push_back({i, i + 1, y[i], w[i]});
        while (st.size() > 1 && st[st.size() - 2].value > st.back().value) {
            IsotonicBlock top = st.back();
            st.pop_back();
            IsotonicBlock& prev = st.back();
            const double wt = prev.weight + top.weight;
            prev.value = wt > 0.0 ? (prev.value * prev.weight +
                                     top.value * top.weight) / wt
                                  : 0.5 * (prev.value + top.value);
            prev.weight = wt;
            prev.end = top.end;
        }
    }
    return st;
}

std::vector<double> isotonic_fit(std::span<const double> y,
                                 std::span<const double> w) {
    std::vector<double> out(y.size());
    for (const auto& b : isotonic_blocks(y, w))
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(b.begin),
                  out.begin() + static_cast<std::ptrdiff_t>(b.end), b.value);
    return out;
}

}  // namespace qosc::num
