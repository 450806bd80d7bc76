#include "growthlab/quadrature.hpp"

#include "growthlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace growthlab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double epsilon = std::numeric_limits<double>::epsilon();

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double log_value;
    double log_error;
    bool final;
};

// log f at s, also given the offset d = s - a from the left end and log d.
using PointFn = std::function<double(double s, double offset, double log_offset)>;

// Maps the integration variable onto the original one. For a singular
// leading segment, x = tau in [0, 1] and the returned log-Jacobian
// absorbs the substitution; the offset is then formed without cancellation.
struct Segment {
    double origin;
    double length;
    double power; // 1 for a plain segment
    double log_f(const PointFn& f, double x) const {
        if (power == 1.0)
            return f(x, x - origin, std::log(x - origin));
        const double log_x = std::log(x);
        const double log_d = std::log(length) + power * log_x;
        const double d = std::exp(log_d); // may underflow; log_d stays exact
        return f(origin + d, d, log_d) + std::log(length * power) + (power - 1.0) * log_x;
    }
};

Panel evaluate(const PointFn& f, const Segment& seg, double lo, double hi) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    std::array<double, 15> logs{};
    logs[0] = seg.log_f(f, centre);
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        logs[1 + 2 * j] = seg.log_f(f, centre - dx);
        logs[2 + 2 * j] = seg.log_f(f, centre + dx);
    }
    double m = neg_inf;
    for (double l : logs) {
        if (std::isnan(l))
            throw DomainError("integrate_log: integrand returned NaN");
        m = std::max(m, l);
    }
    if (m == neg_inf)
        return {lo, hi, neg_inf, neg_inf, false};
    if (m == std::numeric_limits<double>::infinity())
        throw DomainError("integrate_log: integrand is infinite inside the interval");

    auto val = [&](std::size_t i) { return std::exp(logs[i] - m); };
    double kronrod = wgk[7] * val(0);
    double gauss = wg[3] * val(0);
    double abs_sum = kronrod;
    for (std::size_t j = 0; j < 7; ++j) {
        const double pair = val(1 + 2 * j) + val(2 + 2 * j);
        kronrod += wgk[j] * pair;
        abs_sum += wgk[j] * pair;
        if (j % 2 == 1)
            gauss += wg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    abs_sum *= half;
    // round-off floor as in QUADPACK
    const double err = std::max(std::abs(kronrod - gauss), 50.0 * epsilon * abs_sum);
    const double log_value = kronrod > 0.0 ? m + std::log(kronrod) : neg_inf;
    const double log_error = err > 0.0 ? m + std::log(err) : neg_inf;
    const bool final = half <= 4.0 * epsilon * std::max(std::abs(lo), std::abs(hi));
    return {lo, hi, log_value, log_error, final};
}

// Running sum of exp(x_i) held relative to a reference that only grows.
class ScaledAccumulator {
public:
    void add(double x) {
        if (x == neg_inf)
            return;
        if (x > ref_) {
            sum_ *= std::exp(ref_ - x);
            ref_ = x;
        }
        sum_ += std::exp(x - ref_);
    }
    void remove(double x) {
        if (x == neg_inf)
            return;
        sum_ = std::max(0.0, sum_ - std::exp(x - ref_));
    }
    double log_total() const { return sum_ > 0.0 ? ref_ + std::log(sum_) : neg_inf; }

private:
    double ref_ = -1e300;
    double sum_ = 0.0;
};

} // namespace

double log_add_exp(double a, double b) {
    if (a == neg_inf)
        return b;
    if (b == neg_inf)
        return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_sum_exp(std::span<const double> xs) {
    double m = neg_inf;
    for (double x : xs)
        m = std::max(m, x);
    if (m == neg_inf || !std::isfinite(m))
        return m;
    double s = 0.0;
    for (double x : xs)
        s += std::exp(x - m);
    return m + std::log(s);
}

namespace {

LogIntegral integrate_core(const PointFn& log_f, double a, double b, const QuadratureOptions& opts) {
    if (!(b > a))
        return {neg_inf, 0.0, 0};
    if (!(opts.left_singularity > -1.0 && opts.left_singularity <= 0.0))
        throw PreconditionError("integrate_log: left_singularity must lie in (-1, 0]");

    std::vector<Segment> segments;
    double plain_start = a;
    if (opts.left_singularity < 0.0) {
        const double length = std::min(b - a, 1.0);
        segments.push_back({a, length, 1.0 / (1.0 + opts.left_singularity)});
        plain_start = a + length;
    }
    if (plain_start < b)
        segments.push_back({a, 0.0, 1.0});

    struct Entry {
        std::size_t segment;
        Panel panel;
    };
    auto by_error = [](const Entry& x, const Entry& y) { return x.panel.log_error < y.panel.log_error; };
    std::vector<Entry> heap; // max-heap on log_error
    std::vector<Entry> done; // panels that cannot or need not be refined
    ScaledAccumulator value_sum;
    ScaledAccumulator error_sum;

    auto push = [&](std::size_t seg, const Panel& panel) {
        value_sum.add(panel.log_value);
        error_sum.add(panel.log_error);
        if (panel.final || panel.log_error == neg_inf) {
            done.push_back({seg, panel});
        } else {
            heap.push_back({seg, panel});
            std::push_heap(heap.begin(), heap.end(), by_error);
        }
    };

    for (std::size_t s = 0; s < segments.size(); ++s) {
        const bool plain = segments[s].power == 1.0;
        const double lo = plain ? plain_start : 0.0;
        const double hi = plain ? b : 1.0;
        constexpr int initial_panels = 8;
        for (int i = 0; i < initial_panels; ++i) {
            const double x0 = lo + (hi - lo) * i / initial_panels;
            const double x1 = i + 1 == initial_panels ? hi : lo + (hi - lo) * (i + 1) / initial_panels;
            push(s, evaluate(log_f, segments[s], x0, x1));
        }
    }
    int panels = static_cast<int>(heap.size() + done.size());

    // The running sums drift after many removals; rebuild them exactly.
    auto rebuild = [&] {
        value_sum = {};
        error_sum = {};
        for (const auto* group : {&heap, &done})
            for (const auto& e : *group) {
                value_sum.add(e.panel.log_value);
                error_sum.add(e.panel.log_error);
            }
    };

    const double log_tol = std::log(opts.rel_tol);
    auto converged = [&] {
        const double total = value_sum.log_total();
        return total == neg_inf ? error_sum.log_total() == neg_inf : error_sum.log_total() <= log_tol + total;
    };

    // left-to-right reduction of every panel, independent of refinement order
    auto finish = [&](bool check) -> LogIntegral {
        std::vector<Entry> all = done;
        all.insert(all.end(), heap.begin(), heap.end());
        std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) {
            return x.segment != y.segment ? x.segment < y.segment : x.panel.lo < y.panel.lo;
        });
        std::vector<double> vals;
        std::vector<double> errs;
        vals.reserve(all.size());
        errs.reserve(all.size());
        for (const auto& e : all) {
            vals.push_back(e.panel.log_value);
            errs.push_back(e.panel.log_error);
        }
        const double v = log_sum_exp(vals);
        const double e = log_sum_exp(errs);
        const double rel = v == neg_inf ? 0.0 : std::exp(e - v);
        if (check && rel > opts.rel_tol)
            throw QuadratureError("integrate_log: panel budget exhausted before reaching tolerance", v, rel);
        return {v, rel, panels};
    };

    for (int iter = 1; !heap.empty(); ++iter) {
        if (iter % 32 == 0)
            rebuild();
        if (converged()) {
            auto result = finish(false);
            if (result.rel_error <= opts.rel_tol)
                return result;
            rebuild();
        }
        if (panels + 1 > opts.max_panels)
            return finish(true);
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Entry worst = heap.back();
        heap.pop_back();
        value_sum.remove(worst.panel.log_value);
        error_sum.remove(worst.panel.log_error);
        const double mid = 0.5 * (worst.panel.lo + worst.panel.hi);
        push(worst.segment, evaluate(log_f, segments[worst.segment], worst.panel.lo, mid));
        push(worst.segment, evaluate(log_f, segments[worst.segment], mid, worst.panel.hi));
        ++panels;
    }
    return finish(false);
}

} // namespace

LogIntegral integrate_log(const std::function<double(double)>& log_f, double a, double b,
                          const QuadratureOptions& opts) {
    return integrate_core([&](double s, double, double) { return log_f(s); }, a, b, opts);
}

LogIntegral integrate_log_offset(const std::function<double(double d, double log_d)>& log_f_at_offset, double a,
                                 double b, const QuadratureOptions& opts) {
    return integrate_core([&](double, double d, double log_d) { return log_f_at_offset(d, log_d); }, a, b, opts);
}

} // namespace growthlab
