#include "kcbs/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "kcbs/error.hpp"
#include "kcbs/rng.hpp"

namespace kcbs::search {

namespace {

constexpr int kDim = 5;
using Point = std::array<double, kDim>;

// Objective value inside the closure guard band.
constexpr double kPenalty = -1e9;
constexpr double kClosureGuard = 1e-6;

ChainParams chart(const Point& p) {
    const Vec3 l1(std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]), std::cos(p[0]));
    return ChainParams{Direction(l1, true), {p[2], p[3], p[4]}};
}

std::optional<Pentagram> realize(const Point& p) {
    const ChainParams cp = chart(p);
    if (chain_closure_margin(cp) < kClosureGuard) return std::nullopt;
    try {
        return from_chain(cp);
    } catch (const Error&) {
        return std::nullopt;
    }
}

class Objective {
public:
    explicit Objective(const SpinState& canonical) : psi_(canonical) {}

    double operator()(const Point& p) {
        ++evaluations_;
        const auto pg = realize(p);
        return pg ? kcbs_sum(*pg, psi_) : kPenalty;
    }

    int evaluations() const { return evaluations_; }

private:
    SpinState psi_;
    int evaluations_ = 0;
};

struct Vertex {
    Point x;
    double f;  // K, maximized
};

// Nelder-Mead maximization from x0 with an axis-aligned initial simplex.
Vertex nelder_mead(Objective& obj, const Point& x0, double step, int max_iter, double tol) {
    std::array<Vertex, kDim + 1> s;
    s[0] = {x0, obj(x0)};
    for (int i = 0; i < kDim; ++i) {
        Point x = x0;
        x[i] += step;
        s[i + 1] = {x, obj(x)};
    }
    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
    auto affine = [](const Point& a, const Point& b, double t) {
        Point r;
        for (int i = 0; i < kDim; ++i) r[i] = a[i] + t * (b[i] - a[i]);
        return r;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        std::sort(s.begin(), s.end(), by_value);
        if (s.front().f - s.back().f <= tol && s.front().f > kPenalty) break;

        Point centroid{};
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) centroid[j] += s[i].x[j] / kDim;

        Vertex& worst = s.back();
        const Point xr = affine(centroid, worst.x, -1.0);
        const double fr = obj(xr);
        if (fr > s.front().f) {
            const Point xe = affine(centroid, worst.x, -2.0);
            const double fe = obj(xe);
            worst = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (fr > s[kDim - 1].f) {
            worst = {xr, fr};
            continue;
        }
        const bool outside = fr > worst.f;
        const Point xc = outside ? affine(centroid, xr, 0.5) : affine(centroid, worst.x, 0.5);
        const double fc = obj(xc);
        if (fc > std::max(fr, worst.f) || (!outside && fc > worst.f)) {
            worst = {xc, fc};
            continue;
        }
        for (int i = 1; i <= kDim; ++i) {
            s[i].x = affine(s[0].x, s[i].x, 0.5);
            s[i].f = obj(s[i].x);
        }
    }
    std::sort(s.begin(), s.end(), by_value);
    return s.front();
}

}  // namespace

void validate(const SearchConfig& cfg) {
    if (cfg.restarts < 1) throw InvalidInput("search: restarts must be >= 1");
    if (cfg.max_iterations < 1) throw InvalidInput("search: max_iterations must be >= 1");
    if (!(cfg.tol > 0.0)) throw InvalidInput("search: tol must be > 0");
    if (!(cfg.initial_step > 0.0)) throw InvalidInput("search: initial_step must be > 0");
    if (cfg.jitter_rounds < 0) throw InvalidInput("search: jitter_rounds must be >= 0");
}

SearchResult optimize_pentagram(const SpinState& psi, const SearchConfig& cfg) {
    validate(cfg);
    // Gauge: work in the frame where psi = phase (cos phi e_x + i sin phi e_y).
    const CanonicalForm form = to_canonical(psi);
    const SpinState canonical = canonical_state(form.phi);
    Mat3 frame;
    frame.col(0) = form.m.vec();
    frame.col(1) = form.n.vec();
    frame.col(2) = form.m.vec().cross(form.n.vec());
    const Rotation to_world(frame);

    const CounterRng root(cfg.seed);
    std::optional<Vertex> best;
    std::vector<RestartSummary> trace;

    for (int r = 0; r < cfg.restarts; ++r) {
        CounterRng rng = root.split(static_cast<std::uint64_t>(r));
        Point x0;
        x0[0] = std::acos(1.0 - 2.0 * rng.uniform());
        x0[1] = 2.0 * M_PI * rng.uniform();
        for (int i = 2; i < kDim; ++i) x0[i] = 2.0 * M_PI * rng.uniform();

        Objective obj(canonical);
        Vertex v = nelder_mead(obj, x0, cfg.initial_step, cfg.max_iterations, cfg.tol);
        double step = cfg.initial_step;
        for (int j = 0; j < cfg.jitter_rounds; ++j) {
            step *= 0.25;
            Point xj = v.x;
            for (int i = 0; i < kDim; ++i) xj[i] += step * (rng.uniform() - 0.5);
            const Vertex w = nelder_mead(obj, xj, step, cfg.max_iterations, cfg.tol);
            if (w.f > v.f) v = w;
        }
        trace.push_back({r, v.f, obj.evaluations()});
        // Ties keep the earlier restart.
        if (!best || v.f > best->f) best = v;
    }

    const auto local = realize(best->x);
    if (!local) throw Error("search: no restart produced a valid pentagram");
    Pentagram world = local->rotated(to_world);
    const double k = kcbs_sum(world, psi);
    return SearchResult{world, k, k - 2.0, std::move(trace)};
}

double regular_K(double phi) {
    if (!(phi >= 0.0 && phi <= M_PI / 4 + 1e-15)) throw InvalidInput("regular_K: phi must lie in [0, pi/4]");
    const double r5 = std::sqrt(5.0);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return r5 * c * c + 2.5 * (1.0 - 1.0 / r5) * s * s;
}

std::vector<ScanRow> detection_scan(const std::vector<double>& c_values, const SearchConfig& cfg) {
    std::vector<ScanRow> rows;
    for (double c : c_values) {
        if (!(c >= 0.0 && c <= 1.0)) throw InvalidInput("detection_scan: concurrence outside [0, 1]");
        const auto res = optimize_pentagram(state_with_concurrence(c), cfg);
        rows.push_back({c, res.k, res.k - 2.0 > kViolationMargin});
    }
    return rows;
}

}  // namespace kcbs::search
