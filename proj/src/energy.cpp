#include "kgeo/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <json.hpp>

#include "format.hpp"
#include "polygon.hpp"

namespace kgeo {

using detail::round12;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool at_cone(const SurfaceModel& s, const SurfacePoint& p) {
    return s.kind() == SurfaceKind::polygon && cone_index(s, p) >= 0;
}

double param_of(const SurfaceModel& s, const SurfacePoint& q, const TangentVector& v) { return frame_angle(s, q, v); }

// Member of a minimizer family at q closest to target; a continuum is refined
// between its representatives.
TangentVector closest_in(const SurfaceModel& s, const MinimizerSet& m, const TangentVector& target) {
    const SurfacePoint& q = m.q;
    double best = std::numeric_limits<double>::infinity();
    TangentVector arg;
    for (const auto& x : m.minimizers) {
        const double d = norm(s, q, x.direction - target);
        if (d < best) {
            best = d;
            arg = x.direction;
        }
    }
    if (!m.continuum) return arg;
    auto f = [&](double a) { return norm(s, q, from_frame_angle(s, q, a) - target); };
    const double center = param_of(s, q, arg);
    double lo = center - two_pi / kContinuumCount, hi = center + two_pi / kContinuumCount;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 80; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    const TangentVector refined = from_frame_angle(s, q, 0.5 * (lo + hi));
    return norm(s, q, refined - target) < best ? refined : arg;
}

double cone_split_residual(const SurfaceModel& s, int vertex, double psi_fwd, double psi_back) {
    const double alpha = detail::PolygonGeometry(s.polygon()).interior_angle(vertex);
    const double full = 2.0 * alpha;
    double gap = std::fmod(psi_back - psi_fwd, full);
    if (gap < 0.0) gap += full;
    return std::max(0.0, alpha - std::min(gap, full - gap));
}

double cone_param(const SurfaceModel& s, const MinimizerSet& m, const Minimizer& x) {
    if (x.cone_parameter) return *x.cone_parameter;
    return cone_parameter(s, cone_index(s, m.q), Sheet::front, x.direction.vec());
}

}  // namespace

// ---------------------------------------------------------------- TuplePoint

TuplePoint::TuplePoint(const SurfaceModel& s, std::vector<SurfacePoint> points, DistanceOptions opt)
    : s_(s), x_(std::move(points)), opt_(opt) {
    if (x_.size() < 2) throw Error(ErrorCode::InvalidArgument, "a tuple needs at least two points");
    for (auto& p : x_) p = canonicalize(s_, p);
    cache_.resize(x_.size());
}

void TuplePoint::set(int i, const SurfacePoint& p) {
    const int j = wrap(i);
    x_[j] = canonicalize(s_, p);
    cache_[j].reset();
    cache_[wrap(j - 1)].reset();
}

const MinimizerSet& TuplePoint::forward(int i) const {
    const int j = wrap(i);
    if (!cache_[j]) cache_[j] = minimizers(s_, x_[j], x_[wrap(j + 1)], opt_);
    return *cache_[j];
}

MinimizerSet TuplePoint::backward(int i) const { return reversed(s_, forward(i - 1)); }

// ---------------------------------------------------------------- energy

double uniform_energy(const TuplePoint& x) {
    double sum = 0.0;
    for (int i = 0; i < x.k(); ++i) {
        const double d = x.spacing(i);
        sum += d * d;
    }
    return x.k() * sum;
}

std::vector<TangentVector> energy_gradient(const TuplePoint& x) {
    const auto& s = x.surface();
    const int k = x.k();
    for (int i = 0; i < k; ++i) {
        const auto& m = x.forward(i);
        if (m.continuum || m.multiplicity() >= 2)
            throw Error(ErrorCode::OrdinaryPair, "pair " + std::to_string(i) + " is an ordinary cut pair");
    }
    std::vector<TangentVector> g(k);
    for (int i = 0; i < k; ++i) {
        if (at_cone(s, x[i])) throw Error(ErrorCode::ConePointQuery, "tuple point at a polygon corner");
        TangentVector acc{0.0, 0.0};
        const auto& in = x.forward(i - 1);
        if (!in.base_point) acc = acc + in.distance * in.minimizers.front().arrival;
        const auto& out = x.forward(i);
        if (!out.base_point) acc = acc - out.distance * out.minimizers.front().direction;
        g[i] = (2.0 * k) * acc;
    }
    return g;
}

// ---------------------------------------------------------------- balance

std::string_view to_string(BalanceKind k) {
    switch (k) {
        case BalanceKind::NotBalanced: return "NotBalanced";
        case BalanceKind::SmoothBalanced: return "SmoothBalanced";
        case BalanceKind::UniquelyBalanced: return "UniquelyBalanced";
        case BalanceKind::NonSmoothBalanced: return "NonSmoothBalanced";
    }
    return "Unknown";
}

std::string_view to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Converged: return "Converged";
        case SearchStatus::Collapsed: return "Collapsed";
        case SearchStatus::Stalled: return "Stalled";
    }
    return "Unknown";
}

BalanceReport balance_test(const TuplePoint& x, const BalanceOptions& opt) {
    const auto& s = x.surface();
    const int k = x.k();
    BalanceReport r;
    r.tol_spacing = opt.tol_spacing.value_or(1e-6 * s.diameter_scale());
    r.tol_antipodal = opt.tol_antipodal;
    r.xi.resize(k);
    r.uniquely = r.smooth = true;
    for (int i = 0; i < k; ++i) {
        const auto& m = x.forward(i);
        if (m.base_point) throw Error(ErrorCode::InvalidArgument, "consecutive tuple points coincide");
        r.distances.push_back(m.distance);
        const PointClass pc = classify_set(s, m);
        r.pairs.push_back(pc);
        const bool ordinary = pc.kind == PointKind::OrdinaryCut;
        const bool cut = ordinary || pc.kind == PointKind::SingularCut || pc.kind == PointKind::Inconclusive;
        r.ordinary_pairs.push_back(ordinary);
        r.cut_pairs.push_back(cut);
        r.uniquely = r.uniquely && !ordinary;
        r.smooth = r.smooth && !cut;
    }
    for (int i = 0; i < k; ++i)
        r.spacing_residual = std::max(r.spacing_residual, std::abs(r.distances[i] - r.distances[(i + k - 1) % k]));

    for (int i = 0; i < k; ++i) {
        const MinimizerSet& F = x.forward(i);
        const MinimizerSet B = x.backward(i);
        double best = std::numeric_limits<double>::infinity();
        TangentVector arg;
        if (at_cone(s, x[i])) {
            r.cone_degenerate = true;
            const int v = cone_index(s, x[i]);
            for (const auto& xi : F.minimizers)
                for (const auto& eta : B.minimizers) {
                    const double res = cone_split_residual(s, v, cone_param(s, F, xi), cone_param(s, B, eta));
                    if (res < best) {
                        best = res;
                        arg = xi.direction;
                    }
                }
        } else {
            for (const auto& xi : F.minimizers) {
                const TangentVector eta = closest_in(s, B, -xi.direction);
                const double res = norm(s, x[i], xi.direction + eta);
                if (res < best) {
                    best = res;
                    arg = xi.direction;
                }
            }
            if (F.continuum)
                for (const auto& eta : B.minimizers) {
                    const TangentVector xi = closest_in(s, F, -eta.direction);
                    const double res = norm(s, x[i], xi + eta.direction);
                    if (res < best) {
                        best = res;
                        arg = xi;
                    }
                }
        }
        r.xi[i] = arg;
        r.antipodal_residual = std::max(r.antipodal_residual, best);
    }
    r.balanced = r.spacing_residual <= r.tol_spacing && r.antipodal_residual <= r.tol_antipodal;
    if (!r.balanced)
        r.kind = BalanceKind::NotBalanced;
    else if (r.smooth)
        r.kind = BalanceKind::SmoothBalanced;
    else if (r.uniquely)
        r.kind = BalanceKind::UniquelyBalanced;
    else
        r.kind = BalanceKind::NonSmoothBalanced;
    return r;
}

// ---------------------------------------------------------------- search

namespace {

// Moves p along the geodesic with initial velocity d1 e1 + d2 e2 in an orthonormal frame.
SurfacePoint moved(const SurfaceModel& s, const SurfacePoint& p, double d1, double d2) {
    const double len = std::hypot(d1, d2);
    if (len == 0.0 || at_cone(s, p)) return p;
    const TangentVector v = from_frame_angle(s, p, std::atan2(d2, d1));
    return shoot(s, p, v, len).end_point();
}

constexpr int kMaxCandidates = 8;

// Residual of a tuple with one chosen candidate geodesic per pair: velocity
// continuity at each point, equal lengths, and no excess over the distance.
class ResidualModel {
public:
    ResidualModel(const TuplePoint& x) : x_(x), scale_(x.surface().diameter_scale()) {}

    int candidates(int i) const {
        return std::min<int>(kMaxCandidates, static_cast<int>(x_.forward(i).candidates.size()));
    }
    const Minimizer& cand(int i, int c) const { return x_.forward(i).candidates[c]; }

    double continuity(int i, int prev, int cur) const {
        const auto& s = x_.surface();
        if (at_cone(s, x_[i])) return 0.0;
        const double a = frame_angle(s, x_[i], cand(i, cur).direction);
        const double b = frame_angle(s, x_[i], cand(i - 1, prev).arrival);
        return std::remainder(a - b, two_pi);
    }
    double spacing(int i, int prev, int cur) const {
        return (cand(i, cur).length - cand(i - 1, prev).length) / scale_;
    }
    double excess(int i, int cur) const { return (cand(i, cur).length - x_.forward(i).distance) / scale_; }

    Eigen::VectorXd residual(const std::vector<int>& ch) const {
        const int k = x_.k();
        Eigen::VectorXd r(3 * k);
        for (int i = 0; i < k; ++i) {
            const int prev = ch[(i + k - 1) % k], cur = ch[i];
            r(3 * i) = continuity(i, prev, cur);
            r(3 * i + 1) = spacing(i, prev, cur);
            r(3 * i + 2) = excess(i, cur);
        }
        return r;
    }

    // Choice minimizing the squared residual, by dynamic programming around the cycle.
    std::vector<int> best_choice() const {
        const int k = x_.k();
        auto pair_cost = [&](int i, int prev, int cur) {
            const double c = continuity(i, prev, cur), sp = spacing(i, prev, cur), ex = excess(i, cur);
            return c * c + sp * sp + ex * ex;
        };
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> out(k, 0);
        for (int c0 = 0; c0 < candidates(0); ++c0) {
            std::vector<std::vector<int>> parent(k);
            std::vector<double> cost(candidates(0), std::numeric_limits<double>::infinity());
            cost[c0] = 0.0;
            for (int i = 1; i < k; ++i) {
                std::vector<double> next(candidates(i), std::numeric_limits<double>::infinity());
                parent[i].assign(candidates(i), 0);
                for (int b = 0; b < candidates(i); ++b)
                    for (int a = 0; a < static_cast<int>(cost.size()); ++a) {
                        if (!std::isfinite(cost[a])) continue;
                        const double v = cost[a] + pair_cost(i, a, b);
                        if (v < next[b]) {
                            next[b] = v;
                            parent[i][b] = a;
                        }
                    }
                cost = std::move(next);
            }
            for (int b = 0; b < static_cast<int>(cost.size()); ++b) {
                const double total = cost[b] + pair_cost(0, b, c0);
                if (total < best) {
                    best = total;
                    std::vector<int> ch(k);
                    ch[0] = c0;
                    int cur = b;
                    for (int i = k - 1; i >= 1; --i) {
                        ch[i] = cur;
                        cur = parent[i][cur];
                    }
                    out = ch;
                }
            }
        }
        return out;
    }

    // Choice in this tuple continuing `ch` chosen in `other`.
    std::vector<int> tracked(const ResidualModel& other, const std::vector<int>& ch) const {
        const auto& s = x_.surface();
        std::vector<int> out(ch.size());
        for (int i = 0; i < x_.k(); ++i) {
            const Minimizer& old = other.cand(i, ch[i]);
            const double a_old = at_cone(s, other.x_[i]) ? 0.0 : frame_angle(s, other.x_[i], old.direction);
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < candidates(i); ++c) {
                const double a = at_cone(s, x_[i]) ? 0.0 : frame_angle(s, x_[i], cand(i, c).direction);
                const double d = std::abs(std::remainder(a - a_old, two_pi)) +
                                 std::abs(cand(i, c).length - old.length) / scale_;
                if (d < best) {
                    best = d;
                    out[i] = c;
                }
            }
        }
        return out;
    }

private:
    const TuplePoint& x_;
    double scale_;
};

bool collapsed(const TuplePoint& x) {
    for (int i = 0; i < x.k(); ++i)
        if (x.spacing(i) < 1e-6 * x.surface().diameter_scale()) return true;
    return false;
}

TraceRow trace_row(int it, const TuplePoint& x, const Eigen::VectorXd& r) {
    TraceRow row{it, uniform_energy(x), 0.0, 0.0};
    const double scale = x.surface().diameter_scale();
    for (int i = 0; i < x.k(); ++i) {
        row.antipodal_residual = std::max(row.antipodal_residual, std::abs(r(3 * i)));
        row.spacing_residual = std::max(row.spacing_residual, std::abs(r(3 * i + 1)) * scale);
    }
    return row;
}

SearchResult residual_search(const TuplePoint& seed, const SearchOptions& opt) {
    const auto& s = seed.surface();
    const double scale = s.diameter_scale();
    const int k = seed.k();
    SearchResult out{seed, {}, SearchStatus::Stalled, 0, {}};
    TuplePoint cur = seed;
    std::optional<TuplePoint> balanced;
    int polish = 0;
    double lambda = 1e-3;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        out.iterations = it;
        if (collapsed(cur)) {
            out.status = SearchStatus::Collapsed;
            break;
        }
        const ResidualModel model(cur);
        const std::vector<int> ch = model.best_choice();
        const Eigen::VectorXd r = model.residual(ch);
        out.trace.push_back(trace_row(it, cur, r));
        const auto& last = out.trace.back();
        // Once balanced, keep iterating a few steps to tighten the tuple onto its geodesic.
        if (balanced && (r.lpNorm<Eigen::Infinity>() < 1e-11 || ++polish > 10)) break;
        if (!balanced && last.spacing_residual < 10 * opt.balance.tol_spacing.value_or(1e-6 * scale) &&
            last.antipodal_residual < 10 * opt.balance.tol_antipodal) {
            if (balance_test(cur, opt.balance).balanced) balanced = cur;
        }
        // Central-difference Jacobian in orthonormal frames at each point.
        const double h = 1e-6 * scale;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3 * k, 2 * k);
        for (int j = 0; j < k; ++j)
            for (int c = 0; c < 2; ++c) {
                if (at_cone(s, cur[j])) continue;
                TuplePoint plus = cur, minus = cur;
                plus.set(j, moved(s, cur[j], c == 0 ? h : 0.0, c == 1 ? h : 0.0));
                minus.set(j, moved(s, cur[j], c == 0 ? -h : 0.0, c == 1 ? -h : 0.0));
                const ResidualModel mp(plus), mm(minus);
                Eigen::VectorXd d = mp.residual(mp.tracked(model, ch)) - mm.residual(mm.tracked(model, ch));
                for (int i = 0; i < k; ++i) d(3 * i) = std::remainder(d(3 * i), two_pi);
                J.col(2 * j + c) = d / (2.0 * h);
            }
        const Eigen::MatrixXd A = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        for (int tries = 0; tries < 30 && lambda < 1e12; ++tries) {
            Eigen::MatrixXd M = A;
            M.diagonal() += lambda * (A.diagonal() + Eigen::VectorXd::Constant(2 * k, 1e-9));
            Eigen::VectorXd step = -M.ldlt().solve(g);
            const double cap = 0.1 * scale;
            double worst = 0.0;
            for (int j = 0; j < k; ++j) worst = std::max(worst, std::hypot(step(2 * j), step(2 * j + 1)));
            if (worst > cap) step *= cap / worst;
            if (step.norm() < 1e-14 * scale) break;
            TuplePoint trial = cur;
            try {
                for (int j = 0; j < k; ++j) trial.set(j, moved(s, cur[j], step(2 * j), step(2 * j + 1)));
                const ResidualModel mt(trial);
                const Eigen::VectorXd rt = mt.residual(mt.best_choice());
                if (rt.squaredNorm() < r.squaredNorm()) {
                    cur = std::move(trial);
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ConePointHit && e.code() != ErrorCode::ConePointQuery) throw;
            }
            lambda *= 4.0;
        }
        if (!accepted) break;
    }
    out.tuple = cur;
    if (out.status != SearchStatus::Collapsed) {
        out.report = balance_test(cur, opt.balance);
        if (!out.report.balanced && balanced) {
            out.tuple = *balanced;
            out.report = balance_test(out.tuple, opt.balance);
        }
        out.status = out.report.balanced ? SearchStatus::Converged : SearchStatus::Stalled;
    }
    return out;
}

SearchResult descent_search(const TuplePoint& seed, const SearchOptions& opt) {
    const auto& s = seed.surface();
    const double scale = s.diameter_scale();
    const int k = seed.k();
    SearchResult out{seed, {}, SearchStatus::Stalled, 0, {}};
    TuplePoint cur = seed;
    double t = -1.0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        out.iterations = it;
        if (collapsed(cur)) {
            out.status = SearchStatus::Collapsed;
            break;
        }
        const BalanceReport rep = balance_test(cur, opt.balance);
        out.trace.push_back({it, uniform_energy(cur), rep.spacing_residual, rep.antipodal_residual});
        if (rep.balanced) break;
        std::vector<TangentVector> g;
        try {
            g = energy_gradient(cur);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::OrdinaryPair) throw;
            break;
        }
        double g2 = 0.0;
        for (int i = 0; i < k; ++i) g2 += inner(s, cur[i], g[i], g[i]);
        if (g2 < 1e-24) break;
        const double gn = std::sqrt(g2);
        if (t < 0.0) t = 0.1 * scale / gn;
        const double E = out.trace.back().energy;
        bool accepted = false;
        while (t * gn > 1e-10) {
            TuplePoint trial = cur;
            for (int i = 0; i < k; ++i) {
                const TangentVector d = -t * g[i];
                const double len = norm(s, cur[i], d);
                if (len > 0.0) trial.set(i, shoot(s, cur[i], d, len).end_point());
            }
            if (uniform_energy(trial) <= E - 1e-4 * t * g2) {
                cur = std::move(trial);
                accepted = true;
                t *= 2.0;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    out.tuple = cur;
    if (out.status != SearchStatus::Collapsed) {
        out.report = balance_test(cur, opt.balance);
        out.status = out.report.balanced ? SearchStatus::Converged : SearchStatus::Stalled;
    }
    return out;
}

}  // namespace

SearchResult find_balanced(const TuplePoint& seed_in, const SearchOptions& opt) {
    const auto& s = seed_in.surface();
    DistanceOptions dopt = seed_in.options();
    dopt.window_factor = std::max(dopt.window_factor, opt.window_factor);
    const TuplePoint seed(s, seed_in.points(), dopt);
    for (int i = 0; i < seed.k(); ++i)
        if (seed.spacing(i) < 1e-6 * s.diameter_scale())
            return {seed, {}, SearchStatus::Collapsed, 0, {}};
    const BalanceReport initial = balance_test(seed, opt.balance);
    if (initial.balanced) {
        SearchResult r{seed, initial, SearchStatus::Converged, 0, {}};
        r.trace.push_back({0, uniform_energy(seed), initial.spacing_residual, initial.antipodal_residual});
        return r;
    }
    if (opt.method == SearchMethod::EnergyDescent) return descent_search(seed, opt);
    SearchResult r = residual_search(seed, opt);
    if (r.status != SearchStatus::Stalled) return r;
    // The residual model has no descent direction at folded configurations (consecutive
    // geodesics retracing each other); energy descent takes those to collapse or balance.
    SearchResult d = descent_search(seed, opt);
    if (d.status == SearchStatus::Stalled) return r;
    d.iterations += r.iterations;
    d.trace.insert(d.trace.begin(), r.trace.begin(), r.trace.end());
    return d;
}

// ---------------------------------------------------------------- associated geodesics

namespace {

bool direction_in(const SurfaceModel& s, const MinimizerSet& m, const TangentVector& v, double tol) {
    const TangentVector c = closest_in(s, m, v);
    return angle_between(s, m.q, c, v) < tol;
}

}  // namespace

std::vector<ClosedGeodesic> associated_geodesics(const TuplePoint& x, const BalanceReport& report) {
    const auto& s = x.surface();
    const int k = x.k();
    if (!report.balanced) return {};
    double combos = 1.0;
    for (int i = 0; i < k; ++i) {
        const auto& m = x.forward(i);
        combos *= m.continuum ? kContinuumCount : m.multiplicity();
    }
    if (combos > 4096) throw Error(ErrorCode::EnumerationBound, "more than 4096 minimizer combinations");
    for (int i = 0; i < k; ++i)
        if (at_cone(s, x[i])) return {};

    double d = 0.0;
    for (double v : report.distances) d += v / k;
    const double tol_pt = 1e-6 * s.diameter_scale();
    std::vector<ClosedGeodesic> out;
    for (const auto& start : x.forward(0).minimizers) {
        GeodesicArc arc;
        try {
            arc = shoot(s, x[0], start.direction, k * d);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConePointHit) continue;
            throw;
        }
        bool ok = true;
        for (int i = 1; i < k && ok; ++i) {
            const auto [p, v] = state_at(s, arc, i * d);
            ok = proximity(s, p, x[i]) < tol_pt && direction_in(s, x.forward(i), v, 1e-4) &&
                 direction_in(s, x.backward(i), -v, 1e-4);
        }
        if (!ok) continue;
        if (proximity(s, arc.end_point(), x[0]) >= tol_pt ||
            angle_between(s, x[0], arc.end_velocity(), arc.start_velocity) >= 1e-4)
            continue;
        ClosedGeodesic g;
        try {
            g = close_up(s, arc);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoConvergence && e.code() != ErrorCode::DegenerateJacobian) throw;
            continue;
        }
        bool dup = false;
        for (const auto& o : out) {
            if (std::abs(o.length() - g.length()) > 1e-6 * g.length()) continue;
            const double a = angle_between(s, x[0], o.arc.start_velocity, g.arc.start_velocity);
            if (a < 1e-4 || std::numbers::pi - a < 1e-4) dup = true;
        }
        if (!dup) out.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------- classes

TuplePoint rotated_tuple(const SurfaceModel& s, const ClosedGeodesic& g, int k, double t) {
    std::vector<SurfacePoint> pts;
    for (int i = 0; i < k; ++i) pts.push_back(evaluate(s, g, t + two_pi * i / k).first);
    return TuplePoint(s, pts);
}

BalancedClass build_class(const SurfaceModel& s, const ClosedGeodesic& g, int k, int grid) {
    BalancedClass c;
    c.geodesic = g;
    c.k = k;
    c.rotating = true;
    c.smooth = true;
    auto sample = [&](double t) {
        const TuplePoint x = rotated_tuple(s, g, k, t);
        const BalanceReport rep = balance_test(x);
        bool associated = rep.balanced;
        for (int i = 0; i < k && associated; ++i) {
            if (at_cone(s, x[i])) {
                associated = false;
                break;
            }
            const TangentVector v = evaluate(s, g, t + two_pi * i / k).second;
            associated = direction_in(s, x.forward(i), v, 1e-4);
        }
        c.t.push_back(t);
        c.reports.push_back(rep);
        c.energies.push_back(uniform_energy(x));
        c.smooth = c.smooth && rep.smooth;
        c.nonsmooth = c.nonsmooth || !rep.smooth;
        if (!associated) {
            c.rotating = false;
            c.failing_t = t;
        }
        return associated;
    };
    auto near_failure = [&](const BalanceReport& r) {
        return r.spacing_residual > 0.1 * r.tol_spacing || r.antipodal_residual > 0.1 * r.tol_antipodal;
    };
    for (int j = 0; j < grid; ++j)
        if (!sample(two_pi * j / grid)) return c;
    // One level of refinement around samples close to failing.
    const size_t n = c.t.size();
    for (size_t j = 0; j < n; ++j)
        if (near_failure(c.reports[j]))
            for (double off : {-0.5, 0.5})
                if (!sample(c.t[j] + off * two_pi / grid)) return c;
    return c;
}

// ---------------------------------------------------------------- export

void write_json(std::ostream& os, const TuplePoint& x, const BalanceReport& r, const std::string& header) {
    nlohmann::ordered_json j;
    if (!header.empty()) j["config"] = header;
    j["surface"] = to_config(x.surface());
    j["k"] = x.k();
    auto pts = nlohmann::ordered_json::array();
    for (const auto& p : x.points())
        pts.push_back({round12(p.u), round12(p.v), p.sheet == Sheet::front ? "front" : "back"});
    j["points"] = pts;
    auto ds = nlohmann::ordered_json::array();
    for (double d : r.distances) ds.push_back(round12(d));
    j["distances"] = ds;
    j["energy"] = round12(uniform_energy(x));
    j["spacing_residual"] = round12(r.spacing_residual);
    j["antipodal_residual"] = round12(r.antipodal_residual);
    j["kind"] = std::string(to_string(r.kind));
    j["uniquely"] = r.uniquely;
    j["smooth"] = r.smooth;
    j["cone_degenerate"] = r.cone_degenerate;
    auto cut = nlohmann::ordered_json::array();
    for (size_t i = 0; i < r.cut_pairs.size(); ++i) cut.push_back(std::string(to_string(r.pairs[i].kind)));
    j["pairs"] = cut;
    os << j.dump(2) << '\n';
}

void write_trace_csv(std::ostream& os, const SearchResult& r, const std::string& header) {
    detail::comment_header(os, header);
    os << "iter,E,spacing_residual,antipodal_residual\n";
    os << std::setprecision(12);
    for (const auto& row : r.trace)
        os << row.iteration << ',' << row.energy << ',' << row.spacing_residual << ',' << row.antipodal_residual
           << '\n';
}

}  // namespace kgeo
