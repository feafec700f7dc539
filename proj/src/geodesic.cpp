#include "kgeo/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "ellipsoidal.hpp"
#include "polygon.hpp"
#include "svg.hpp"

namespace kgeo {

using detail::Axes;
using detail::PolygonGeometry;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

constexpr double pi = std::numbers::pi;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct State {
    SurfacePoint p;
    TangentVector v;
    double J = 0.0;
    double dJ = 1.0;
};

// Geodesic equation (and optionally the Jacobi equation) in one chart.
Vec6 rhs(const SurfaceModel& s, const Axes& ax, Chart chart, const Vec6& y, bool with_jacobi) {
    const auto j = ax.jet(chart, y[0], y[1]);
    const double du = y[2], dv = y[3];
    Eigen::Matrix2d g;
    g << j.xu.dot(j.xu), j.xu.dot(j.xv), j.xu.dot(j.xv), j.xv.dot(j.xv);
    const Vector3d S = j.xuu * (du * du) + 2.0 * j.xuv * (du * dv) + j.xvv * (dv * dv);
    const Vector2d acc = -g.inverse() * Vector2d(j.xu.dot(S), j.xv.dot(S));
    Vec6 out;
    out << du, dv, acc.x(), acc.y(), 0.0, 0.0;
    if (with_jacobi) {
        const double K = gauss_curvature(s, SurfacePoint{y[0], y[1], Sheet::front, chart});
        out[4] = y[5];
        out[5] = -K * y[4];
    }
    return out;
}

using StepCallback = std::function<bool(double t, const State&)>;

// Adaptive integration of the embedded geodesic flow. The callback sees every
// accepted step and may stop the integration by returning false.
void integrate_embedded(const SurfaceModel& s, const State& init, double length, const ShootOptions& opt,
                        bool with_jacobi, GeodesicArc* stats, const StepCallback& cb) {
    const Axes ax = detail::axes_of(s);
    State st = init;
    double t = 0.0;
    double h = std::min(opt.max_step, 0.02);
    const int ncomp = with_jacobi ? 6 : 4;
    long guard = 0;
    while (t < length) {
        if (++guard > 5'000'000) throw Error(ErrorCode::IntegratorFailure, "step budget exhausted");
        const Chart chart = st.p.chart;
        const double chart_cap = std::max(1e-3, 0.6 * Axes::singular_distance(st.p.u));
        h = std::min({h, opt.max_step, chart_cap, length - t});
        Vec6 y;
        y << st.p.u, st.p.v, st.v.a, st.v.b, st.J, st.dJ;
        const Vec6 k1 = rhs(s, ax, chart, y, with_jacobi);
        const Vec6 k2 = rhs(s, ax, chart, y + h * (a21 * k1), with_jacobi);
        const Vec6 k3 = rhs(s, ax, chart, y + h * (a31 * k1 + a32 * k2), with_jacobi);
        const Vec6 k4 = rhs(s, ax, chart, y + h * (a41 * k1 + a42 * k2 + a43 * k3), with_jacobi);
        const Vec6 k5 = rhs(s, ax, chart, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), with_jacobi);
        const Vec6 k6 =
            rhs(s, ax, chart, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), with_jacobi);
        const Vec6 y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec6 k7 = rhs(s, ax, chart, y5, with_jacobi);
        const Vec6 ev = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = ev.head(ncomp).cwiseAbs().maxCoeff();
        if (!std::isfinite(err) || !y5.allFinite()) {
            h *= 0.25;
            if (h < 1e-14) throw Error(ErrorCode::IntegratorFailure, "non-finite state");
            continue;
        }
        if (err <= opt.abs_tol || h < 1e-12) {
            const bool last = (length - t - h) <= 1e-14 * std::max(1.0, length);
            t = last ? length : t + h;
            SurfacePoint np{y5[0], y5[1], Sheet::front, chart};
            TangentVector nv{y5[2], y5[3]};
            const double speed = norm(s, np, nv);
            nv = nv * (1.0 / speed);
            std::tie(st.p, st.v) = canonicalize_state(s, np, nv);
            st.J = y5[4];
            st.dJ = y5[5];
            if (stats) {
                stats->steps++;
                stats->max_step = std::max(stats->max_step, h);
                stats->error_estimate = std::max(stats->error_estimate, err);
            }
            if (!cb(t, st)) return;
            const double fac = err > 0.0 ? 0.9 * std::pow(opt.abs_tol / err, 0.2) : 5.0;
            h *= std::clamp(fac, 0.2, 5.0);
        } else {
            h *= std::max(0.1, 0.9 * std::pow(opt.abs_tol / err, 0.2));
            if (h < 1e-14) throw Error(ErrorCode::IntegratorFailure, "step size underflow");
        }
    }
}

void trace_torus(const SurfaceModel& s, const State& init, double length, GeodesicArc& arc) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(length / 0.25)));
    for (int i = 1; i <= pieces; ++i) {
        const double t = length * i / pieces;
        SurfacePoint q{init.p.u + t * init.v.a, init.p.v + t * init.v.b, Sheet::front, Chart::standard};
        arc.samples.push_back({t, canonicalize(s, q), init.v});
    }
    arc.steps = pieces;
}

// Billiard in the polygon: straight segments, velocity reflected and sheet
// flipped at every edge crossing.
void trace_polygon(const SurfaceModel& s, const State& init, double length, GeodesicArc& arc) {
    const PolygonGeometry g(s.polygon());
    Vector2d x(init.p.u, init.p.v);
    Vector2d w = init.v.vec();
    Sheet sheet = init.p.sheet;
    double t = 0.0;
    int crossings = 0;
    const double eps = 1e-13 * g.scale;
    while (true) {
        double best = 1e300;
        int exit_edge = -1;
        for (int e = 0; e < g.size(); ++e) {
            const double nw = g.normals[e].dot(w);
            if (nw <= 1e-15) continue;
            const double te = std::max(0.0, -g.signed_distance(e, x) / nw);
            if (te < best) {
                best = te;
                exit_edge = e;
            }
        }
        if (exit_edge < 0) throw Error(ErrorCode::IntegratorFailure, "no exit edge");
        if (t + best >= length) {
            x += (length - t) * w;
            t = length;
            break;
        }
        x += best * w;
        t += best;
        if (g.vertex_at(x, 1e-9) >= 0) throw Error(ErrorCode::ConePointHit, "geodesic runs into a polygon corner");
        x -= g.signed_distance(exit_edge, x) * g.normals[exit_edge];
        w = g.reflect_direction(exit_edge, w);
        sheet = detail::flip(sheet);
        if (++crossings > 10'000'000) throw Error(ErrorCode::IntegratorFailure, "crossing budget exhausted");
        if (best > eps) {
            auto [cp, cv] = canonicalize_state(s, {x.x(), x.y(), sheet, Chart::standard}, TangentVector::of(w));
            arc.samples.push_back({t, cp, cv});
        }
    }
    auto [cp, cv] = canonicalize_state(s, {x.x(), x.y(), sheet, Chart::standard}, TangentVector::of(w));
    if (!arc.samples.empty() && arc.samples.back().t >= length) arc.samples.pop_back();
    arc.samples.push_back({length, cp, cv});
    arc.steps = crossings + 1;
}

State initial_state(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v) {
    if (s.kind() == SurfaceKind::polygon && is_cone_point(s, p))
        throw Error(ErrorCode::ConePointQuery, "cannot shoot from a polygon corner");
    auto [cp, cv] = canonicalize_state(s, p, v);
    const double n = norm(s, cp, cv);
    if (!(n > 0.0)) throw Error(ErrorCode::ZeroVector, "shoot with zero velocity");
    return {cp, cv * (1.0 / n), 0.0, 1.0};
}

double hermite_root(double t0, double t1, double y0, double d0, double y1, double d1) {
    const double h = t1 - t0;
    auto eval = [&](double t) {
        const double s = (t - t0) / h;
        const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
        const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
        return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    };
    double lo = t0, hi = t1;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (eval(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double velocity_angle(const Eigen::VectorXd& diff, int offset, int dim) {
    const double dv = diff.segment(offset, dim).norm();
    return 2.0 * std::asin(std::min(1.0, 0.5 * dv));
}

}  // namespace

GeodesicArc shoot(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v, double length,
                  const ShootOptions& opt) {
    if (!(length >= 0.0) || !std::isfinite(length)) throw Error(ErrorCode::InvalidArgument, "negative length");
    const State init = initial_state(s, p, v);
    GeodesicArc arc;
    arc.start = init.p;
    arc.start_velocity = init.v;
    arc.length = length;
    arc.samples.push_back({0.0, init.p, init.v});
    if (length == 0.0) return arc;
    switch (s.kind()) {
        case SurfaceKind::torus: trace_torus(s, init, length, arc); break;
        case SurfaceKind::polygon: trace_polygon(s, init, length, arc); break;
        default:
            integrate_embedded(s, init, length, opt, false, &arc, [&](double t, const State& st) {
                arc.samples.push_back({t, st.p, st.v});
                return true;
            });
    }
    return arc;
}

JacobiShot shoot_with_jacobi(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v, double length,
                             const ShootOptions& opt) {
    JacobiShot out;
    if (s.is_flat()) {
        out.arc = shoot(s, p, v, length, opt);
        out.J = length;
        out.dJ = 1.0;
        return out;
    }
    const State init = initial_state(s, p, v);
    GeodesicArc& arc = out.arc;
    arc.start = init.p;
    arc.start_velocity = init.v;
    arc.length = length;
    arc.samples.push_back({0.0, init.p, init.v});
    if (length == 0.0) return out;
    integrate_embedded(s, init, length, opt, true, &arc, [&](double t, const State& st) {
        arc.samples.push_back({t, st.p, st.v});
        out.J = st.J;
        out.dJ = st.dJ;
        return true;
    });
    return out;
}

std::pair<SurfacePoint, TangentVector> state_at(const SurfaceModel& s, const GeodesicArc& arc, double sigma) {
    sigma = std::clamp(sigma, 0.0, arc.length);
    auto it = std::upper_bound(arc.samples.begin(), arc.samples.end(), sigma,
                               [](double x, const GeodesicSample& smp) { return x < smp.t; });
    const GeodesicSample& base = *std::prev(it);
    const double rest = sigma - base.t;
    if (rest <= 0.0) return {base.point, base.velocity};
    GeodesicArc piece = shoot(s, base.point, base.velocity, rest);
    return {piece.end_point(), piece.end_velocity()};
}

std::pair<SurfacePoint, TangentVector> evaluate(const SurfaceModel& s, const ClosedGeodesic& g, double t) {
    const double two_pi = 2.0 * pi;
    double r = std::fmod(t, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    const double sigma = r / two_pi * g.length();
    return state_at(s, g.arc, sigma);
}

Eigen::VectorXd state_difference(const SurfaceModel& s, const SurfacePoint& a, const TangentVector& va,
                                 const SurfacePoint& b, const TangentVector& vb) {
    switch (s.kind()) {
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid: {
            Eigen::VectorXd d(6);
            d.head<3>() = ambient(s, a) - ambient(s, b);
            d.tail<3>() = ambient_vector(s, a, va) - ambient_vector(s, b, vb);
            return d;
        }
        case SurfaceKind::torus: {
            const auto& t = std::get<FlatTorus>(s.variant());
            Eigen::VectorXd d(4);
            d << std::remainder(a.u - b.u, t.a), std::remainder(a.v - b.v, t.b), va.a - vb.a, va.b - vb.b;
            return d;
        }
        case SurfaceKind::polygon: {
            const PolygonGeometry g(s.polygon());
            Vector2d xb(b.u, b.v), wb = vb.vec();
            if (a.sheet != b.sheet) {
                int e = 0;
                double best = 1e300;
                for (int i = 0; i < g.size(); ++i) {
                    const double d = std::abs(g.signed_distance(i, xb));
                    if (d < best) {
                        best = d;
                        e = i;
                    }
                }
                xb = g.reflect(e, xb);
                wb = g.reflect_direction(e, wb);
            }
            Eigen::VectorXd d(4);
            d << a.u - xb.x(), a.v - xb.y(), va.a - wb.x(), va.b - wb.y();
            return d;
        }
    }
    return {};
}

ClosedGeodesic trace_closed(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v, double length) {
    ClosedGeodesic out;
    out.arc = shoot(s, p, v, length);
    const Eigen::VectorXd d =
        state_difference(s, out.arc.end_point(), out.arc.end_velocity(), out.arc.start, out.arc.start_velocity);
    const int half = static_cast<int>(d.size()) / 2;
    out.closure_gap = d.head(half).norm();
    out.closure_angle = velocity_angle(d, half, half);
    if (out.closure_gap > 1e-7 * length || out.closure_angle > 1e-6)
        throw Error(ErrorCode::NoConvergence, "traced loop does not close");
    return out;
}

ClosedGeodesic close_up(const SurfaceModel& s, const GeodesicArc& seed, const CloseUpOptions& opt) {
    const SurfacePoint p0 = seed.start;
    const TangentVector v0 = normalized(s, p0, seed.start_velocity);
    const double T0 = seed.length;
    {
        const Eigen::VectorXd d = state_difference(s, seed.end_point(), seed.end_velocity(), p0, v0);
        const int half = static_cast<int>(d.size()) / 2;
        if (d.head(half).norm() > 0.05 * T0 || velocity_angle(d, half, half) > 0.2)
            throw Error(ErrorCode::NoConvergence, "seed is too far from closing");
    }
    const TangentVector n0 = normalized(s, p0, rotate_quarter(s, p0, v0));

    auto start_state = [&](double off, double psi) {
        SurfacePoint p = p0;
        TangentVector base = v0;
        if (off != 0.0) {
            const double sign = off > 0.0 ? 1.0 : -1.0;
            const GeodesicArc tr = shoot(s, p0, n0 * sign, std::abs(off));
            p = tr.end_point();
            const TangentVector n_end = tr.end_velocity() * sign;
            const double orient = (p.sheet != p0.sheet) ? 1.0 : -1.0;
            base = normalized(s, p, rotate_quarter(s, p, n_end) * orient);
        }
        const TangentVector rot = rotate_quarter(s, p, base);
        return std::make_pair(p, normalized(s, p, base * std::cos(psi) + rot * std::sin(psi)));
    };
    auto residual = [&](const Eigen::Vector3d& z) {
        const auto [p, v] = start_state(z[0], z[1]);
        const GeodesicArc arc = shoot(s, p, v, z[2]);
        return state_difference(s, arc.end_point(), arc.end_velocity(), p, v);
    };

    Eigen::Vector3d z(0.0, 0.0, T0);
    Eigen::VectorXd r = residual(z);
    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        if (r.norm() <= opt.tolerance * std::max(1.0, T0)) break;
        Eigen::MatrixXd Jm(r.size(), 3);
        for (int c = 0; c < 3; ++c) {
            const double h = 1e-7;
            Eigen::Vector3d zp = z, zm = z;
            zp[c] += h;
            zm[c] -= h;
            Jm.col(c) = (residual(zp) - residual(zm)) / (2.0 * h);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jm, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv[0] < 1e-12) throw Error(ErrorCode::DegenerateJacobian, "return map has a vanishing Jacobian");
        Eigen::Vector3d step = Eigen::Vector3d::Zero();
        for (int c = 0; c < sv.size(); ++c) {
            if (sv[c] < 1e-6 * sv[0]) continue;
            step -= svd.matrixV().col(c) * (svd.matrixU().col(c).dot(r) / sv[c]);
        }
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 12; ++ls, alpha *= 0.5) {
            const Eigen::Vector3d zn = z + alpha * step;
            const Eigen::VectorXd rn = residual(zn);
            if (rn.norm() < r.norm()) {
                z = zn;
                r = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    ClosedGeodesic out;
    const auto [p, v] = start_state(z[0], z[1]);
    out.arc = shoot(s, p, v, z[2]);
    out.newton_iterations = iter;
    const int half = static_cast<int>(r.size()) / 2;
    out.closure_gap = r.head(half).norm();
    out.closure_angle = velocity_angle(r, half, half);
    if (out.closure_gap >= 1e-7 * z[2] || out.closure_angle >= 1e-6)
        throw Error(ErrorCode::NoConvergence, "closing iteration did not converge");
    return out;
}

JacobiSolution jacobi(const SurfaceModel& s, const GeodesicArc& arc) {
    JacobiSolution sol;
    sol.t.push_back(0.0);
    sol.J.push_back(0.0);
    sol.dJ.push_back(1.0);
    if (s.is_flat()) {
        for (const auto& smp : arc.samples) {
            if (smp.t == 0.0) continue;
            sol.t.push_back(smp.t);
            sol.J.push_back(smp.t);
            sol.dJ.push_back(1.0);
        }
        return sol;
    }
    State init = initial_state(s, arc.start, arc.start_velocity);
    ShootOptions opt;
    opt.max_step = 0.05;
    integrate_embedded(s, init, arc.length, opt, true, nullptr, [&](double t, const State& st) {
        const double tp = sol.t.back(), Jp = sol.J.back(), dJp = sol.dJ.back();
        if (!sol.first_zero && tp > 0.0 && Jp > 0.0 && st.J <= 0.0)
            sol.first_zero = hermite_root(tp, t, Jp, dJp, st.J, st.dJ);
        sol.t.push_back(t);
        sol.J.push_back(st.J);
        sol.dJ.push_back(st.dJ);
        return true;
    });
    return sol;
}

std::optional<double> first_conjugate(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v,
                                      double max_length) {
    if (s.is_flat()) return std::nullopt;
    State init = initial_state(s, p, v);
    ShootOptions opt;
    opt.max_step = 0.05;
    std::optional<double> zero;
    double tp = 0.0, Jp = 0.0, dJp = 1.0;
    integrate_embedded(s, init, max_length, opt, true, nullptr, [&](double t, const State& st) {
        if (tp > 0.0 && Jp > 0.0 && st.J <= 0.0) {
            zero = hermite_root(tp, t, Jp, dJp, st.J, st.dJ);
            return false;
        }
        tp = t;
        Jp = st.J;
        dJp = st.dJ;
        return true;
    });
    return zero;
}

void write_csv(std::ostream& os, const GeodesicArc& arc, const std::string& header) {
    std::istringstream in(header);
    std::string line;
    while (std::getline(in, line)) os << "# " << line << '\n';
    os << "t,u,v,du,dv\n";
    os << std::setprecision(12);
    for (const auto& smp : arc.samples)
        os << smp.t << ',' << smp.point.u << ',' << smp.point.v << ',' << smp.velocity.a << ',' << smp.velocity.b
           << '\n';
}

void write_svg(std::ostream& os, const SurfaceModel& s, const std::vector<const GeodesicArc*>& arcs,
               const std::string& header, const std::vector<SurfacePoint>& markers) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    auto draw_markers = [&](detail::SvgCanvas& canvas) {
        for (const auto& m : markers) {
            if (s.is_flat()) {
                const SurfacePoint c = canonicalize(s, m);
                canvas.circle(c.u, c.v, 5.0, "#000");
            } else {
                const Vector2d c = detail::axes_of(s).coords(Chart::standard, ambient(s, m));
                canvas.circle(c.y(), c.x(), 5.0, "#000");
            }
        }
    };
    switch (s.kind()) {
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid: {
            const Axes ax = detail::axes_of(s);
            detail::SvgCanvas canvas(0.0, 2 * pi, 0.0, pi);
            canvas.frame("longitude", "colatitude");
            for (size_t i = 0; i < arcs.size(); ++i) {
                std::vector<std::pair<double, double>> pts;
                for (const auto& smp : arcs[i]->samples) {
                    const Vector2d c = ax.coords(Chart::standard, ambient(s, smp.point));
                    pts.emplace_back(c.y(), c.x());
                }
                canvas.polyline(pts, colors[i % 6], 1.0);
            }
            draw_markers(canvas);
            canvas.write(os, header);
            break;
        }
        case SurfaceKind::torus: {
            const auto& t = std::get<FlatTorus>(s.variant());
            detail::SvgCanvas canvas(0.0, t.a, 0.0, t.b);
            canvas.frame("u", "v");
            for (size_t i = 0; i < arcs.size(); ++i) {
                std::vector<std::pair<double, double>> pts;
                const auto& a = *arcs[i];
                // Unwrapped straight pieces between samples, cut at the domain boundary.
                for (size_t j = 0; j + 1 < a.samples.size(); ++j) {
                    const auto& sa = a.samples[j];
                    const int sub = 16;
                    for (int m = 0; m <= sub; ++m) {
                        const double tau = (a.samples[j + 1].t - sa.t) * m / sub;
                        const SurfacePoint q = canonicalize(
                            s, {sa.point.u + tau * sa.velocity.a, sa.point.v + tau * sa.velocity.b});
                        pts.emplace_back(q.u, q.v);
                    }
                }
                canvas.polyline(pts, colors[i % 6], 0.25 * std::min(t.a, t.b));
            }
            draw_markers(canvas);
            canvas.write(os, header);
            break;
        }
        case SurfaceKind::polygon: {
            const auto& verts = s.polygon().vertices;
            double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
            for (const auto& v : verts) {
                x0 = std::min(x0, v.x());
                x1 = std::max(x1, v.x());
                y0 = std::min(y0, v.y());
                y1 = std::max(y1, v.y());
            }
            const double span = std::max(x1 - x0, y1 - y0);
            detail::SvgCanvas canvas(x0, x0 + span, y0, y0 + span);
            canvas.frame("x (front solid, back dashed)", "y");
            std::vector<std::pair<double, double>> outline;
            for (const auto& v : verts) outline.emplace_back(v.x(), v.y());
            outline.emplace_back(verts.front().x(), verts.front().y());
            canvas.polyline(outline, "#444", 1e300, 1.0);
            for (size_t i = 0; i < arcs.size(); ++i) {
                const auto& a = *arcs[i];
                for (size_t j = 0; j + 1 < a.samples.size(); ++j) {
                    // Each straight piece runs on the sheet the sample velocity enters.
                    const auto& sa = a.samples[j];
                    const auto& sb = a.samples[j + 1];
                    const Vector2d xa(sa.point.u, sa.point.v), xb(sb.point.u, sb.point.v);
                    const PolygonGeometry g(s.polygon());
                    const bool back = sa.point.sheet == Sheet::back || g.max_violation(xa + 1e-6 * sa.velocity.vec()) > 0;
                    canvas.polyline({{xa.x(), xa.y()}, {xb.x(), xb.y()}}, back ? "#d62728" : colors[i % 6],
                                    1e300, back ? 1.0 : 2.0);
                }
            }
            draw_markers(canvas);
            canvas.write(os, header);
            break;
        }
    }
}

}  // namespace kgeo
