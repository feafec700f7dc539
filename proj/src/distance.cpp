#include "kgeo/distance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <list>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ellipsoidal.hpp"
#include "format.hpp"
#include "polygon.hpp"

namespace kgeo {

using detail::Axes;
using detail::Isometry2;
using detail::PolygonGeometry;
using detail::round12;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

// Angle between two directions at q; planar on flat surfaces, metric otherwise.
double direction_gap(const SurfaceModel& s, const SurfacePoint& q, const Minimizer& a, const Minimizer& b) {
    if (a.cone_parameter && b.cone_parameter) {
        const int v = cone_index(s, q);
        const double full = s.cone_points()[v].angle;
        double d = std::abs(*a.cone_parameter - *b.cone_parameter);
        return std::min(d, full - d);
    }
    if (s.is_flat()) {
        const double c = a.direction.vec().normalized().dot(b.direction.vec().normalized());
        return std::acos(std::clamp(c, -1.0, 1.0));
    }
    return angle_between(s, q, a.direction, b.direction);
}

double direction_angle(const SurfaceModel& s, const SurfacePoint& q, const Minimizer& m) {
    if (m.cone_parameter) return *m.cone_parameter;
    if (s.is_flat()) return std::atan2(m.direction.b, m.direction.a);
    return frame_angle(s, q, m.direction);
}

MinimizerSet assemble(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p,
                      std::vector<Minimizer> cands, double window, bool force_continuum = false) {
    if (cands.empty()) throw Error(ErrorCode::BVPFailure, "no geodesic from q reaches p");
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Minimizer& a, const Minimizer& b) { return a.length < b.length; });
    const double tol = tol_len(s);
    // Drop repeated geodesics: same direction and same length.
    std::vector<Minimizer> uniq;
    for (const auto& c : cands) {
        bool dup = false;
        for (const auto& u : uniq)
            if (std::abs(u.length - c.length) <= tol && direction_gap(s, q, u, c) < kClusterTol) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(c);
    }
    MinimizerSet m;
    m.q = q;
    m.p = p;
    m.distance = uniq.front().length;
    for (const auto& c : uniq) {
        if (c.length <= m.distance + tol)
            m.minimizers.push_back(c);
        else if (m.second_length == std::numeric_limits<double>::infinity())
            m.second_length = c.length;
        if (c.length <= m.distance + window) m.candidates.push_back(c);
    }
    if (force_continuum || static_cast<int>(m.minimizers.size()) >= kContinuumCount) {
        m.continuum = true;
        auto& v = m.minimizers;
        std::stable_sort(v.begin(), v.end(), [&](const Minimizer& a, const Minimizer& b) {
            return direction_angle(s, q, a) < direction_angle(s, q, b);
        });
        if (static_cast<int>(v.size()) > kContinuumCount) {
            std::vector<Minimizer> reps;
            for (int i = 0; i < kContinuumCount; ++i) reps.push_back(v[(i * v.size()) / kContinuumCount]);
            v = std::move(reps);
        }
    }
    return m;
}

// ---------------------------------------------------------------- sphere

MinimizerSet sphere_minimizers(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p, double window) {
    const double r = s.axis_equatorial();
    const Vector3d a = ambient(s, q) / r;
    const Vector3d b = ambient(s, p) / r;
    const double theta = std::atan2(a.cross(b).norm(), a.dot(b));
    std::vector<Minimizer> cands;
    if (r * (pi - theta) <= tol_len(s)) {
        for (int i = 0; i < kContinuumCount; ++i) {
            const TangentVector d = from_frame_angle(s, q, two_pi * i / kContinuumCount);
            const Vector3d w = ambient_vector(s, q, d);
            cands.push_back({d, normalized(s, p, from_ambient_vector(s, p, -w)), pi * r, std::nullopt});
        }
        auto m = assemble(s, q, p, cands, window, true);
        m.second_length = pi * r;
        return m;
    }
    const Vector3d t = (b - std::cos(theta) * a).normalized();
    const Vector3d arrive = -std::sin(theta) * a + std::cos(theta) * t;
    const TangentVector d_short = normalized(s, q, from_ambient_vector(s, q, t));
    const TangentVector v_short = normalized(s, p, from_ambient_vector(s, p, arrive));
    cands.push_back({d_short, v_short, r * theta, std::nullopt});
    cands.push_back({-d_short, -v_short, r * (two_pi - theta), std::nullopt});
    auto m = assemble(s, q, p, cands, window);
    m.second_length = r * (two_pi - theta);
    return m;
}

// ---------------------------------------------------------------- torus

MinimizerSet torus_minimizers(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p, double window) {
    const auto& T = std::get<FlatTorus>(s.variant());
    const Vector2d d0(std::remainder(p.u - q.u, T.a), std::remainder(p.v - q.v, T.b));
    const double reach = d0.norm() + window + tol_len(s);
    const int M = static_cast<int>(std::ceil(reach / T.a)) + 1;
    const int N = static_cast<int>(std::ceil(reach / T.b)) + 1;
    std::vector<Minimizer> cands;
    for (int m = -M; m <= M; ++m)
        for (int n = -N; n <= N; ++n) {
            const Vector2d w = d0 + Vector2d(m * T.a, n * T.b);
            const double len = w.norm();
            if (len > reach || len == 0.0) continue;
            const TangentVector dir = TangentVector::of(w / len);
            cands.push_back({dir, dir, len, std::nullopt});
        }
    return assemble(s, q, p, cands, window);
}

// ---------------------------------------------------------------- doubled polygon

double point_segment_distance(const Vector2d& x, const Vector2d& a, const Vector2d& b) {
    const Vector2d ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - x).norm();
}

bool in_window(double ang, double lo, double hi, double eps, bool closed) {
    const double a = lo + std::fmod(std::fmod(ang - lo, two_pi) + two_pi, two_pi);
    if (closed) return a <= hi + eps || a >= lo + two_pi - eps;
    return a > lo + eps && a < hi - eps;
}

MinimizerSet polygon_minimizers(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p, double window,
                                int max_depth) {
    const PolygonGeometry g(s.polygon());
    const int n = g.size();
    const Vector2d xq(q.u, q.v), xp(p.u, p.v);
    const int qv = g.vertex_at(xq, 1e-9);
    const int qe = qv < 0 ? g.edge_at(xq, 1e-12) : -1;
    const int pv = g.vertex_at(xp, 1e-9);
    const bool p_on_seam = pv >= 0 || g.edge_at(xp, 1e-12) >= 0;

    struct Copy {
        Isometry2 iso;
        Sheet sheet;
        double lo, hi;
        bool full;
        int entry;
        int depth;
        double dist;
    };
    std::deque<Copy> queue;
    std::vector<int> excluded;
    auto edge_angle = [&](int e) {
        const Vector2d d = g.end(e) - g.start(e);
        return std::atan2(d.y(), d.x());
    };
    if (qv >= 0) {
        const double a0 = edge_angle(qv), alpha = g.interior_angle(qv);
        queue.push_back({Isometry2{}, Sheet::front, a0, a0 + alpha, false, -1, 0, 0.0});
        queue.push_back({Isometry2{}.reflected(g, qv), Sheet::back, a0 - alpha, a0, false, -1, 0, 0.0});
        excluded = {qv, (qv + n - 1) % n};
    } else if (qe >= 0) {
        const double a0 = edge_angle(qe);
        queue.push_back({Isometry2{}, Sheet::front, a0, a0 + pi, false, -1, 0, 0.0});
        queue.push_back({Isometry2{}.reflected(g, qe), Sheet::back, a0 - pi, a0, false, -1, 0, 0.0});
        excluded = {qe};
    } else {
        queue.push_back({Isometry2{}, q.sheet, -pi, pi, true, -1, 0, 0.0});
    }

    std::vector<Minimizer> cands;
    double best = std::numeric_limits<double>::infinity();
    const double cap = 3.0 * g.scale + window;
    bool overflow = false;
    while (!queue.empty()) {
        const Copy c = queue.front();
        queue.pop_front();
        const double bound = std::min(cap, best + window + tol_len(s));
        if (c.dist > bound) continue;
        if (c.sheet == p.sheet || p_on_seam) {
            const Vector2d y = c.iso.apply(xp);
            const Vector2d dv = y - xq;
            const double len = dv.norm();
            if (len > 1e-14 * g.scale && len <= bound) {
                const double ang = std::atan2(dv.y(), dv.x());
                const bool ok = c.full || in_window(ang, c.lo, c.hi, c.depth == 0 ? 1e-12 : 1e-11, c.depth == 0);
                if (ok) {
                    Minimizer m;
                    const Vector2d dir = dv / len;
                    m.direction = TangentVector::of(dir);
                    m.length = len;
                    const Vector2d local = c.iso.inverse_dir(dir);
                    if (pv >= 0) {
                        m.arrival = TangentVector::of(c.sheet == Sheet::back ? g.reflect_direction(pv, local) : local);
                    } else {
                        m.arrival = canonicalize_state(s, {xp.x(), xp.y(), c.sheet}, TangentVector::of(local)).second;
                    }
                    if (qv >= 0) m.cone_parameter = cone_parameter(s, qv, Sheet::front, dir);
                    cands.push_back(m);
                    best = std::min(best, len);
                }
            }
        }
        if (c.depth >= max_depth) {
            overflow = true;
            continue;
        }
        for (int e = 0; e < n; ++e) {
            if (e == c.entry) continue;
            if (c.depth == 0 && std::find(excluded.begin(), excluded.end(), e) != excluded.end()) continue;
            const Vector2d A = c.iso.apply(g.start(e)), B = c.iso.apply(g.end(e));
            const double dseg = point_segment_distance(xq, A, B);
            if (dseg > bound) continue;
            const double aA = std::atan2(A.y() - xq.y(), A.x() - xq.x());
            const double aB = std::atan2(B.y() - xq.y(), B.x() - xq.x());
            const double d = std::remainder(aB - aA, two_pi);
            double lo = std::min(aA, aA + d), hi = std::max(aA, aA + d);
            if (!c.full) {
                const double shift = two_pi * std::round((0.5 * (c.lo + c.hi) - 0.5 * (lo + hi)) / two_pi);
                lo = std::max(lo + shift, c.lo);
                hi = std::min(hi + shift, c.hi);
            }
            if (hi - lo <= 1e-12) continue;
            queue.push_back({c.iso.reflected(g, e), detail::flip(c.sheet), lo, hi, false, e, c.depth + 1, dseg});
        }
    }
    if (cands.empty())
        throw Error(overflow ? ErrorCode::DepthBoundExceeded : ErrorCode::BVPFailure,
                    "no unfolding reaches the target within the depth bound");
    return assemble(s, q, p, cands, window);
}

// ---------------------------------------------------------------- ellipsoid

struct Fan {
    double A, C, theta;
    int count;
    std::vector<std::vector<std::pair<double, Vector3d>>> rays;  // base frame at longitude 0
};

// Orthonormal frame at an ambient point: e1 along increasing colatitude.
std::pair<Vector3d, Vector3d> meridian_frame(const Axes& ax, const Vector3d& x) {
    const double theta = ax.colatitude(x);
    const double phi = std::atan2(x.y(), x.x());
    const Vector3d e1 = Eigen::AngleAxisd(phi, Vector3d::UnitZ()) *
                        Vector3d(ax.A * std::cos(theta), 0.0, -ax.C * std::sin(theta)).normalized();
    const Vector3d e2 = ax.normal(x).cross(e1);
    return {e1, e2};
}

class FanCache {
public:
    std::shared_ptr<const Fan> get(const SurfaceModel& s, double theta, int count) {
        const double A = s.axis_equatorial(), C = s.axis_polar();
        const double key = std::round(theta * 1e4) / 1e4;
        {
            std::lock_guard<std::mutex> lock(mu_);
            for (auto it = fans_.begin(); it != fans_.end(); ++it) {
                const auto& f = **it;
                if (f.A == A && f.C == C && f.theta == key && f.count == count) {
                    auto hit = *it;
                    fans_.erase(it);
                    fans_.push_front(hit);
                    return hit;
                }
            }
        }
        auto fan = std::make_shared<Fan>(build(s, key, count));
        std::lock_guard<std::mutex> lock(mu_);
        fans_.push_front(fan);
        if (fans_.size() > 24) fans_.pop_back();
        return fan;
    }

private:
    static Fan build(const SurfaceModel& s, double theta, int count) {
        const Axes ax = detail::axes_of(s);
        Fan f{ax.A, ax.C, theta, count, {}};
        const Vector3d x0 = ax.position(Chart::standard, theta, 0.0);
        const SurfacePoint q0 = from_ambient(s, x0);
        const auto [e1, e2] = meridian_frame(ax, ambient(s, q0));
        const double Lmax = pi * std::max(ax.A, ax.C) + 0.1;
        f.rays.resize(count);
        for (int j = 0; j < count; ++j) {
            const double psi = two_pi * j / count;
            const Vector3d w = std::cos(psi) * e1 + std::sin(psi) * e2;
            const GeodesicArc arc = shoot(s, q0, from_ambient_vector(s, q0, w), Lmax);
            auto& ray = f.rays[j];
            ray.reserve(arc.samples.size());
            for (const auto& smp : arc.samples) ray.emplace_back(smp.t, ambient(s, smp.point));
        }
        return f;
    }

    std::mutex mu_;
    std::list<std::shared_ptr<const Fan>> fans_;
};

FanCache& fan_cache() {
    static FanCache cache;
    return cache;
}

struct Start {
    double psi, t, miss;
};

MinimizerSet ellipsoid_minimizers(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p, double window,
                                  int fan_count) {
    const Axes ax = detail::axes_of(s);
    const Vector3d X = ambient(s, q), P = ambient(s, p);
    const double scale = std::max(ax.A, ax.C);
    const auto [E1, E2] = meridian_frame(ax, X);
    const double theta = ax.colatitude(X), phi = std::atan2(X.y(), X.x());
    const auto fan = fan_cache().get(s, theta, fan_count);
    const Vector3d Pb = Eigen::AngleAxisd(-phi, Vector3d::UnitZ()) * P;

    // Local minima of the distance to p along each ray.
    std::vector<std::vector<Start>> per_ray(fan_count);
    for (int j = 0; j < fan_count; ++j) {
        const auto& ray = fan->rays[j];
        std::vector<double> d(ray.size());
        for (size_t i = 0; i < ray.size(); ++i) d[i] = (ray[i].second - Pb).norm();
        for (size_t i = 1; i + 1 < ray.size(); ++i)
            if (d[i] <= d[i - 1] && d[i] <= d[i + 1]) per_ray[j].push_back({two_pi * j / fan_count, ray[i].first, d[i]});
    }
    std::vector<Start> starts;
    for (int j = 0; j < fan_count; ++j) {
        for (const auto& st : per_ray[j]) {
            if (st.miss > 0.35 * scale) continue;
            bool dominated = false;
            for (int dj : {-1, 1}) {
                for (const auto& o : per_ray[(j + dj + fan_count) % fan_count])
                    if (std::abs(o.t - st.t) < 0.25 * scale && o.miss < st.miss - 1e-9 * scale) dominated = true;
            }
            if (!dominated) starts.push_back(st);
        }
    }
    std::stable_sort(starts.begin(), starts.end(), [](const Start& a, const Start& b) { return a.miss < b.miss; });
    if (starts.size() > 48) starts.resize(48);
    {
        // Chord start for nearby targets.
        const Vector3d chord = P - X;
        const Vector3d n = ax.normal(X);
        const Vector3d tang = chord - chord.dot(n) * n;
        if (tang.norm() > 0.0)
            starts.insert(starts.begin(), {std::atan2(tang.dot(E2), tang.dot(E1)), chord.norm(), 0.0});
    }

    struct Solution {
        double psi, L;
        TangentVector dir, arrival;
    };
    std::vector<Solution> sols;
    const double spacing = two_pi / fan_count;
    for (const auto& st : starts) {
        bool seen = false;
        for (const auto& so : sols)
            if (std::abs(std::remainder(so.psi - st.psi, two_pi)) < 0.5 * spacing && std::abs(so.L - st.t) < 0.05 * scale)
                seen = true;
        if (seen) continue;
        double psi = st.psi, L = st.t;
        bool converged = false;
        TangentVector dir, arrival;
        for (int it = 0; it < 40 && L > 0.0; ++it) {
            dir = normalized(s, q, from_ambient_vector(s, q, std::cos(psi) * E1 + std::sin(psi) * E2));
            const JacobiShot shot = shoot_with_jacobi(s, q, dir, L);
            const Vector3d Xe = ambient(s, shot.arc.end_point());
            const Vector3d V = ambient_vector(s, shot.arc.end_point(), shot.arc.end_velocity());
            const Vector3d W = ax.normal(Xe).cross(V);
            const Vector3d r = P - Xe;
            if (r.norm() < 1e-11 * scale) {
                converged = true;
                arrival = normalized(s, p, from_ambient_vector(s, p, V));
                break;
            }
            const double dL = std::clamp(r.dot(V), -0.5 * scale, 0.5 * scale);
            const double dpsi = std::clamp(shot.J * r.dot(W) / (shot.J * shot.J + 1e-10), -0.3, 0.3);
            L += dL;
            psi += dpsi;
        }
        if (!converged || L <= 0.0) continue;
        sols.push_back({psi, L, dir, arrival});
    }
    std::vector<Minimizer> cands;
    for (const auto& so : sols) cands.push_back({so.dir, so.arrival, so.L, std::nullopt});
    if (cands.empty()) throw Error(ErrorCode::BVPFailure, "no shooting start converged");
    return assemble(s, q, p, cands, window);
}

}  // namespace

double tol_len(const SurfaceModel& s) { return 1e-6 * s.diameter_scale(); }

std::vector<TangentVector> MinimizerSet::directions() const {
    std::vector<TangentVector> out;
    for (const auto& m : minimizers) out.push_back(m.direction);
    return out;
}

double cone_parameter(const SurfaceModel& s, int vertex, Sheet sheet, const Eigen::Vector2d& w) {
    const PolygonGeometry g(s.polygon());
    Vector2d u = sheet == Sheet::back ? g.reflect_direction(vertex, w) : w;
    const Vector2d e = g.end(vertex) - g.start(vertex);
    const double rel = std::remainder(std::atan2(u.y(), u.x()) - std::atan2(e.y(), e.x()), two_pi);
    const double alpha = g.interior_angle(vertex);
    return rel >= 0.0 ? rel : 2.0 * alpha + rel;
}

MinimizerSet minimizers(const SurfaceModel& s, const SurfacePoint& q_in, const SurfacePoint& p_in,
                        const DistanceOptions& opt) {
    const SurfacePoint q = canonicalize(s, q_in);
    const SurfacePoint p = canonicalize(s, p_in);
    const double window = opt.window_factor * s.diameter_scale();
    if (proximity(s, q, p) <= 1e-12 * s.diameter_scale() &&
        (s.kind() != SurfaceKind::polygon || q.sheet == p.sheet || cone_index(s, q) >= 0 ||
         PolygonGeometry(s.polygon()).edge_at({q.u, q.v}, 1e-12) >= 0)) {
        MinimizerSet m;
        m.q = q;
        m.p = p;
        m.base_point = true;
        return m;
    }
    switch (s.kind()) {
        case SurfaceKind::sphere: return sphere_minimizers(s, q, p, window);
        case SurfaceKind::torus: return torus_minimizers(s, q, p, window);
        case SurfaceKind::polygon: return polygon_minimizers(s, q, p, window, opt.depth);
        case SurfaceKind::ellipsoid: return ellipsoid_minimizers(s, q, p, window, opt.fan);
    }
    return {};
}

MinimizerSet reversed(const SurfaceModel& s, const MinimizerSet& m) {
    MinimizerSet r = m;
    std::swap(r.q, r.p);
    if (m.base_point) return r;
    auto flip = [&](std::vector<Minimizer>& v) {
        for (auto& x : v) {
            const TangentVector d = x.direction;
            x.direction = -x.arrival;
            x.arrival = -d;
            x.cone_parameter.reset();
            const int pv = s.kind() == SurfaceKind::polygon ? cone_index(s, r.q) : -1;
            if (pv >= 0) x.cone_parameter = cone_parameter(s, pv, Sheet::front, x.direction.vec());
        }
    };
    flip(r.minimizers);
    flip(r.candidates);
    return r;
}

double distance(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p) {
    return minimizers(s, q, p).distance;
}

std::string_view to_string(PointKind k) {
    switch (k) {
        case PointKind::Regular: return "Regular";
        case PointKind::OrdinaryCut: return "OrdinaryCut";
        case PointKind::SingularCut: return "SingularCut";
        case PointKind::BasePoint: return "BasePoint";
        case PointKind::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

PointClass classify_set(const SurfaceModel& s, const MinimizerSet& m) {
    PointClass pc;
    pc.multiplicity = m.multiplicity();
    pc.continuum = m.continuum;
    pc.distance = m.distance;
    pc.second_length = m.second_length;
    if (m.base_point) {
        pc.kind = PointKind::BasePoint;
        return pc;
    }
    if (m.continuum || m.multiplicity() >= 2) {
        pc.kind = PointKind::OrdinaryCut;
        return pc;
    }
    const double L = m.distance;
    const double band = 1e-4 * L;
    const bool margin = m.second_length - L > 10.0 * tol_len(s);
    if (!s.is_flat()) {
        pc.conjugate_distance = first_conjugate(s, m.q, m.minimizers.front().direction, L + 2.0 * band);
        if (pc.conjugate_distance) {
            const double z = *pc.conjugate_distance;
            if (z < L - band) {
                pc.kind = PointKind::Inconclusive;
                return pc;
            }
            if (std::abs(z - L) <= band) {
                pc.conjugate = true;
                pc.kind = PointKind::SingularCut;
                return pc;
            }
        }
    }
    pc.kind = margin ? PointKind::Regular : PointKind::Inconclusive;
    return pc;
}

PointClass classify_point(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q) {
    return classify_set(s, minimizers(s, q, p));
}

namespace {

// Golden-section refinement of min -<v, xi(angle)> over a continuum around a representative.
std::pair<double, TangentVector> refine_continuum(const SurfaceModel& s, const MinimizerSet& m,
                                                  const TangentVector& v, double center) {
    const SurfacePoint& q = m.q;
    auto dir = [&](double a) {
        return s.is_flat() ? TangentVector{std::cos(a), std::sin(a)} : from_frame_angle(s, q, a);
    };
    auto f = [&](double a) { return -inner(s, q, v, dir(a)); };
    const double half = two_pi / kContinuumCount;
    double lo = center - half, hi = center + half;
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
    const double a = 0.5 * (lo + hi);
    return {f(a), dir(a)};
}

}  // namespace

TangentVector derivative_witness(const SurfaceModel& s, const MinimizerSet& m, const TangentVector& v) {
    if (m.base_point) throw Error(ErrorCode::Undefined, "no minimizing direction at the base point");
    if (s.kind() == SurfaceKind::polygon && is_cone_point(s, m.q))
        throw Error(ErrorCode::ConePointQuery, "directional derivative at a polygon corner");
    double best = std::numeric_limits<double>::infinity();
    TangentVector arg;
    for (const auto& x : m.minimizers) {
        const double val = -inner(s, m.q, v, x.direction);
        if (val < best) {
            best = val;
            arg = x.direction;
        }
    }
    if (m.continuum) {
        const double center = s.is_flat() ? std::atan2(arg.b, arg.a) : frame_angle(s, m.q, arg);
        auto [val, dir] = refine_continuum(s, m, v, center);
        if (val < best) arg = dir;
    }
    return arg;
}

double directional_derivative(const SurfaceModel& s, const MinimizerSet& m, const TangentVector& v) {
    if (m.base_point) return norm(s, m.q, v);
    const TangentVector xi = derivative_witness(s, m, v);
    return -inner(s, m.q, v, xi);
}

double directional_derivative(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q,
                              const TangentVector& v) {
    const SurfacePoint qc = canonicalize(s, q);
    return directional_derivative(s, minimizers(s, qc, p), v);
}

TangentVector gradient_dp(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q) {
    const MinimizerSet m = minimizers(s, q, p);
    if (m.base_point) throw Error(ErrorCode::Undefined, "d_p has no gradient at p");
    if (m.continuum || m.multiplicity() >= 2)
        throw Error(ErrorCode::NotDifferentiable, "q is an ordinary cut point of p");
    return -m.minimizers.front().direction;
}

void write_json(std::ostream& os, const SurfaceModel& s, const MinimizerSet& m, const std::string& header) {
    nlohmann::ordered_json j;
    if (!header.empty()) j["config"] = header;
    j["surface"] = to_config(s);
    j["q"] = {round12(m.q.u), round12(m.q.v)};
    j["p"] = {round12(m.p.u), round12(m.p.v)};
    j["distance"] = round12(m.distance);
    j["multiplicity"] = m.multiplicity();
    j["continuum"] = m.continuum;
    j["base_point"] = m.base_point;
    j["second_length"] = std::isfinite(m.second_length) ? nlohmann::ordered_json(round12(m.second_length))
                                                        : nlohmann::ordered_json(nullptr);
    auto dirs = nlohmann::ordered_json::array();
    for (const auto& x : m.minimizers) dirs.push_back({round12(x.direction.a), round12(x.direction.b)});
    j["directions"] = dirs;
    os << j.dump(2) << '\n';
}

}  // namespace kgeo
