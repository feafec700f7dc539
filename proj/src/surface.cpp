#include "kgeo/surface.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "ellipsoidal.hpp"
#include "polygon.hpp"

namespace kgeo {

using detail::Axes;
using detail::PolygonGeometry;
using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

constexpr double pi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double wrap(double x, double period) {
    double w = x - period * std::floor(x / period);
    if (w >= period || w < 0.0) w = 0.0;
    return w;
}

void require_regular(const SurfaceModel& s, const SurfacePoint& p) {
    if (s.kind() == SurfaceKind::polygon && is_cone_point(s, p))
        throw Error(ErrorCode::ConePointQuery, "differential query at a polygon corner");
    if (!std::isfinite(p.u) || !std::isfinite(p.v)) throw Error(ErrorCode::OutOfChart, "non-finite coordinates");
}

// Point expressed in the chart it claims; non-canonical points are accepted as
// long as the chart is regular there.
detail::ChartJet jet_at(const SurfaceModel& s, const SurfacePoint& p) {
    const Axes ax = detail::axes_of(s);
    if (Axes::singular_distance(p.u) < 1e-12 || p.u < 0.0 || p.u > pi) {
        throw Error(ErrorCode::OutOfChart, "point on the chart singularity; canonicalize first");
    }
    return ax.jet(p.chart, p.u, p.v);
}

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConePointQuery: return "ConePointQuery";
        case ErrorCode::OutOfChart: return "OutOfChart";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::ConePointHit: return "ConePointHit";
        case ErrorCode::IntegratorFailure: return "IntegratorFailure";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateJacobian: return "DegenerateJacobian";
        case ErrorCode::DepthBoundExceeded: return "DepthBoundExceeded";
        case ErrorCode::BVPFailure: return "BVPFailure";
        case ErrorCode::NotDifferentiable: return "NotDifferentiable";
        case ErrorCode::Undefined: return "Undefined";
        case ErrorCode::OrdinaryPair: return "OrdinaryPair";
        case ErrorCode::ConePointVertex: return "ConePointVertex";
        case ErrorCode::Stalled: return "Stalled";
        case ErrorCode::CollapsedTuple: return "CollapsedTuple";
        case ErrorCode::EnumerationBound: return "EnumerationBound";
        case ErrorCode::NotRotating: return "NotRotating";
        case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
        case ErrorCode::BadBracket: return "BadBracket";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

SurfaceModel::SurfaceModel(Variant v) : variant_(std::move(v)) {
    std::visit(overloaded{
                   [](const RoundSphere& x) {
                       if (!(x.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere radius must be > 0");
                   },
                   [](const EllipsoidOfRevolution& x) {
                       if (!(x.c > 0.0)) throw Error(ErrorCode::InvalidArgument, "ellipsoid c must be > 0");
                   },
                   [](const FlatTorus& x) {
                       if (!(x.a > 0.0 && x.b > 0.0))
                           throw Error(ErrorCode::InvalidArgument, "torus sides must be > 0");
                   },
                   [this](const DoubledPolygon& x) {
                       const int n = static_cast<int>(x.vertices.size());
                       if (n < 3) throw Error(ErrorCode::InvalidArgument, "polygon needs >= 3 vertices");
                       for (int i = 0; i < n; ++i) {
                           const Vector2d a = x.vertices[(i + 1) % n] - x.vertices[i];
                           const Vector2d b = x.vertices[(i + 2) % n] - x.vertices[(i + 1) % n];
                           if (a.x() * b.y() - a.y() * b.x() <= 0.0)
                               throw Error(ErrorCode::InvalidArgument,
                                           "polygon must be strictly convex and counterclockwise");
                       }
                       PolygonGeometry g(x);
                       for (int i = 0; i < n; ++i) cones_.push_back({i, x.vertices[i], 2.0 * g.interior_angle(i)});
                   },
               },
               variant_);
}

SurfaceModel SurfaceModel::doubled_polygon(std::vector<Vector2d> vertices) {
    return SurfaceModel(DoubledPolygon{std::move(vertices)});
}

SurfaceModel SurfaceModel::doubled_square(double side) {
    return doubled_polygon({{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}});
}

SurfaceModel SurfaceModel::doubled_regular_polygon(int n, double side) {
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "regular polygon needs n >= 3");
    std::vector<Vector2d> vs;
    Vector2d cur(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        vs.push_back(cur);
        const double ang = 2.0 * pi * i / n;
        cur += side * Vector2d(std::cos(ang), std::sin(ang));
    }
    return doubled_polygon(std::move(vs));
}

SurfaceKind SurfaceModel::kind() const {
    switch (variant_.index()) {
        case 0: return SurfaceKind::sphere;
        case 1: return SurfaceKind::ellipsoid;
        case 2: return SurfaceKind::torus;
        default: return SurfaceKind::polygon;
    }
}

double SurfaceModel::axis_equatorial() const {
    if (auto* s = std::get_if<RoundSphere>(&variant_)) return s->radius;
    return 1.0;
}

double SurfaceModel::axis_polar() const {
    if (auto* s = std::get_if<RoundSphere>(&variant_)) return s->radius;
    if (auto* e = std::get_if<EllipsoidOfRevolution>(&variant_)) return e->c;
    return 1.0;
}

double SurfaceModel::diameter_scale() const {
    return std::visit(overloaded{
                          [](const RoundSphere& x) { return pi * x.radius; },
                          [](const EllipsoidOfRevolution& x) { return pi * std::max(1.0, x.c); },
                          [](const FlatTorus& x) { return 0.5 * std::hypot(x.a, x.b); },
                          [](const DoubledPolygon& x) { return PolygonGeometry(x).scale; },
                      },
                      variant_);
}

std::string SurfaceModel::describe() const {
    std::ostringstream os;
    os << std::setprecision(12);
    std::visit(overloaded{
                   [&](const RoundSphere& x) { os << "sphere(r=" << x.radius << ")"; },
                   [&](const EllipsoidOfRevolution& x) { os << "ellipsoid(c=" << x.c << ")"; },
                   [&](const FlatTorus& x) { os << "torus(a=" << x.a << ",b=" << x.b << ")"; },
                   [&](const DoubledPolygon& x) { os << "doubled-polygon(n=" << x.vertices.size() << ")"; },
               },
               variant_);
    return os.str();
}

Matrix2d metric_at(const SurfaceModel& s, const SurfacePoint& p) {
    require_regular(s, p);
    if (s.is_flat()) return Matrix2d::Identity();
    const auto j = jet_at(s, p);
    Matrix2d g;
    g << j.xu.dot(j.xu), j.xu.dot(j.xv), j.xu.dot(j.xv), j.xv.dot(j.xv);
    return g;
}

Christoffel christoffel_at(const SurfaceModel& s, const SurfacePoint& p) {
    require_regular(s, p);
    Christoffel gamma{Matrix2d::Zero(), Matrix2d::Zero()};
    if (s.is_flat()) return gamma;
    const auto j = jet_at(s, p);
    Matrix2d g;
    g << j.xu.dot(j.xu), j.xu.dot(j.xv), j.xu.dot(j.xv), j.xv.dot(j.xv);
    const Matrix2d ginv = g.inverse();
    // Gamma^k_ij = g^{kl} <X_ij, X_l>
    const std::array<Vector3d, 2> basis{j.xu, j.xv};
    const Vector3d second[2][2] = {{j.xuu, j.xuv}, {j.xuv, j.xvv}};
    for (int i = 0; i < 2; ++i)
        for (int jj = 0; jj < 2; ++jj) {
            const Vector2d low(second[i][jj].dot(basis[0]), second[i][jj].dot(basis[1]));
            const Vector2d up = ginv * low;
            gamma[0](i, jj) = up.x();
            gamma[1](i, jj) = up.y();
        }
    return gamma;
}

double gauss_curvature(const SurfaceModel& s, const SurfacePoint& p) {
    require_regular(s, p);
    if (s.is_flat()) return 0.0;
    const Axes ax = detail::axes_of(s);
    const double A = ax.A, C = ax.C;
    const double t = (p.chart == Chart::standard) ? p.u : ax.colatitude(ax.position(p.chart, p.u, p.v));
    const double st = std::sin(t), ct = std::cos(t);
    if (std::abs(st) < 1e-7) return C * C / (A * A * A * A);
    // Brioschi formula for the orthogonal, longitude-independent metric
    // E(t) dt^2 + G(t) dp^2.
    const double E = A * A * ct * ct + C * C * st * st;
    const double Et = 2.0 * (C * C - A * A) * st * ct;
    const double G = A * A * st * st;
    const double Gt = 2.0 * A * A * st * ct;
    const double Gtt = 2.0 * A * A * (ct * ct - st * st);
    const double W = std::sqrt(E * G);
    const double d_ratio = Gtt / W - 0.5 * Gt * (Et * G + E * Gt) / (W * W * W);
    return -d_ratio / (2.0 * W);
}

double inner(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x, const TangentVector& y) {
    const Matrix2d g = metric_at(s, p);
    return x.vec().dot(g * y.vec());
}

double norm(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x) {
    return std::sqrt(std::max(0.0, inner(s, p, x, x)));
}

TangentVector normalized(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x) {
    const double n = norm(s, p, x);
    if (!(n > 0.0)) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
    return x * (1.0 / n);
}

double angle_between(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x,
                     const TangentVector& y) {
    const Matrix2d g = metric_at(s, p);
    const double nx = std::sqrt(x.vec().dot(g * x.vec()));
    const double ny = std::sqrt(y.vec().dot(g * y.vec()));
    if (!(nx > 0.0) || !(ny > 0.0)) throw Error(ErrorCode::ZeroVector, "angle with a zero vector");
    const double c = std::clamp(x.vec().dot(g * y.vec()) / (nx * ny), -1.0, 1.0);
    return std::acos(c);
}

std::pair<SurfacePoint, TangentVector> canonicalize_state(const SurfaceModel& s, const SurfacePoint& p,
                                                          const TangentVector& v) {
    switch (s.kind()) {
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid: {
            const Axes ax = detail::axes_of(s);
            const Vector3d x = ax.position(p.chart, p.u, p.v);
            const Chart target = ax.preferred_chart(x);
            const Vector2d uv = ax.coords(target, x);
            SurfacePoint q{uv.x(), uv.y(), Sheet::front, target};
            if (v.a == 0.0 && v.b == 0.0) return {q, v};
            if (Axes::singular_distance(p.u) < 1e-12)
                throw Error(ErrorCode::OutOfChart, "tangent vector at a chart singularity");
            const auto j0 = ax.jet(p.chart, p.u, p.v);
            const Vector3d w = j0.xu * v.a + j0.xv * v.b;
            return {q, from_ambient_vector(s, q, w)};
        }
        case SurfaceKind::torus: {
            const auto& t = std::get<FlatTorus>(s.variant());
            return {{wrap(p.u, t.a), wrap(p.v, t.b), Sheet::front, Chart::standard}, v};
        }
        case SurfaceKind::polygon: {
            const PolygonGeometry g(s.polygon());
            Vector2d x(p.u, p.v);
            Vector2d w = v.vec();
            Sheet sheet = p.sheet;
            const double tol = 1e-13 * g.scale;
            for (int iter = 0; iter < 10000; ++iter) {
                int e = -1;
                if (g.max_violation(x, &e) <= tol) break;
                x = g.reflect(e, x);
                w = g.reflect_direction(e, w);
                sheet = detail::flip(sheet);
            }
            // Seam points belong to both sheets; they are stored on the front one
            // with tangent data in the front chart (back directions point outward).
            if (sheet == Sheet::back) {
                for (int e = 0; e < g.size(); ++e) {
                    if (std::abs(g.signed_distance(e, x)) <= 1e-12 * g.scale) {
                        w = g.reflect_direction(e, w);
                        sheet = Sheet::front;
                        break;
                    }
                }
            }
            return {{x.x(), x.y(), sheet, Chart::standard}, TangentVector::of(w)};
        }
    }
    return {p, v};
}

SurfacePoint canonicalize(const SurfaceModel& s, const SurfacePoint& p) {
    return canonicalize_state(s, p, {}).first;
}

int cone_index(const SurfaceModel& s, const SurfacePoint& p, double tol) {
    if (s.kind() != SurfaceKind::polygon) return -1;
    return PolygonGeometry(s.polygon()).vertex_at({p.u, p.v}, tol);
}

bool is_cone_point(const SurfaceModel& s, const SurfacePoint& p, double tol) { return cone_index(s, p, tol) >= 0; }

namespace {

// Orthonormal frame (e1, e2) at p expressed in R^3; e1 along the first chart axis.
std::pair<Vector3d, Vector3d> ambient_frame(const SurfaceModel& s, const SurfacePoint& p) {
    const auto j = jet_at(s, p);
    const Axes ax = detail::axes_of(s);
    const Vector3d n = ax.normal(j.x);
    const Vector3d e1 = j.xu.normalized();
    return {e1, n.cross(e1)};
}

}  // namespace

double frame_angle(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v) {
    require_regular(s, p);
    if (s.is_flat()) return std::atan2(v.b, v.a);
    const auto [e1, e2] = ambient_frame(s, p);
    const Vector3d w = ambient_vector(s, p, v);
    return std::atan2(w.dot(e2), w.dot(e1));
}

TangentVector from_frame_angle(const SurfaceModel& s, const SurfacePoint& p, double angle) {
    require_regular(s, p);
    if (s.is_flat()) return {std::cos(angle), std::sin(angle)};
    const auto [e1, e2] = ambient_frame(s, p);
    return from_ambient_vector(s, p, std::cos(angle) * e1 + std::sin(angle) * e2);
}

TangentVector rotate_quarter(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v) {
    require_regular(s, p);
    if (s.is_flat()) return {-v.b, v.a};
    const Axes ax = detail::axes_of(s);
    const Vector3d x = ax.position(p.chart, p.u, p.v);
    return from_ambient_vector(s, p, ax.normal(x).cross(ambient_vector(s, p, v)));
}

Vector3d ambient(const SurfaceModel& s, const SurfacePoint& p) {
    switch (s.kind()) {
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid: return detail::axes_of(s).position(p.chart, p.u, p.v);
        case SurfaceKind::torus: return {p.u, p.v, 0.0};
        case SurfaceKind::polygon: return {p.u, p.v, p.sheet == Sheet::back ? 1.0 : 0.0};
    }
    return Vector3d::Zero();
}

Vector3d ambient_vector(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v) {
    if (s.is_flat()) return {v.a, v.b, 0.0};
    const auto j = jet_at(s, p);
    return j.xu * v.a + j.xv * v.b;
}

TangentVector from_ambient_vector(const SurfaceModel& s, const SurfacePoint& p, const Vector3d& w) {
    if (s.is_flat()) return {w.x(), w.y()};
    const auto j = jet_at(s, p);
    Matrix2d g;
    g << j.xu.dot(j.xu), j.xu.dot(j.xv), j.xu.dot(j.xv), j.xv.dot(j.xv);
    const Vector2d c = g.ldlt().solve(Vector2d(j.xu.dot(w), j.xv.dot(w)));
    return TangentVector::of(c);
}

SurfacePoint from_ambient(const SurfaceModel& s, const Vector3d& x) {
    const Axes ax = detail::axes_of(s);
    const Vector3d y = ax.project(x);
    const Chart chart = ax.preferred_chart(y);
    const Vector2d uv = ax.coords(chart, y);
    return {uv.x(), uv.y(), Sheet::front, chart};
}

double proximity(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q) {
    switch (s.kind()) {
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid: return (ambient(s, p) - ambient(s, q)).norm();
        case SurfaceKind::torus: {
            const auto& t = std::get<FlatTorus>(s.variant());
            double du = std::remainder(p.u - q.u, t.a);
            double dv = std::remainder(p.v - q.v, t.b);
            return std::hypot(du, dv);
        }
        case SurfaceKind::polygon: {
            const PolygonGeometry g(s.polygon());
            const Vector2d a(p.u, p.v), b(q.u, q.v);
            if (p.sheet == q.sheet) return (a - b).norm();
            double best = 1e300;
            for (int e = 0; e < g.size(); ++e) best = std::min(best, (a - g.reflect(e, b)).norm());
            return best;
        }
    }
    return 0.0;
}

namespace {

std::string trim(const std::string& x) {
    const auto b = x.find_first_not_of(" \t\r\n\"'");
    if (b == std::string::npos) return {};
    const auto e = x.find_last_not_of(" \t\r\n\"'");
    return x.substr(b, e - b + 1);
}

double parse_number(const std::map<std::string, std::string>& kv, const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        size_t used = 0;
        const double value = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return value;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad numeric value for '" + key + "': " + it->second);
    }
}

}  // namespace

SurfaceModel parse_surface(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::string normalized = text;
    std::replace(normalized.begin(), normalized.end(), '\n', ' ');
    std::istringstream is(normalized);
    std::string token;
    while (is >> token) {
        if (token.empty() || token[0] == '#') break;
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            if (kv.count("kind")) throw Error(ErrorCode::InvalidArgument, "unexpected token '" + token + "'");
            kv["kind"] = trim(token);
        } else {
            kv[trim(token.substr(0, eq))] = trim(token.substr(eq + 1));
        }
    }
    const auto it = kv.find("kind");
    if (it == kv.end()) throw Error(ErrorCode::InvalidArgument, "surface descriptor needs a kind");
    const std::string kind = it->second;
    if (kind == "sphere") return SurfaceModel::sphere(parse_number(kv, "radius", 1.0));
    if (kind == "ellipsoid") return SurfaceModel::ellipsoid(parse_number(kv, "c", 0.5));
    if (kind == "torus") return SurfaceModel::torus(parse_number(kv, "a", 1.0), parse_number(kv, "b", 1.0));
    if (kind == "square") return SurfaceModel::doubled_square(parse_number(kv, "side", 1.0));
    if (kind == "pentagon") return SurfaceModel::doubled_regular_polygon(5, parse_number(kv, "side", 1.0));
    if (kind == "polygon") {
        const auto vit = kv.find("vertices");
        if (vit == kv.end()) throw Error(ErrorCode::InvalidArgument, "polygon needs vertices=x,y;x,y;...");
        std::vector<Vector2d> verts;
        std::istringstream vs(vit->second);
        std::string pair;
        while (std::getline(vs, pair, ';')) {
            if (trim(pair).empty()) continue;
            const auto comma = pair.find(',');
            if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "bad vertex '" + pair + "'");
            try {
                verts.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "bad vertex '" + pair + "'");
            }
        }
        return SurfaceModel::doubled_polygon(std::move(verts));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown surface kind '" + kind + "'");
}

std::string to_config(const SurfaceModel& s) {
    std::ostringstream os;
    os << std::setprecision(17);
    std::visit(overloaded{
                   [&](const RoundSphere& x) { os << "kind=sphere radius=" << x.radius; },
                   [&](const EllipsoidOfRevolution& x) { os << "kind=ellipsoid c=" << x.c; },
                   [&](const FlatTorus& x) { os << "kind=torus a=" << x.a << " b=" << x.b; },
                   [&](const DoubledPolygon& x) {
                       os << "kind=polygon vertices=";
                       for (size_t i = 0; i < x.vertices.size(); ++i) {
                           if (i) os << ';';
                           os << x.vertices[i].x() << ',' << x.vertices[i].y();
                       }
                   },
               },
               s.variant());
    return os.str();
}

}  // namespace kgeo
