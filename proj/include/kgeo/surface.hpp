#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "kgeo/error.hpp"

namespace kgeo {

// Doubled polygons are two mirror copies glued along their edges. Every other
// surface lives on the front sheet only.
enum class Sheet { front, back };

// Sphere and ellipsoid carry two charts: the colatitude/longitude chart and a
// copy rotated so that its polar axis lies on the x-axis. Points within
// kPoleMargin of a pole are stored in the rotated chart.
enum class Chart { standard, rotated };

inline constexpr double kPoleMargin = 0.05;

struct SurfacePoint {
    double u = 0.0;
    double v = 0.0;
    Sheet sheet = Sheet::front;
    Chart chart = Chart::standard;
};

struct TangentVector {
    double a = 0.0;
    double b = 0.0;

    TangentVector operator-() const { return {-a, -b}; }
    TangentVector operator+(const TangentVector& o) const { return {a + o.a, b + o.b}; }
    TangentVector operator-(const TangentVector& o) const { return {a - o.a, b - o.b}; }
    TangentVector operator*(double s) const { return {a * s, b * s}; }
    Eigen::Vector2d vec() const { return {a, b}; }
    static TangentVector of(const Eigen::Vector2d& w) { return {w.x(), w.y()}; }
};

inline TangentVector operator*(double s, const TangentVector& t) { return t * s; }

struct RoundSphere {
    double radius = 1.0;
};

// x^2 + y^2 + (z/c)^2 = 1
struct EllipsoidOfRevolution {
    double c = 1.0;
};

// Rectangle [0,a) x [0,b) with opposite sides identified.
struct FlatTorus {
    double a = 1.0;
    double b = 1.0;
};

struct DoubledPolygon {
    std::vector<Eigen::Vector2d> vertices;  // strictly convex, counterclockwise
};

struct ConePoint {
    int vertex = 0;
    Eigen::Vector2d position;
    double angle = 0.0;  // total cone angle, twice the interior angle
};

enum class SurfaceKind { sphere, ellipsoid, torus, polygon };

class SurfaceModel {
public:
    using Variant = std::variant<RoundSphere, EllipsoidOfRevolution, FlatTorus, DoubledPolygon>;

    explicit SurfaceModel(Variant v);

    static SurfaceModel sphere(double radius = 1.0) { return SurfaceModel(RoundSphere{radius}); }
    static SurfaceModel ellipsoid(double c) { return SurfaceModel(EllipsoidOfRevolution{c}); }
    static SurfaceModel torus(double a = 1.0, double b = 1.0) { return SurfaceModel(FlatTorus{a, b}); }
    static SurfaceModel doubled_polygon(std::vector<Eigen::Vector2d> vertices);
    static SurfaceModel doubled_square(double side = 1.0);
    static SurfaceModel doubled_regular_polygon(int n, double side = 1.0);

    const Variant& variant() const { return variant_; }
    SurfaceKind kind() const;
    bool is_flat() const { return kind() == SurfaceKind::torus || kind() == SurfaceKind::polygon; }

    // Semi-axes (A, C) of the embedded ellipsoid x^2/A^2 + y^2/A^2 + z^2/C^2 = 1.
    // Only meaningful for sphere and ellipsoid.
    double axis_equatorial() const;
    double axis_polar() const;

    // Length scale used for tie tolerances: an upper bound for the diameter.
    double diameter_scale() const;

    const std::vector<ConePoint>& cone_points() const { return cones_; }
    const DoubledPolygon& polygon() const { return std::get<DoubledPolygon>(variant_); }

    std::string describe() const;

private:
    Variant variant_;
    std::vector<ConePoint> cones_;
};

using Christoffel = std::array<Eigen::Matrix2d, 2>;  // gamma[k](i, j)

Eigen::Matrix2d metric_at(const SurfaceModel& s, const SurfacePoint& p);
Christoffel christoffel_at(const SurfaceModel& s, const SurfacePoint& p);
double gauss_curvature(const SurfaceModel& s, const SurfacePoint& p);

double inner(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x, const TangentVector& y);
double norm(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x);
TangentVector normalized(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x);
double angle_between(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& x,
                     const TangentVector& y);

SurfacePoint canonicalize(const SurfaceModel& s, const SurfacePoint& p);

// Canonicalizes a point together with a tangent vector based at it (torus
// wrapping, polygon reflections, chart changes all act on the vector too).
std::pair<SurfacePoint, TangentVector> canonicalize_state(const SurfaceModel& s, const SurfacePoint& p,
                                                          const TangentVector& v);

bool is_cone_point(const SurfaceModel& s, const SurfacePoint& p, double tol = 1e-9);
int cone_index(const SurfaceModel& s, const SurfacePoint& p, double tol = 1e-9);

// Angle of v in a positively oriented orthonormal frame at p, in (-pi, pi].
double frame_angle(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v);
TangentVector from_frame_angle(const SurfaceModel& s, const SurfacePoint& p, double angle);
// Rotation by +pi/2 in the tangent plane.
TangentVector rotate_quarter(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v);

// Position in R^3 used for plotting and proximity tests: the embedding for
// sphere/ellipsoid, (u, v, 0) for the torus chart, (x, y, +-0) for polygons.
Eigen::Vector3d ambient(const SurfaceModel& s, const SurfacePoint& p);
// Pushforward of a tangent vector into R^3 (sphere/ellipsoid only).
Eigen::Vector3d ambient_vector(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v);
// Chart components of an ambient tangent vector (sphere/ellipsoid only).
TangentVector from_ambient_vector(const SurfaceModel& s, const SurfacePoint& p, const Eigen::Vector3d& w);
// Canonical point from an ambient position on the sphere/ellipsoid.
SurfacePoint from_ambient(const SurfaceModel& s, const Eigen::Vector3d& x);

// Small-distance proximity that respects the identifications: chord length on
// embedded surfaces, wrapped offset on the torus, planar offset on polygons
// (zero across a shared edge).
double proximity(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q);

// Plain-text key=value descriptor: kind, radius, c, a, b, vertices.
SurfaceModel parse_surface(const std::string& text);
std::string to_config(const SurfaceModel& s);

}  // namespace kgeo
