#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgeo/surface.hpp"

namespace kgeo {

struct GeodesicSample {
    double t = 0.0;  // arc length from the start
    SurfacePoint point;
    TangentVector velocity;
};

// Unit-speed geodesic segment. Samples are stored in canonical form and start
// with the initial state.
struct GeodesicArc {
    SurfacePoint start;
    TangentVector start_velocity;
    double length = 0.0;
    std::vector<GeodesicSample> samples;

    int steps = 0;
    double max_step = 0.0;
    double error_estimate = 0.0;  // largest accepted local error

    const SurfacePoint& end_point() const { return samples.back().point; }
    const TangentVector& end_velocity() const { return samples.back().velocity; }
};

struct ShootOptions {
    double abs_tol = 1e-10;
    double max_step = 0.1;
};

// Exponential map along v for arc length L. The velocity is normalized first.
// Throws ConePointQuery if p is a polygon corner, ConePointHit if the path runs
// into one, IntegratorFailure if the stepper collapses.
GeodesicArc shoot(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v, double length,
                  const ShootOptions& opt = {});

// A closed geodesic, parametrized by S^1 = [0, 2pi) proportionally to arc length.
struct ClosedGeodesic {
    GeodesicArc arc;
    double closure_gap = 0.0;    // endpoint-to-start distance
    double closure_angle = 0.0;  // end/start velocity angle
    int newton_iterations = 0;

    double length() const { return arc.length; }
};

struct CloseUpOptions {
    int max_iterations = 50;
    double tolerance = 1e-11;
};

// Newton iteration on the return map (transversal offset, direction angle,
// period) starting from a nearly closing seed.
ClosedGeodesic close_up(const SurfaceModel& s, const GeodesicArc& seed, const CloseUpOptions& opt = {});

// Closed geodesic through p with velocity v and known period, without Newton.
// Used for geodesics known in closed form (great circles, equators, straight
// torus loops). Throws NoConvergence if the traced loop does not close.
ClosedGeodesic trace_closed(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v, double length);

// gamma(t) and gamma'(t)/|gamma'| for t in S^1 (any real t, reduced mod 2pi).
std::pair<SurfacePoint, TangentVector> evaluate(const SurfaceModel& s, const ClosedGeodesic& g, double t);

// State at arc length sigma along the arc (0 <= sigma <= length).
std::pair<SurfacePoint, TangentVector> state_at(const SurfaceModel& s, const GeodesicArc& arc, double sigma);

struct JacobiSolution {
    std::vector<double> t;
    std::vector<double> J;
    std::vector<double> dJ;
    std::optional<double> first_zero;
};

// Normal Jacobi field J'' + K J = 0, J(0) = 0, J'(0) = 1 along the arc.
JacobiSolution jacobi(const SurfaceModel& s, const GeodesicArc& arc);

// First conjugate distance along the geodesic from (p, v), searched up to max_length.
std::optional<double> first_conjugate(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v,
                                      double max_length);

// Geodesic with the normal Jacobi field along it; dJ and J at the end point are
// what the boundary-value solver differentiates against.
struct JacobiShot {
    GeodesicArc arc;
    double J = 0.0;
    double dJ = 0.0;
};
JacobiShot shoot_with_jacobi(const SurfaceModel& s, const SurfacePoint& p, const TangentVector& v, double length,
                             const ShootOptions& opt = {});

// Difference of two states as a flat vector: ambient position and velocity on
// embedded surfaces, wrapped planar offsets on flat ones.
Eigen::VectorXd state_difference(const SurfaceModel& s, const SurfacePoint& a, const TangentVector& va,
                                 const SurfacePoint& b, const TangentVector& vb);

void write_csv(std::ostream& os, const GeodesicArc& arc, const std::string& header = {});
// Arcs on the chart domain; markers are drawn as dots.
void write_svg(std::ostream& os, const SurfaceModel& s, const std::vector<const GeodesicArc*>& arcs,
               const std::string& header = {}, const std::vector<SurfacePoint>& markers = {});

}  // namespace kgeo
