#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kgeo/geodesic.hpp"
#include "kgeo/surface.hpp"

namespace kgeo {

inline constexpr double kClusterTol = 1e-3;  // radians
inline constexpr int kContinuumCount = 32;

// Length tolerance for ties between minimizers: 1e-6 times the diameter scale.
double tol_len(const SurfaceModel& s);

// One geodesic from q to p.
struct Minimizer {
    TangentVector direction;  // unit initial velocity at q
    TangentVector arrival;    // unit velocity on arrival at p
    double length = 0.0;
    std::optional<double> cone_parameter;  // set when q is a cone point
};

// The set of minimizing directions at q of geodesics from q to p.
struct MinimizerSet {
    SurfacePoint q;
    SurfacePoint p;
    double distance = 0.0;
    std::vector<Minimizer> minimizers;
    bool continuum = false;
    bool base_point = false;
    // Shortest geodesic found that is not a minimizer, or +inf if none lies
    // within the candidate window.
    double second_length = std::numeric_limits<double>::infinity();
    // Every geodesic found with length <= distance + window, minimizers included,
    // sorted by length.
    std::vector<Minimizer> candidates;

    int multiplicity() const { return static_cast<int>(minimizers.size()); }
    std::vector<TangentVector> directions() const;
};

struct DistanceOptions {
    int fan = 256;               // ellipsoid shooting starts
    int depth = 12;              // polygon unfolding crossings
    double window_factor = 0.25; // candidate window as a fraction of the diameter scale
};

MinimizerSet minimizers(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p,
                        const DistanceOptions& opt = {});

// The same geodesics seen from p: directions toward q.
MinimizerSet reversed(const SurfaceModel& s, const MinimizerSet& m);

double distance(const SurfaceModel& s, const SurfacePoint& q, const SurfacePoint& p);

enum class PointKind { Regular, OrdinaryCut, SingularCut, BasePoint, Inconclusive };
std::string_view to_string(PointKind k);

struct PointClass {
    PointKind kind = PointKind::Regular;
    int multiplicity = 0;
    bool continuum = false;
    bool conjugate = false;
    std::optional<double> conjugate_distance;
    double distance = 0.0;
    double second_length = std::numeric_limits<double>::infinity();
};

// Position of q relative to the cut locus of p.
PointClass classify_point(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q);
// Same, reusing an already computed set of directions at q toward p.
PointClass classify_set(const SurfaceModel& s, const MinimizerSet& m);

// One-sided derivative of d_p at q in direction v: min over minimizers of -<v, xi>.
double directional_derivative(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q,
                              const TangentVector& v);
double directional_derivative(const SurfaceModel& s, const MinimizerSet& m, const TangentVector& v);
// The minimizing direction achieving the derivative (a continuum is refined).
TangentVector derivative_witness(const SurfaceModel& s, const MinimizerSet& m, const TangentVector& v);

// Gradient of d_p at q; NotDifferentiable at ordinary cut points, Undefined at p.
TangentVector gradient_dp(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q);

// Angle of a planar direction at polygon corner `vertex`, measured in [0, cone angle)
// counterclockwise from the edge leaving the corner, front sheet first.
double cone_parameter(const SurfaceModel& s, int vertex, Sheet sheet, const Eigen::Vector2d& w);

void write_json(std::ostream& os, const SurfaceModel& s, const MinimizerSet& m, const std::string& header = {});

}  // namespace kgeo
