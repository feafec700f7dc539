#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgeo/distance.hpp"
#include "kgeo/geodesic.hpp"
#include "kgeo/surface.hpp"

namespace kgeo {

enum class KVerdict { NotKGeodesic, OpenlyK, StrictK };
std::string_view to_string(KVerdict v);

struct KGeodesicOptions {
    int grid = 128;
    double tol_factor = 1e-5;  // tol_k = tol_factor * length
};

struct KGeodesicReport {
    int k = 0;
    double length = 0.0;
    double tol_k = 0.0;
    KVerdict verdict = KVerdict::NotKGeodesic;
    double defect = 0.0;       // max over t of l/k - d(gamma(t), gamma(t + 2pi/k))
    double defect_t = 0.0;     // parameter where the defect is attained
    std::optional<double> cut_t;  // a parameter whose pair is a cut pair
    std::optional<PointKind> cut_kind;
    bool inconclusive = false;  // some pair could not be separated from a cut pair
    int samples = 0;
};

KGeodesicReport is_k_geodesic(const SurfaceModel& s, const ClosedGeodesic& g, int k,
                              const KGeodesicOptions& opt = {});

struct MinimalK {
    std::optional<int> k;  // empty when no k up to k_max works
    int k_max = 0;
    std::vector<KGeodesicReport> reports;
};

MinimalK minimal_k(const SurfaceModel& s, const ClosedGeodesic& g, int k_max = 64, const KGeodesicOptions& opt = {});

struct GSCriticalReport {
    SurfacePoint p, q;
    bool critical = false;
    std::vector<double> angles;  // sorted frame angles of the directions at q toward p
    std::vector<double> gaps;    // gaps[i] runs from angles[i] to the next angle
    double max_gap = 0.0;
    // When not critical: the bisector of the largest gap, a direction making an
    // angle larger than pi/2 with every minimizing direction.
    std::optional<TangentVector> witness;
    // Bisector of the complement of the largest gap (the mean minimizing direction).
    std::optional<TangentVector> complement_bisector;
};

inline constexpr double kTolAngle = 1e-6;

GSCriticalReport gs_critical(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q,
                             double tol_angle = kTolAngle);

// max over 16 unit directions v of (d_p(exp_q(h v)) - d_p(q)) / h; nonpositive near
// critical points of d_p and close to 1 away from the cut locus.
double ascent_measure(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q, double h);

std::vector<SurfacePoint> enumerate_gs_critical(const SurfaceModel& s, const SurfacePoint& p, int grid_n = 32);

// For a balanced pair (p, q): q is critical for d_p and p is critical for d_q. A pair balanced
// to antipodal tolerance tau needs tol_angle >= tau.
bool balanced_implies_gs(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q,
                         double tol_angle = kTolAngle);

// Lower curvature bound H > 0 where the surface has one, else 0.
double min_curvature(const SurfaceModel& s);

struct CandidateCheck {
    double length = 0.0;
    std::vector<double> crossings;  // parameters on gamma where the candidate meets it
    bool half_geodesic = false;
    bool length_ok = true;          // length >= l(gamma) - tol
    bool antipode_ok = true;        // half-geodesic candidates pass through gamma(t + pi)
    bool same_length = true;        // half-geodesic candidates match l(gamma)
    double antipode_miss = 0.0;
};

struct TheoremReport {
    double length = 0.0;
    double H = 0.0;
    std::vector<CandidateCheck> candidates;
    int violations = 0;
};

struct TheoremOptions {
    double tol_length = 1e-5;
    double tol_point = 1e-4;
    int half_grid = 32;  // sampling grid for the half-geodesic test of candidates
};

// Checks the length and antipodal-crossing conclusions for a half-geodesic gamma
// against candidate closed geodesics. Throws HypothesisUnmet unless l(gamma) > pi/sqrt(H).
TheoremReport verify_theorem_behavior(const SurfaceModel& s, const ClosedGeodesic& g,
                                      const std::vector<ClosedGeodesic>& candidates, double H,
                                      const TheoremOptions& opt = {});

void write_csv(std::ostream& os, const SurfaceModel& s, const std::vector<KGeodesicReport>& reports,
               const std::string& header = {});
// Geodesic with the cut-pair witnesses of a report marked.
void write_svg(std::ostream& os, const SurfaceModel& s, const ClosedGeodesic& g, const KGeodesicReport& r,
               const std::string& header = {});

}  // namespace kgeo
