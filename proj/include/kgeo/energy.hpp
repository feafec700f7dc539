#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgeo/distance.hpp"
#include "kgeo/geodesic.hpp"
#include "kgeo/surface.hpp"

namespace kgeo {

// A k-tuple of points with indices taken mod k. Minimizer sets of consecutive
// pairs are computed lazily and dropped when a point moves.
class TuplePoint {
public:
    TuplePoint(const SurfaceModel& s, std::vector<SurfacePoint> points, DistanceOptions opt = {});

    int k() const { return static_cast<int>(x_.size()); }
    const SurfaceModel& surface() const { return s_; }
    const std::vector<SurfacePoint>& points() const { return x_; }
    const SurfacePoint& operator[](int i) const { return x_[wrap(i)]; }
    const DistanceOptions& options() const { return opt_; }

    void set(int i, const SurfacePoint& p);

    // Directions at x_i toward x_{i+1}.
    const MinimizerSet& forward(int i) const;
    // Directions at x_i toward x_{i-1}.
    MinimizerSet backward(int i) const;
    // d(x_i, x_{i+1}).
    double spacing(int i) const { return forward(i).distance; }

private:
    int wrap(int i) const { return ((i % k()) + k()) % k(); }

    SurfaceModel s_;
    std::vector<SurfacePoint> x_;
    DistanceOptions opt_;
    mutable std::vector<std::optional<MinimizerSet>> cache_;
};

// E = k * sum d(x_i, x_{i+1})^2.
double uniform_energy(const TuplePoint& x);

// Gradient of E, one tangent vector per point. Throws OrdinaryPair when a
// consecutive pair is an ordinary cut pair.
std::vector<TangentVector> energy_gradient(const TuplePoint& x);

enum class BalanceKind { NotBalanced, SmoothBalanced, UniquelyBalanced, NonSmoothBalanced };
std::string_view to_string(BalanceKind k);

struct BalanceOptions {
    std::optional<double> tol_spacing;  // default 1e-6 * diameter scale
    double tol_antipodal = 1e-5;
};

struct BalanceReport {
    double spacing_residual = 0.0;
    double antipodal_residual = 0.0;
    double tol_spacing = 0.0;
    double tol_antipodal = 0.0;
    std::vector<TangentVector> xi;   // matched directions, xi_i toward x_{i+1}
    std::vector<double> distances;   // d(x_i, x_{i+1})
    std::vector<PointClass> pairs;   // pair i: x_{i+1} seen from x_i
    std::vector<bool> cut_pairs;
    std::vector<bool> ordinary_pairs;
    BalanceKind kind = BalanceKind::NotBalanced;
    bool balanced = false;
    bool uniquely = false;  // no ordinary cut pair
    bool smooth = false;    // no cut pair at all
    // Some x_i is a cone point: the antipodality test was replaced by the
    // cone-angle split test there.
    bool cone_degenerate = false;
};

BalanceReport balance_test(const TuplePoint& x, const BalanceOptions& opt = {});

enum class SearchMethod { Residual, EnergyDescent };
enum class SearchStatus { Converged, Collapsed, Stalled };
std::string_view to_string(SearchStatus s);

struct SearchOptions {
    SearchMethod method = SearchMethod::Residual;
    int max_iterations = 200;
    double window_factor = 1.0;  // candidate geodesics considered per pair
    BalanceOptions balance;
};

struct TraceRow {
    int iteration;
    double energy;
    double spacing_residual;
    double antipodal_residual;
};

struct SearchResult {
    TuplePoint tuple;
    BalanceReport report;
    SearchStatus status = SearchStatus::Stalled;
    int iterations = 0;
    std::vector<TraceRow> trace;
};

// Looks for a balanced tuple near the seed.
SearchResult find_balanced(const TuplePoint& seed, const SearchOptions& opt = {});

// Closed geodesics through x_1 whose pieces between consecutive points are the
// matched minimizers.
std::vector<ClosedGeodesic> associated_geodesics(const TuplePoint& x, const BalanceReport& report);

struct BalancedClass {
    ClosedGeodesic geodesic;
    int k = 0;
    std::vector<double> t;  // sampled rotations, in [0, 2pi)
    std::vector<BalanceReport> reports;
    std::vector<double> energies;
    bool rotating = false;
    std::optional<double> failing_t;
    bool smooth = false;     // every rotation SmoothBalanced
    bool nonsmooth = false;  // some rotation has a cut pair
};

// Rotations (gamma(t), gamma(t + 2pi/k), ...) over a grid of t; rotating is
// false at the first t where the tuple is not balanced with gamma associated.
BalancedClass build_class(const SurfaceModel& s, const ClosedGeodesic& g, int k, int grid = 64);

// Tuple of k equally spaced points on g starting at parameter t.
TuplePoint rotated_tuple(const SurfaceModel& s, const ClosedGeodesic& g, int k, double t);

void write_json(std::ostream& os, const TuplePoint& x, const BalanceReport& r, const std::string& header = {});
void write_trace_csv(std::ostream& os, const SearchResult& r, const std::string& header = {});

}  // namespace kgeo
