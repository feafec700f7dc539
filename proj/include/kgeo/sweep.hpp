#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kgeo/classify.hpp"
#include "kgeo/energy.hpp"

namespace kgeo {

// Equator of the ellipsoid with polar semi-axis c, parametrised eastward from longitude 0.
ClosedGeodesic ellipsoid_equator(double c);

// Arc length along the equator at which the equatorial arc from longitude 0 stops
// minimizing. Bisection to 1e-6; fan is the BVP start count.
double equator_cut_distance(double c, int fan = 256);

struct C0Options {
    double tol = 1e-5;  // bisection stops when the bracket is narrower than this
    int fan = 256;
    int k = 3;          // threshold where the cut distance equals 2pi/k
};

// Parameter c where the equator cut distance crosses 2pi/k. Throws BadBracket unless
// the cut distance at c_lo is below 2pi/k and at c_hi above it.
double find_c0(double c_lo, double c_hi, const C0Options& opt = {});

// A one-parameter family of surfaces with a distinguished closed geodesic.
struct GeodesicFamily {
    std::string name;
    std::function<SurfaceModel(double)> surface;
    std::function<ClosedGeodesic(const SurfaceModel&)> geodesic;
};

GeodesicFamily ellipsoid_equator_family();
// Flat tori 1 x c with the loop of length c; the loop shrinks to a point as c -> 0.
GeodesicFamily shrinking_loop_family();

struct PersistenceRow {
    double c = 0.0;
    bool exists = false;  // the rotated k-tuples form a balanced class
    bool smooth = false;
    bool nonsmooth = false;
    double energy = 0.0;
};

struct PersistenceReport {
    std::vector<PersistenceRow> rows;  // one per c_i, then the limit
    bool no_variation = false;         // the sequence is constant
    bool limit_trivial = false;        // the limit class collapsed to a point
    bool smooth_before_limit = false;  // every c_i row is a smooth class
    bool limit_exists = false;
    bool limit_nonsmooth = false;
};

PersistenceReport persistence_experiment(const GeodesicFamily& family, const std::vector<double>& cs, double c_limit,
                                         int k = 3, int grid = 32);

struct BlowupRow {
    double c = 0.0;
    std::optional<int> minimal_k;  // empty when above k_max
};

struct BlowupReport {
    std::vector<BlowupRow> rows;
    int k_max = 0;
    bool monotone = true;  // minimal k never decreases as c decreases; NotFound counts as above k_max
    bool exceeded = false;
};

BlowupReport blowup_experiment(const std::vector<double>& cs, int k_max = 64);

struct SweepRecord {
    double c = 0.0;
    double cut_distance = 0.0;
    double equator_length = 0.0;
    KVerdict verdict = KVerdict::NotKGeodesic;  // at k
    std::optional<int> minimal_k;
    bool class_found = false;
    bool class_smooth = false;
};

struct SweepOptions {
    int k = 3;
    int k_max = 64;
    int class_grid = 32;
    int fan = 256;
};

std::vector<SweepRecord> sweep(const std::vector<double>& cs, const SweepOptions& opt = {});

void write_csv(std::ostream& os, const std::vector<SweepRecord>& rows, const std::string& header = {});
// Cut distance against c with the 2pi/k level and c0 marked.
void write_svg(std::ostream& os, const std::vector<SweepRecord>& rows, int k, std::optional<double> c0,
               const std::string& header = {});

}  // namespace kgeo
