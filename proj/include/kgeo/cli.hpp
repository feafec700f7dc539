#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kgeo::cli {

// Everything that determines a run. Every artifact starts with this as a header comment.
struct RunConfig {
    std::string command;
    std::string surface = "kind=sphere radius=1";
    std::string out_dir;  // empty: $KGEO_OUT_DIR, else the working directory
    std::uint64_t seed = 1;

    // Points and vectors: "u,v" with an optional ",back" sheet tag; lists separated by ';'.
    std::string p, q, v, points;
    int random_k = 0;  // random seed tuple of this size when points is empty

    // Geodesic choice: equator, meridian, horizontal, or custom (start, dir, length).
    std::string geodesic = "default";
    std::string start, dir;
    double length = 0.0;
    double longitude = 0.0;

    int k = 2;
    int k_max = 64;
    bool minimal = false;
    int grid = 0;  // 0: the module default
    double tol_factor = 1e-5;
    double tol_antipodal = 1e-5;
    std::string method = "residual";
    int max_iterations = 200;
    bool enumerate = false;

    std::string family = "ellipsoid";
    std::string bracket = "0.2,0.99";
    int samples = 8;
    int fan = 256;
    int candidates = 4;

    // key=value lines for the artifact header, in a fixed order.
    std::string header() const;
    // Assigns one option by its long flag name (without dashes); false if unknown.
    bool set(const std::string& key, const std::string& value);
};

// Exit codes: 0 success, 1 usage error, 2 domain error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgeo::cli
