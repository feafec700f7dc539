#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "kgeo/surface.hpp"

namespace kgeo::detail {

// Edge i runs from vertex i to vertex i+1 (mod n).
struct PolygonGeometry {
    std::vector<Eigen::Vector2d> v;
    std::vector<Eigen::Vector2d> normals;  // outward unit normals
    std::vector<double> offsets;           // normal . x = offset on the edge line
    double scale = 1.0;

    explicit PolygonGeometry(const DoubledPolygon& poly) : v(poly.vertices) {
        const int n = size();
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector2d e = v[(i + 1) % n] - v[i];
            const Eigen::Vector2d nrm = Eigen::Vector2d(e.y(), -e.x()).normalized();
            normals.push_back(nrm);
            offsets.push_back(nrm.dot(v[i]));
        }
        scale = 0.0;
        for (const auto& a : v)
            for (const auto& b : v) scale = std::max(scale, (a - b).norm());
    }

    int size() const { return static_cast<int>(v.size()); }
    const Eigen::Vector2d& start(int e) const { return v[e]; }
    const Eigen::Vector2d& end(int e) const { return v[(e + 1) % size()]; }

    // Positive outside the polygon.
    double signed_distance(int e, const Eigen::Vector2d& x) const { return normals[e].dot(x) - offsets[e]; }

    Eigen::Vector2d reflect(int e, const Eigen::Vector2d& x) const {
        return x - 2.0 * signed_distance(e, x) * normals[e];
    }
    Eigen::Vector2d reflect_direction(int e, const Eigen::Vector2d& w) const {
        return w - 2.0 * normals[e].dot(w) * normals[e];
    }

    double max_violation(const Eigen::Vector2d& x, int* which = nullptr) const {
        double worst = -1e300;
        for (int e = 0; e < size(); ++e) {
            const double d = signed_distance(e, x);
            if (d > worst) {
                worst = d;
                if (which) *which = e;
            }
        }
        return worst;
    }

    int vertex_at(const Eigen::Vector2d& x, double tol) const {
        for (int i = 0; i < size(); ++i)
            if ((x - v[i]).norm() <= tol * scale) return i;
        return -1;
    }

    int edge_at(const Eigen::Vector2d& x, double tol) const {
        for (int e = 0; e < size(); ++e)
            if (std::abs(signed_distance(e, x)) <= tol * scale) return e;
        return -1;
    }

    double interior_angle(int i) const {
        const int n = size();
        const Eigen::Vector2d a = v[(i + 1) % n] - v[i];
        const Eigen::Vector2d b = v[(i + n - 1) % n] - v[i];
        return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    }
};

// Planar isometry x -> R x + t. Tracks where an unfolded copy of the polygon sits.
struct Isometry2 {
    Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
    Eigen::Vector2d t = Eigen::Vector2d::Zero();

    Eigen::Vector2d apply(const Eigen::Vector2d& x) const { return R * x + t; }
    Eigen::Vector2d apply_dir(const Eigen::Vector2d& w) const { return R * w; }
    Eigen::Vector2d inverse(const Eigen::Vector2d& y) const { return R.transpose() * (y - t); }
    Eigen::Vector2d inverse_dir(const Eigen::Vector2d& w) const { return R.transpose() * w; }

    // Copy obtained by reflecting this one across its own edge e.
    Isometry2 reflected(const PolygonGeometry& g, int e) const {
        // Reflection across edge e in polygon coordinates, then this placement.
        const Eigen::Vector2d& n = g.normals[e];
        Eigen::Matrix2d S = Eigen::Matrix2d::Identity() - 2.0 * n * n.transpose();
        Eigen::Vector2d s = 2.0 * g.offsets[e] * n;
        Isometry2 out;
        out.R = R * S;
        out.t = R * s + t;
        return out;
    }
};

inline Sheet flip(Sheet s) { return s == Sheet::front ? Sheet::back : Sheet::front; }

}  // namespace kgeo::detail
