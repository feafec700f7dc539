#pragma once

// Embedding of the ellipsoid x^2/A^2 + y^2/A^2 + z^2/C^2 = 1 through its two
// charts. The standard chart is colatitude/longitude; the rotated chart puts
// the polar axis on +x:
//   standard: (A sin t cos p, A sin t sin p, C cos t)
//   rotated : (A cos a, A sin a cos b, C sin a sin b)

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "kgeo/surface.hpp"

namespace kgeo::detail {

struct ChartJet {
    Eigen::Vector3d x, xu, xv, xuu, xuv, xvv;
};

struct Axes {
    double A = 1.0;
    double C = 1.0;

    Eigen::Vector3d position(Chart chart, double u, double v) const {
        const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
        if (chart == Chart::standard) return {A * su * cv, A * su * sv, C * cu};
        return {A * cu, A * su * cv, C * su * sv};
    }

    ChartJet jet(Chart chart, double u, double v) const {
        const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
        ChartJet j;
        if (chart == Chart::standard) {
            j.x = {A * su * cv, A * su * sv, C * cu};
            j.xu = {A * cu * cv, A * cu * sv, -C * su};
            j.xv = {-A * su * sv, A * su * cv, 0.0};
            j.xuu = {-A * su * cv, -A * su * sv, -C * cu};
            j.xuv = {-A * cu * sv, A * cu * cv, 0.0};
            j.xvv = {-A * su * cv, -A * su * sv, 0.0};
        } else {
            j.x = {A * cu, A * su * cv, C * su * sv};
            j.xu = {-A * su, A * cu * cv, C * cu * sv};
            j.xv = {0.0, -A * su * sv, C * su * cv};
            j.xuu = {-A * cu, -A * su * cv, -C * su * sv};
            j.xuv = {0.0, -A * cu * sv, C * cu * cv};
            j.xvv = {0.0, -A * su * cv, -C * su * sv};
        }
        return j;
    }

    // Outward unit normal at an ambient point on the surface.
    Eigen::Vector3d normal(const Eigen::Vector3d& x) const {
        return Eigen::Vector3d(x.x() / (A * A), x.y() / (A * A), x.z() / (C * C)).normalized();
    }

    // Radial rescaling onto the surface.
    Eigen::Vector3d project(const Eigen::Vector3d& x) const {
        const double r = std::sqrt((x.x() * x.x() + x.y() * x.y()) / (A * A) + x.z() * x.z() / (C * C));
        return x / r;
    }

    static double wrap_angle(double a) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double w = std::fmod(a, two_pi);
        if (w < 0.0) w += two_pi;
        if (w >= two_pi) w = 0.0;
        return w;
    }

    Eigen::Vector2d coords(Chart chart, const Eigen::Vector3d& x) const {
        const double X = x.x() / A, Y = x.y() / A, Z = x.z() / C;
        if (chart == Chart::standard) return {std::atan2(std::hypot(X, Y), Z), wrap_angle(std::atan2(Y, X))};
        return {std::atan2(std::hypot(Y, Z), X), wrap_angle(std::atan2(Z, Y))};
    }

    // Colatitude of an ambient point in the standard chart.
    double colatitude(const Eigen::Vector3d& x) const {
        return std::atan2(std::hypot(x.x() / A, x.y() / A), x.z() / C);
    }

    // Chart preferred for an ambient point: standard unless within the pole margin.
    Chart preferred_chart(const Eigen::Vector3d& x) const {
        const double t = colatitude(x);
        return (std::min(t, std::numbers::pi - t) < kPoleMargin) ? Chart::rotated : Chart::standard;
    }

    static double singular_distance(double u) { return std::min(u, std::numbers::pi - u); }
};

inline Axes axes_of(const SurfaceModel& s) { return {s.axis_equatorial(), s.axis_polar()}; }

}  // namespace kgeo::detail
