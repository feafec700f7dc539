#pragma once

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kgeo/surface.hpp"

namespace testsupport {

inline constexpr double pi = std::numbers::pi;

// Random canonical point, uniform in the chart domain.
inline kgeo::SurfacePoint random_point(const kgeo::SurfaceModel& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    using kgeo::SurfaceKind;
    switch (s.kind()) {
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid:
            return kgeo::canonicalize(s, {0.1 + (pi - 0.2) * U(rng), 2 * pi * U(rng)});
        case SurfaceKind::torus: {
            const auto& t = std::get<kgeo::FlatTorus>(s.variant());
            return {t.a * U(rng), t.b * U(rng)};
        }
        case SurfaceKind::polygon: {
            const auto& v = s.polygon().vertices;
            // Random convex combination of the vertices, random sheet.
            std::vector<double> w(v.size());
            double sum = 0.0;
            for (auto& x : w) sum += (x = -std::log(1.0 - U(rng)));
            Eigen::Vector2d p = Eigen::Vector2d::Zero();
            for (size_t i = 0; i < v.size(); ++i) p += w[i] / sum * v[i];
            return {p.x(), p.y(), U(rng) < 0.5 ? kgeo::Sheet::front : kgeo::Sheet::back};
        }
    }
    return {};
}

inline kgeo::TangentVector random_unit(const kgeo::SurfaceModel& s, const kgeo::SurfacePoint& p,
                                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-pi, pi);
    return kgeo::from_frame_angle(s, p, U(rng));
}

}  // namespace testsupport
