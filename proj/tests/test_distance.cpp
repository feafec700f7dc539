#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <sstream>

#include "kgeo/distance.hpp"
#include "kgeo/error.hpp"
#include "kgeo/geodesic.hpp"
#include "support.hpp"

using namespace kgeo;
using testsupport::pi;

namespace {

std::vector<SurfaceModel> suite() {
    return {SurfaceModel::sphere(1.0),        SurfaceModel::ellipsoid(0.5),        SurfaceModel::ellipsoid(1.6),
            SurfaceModel::torus(1.0, 1.0),    SurfaceModel::torus(1.0, 1.3),       SurfaceModel::doubled_square(1.0),
            SurfaceModel::doubled_regular_polygon(5, 1.0)};
}

bool has_direction(const MinimizerSet& m, double a, double b, double tol = 1e-9) {
    for (const auto& x : m.minimizers)
        if (std::abs(x.direction.a - a) < tol && std::abs(x.direction.b - b) < tol) return true;
    return false;
}

// Shortest path on a (colatitude, longitude) grid of an ellipsoid of revolution, with a
// 16-neighbour stencil and a single node per pole. Edge weights are ambient chord lengths.
double mesh_dijkstra(double c, int nt, int np, int i0, int j0, int i1, int j1) {
    auto pos = [&](int i, int j) {
        const double t = pi * i / nt, f = 2 * pi * j / np;
        return Eigen::Vector3d(std::sin(t) * std::cos(f), std::sin(t) * std::sin(f), c * std::cos(t));
    };
    auto id = [&](int i, int j) {
        if (i == 0) return 0;
        if (i == nt) return 1;
        return 2 + (i - 1) * np + ((j % np) + np) % np;
    };
    const int total = 2 + (nt - 1) * np;
    std::vector<double> dist(total, 1e300);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    const int src = id(i0, j0), dst = id(i1, j1);
    dist[src] = 0.0;
    pq.push({0.0, src});
    const std::vector<std::pair<int, int>> stencil = {{1, 0}, {0, 1}, {1, 1},  {1, -1}, {1, 2}, {2, 1},
                                                      {1, -2}, {2, -1}, {1, 3}, {3, 1}, {1, -3}, {3, -1},
                                                      {2, 3}, {3, 2}, {2, -3}, {3, -2}};
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == dst) return d;
        std::vector<std::pair<int, Eigen::Vector3d>> nbrs;
        if (u <= 1) {
            const int i = u == 0 ? 1 : nt - 1;
            const Eigen::Vector3d x = pos(u == 0 ? 0 : nt, 0);
            for (int j = 0; j < np; ++j) {
                const double w = (pos(i, j) - x).norm();
                if (d + w < dist[id(i, j)]) {
                    dist[id(i, j)] = d + w;
                    pq.push({d + w, id(i, j)});
                }
            }
            continue;
        }
        const int i = 1 + (u - 2) / np, j = (u - 2) % np;
        const Eigen::Vector3d x = pos(i, j);
        for (auto [di, dj] : stencil)
            for (int sgn : {1, -1}) {
                const int ii = i + sgn * di, jj = j + sgn * dj;
                if (ii < 0 || ii > nt) continue;
                const int v = id(ii, jj);
                const double w = (pos(ii, jj) - x).norm();
                if (d + w < dist[v]) {
                    dist[v] = d + w;
                    pq.push({d + w, v});
                }
            }
    }
    return dist[dst];
}

SurfacePoint exp_at(const SurfaceModel& s, const SurfacePoint& q, const TangentVector& v, double t) {
    return shoot(s, q, normalized(s, q, v), t * norm(s, q, v)).end_point();
}

}  // namespace

TEST_CASE("torus diagonal ties") {
    const auto s = SurfaceModel::torus(1.0, 1.0);
    const auto m = minimizers(s, {0.0, 0.0}, {0.5, 0.5});
    CHECK(m.distance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(m.multiplicity() == 4);
    const double r = 1.0 / std::sqrt(2.0);
    for (double a : {r, -r})
        for (double b : {r, -r}) CHECK(has_direction(m, a, b));
}

TEST_CASE("sphere examples") {
    const auto s = SurfaceModel::sphere(1.0);
    const SurfacePoint q{pi / 2, 0.0};
    const auto m = minimizers(s, q, {pi / 2 + 0.3, 0.0});
    CHECK(m.distance == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(m.multiplicity() == 1);
    CHECK_FALSE(m.continuum);
    CHECK(m.second_length == doctest::Approx(2 * pi - 0.3).epsilon(1e-12));

    const auto a = minimizers(s, q, {pi / 2, pi});
    CHECK(a.distance == doctest::Approx(pi).epsilon(1e-12));
    CHECK(a.continuum);
    CHECK(a.multiplicity() == kContinuumCount);
    for (const auto& x : a.minimizers)
        CHECK(proximity(s, shoot(s, q, x.direction, pi).end_point(), a.p) < 1e-7);
}

TEST_CASE("distance basics") {
    const auto t = SurfaceModel::torus(1.0, 1.0);
    CHECK(distance(t, {0.2, 0.3}, {0.2, 0.3}) == 0.0);
    CHECK(minimizers(t, {0.2, 0.3}, {1.2, 0.3}).base_point);
    CHECK(distance(t, {0.0, 0.0}, {0.75, 0.0}) == doctest::Approx(0.25).epsilon(1e-12));
    const auto sq = SurfaceModel::doubled_square(1.0);
    CHECK(distance(sq, {0.5, 0.5, Sheet::front}, {0.5, 0.5, Sheet::back}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(minimizers(sq, {0.5, 0.5, Sheet::front}, {0.5, 0.5, Sheet::back}).multiplicity() == 4);
    CHECK(distance(sq, {0.2, 0.5, Sheet::front}, {0.2, 0.5, Sheet::back}) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(distance(sq, {0.0, 0.0}, {1.0, 1.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ellipsoid equator antipodes go over the poles") {
    const auto s = SurfaceModel::ellipsoid(0.5);
    const auto m = minimizers(s, {pi / 2, 0.0}, {pi / 2, pi});
    CHECK(m.distance < pi - 0.5);
    CHECK(m.multiplicity() == 2);
    // Half the meridian perimeter.
    const double meridian = 2.0 * std::comp_ellint_2(std::sqrt(1.0 - 0.25));
    CHECK(m.distance == doctest::Approx(meridian).epsilon(1e-8));
    const double mesh = mesh_dijkstra(0.5, 400, 800, 200, 0, 200, 400);
    CHECK(std::abs(m.distance - mesh) < 1e-3);
}

TEST_CASE("ellipsoid against mesh oracle off the symmetric locus") {
    const auto s = SurfaceModel::ellipsoid(0.5);
    const int nt = 360, np = 720;
    for (auto [i0, j0, i1, j1] : std::vector<std::array<int, 4>>{{90, 0, 200, 200}, {150, 10, 60, 400}}) {
        const SurfacePoint q{pi * i0 / nt, 2 * pi * j0 / np}, p{pi * i1 / nt, 2 * pi * j1 / np};
        const double d = distance(s, q, p);
        const double mesh = mesh_dijkstra(0.5, nt, np, i0, j0, i1, j1);
        // The stencil only overestimates, by at most a couple of percent of a degree step.
        CHECK(mesh >= d - 1e-6);
        CHECK(mesh - d < 2e-2);
    }
}

TEST_CASE("symmetry and triangle inequality") {
    std::mt19937_64 rng(11);
    for (const auto& s : suite()) {
        CAPTURE(s.describe());
        const int n = s.kind() == SurfaceKind::ellipsoid ? 60 : 200;
        int asym = 0, tri = 0;
        for (int i = 0; i < n; ++i) {
            const auto a = testsupport::random_point(s, rng);
            const auto b = testsupport::random_point(s, rng);
            const auto c = testsupport::random_point(s, rng);
            const double ab = distance(s, a, b), ba = distance(s, b, a);
            if (std::abs(ab - ba) >= 1e-8) ++asym;
            if (distance(s, a, c) > ab + distance(s, b, c) + 1e-8) ++tri;
        }
        CHECK(asym == 0);
        CHECK(tri == 0);
    }
}

TEST_CASE("every listed direction reaches the target") {
    std::mt19937_64 rng(12);
    for (const auto& s : suite()) {
        CAPTURE(s.describe());
        int bad = 0;
        for (int i = 0; i < 30; ++i) {
            const auto q = testsupport::random_point(s, rng);
            const auto p = testsupport::random_point(s, rng);
            const auto m = minimizers(s, q, p);
            for (const auto& x : m.minimizers) {
                if (std::abs(norm(s, m.q, x.direction) - 1.0) > 1e-9) ++bad;
                const auto arc = shoot(s, m.q, x.direction, m.distance);
                if (proximity(s, arc.end_point(), m.p) > 1e-6) ++bad;
            }
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("torus multiplicity equals the exact lattice tie count") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> U(0, 7);
    const auto s = SurfaceModel::torus(1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        // Coordinates in eighths so ties are exact in integers.
        const int qu = U(rng), qv = U(rng), pu = U(rng), pv = U(rng);
        if (qu == pu && qv == pv) continue;
        long best = -1;
        int ties = 0;
        for (int m = -3; m <= 3; ++m)
            for (int n = -3; n <= 3; ++n) {
                const long du = pu - qu + 8 * m, dv = pv - qv + 8 * n;
                const long len2 = du * du + dv * dv;
                if (best < 0 || len2 < best) {
                    best = len2;
                    ties = 1;
                } else if (len2 == best) {
                    ++ties;
                }
            }
        const auto ms = minimizers(s, {qu / 8.0, qv / 8.0}, {pu / 8.0, pv / 8.0});
        CHECK(ms.multiplicity() == ties);
        CHECK(ms.distance == doctest::Approx(std::sqrt(double(best)) / 8.0).epsilon(1e-12));
    }
}

TEST_CASE("one-sided derivative matches finite differences") {
    std::mt19937_64 rng(14);
    const double t = 1e-4;
    for (const auto& s : suite()) {
        CAPTURE(s.describe());
        int bad = 0;
        std::vector<std::pair<SurfacePoint, SurfacePoint>> pairs;
        for (int i = 0; i < 44; ++i) pairs.push_back({testsupport::random_point(s, rng), testsupport::random_point(s, rng)});
        // Ordinary cut points.
        switch (s.kind()) {
            case SurfaceKind::sphere: pairs.push_back({{pi / 2, 0.0}, {pi / 2, pi}}); break;
            case SurfaceKind::ellipsoid: pairs.push_back({{pi / 2, 0.0}, {pi / 2, pi}}); break;
            case SurfaceKind::torus: pairs.push_back({{0.0, 0.0}, {0.5, 0.5}}); break;
            case SurfaceKind::polygon: {
                const auto& v = s.polygon().vertices;
                Eigen::Vector2d c = Eigen::Vector2d::Zero();
                for (const auto& x : v) c += x / double(v.size());
                pairs.push_back({{c.x(), c.y(), Sheet::front}, {c.x(), c.y(), Sheet::back}});
                break;
            }
        }
        for (const auto& [p, q] : pairs)
            for (int k = 0; k < (&p == &pairs.back().first ? 6 : 1); ++k) {
                const auto v = testsupport::random_unit(s, q, rng);
                const double d0 = distance(s, p, q);
                if (d0 < 0.1) continue;
                const double fd = (distance(s, p, exp_at(s, q, v, t)) - d0) / t;
                const double dd = directional_derivative(s, p, q, v);
                if (std::abs(fd - dd) > 1e-3) {
                    ++bad;
                    MESSAGE("fd " << fd << " dd " << dd);
                }
            }
        CHECK(bad == 0);
    }
}

TEST_CASE("directional derivative examples") {
    const auto t = SurfaceModel::torus(1.0, 1.0);
    CHECK(directional_derivative(t, {0.0, 0.0}, {0.5, 0.5}, {1.0, 0.0}) ==
          doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
    std::mt19937_64 rng(15);
    for (const auto& s : suite()) {
        CAPTURE(s.describe());
        for (int i = 0; i < 10; ++i) {
            const auto p = testsupport::random_point(s, rng);
            const auto q = testsupport::random_point(s, rng);
            const auto m = minimizers(s, q, p);
            const auto v = testsupport::random_unit(s, m.q, rng);
            const double d = directional_derivative(s, m, v);
            CHECK(directional_derivative(s, m, 2.0 * v) == doctest::Approx(2.0 * d).epsilon(1e-12));
            CHECK(directional_derivative(s, m, 0.5 * v) == doctest::Approx(0.5 * d).epsilon(1e-12));
            // The witness is one of the listed directions and attains the minimum.
            const auto w = derivative_witness(s, m, v);
            CHECK(-inner(s, m.q, v, w) == doctest::Approx(d).epsilon(1e-12));
            bool listed = false;
            for (const auto& x : m.minimizers) listed |= (x.direction - w).vec().norm() < 1e-12;
            CHECK(listed);
            if (m.multiplicity() == 1 && !m.continuum) {
                const double dneg = directional_derivative(s, m, -v);
                CHECK(dneg == doctest::Approx(-d).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("continuum derivative refines between representatives") {
    const auto s = SurfaceModel::sphere(1.0);
    const SurfacePoint q{pi / 2, 0.0};
    const auto m = minimizers(s, q, {pi / 2, pi});
    for (double a : {0.01, 0.7, 2.0}) {
        const auto v = from_frame_angle(s, q, a);
        CHECK(directional_derivative(s, m, v) == doctest::Approx(-1.0).epsilon(1e-9));
    }
}

TEST_CASE("gradient examples") {
    const auto s = SurfaceModel::sphere(1.0);
    const SurfacePoint p{pi / 2, 0.0}, q{pi / 2 + 0.3, 0.0};
    const auto g = gradient_dp(s, p, q);
    // Terminal velocity of the meridian arc points toward increasing colatitude.
    CHECK(g.a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(g.b) < 1e-12);
    const auto t = SurfaceModel::torus(1.0, 1.0);
    const auto gt = gradient_dp(t, {0.0, 0.0}, {0.3, 0.0});
    CHECK(gt.a == doctest::Approx(1.0));
    CHECK(std::abs(gt.b) < 1e-15);
    try {
        gradient_dp(t, {0.0, 0.0}, {0.5, 0.5});
        FAIL("expected NotDifferentiable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotDifferentiable);
    }
    try {
        gradient_dp(t, {0.1, 0.0}, {0.1, 0.0});
        FAIL("expected Undefined");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Undefined);
    }
}

TEST_CASE("classification examples") {
    const auto t = SurfaceModel::torus(1.0, 1.0);
    const auto c1 = classify_point(t, {0.0, 0.0}, {0.5, 0.5});
    CHECK(c1.kind == PointKind::OrdinaryCut);
    CHECK(c1.multiplicity == 4);
    CHECK(classify_point(t, {0.0, 0.0}, {0.3, 0.1}).kind == PointKind::Regular);
    CHECK(classify_point(t, {0.0, 0.0}, {0.0, 0.0}).kind == PointKind::BasePoint);

    const auto s = SurfaceModel::sphere(1.0);
    CHECK(classify_point(s, {pi / 2, 0.0}, {pi / 2 + 0.3, 0.0}).kind == PointKind::Regular);
    const auto anti = classify_point(s, {pi / 2, 0.0}, {pi / 2, pi});
    CHECK(anti.kind == PointKind::OrdinaryCut);
    CHECK(anti.continuum);

    // Oblate ellipsoid: equator antipodes are joined over both poles.
    const auto e = SurfaceModel::ellipsoid(0.5);
    const auto cut = classify_point(e, {pi / 2, 0.0}, {pi / 2, pi});
    CHECK(cut.kind == PointKind::OrdinaryCut);
    const auto reg = classify_point(e, {pi / 2, 0.0}, {pi / 2, 0.5});
    CHECK(reg.kind == PointKind::Regular);
}

TEST_CASE("polygon corners and depth bound") {
    const auto pent = SurfaceModel::doubled_regular_polygon(5, 1.0);
    const auto& v = pent.polygon().vertices;
    const SurfacePoint corner{v[0].x(), v[0].y()};
    const SurfacePoint far{v[2].x() * 0.5 + v[3].x() * 0.5, v[2].y() * 0.5 + v[3].y() * 0.5};
    const auto m = minimizers(pent, corner, far);
    REQUIRE(m.multiplicity() >= 1);
    for (const auto& x : m.minimizers) {
        REQUIRE(x.cone_parameter);
        CHECK(*x.cone_parameter >= 0.0);
        CHECK(*x.cone_parameter < 2 * 3 * pi / 5 + 1e-12);
    }
    CHECK(m.distance == doctest::Approx((v[0] - Eigen::Vector2d(far.u, far.v)).norm()).epsilon(1e-12));
    try {
        DistanceOptions opt;
        opt.depth = 0;
        minimizers(SurfaceModel::doubled_square(1.0), {0.3, 0.4, Sheet::front}, {0.6, 0.5, Sheet::back}, opt);
        FAIL("expected DepthBoundExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DepthBoundExceeded);
    }
    // The edge entering the corner bounds both sheets at parameter alpha.
    CHECK(cone_parameter(pent, 0, Sheet::front, v[4] - v[0]) == doctest::Approx(3 * pi / 5).epsilon(1e-12));
    CHECK(cone_parameter(pent, 0, Sheet::back, v[4] - v[0]) == doctest::Approx(3 * pi / 5).epsilon(1e-12));
    CHECK(cone_parameter(pent, 0, Sheet::back, v[1] - v[0] + 0.1 * (v[4] - v[0])) > 3 * pi / 5);
}

TEST_CASE("reversed sets swap roles") {
    const auto s = SurfaceModel::sphere(1.0);
    const auto m = minimizers(s, {1.0, 0.2}, {2.0, 1.5});
    const auto r = reversed(s, m);
    const auto direct = minimizers(s, {2.0, 1.5}, {1.0, 0.2});
    CHECK(r.distance == doctest::Approx(direct.distance).epsilon(1e-12));
    CHECK((r.minimizers[0].direction - direct.minimizers[0].direction).vec().norm() < 1e-9);
}

TEST_CASE("json export") {
    const auto t = SurfaceModel::torus(1.0, 1.0);
    std::ostringstream os;
    write_json(os, t, minimizers(t, {0.0, 0.0}, {0.5, 0.5}), "seed=1");
    const std::string out = os.str();
    CHECK(out.find("\"multiplicity\": 4") != std::string::npos);
    CHECK(out.find("\"continuum\": false") != std::string::npos);
    CHECK(out.find("\"config\": \"seed=1\"") != std::string::npos);
}
