#include <doctest.h>

#include <random>
#include <sstream>

#include "kgeo/classify.hpp"
#include "kgeo/energy.hpp"
#include "kgeo/error.hpp"
#include "support.hpp"

using namespace kgeo;
using testsupport::pi;

namespace {

ClosedGeodesic equator(const SurfaceModel& s) {
    return trace_closed(s, {pi / 2, 0.0}, {0.0, 1.0}, 2 * pi * s.axis_equatorial());
}

ClosedGeodesic meridian(const SurfaceModel& s, double lon) {
    const double C = s.axis_polar(), A = s.axis_equatorial();
    const double len = C < A ? 4 * A * std::comp_ellint_2(std::sqrt(1 - C * C / (A * A))) : 2 * pi * A;
    return trace_closed(s, canonicalize(s, {pi / 2, lon}), {1.0, 0.0}, len);
}

// Brute-force quantifier check: every one of 720 directions is within pi/2 of some minimizer direction.
bool brute_critical(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q) {
    const auto m = minimizers(s, q, p);
    for (int j = 0; j < 720; ++j) {
        const TangentVector v = from_frame_angle(s, m.q, 2 * pi * j / 720);
        bool ok = false;
        for (const auto& x : m.minimizers) ok = ok || angle_between(s, m.q, v, x.direction) <= pi / 2 + 1e-3;
        if (!ok) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("1/k-geodesic examples") {
    const auto s = SurfaceModel::sphere(1.0);
    const auto r = is_k_geodesic(s, equator(s), 2);
    CHECK(r.verdict == KVerdict::StrictK);
    CHECK(std::abs(r.defect) < 1e-6);
    REQUIRE(r.cut_kind.has_value());
    CHECK(*r.cut_kind == PointKind::OrdinaryCut);
    CHECK(is_k_geodesic(s, equator(s), 3).verdict == KVerdict::OpenlyK);

    const auto t = SurfaceModel::torus(1.0, 1.0);
    const auto h = trace_closed(t, {0.0, 0.3}, {1.0, 0.0}, 1.0);
    CHECK(is_k_geodesic(t, h, 2).verdict == KVerdict::StrictK);
    CHECK(is_k_geodesic(t, h, 3).verdict == KVerdict::OpenlyK);
    // The (1,2) loop is longer than twice the distance between its halves.
    CHECK(is_k_geodesic(t, trace_closed(t, {0.0, 0.3}, {1.0, 2.0}, std::sqrt(5.0)), 2).verdict ==
          KVerdict::NotKGeodesic);
}

TEST_CASE("ellipsoid equator at k = 3 follows the conjugate distance") {
    // Along the equator the Jacobi equation has K = 1/c^2, so the first conjugate point is at pi c.
    // At c = 0.9 that is beyond 2pi/3 and the over-the-pole routes are longer than 2pi/3.
    const auto e = SurfaceModel::ellipsoid(0.9);
    CHECK(pi * 0.9 > 2 * pi / 3);
    CHECK(2 * e.axis_polar() * std::comp_ellint_2(std::sqrt(1 - 0.81)) > 2 * pi / 3);
    const auto r = is_k_geodesic(e, equator(e), 3);
    CHECK(r.verdict == KVerdict::OpenlyK);
    CHECK(r.defect < r.tol_k);
    // Antipodal equator points are closer over the poles than along the equator.
    CHECK(is_k_geodesic(e, equator(e), 2).verdict == KVerdict::NotKGeodesic);
}

TEST_CASE("minimal k") {
    const auto s = SurfaceModel::sphere(1.0);
    const auto ms = minimal_k(s, equator(s));
    REQUIRE(ms.k.has_value());
    CHECK(*ms.k == 2);

    const auto t = SurfaceModel::torus(1.0, 1.0);
    const auto mt = minimal_k(t, trace_closed(t, {0.1, 0.2}, {1.0, 1.0}, std::sqrt(2.0)));
    REQUIRE(mt.k.has_value());
    CHECK(*mt.k == 2);

    const auto e = SurfaceModel::ellipsoid(0.3);
    const auto me = minimal_k(e, equator(e), 40);
    REQUIRE(me.k.has_value());
    CHECK(*me.k >= 4);
    // Every smaller k fails and the found one holds.
    for (const auto& r : me.reports)
        CHECK((r.verdict != KVerdict::NotKGeodesic) == (r.k == *me.k));
    // Oracle: the equatorial arc stops minimizing no later than its first conjugate point pi c.
    CHECK(2 * pi / *me.k <= pi * 0.3 + 1e-6);

    const auto none = minimal_k(e, equator(e), 3);
    CHECK_FALSE(none.k.has_value());
    CHECK(none.reports.size() == 2);
}

TEST_CASE("isolated cut pairs are found by refinement") {
    const auto sq = SurfaceModel::doubled_square(1.0);
    const double len = 2 * std::sqrt(2.0);
    for (const SurfacePoint start : {SurfacePoint{0.75, 0.25}, SurfacePoint{0.6, 0.1}}) {
        const auto g = trace_closed(sq, start, {1.0, 1.0}, len);
        const auto r = is_k_geodesic(sq, g, 4);
        CHECK(r.verdict == KVerdict::StrictK);
        REQUIRE(r.cut_t.has_value());
        // The witness pair sits on the edge midpoints.
        const auto w = evaluate(sq, g, *r.cut_t).first;
        const double dx = std::min(std::abs(w.u - 0.5), std::abs(w.v - 0.5));
        CHECK(dx < 1e-6);
    }
}

TEST_CASE("Grove-Shiohama criticality examples") {
    const auto t = SurfaceModel::torus(1.0, 1.0);
    const SurfacePoint c{0.5, 0.5};
    const auto corner = gs_critical(t, c, {0.0, 0.0});
    CHECK(corner.critical);
    REQUIRE(corner.gaps.size() == 4);
    for (double g : corner.gaps) CHECK(g == doctest::Approx(pi / 2).epsilon(1e-9));

    const auto off = gs_critical(t, c, {0.2, 0.5});
    CHECK_FALSE(off.critical);
    REQUIRE(off.witness.has_value());
    REQUIRE(off.complement_bisector.has_value());
    const auto m = minimizers(t, SurfacePoint{0.2, 0.5}, c);
    REQUIRE(m.minimizers.size() == 1);
    const SurfacePoint q{0.2, 0.5};
    // The witness violates the criterion; the complement bisector is the minimizer direction.
    CHECK(angle_between(t, q, *off.witness, m.minimizers[0].direction) > pi / 2);
    CHECK(angle_between(t, q, *off.complement_bisector, m.minimizers[0].direction) < 1e-9);

    const auto side = gs_critical(t, {0.0, 0.0}, {0.5, 0.0});
    CHECK(side.critical);
    CHECK(side.max_gap == doctest::Approx(pi).epsilon(1e-12));

    const auto s = SurfaceModel::sphere(1.0);
    CHECK(gs_critical(s, {0.7, 1.0}, {pi - 0.7, 1.0 + pi}).critical);

    const auto sq = SurfaceModel::doubled_square(1.0);
    CHECK_THROWS_AS(gs_critical(sq, {0.5, 0.5}, {0.0, 0.0}), Error);
    try {
        gs_critical(sq, {0.5, 0.5}, {1.0, 1.0});
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::ConePointQuery);
    }
}

TEST_CASE("gap criterion agrees with the direct quantifier check") {
    std::mt19937_64 rng(71);
    const std::vector<SurfaceModel> surfaces = {SurfaceModel::sphere(1.0), SurfaceModel::torus(1.0, 1.3),
                                                SurfaceModel::ellipsoid(0.6), SurfaceModel::doubled_square(1.0)};
    for (const auto& s : surfaces) {
        int agree = 0, total = 0, critical = 0;
        for (int i = 0; i < 100; ++i) {
            const SurfacePoint p = testsupport::random_point(s, rng);
            SurfacePoint q = testsupport::random_point(s, rng);
            // Half the queries go to cut-locus points where ties occur.
            if (i % 2 == 1) {
                if (s.kind() == SurfaceKind::torus) q = canonicalize(s, {p.u + 0.5, q.v});
                if (s.kind() == SurfaceKind::torus && i % 4 == 3) q = canonicalize(s, {p.u + 0.5, p.v + 0.65});
                if (s.kind() == SurfaceKind::sphere) q = canonicalize(s, {pi - p.u, p.v + pi});
            }
            if (proximity(s, p, q) < 1e-3) continue;
            const auto r = gs_critical(s, p, q);
            critical += r.critical;
            agree += r.critical == brute_critical(s, p, q);
            ++total;
        }
        CHECK(agree == total);
        if (s.kind() != SurfaceKind::ellipsoid && s.kind() != SurfaceKind::polygon) CHECK(critical > 0);
    }
}

TEST_CASE("critical point enumeration") {
    SUBCASE("unit torus, centre") {
        const auto t = SurfaceModel::torus(1.0, 1.0);
        const auto pts = enumerate_gs_critical(t, {0.5, 0.5});
        REQUIRE(pts.size() == 3);
        for (const SurfacePoint x : {SurfacePoint{0.0, 0.5}, SurfacePoint{0.5, 0.0}, SurfacePoint{0.0, 0.0}}) {
            double best = 1.0;
            for (const auto& y : pts) best = std::min(best, proximity(t, x, y));
            CHECK(best < 1e-6);
        }
    }
    SUBCASE("2 x 1 torus") {
        const auto t = SurfaceModel::torus(2.0, 1.0);
        const auto pts = enumerate_gs_critical(t, {1.0, 0.5});
        REQUIRE(pts.size() == 3);
        for (const SurfacePoint x : {SurfacePoint{0.0, 0.5}, SurfacePoint{1.0, 0.0}, SurfacePoint{0.0, 0.0}}) {
            double best = 1.0;
            for (const auto& y : pts) best = std::min(best, proximity(t, x, y));
            CHECK(best < 1e-6);
        }
    }
    SUBCASE("sphere") {
        const auto s = SurfaceModel::sphere(1.0);
        const SurfacePoint p{1.1, 0.4};
        const auto pts = enumerate_gs_critical(s, p);
        REQUIRE(pts.size() == 1);
        CHECK(proximity(s, pts[0], {pi - 1.1, 0.4 + pi}) < 1e-6);
    }
    CHECK_THROWS_AS(enumerate_gs_critical(SurfaceModel::sphere(1.0), {1.0, 0.0}, 8), Error);
}

TEST_CASE("balanced pairs are mutually critical") {
    const auto s = SurfaceModel::sphere(1.0);
    CHECK(balanced_implies_gs(s, {0.8, 0.2}, {pi - 0.8, 0.2 + pi}));
    const auto t = SurfaceModel::torus(1.0, 1.0);
    CHECK(balanced_implies_gs(t, {0.0, 0.0}, {0.5, 0.5}));
    CHECK(balanced_implies_gs(t, {0.0, 0.0}, {0.5, 0.0}));

    // Every balanced pair the search finds.
    std::mt19937_64 rng(5);
    for (const auto& surf : {t, SurfaceModel::torus(1.0, 1.4)}) {
        for (int i = 0; i < 8; ++i) {
            const TuplePoint seed(surf, {testsupport::random_point(surf, rng), testsupport::random_point(surf, rng)});
            const auto r = find_balanced(seed);
            if (r.status != SearchStatus::Converged || !r.report.balanced) continue;
            CHECK(balanced_implies_gs(surf, r.tuple[0], r.tuple[1], r.report.tol_antipodal));
        }
    }
}

TEST_CASE("minimum curvature") {
    CHECK(min_curvature(SurfaceModel::sphere(2.0)) == doctest::Approx(0.25));
    CHECK(min_curvature(SurfaceModel::ellipsoid(0.5)) == doctest::Approx(0.25));
    CHECK(min_curvature(SurfaceModel::ellipsoid(2.0)) == doctest::Approx(0.25));
    CHECK(min_curvature(SurfaceModel::torus(1.0, 1.0)) == 0.0);
    // Agrees with the curvature evaluated at the poles and the equator.
    const auto e = SurfaceModel::ellipsoid(0.7);
    CHECK(min_curvature(e) == doctest::Approx(std::min(gauss_curvature(e, {1e-3, 0.0}),
                                                       gauss_curvature(e, {pi / 2, 0.0})))
                                  .epsilon(1e-5));
}

TEST_CASE("half-geodesic theorem behaviour") {
    SUBCASE("sphere") {
        const auto s = SurfaceModel::sphere(1.0);
        std::mt19937_64 rng(9);
        const SurfacePoint p{pi / 2, 0.0};
        std::vector<ClosedGeodesic> cands;
        for (int i = 0; i < 4; ++i) cands.push_back(trace_closed(s, p, testsupport::random_unit(s, p, rng), 2 * pi));
        TheoremOptions opt;
        opt.tol_point = 1e-5;
        const auto r = verify_theorem_behavior(s, equator(s), cands, min_curvature(s), opt);
        CHECK(r.violations == 0);
        for (const auto& c : r.candidates) {
            CHECK(c.crossings.size() == 2);
            CHECK(c.half_geodesic);
            CHECK(c.antipode_miss < 1e-5);
        }
    }
    SUBCASE("oblate ellipsoid meridians") {
        const auto e = SurfaceModel::ellipsoid(0.9);
        const auto gamma = meridian(e, 0.0);
        CHECK(gamma.length() > pi / std::sqrt(min_curvature(e)));
        const auto r = verify_theorem_behavior(e, gamma, {meridian(e, 0.7), meridian(e, 2.0), equator(e)},
                                               min_curvature(e));
        CHECK(r.violations == 0);
        REQUIRE(r.candidates.size() == 3);
        CHECK(r.candidates[0].half_geodesic);
        CHECK(r.candidates[0].crossings.size() == 2);
        CHECK(r.candidates[2].crossings.size() == 2);
        CHECK_FALSE(r.candidates[2].half_geodesic);
        CHECK(r.candidates[2].length >= gamma.length());
    }
    SUBCASE("hypothesis unmet") {
        const auto e = SurfaceModel::ellipsoid(0.5);
        const auto gamma = meridian(e, 0.0);
        CHECK(gamma.length() <= pi / std::sqrt(min_curvature(e)));
        try {
            verify_theorem_behavior(e, gamma, {}, min_curvature(e));
            FAIL("expected HypothesisUnmet");
        } catch (const Error& err) {
            CHECK(err.code() == ErrorCode::HypothesisUnmet);
        }
    }
}

TEST_CASE("report export") {
    const auto s = SurfaceModel::sphere(1.0);
    const auto r = is_k_geodesic(s, equator(s), 2);
    std::ostringstream csv, svg;
    write_csv(csv, s, {r}, "seed=1");
    CHECK(csv.str().rfind("# seed=1\nsurface,geodesic,k,verdict", 0) == 0);
    CHECK(csv.str().find(",StrictK,") != std::string::npos);
    write_svg(svg, s, equator(s), r, "seed=1");
    CHECK(svg.str().find("<circle") != std::string::npos);
}
