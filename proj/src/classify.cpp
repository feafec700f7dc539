#include "kgeo/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "format.hpp"
#include "polygon.hpp"

namespace kgeo {

using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

bool is_cut(PointKind k) { return k == PointKind::OrdinaryCut || k == PointKind::SingularCut; }

}  // namespace

std::string_view to_string(KVerdict v) {
    switch (v) {
        case KVerdict::NotKGeodesic: return "NotKGeodesic";
        case KVerdict::OpenlyK: return "OpenlyK";
        case KVerdict::StrictK: return "StrictK";
    }
    return "Unknown";
}

// ---------------------------------------------------------------- 1/k-geodesics

KGeodesicReport is_k_geodesic(const SurfaceModel& s, const ClosedGeodesic& g, int k, const KGeodesicOptions& opt) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
    KGeodesicReport r;
    r.k = k;
    r.length = g.length();
    r.tol_k = opt.tol_factor * r.length;
    const double step = two_pi / k;
    const double target = r.length / k;

    struct Sample {
        double t, defect, gap;
        PointKind kind;
    };
    auto eval = [&](double t, bool record = true) {
        const SurfacePoint a = evaluate(s, g, t).first;
        const SurfacePoint b = evaluate(s, g, t + step).first;
        const MinimizerSet m = minimizers(s, a, b);
        // Length gap between the two shortest geodesics found, continuous through ties.
        const double gap = m.continuum                ? 0.0
                           : m.candidates.size() >= 2 ? m.candidates[1].length - m.candidates[0].length
                                                      : m.second_length - m.distance;
        Sample smp{t, target - m.distance, gap, PointKind::Regular};
        ++r.samples;
        if (smp.defect > r.defect || r.samples == 1) {
            r.defect = smp.defect;
            r.defect_t = t;
        }
        if (smp.defect <= r.tol_k) smp.kind = classify_set(s, m).kind;
        if (record && is_cut(smp.kind) && !r.cut_t) {
            r.cut_t = t;
            r.cut_kind = smp.kind;
        }
        if (smp.kind == PointKind::Inconclusive) r.inconclusive = true;
        return smp;
    };

    std::vector<Sample> samples;
    for (int j = 0; j < opt.grid; ++j) {
        samples.push_back(eval(two_pi * j / opt.grid));
        if (samples.back().defect > r.tol_k) return r;
    }
    // Bisect toward neighbours of near-failures.
    const double h = two_pi / opt.grid;
    for (int j = 0; j < opt.grid; ++j)
        if (samples[j].defect > 0.1 * r.tol_k)
            for (double off : {-0.5, 0.5})
                if (eval(samples[j].t + off * h).defect > r.tol_k) return r;

    // Isolated cut pairs: refine around local minima of the gap to the second geodesic.
    if (!r.cut_t) {
        double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
        for (const auto& smp : samples) {
            gmin = std::min(gmin, smp.gap);
            gmax = std::max(gmax, smp.gap);
        }
        const bool varies = std::isfinite(gmin) && (!std::isfinite(gmax) || gmax - gmin > 0.1 * gmin);
        const int n = opt.grid;
        for (int j = 0; j < n && varies && !r.cut_t; ++j) {
            const double gj = samples[j].gap;
            if (!(gj < 0.1 * target) || !(gj < samples[(j + n - 1) % n].gap) || !(gj <= samples[(j + 1) % n].gap))
                continue;
            double lo = samples[j].t - h, hi = samples[j].t + h;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            double f1 = eval(x1, false).gap, f2 = eval(x2, false).gap;
            for (int it = 0; it < 40; ++it) {
                if (f1 < f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - gr * (hi - lo);
                    f1 = eval(x1, false).gap;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + gr * (hi - lo);
                    f2 = eval(x2, false).gap;
                }
            }
            eval(0.5 * (lo + hi));
        }
    }
    if (r.defect > r.tol_k) return r;
    r.verdict = r.cut_t ? KVerdict::StrictK : KVerdict::OpenlyK;
    return r;
}

MinimalK minimal_k(const SurfaceModel& s, const ClosedGeodesic& g, int k_max, const KGeodesicOptions& opt) {
    MinimalK out;
    out.k_max = k_max;
    for (int k = 2; k <= k_max; ++k) {
        out.reports.push_back(is_k_geodesic(s, g, k, opt));
        if (out.reports.back().verdict != KVerdict::NotKGeodesic) {
            out.k = k;
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------- Grove-Shiohama

GSCriticalReport gs_critical(const SurfaceModel& s, const SurfacePoint& p_in, const SurfacePoint& q_in,
                             double tol_angle) {
    const SurfacePoint p = canonicalize(s, p_in), q = canonicalize(s, q_in);
    if (s.kind() == SurfaceKind::polygon && is_cone_point(s, q))
        throw Error(ErrorCode::ConePointQuery, "criticality at a polygon corner");
    const MinimizerSet m = minimizers(s, q, p);
    if (m.base_point) throw Error(ErrorCode::Undefined, "q coincides with p");
    GSCriticalReport r;
    r.p = p;
    r.q = m.q;
    for (const auto& x : m.minimizers) r.angles.push_back(frame_angle(s, m.q, x.direction));
    std::sort(r.angles.begin(), r.angles.end());
    const int n = static_cast<int>(r.angles.size());
    int widest = 0;
    for (int i = 0; i < n; ++i) {
        const double next = i + 1 < n ? r.angles[i + 1] : r.angles[0] + two_pi;
        r.gaps.push_back(next - r.angles[i]);
        if (r.gaps[i] > r.gaps[widest]) widest = i;
    }
    r.max_gap = r.gaps[widest];
    r.critical = r.max_gap <= pi + tol_angle;
    const double mid = r.angles[widest] + 0.5 * r.max_gap;
    r.complement_bisector = from_frame_angle(s, m.q, mid + pi);
    if (!r.critical) r.witness = from_frame_angle(s, m.q, mid);
    return r;
}

double ascent_measure(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q, double h) {
    if (s.kind() == SurfaceKind::polygon && is_cone_point(s, q)) return std::numeric_limits<double>::infinity();
    const double d0 = distance(s, q, p);
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 16; ++j) {
        const TangentVector v = from_frame_angle(s, q, two_pi * j / 16);
        SurfacePoint x;
        try {
            x = shoot(s, q, v, h).end_point();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ConePointHit) throw;
            continue;
        }
        best = std::max(best, (distance(s, x, p) - d0) / h);
    }
    return best;
}

namespace {

std::vector<SurfacePoint> chart_grid(const SurfaceModel& s, int n, double& spacing) {
    std::vector<SurfacePoint> out;
    switch (s.kind()) {
        case SurfaceKind::torus: {
            const auto& t = std::get<FlatTorus>(s.variant());
            spacing = std::max(t.a, t.b) / n;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out.push_back({t.a * i / n, t.b * j / n});
            break;
        }
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid:
            spacing = pi * std::max(s.axis_equatorial(), s.axis_polar()) / n;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out.push_back(canonicalize(s, {pi * (i + 0.5) / n, two_pi * j / n}));
            break;
        case SurfaceKind::polygon: {
            const detail::PolygonGeometry g(s.polygon());
            Vector2d lo = g.v[0], hi = g.v[0];
            for (const auto& v : g.v) {
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
            spacing = (hi - lo).maxCoeff() / n;
            for (Sheet sh : {Sheet::front, Sheet::back})
                for (int i = 0; i <= n; ++i)
                    for (int j = 0; j <= n; ++j) {
                        const Vector2d x = lo + Vector2d(i, j) * spacing;
                        if (g.max_violation(x) < -1e-9 * g.scale) out.push_back({x.x(), x.y(), sh});
                    }
            break;
        }
    }
    return out;
}

}  // namespace

std::vector<SurfacePoint> enumerate_gs_critical(const SurfaceModel& s, const SurfacePoint& p_in, int grid_n) {
    if (grid_n < 16) throw Error(ErrorCode::InvalidArgument, "grid_n must be at least 16");
    const SurfacePoint p = canonicalize(s, p_in);
    double h0 = 0.0;
    const std::vector<SurfacePoint> grid = chart_grid(s, grid_n, h0);
    const double scale = s.diameter_scale();

    std::vector<double> mu(grid.size());
    for (size_t i = 0; i < grid.size(); ++i)
        mu[i] = proximity(s, grid[i], p) < 0.5 * h0 ? std::numeric_limits<double>::infinity()
                                                     : ascent_measure(s, p, grid[i], h0);

    // Candidates: grid points below threshold that are minimal among points within 1.5 spacings.
    std::vector<SurfacePoint> cands;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!(mu[i] < 0.75)) continue;
        bool minimal = true;
        for (size_t j = 0; j < grid.size() && minimal; ++j)
            if (j != i && mu[j] < mu[i] && proximity(s, grid[i], grid[j]) < 1.5 * h0) minimal = false;
        if (minimal) cands.push_back(grid[i]);
    }

    std::vector<SurfacePoint> found;
    for (SurfacePoint x : cands) {
        double step = 0.5 * h0, h = h0;
        double f = ascent_measure(s, p, x, h);
        while (step > 1e-10 * scale) {
            bool moved = false;
            for (int j = 0; j < 8 && !moved; ++j) {
                SurfacePoint y;
                try {
                    y = shoot(s, x, from_frame_angle(s, x, two_pi * j / 8), step).end_point();
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::ConePointHit && e.code() != ErrorCode::ConePointQuery) throw;
                    continue;
                }
                const double fy = ascent_measure(s, p, y, h);
                if (fy < f - 1e-12) {
                    x = y;
                    f = fy;
                    moved = true;
                }
            }
            if (!moved) {
                step *= 0.5;
                h = std::max(2.0 * step, 1e-9 * scale);
                f = ascent_measure(s, p, x, h);
            }
        }
        bool dup = false;
        for (const auto& y : found) dup = dup || proximity(s, x, y) < 1e-6 * scale;
        if (dup) continue;
        try {
            if (gs_critical(s, p, x).critical) found.push_back(canonicalize(s, x));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ConePointQuery && e.code() != ErrorCode::Undefined) throw;
        }
    }
    std::sort(found.begin(), found.end(), [](const SurfacePoint& a, const SurfacePoint& b) {
        if (a.sheet != b.sheet) return a.sheet < b.sheet;
        if (std::abs(a.u - b.u) > 1e-9) return a.u < b.u;
        return a.v < b.v;
    });
    return found;
}

bool balanced_implies_gs(const SurfaceModel& s, const SurfacePoint& p, const SurfacePoint& q, double tol_angle) {
    return gs_critical(s, p, q, tol_angle).critical && gs_critical(s, q, p, tol_angle).critical;
}

double min_curvature(const SurfaceModel& s) {
    switch (s.kind()) {
        case SurfaceKind::sphere: return 1.0 / (s.axis_equatorial() * s.axis_equatorial());
        case SurfaceKind::ellipsoid: {
            const double A = s.axis_equatorial(), C = s.axis_polar();
            // Poles carry C^2/A^4, the equator 1/C^2.
            return std::min(C * C / (A * A * A * A), 1.0 / (C * C));
        }
        default: return 0.0;
    }
}

// ---------------------------------------------------------------- theorem check

namespace {

struct Curve {
    const SurfaceModel& s;
    const ClosedGeodesic& g;
    Vector3d at(double t) const { return ambient(s, evaluate(s, g, t).first); }
    Vector3d tangent(double t) const {
        const auto [p, v] = evaluate(s, g, t);
        return ambient_vector(s, p, v) * (g.length() / two_pi);
    }
};

// Parameters t on a where curve b comes within tol.
std::vector<double> crossings(const Curve& a, const Curve& b, double tol) {
    const int n = 720;
    std::vector<Vector3d> A(n), B(n);
    for (int i = 0; i < n; ++i) {
        A[i] = a.at(two_pi * i / n);
        B[i] = b.at(two_pi * i / n);
    }
    const double ha = a.g.length() / n, hb = b.g.length() / n;
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = (A[i] - B[j]).norm();
            if (d > 2.0 * (ha + hb)) continue;
            bool local = true;
            for (int di = -1; di <= 1 && local; ++di)
                for (int dj = -1; dj <= 1 && local; ++dj)
                    if ((di || dj) && (A[(i + di + n) % n] - B[(j + dj + n) % n]).norm() < d) local = false;
            if (!local) continue;
            // Gauss-Newton on |a(t) - b(u)|.
            double t = two_pi * i / n, u = two_pi * j / n;
            for (int it = 0; it < 30; ++it) {
                const Vector3d F = a.at(t) - b.at(u);
                if (F.norm() < 1e-13) break;
                Eigen::Matrix<double, 3, 2> J;
                J.col(0) = a.tangent(t);
                J.col(1) = -b.tangent(u);
                Eigen::Matrix2d M = J.transpose() * J;
                M.diagonal().array() += 1e-14;
                const Vector2d delta = -M.ldlt().solve(J.transpose() * F);
                t += std::clamp(delta(0), -0.1, 0.1);
                u += std::clamp(delta(1), -0.1, 0.1);
            }
            if ((a.at(t) - b.at(u)).norm() >= tol) continue;
            t = std::fmod(std::fmod(t, two_pi) + two_pi, two_pi);
            bool dup = false;
            for (double o : out) dup = dup || std::abs(std::remainder(o - t, two_pi)) < 1e-3;
            if (!dup) out.push_back(t);
        }
    std::sort(out.begin(), out.end());
    return out;
}

// Closest approach of a curve to an ambient point.
double miss(const Curve& c, const Vector3d& x) {
    const int n = 720;
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double d = (c.at(two_pi * i / n) - x).norm();
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    double lo = two_pi * (best - 1) / n, hi = two_pi * (best + 1) / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double t) { return (c.at(t) - x).norm(); };
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 60; ++i) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = f(x2);
        }
    }
    return std::min(bd, f(0.5 * (lo + hi)));
}

}  // namespace

TheoremReport verify_theorem_behavior(const SurfaceModel& s, const ClosedGeodesic& g,
                                      const std::vector<ClosedGeodesic>& candidates, double H,
                                      const TheoremOptions& opt) {
    TheoremReport r;
    r.length = g.length();
    r.H = H;
    if (!(H > 0.0) || r.length <= pi / std::sqrt(H))
        throw Error(ErrorCode::HypothesisUnmet, "length does not exceed pi/sqrt(H)");
    if (s.is_flat()) throw Error(ErrorCode::HypothesisUnmet, "flat surfaces have no positive curvature bound");
    const Curve gamma{s, g};
    for (const auto& c : candidates) {
        CandidateCheck cc;
        cc.length = c.length();
        const Curve other{s, c};
        cc.crossings = crossings(gamma, other, opt.tol_point);
        if (!cc.crossings.empty()) {
            cc.length_ok = cc.length >= r.length - opt.tol_length;
            KGeodesicOptions ko;
            ko.grid = opt.half_grid;
            cc.half_geodesic = is_k_geodesic(s, c, 2, ko).verdict != KVerdict::NotKGeodesic;
            if (cc.half_geodesic) {
                cc.same_length = std::abs(cc.length - r.length) < opt.tol_length;
                for (double t : cc.crossings) cc.antipode_miss = std::max(cc.antipode_miss, miss(other, gamma.at(t + pi)));
                cc.antipode_ok = cc.antipode_miss < opt.tol_point;
            }
        }
        if (!cc.length_ok || !cc.antipode_ok || !cc.same_length) ++r.violations;
        r.candidates.push_back(cc);
    }
    return r;
}

// ---------------------------------------------------------------- export

void write_csv(std::ostream& os, const SurfaceModel& s, const std::vector<KGeodesicReport>& reports,
               const std::string& header) {
    detail::comment_header(os, header);
    os << "surface,geodesic,k,verdict,defect,defect_t,cut_t,cut_kind,inconclusive\n";
    os << std::setprecision(12);
    for (size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        os << '"' << to_config(s) << "\"," << i << ',' << r.k << ',' << to_string(r.verdict) << ',' << r.defect << ','
           << r.defect_t << ',';
        if (r.cut_t) os << *r.cut_t;
        os << ',' << (r.cut_kind ? to_string(*r.cut_kind) : "") << ',' << (r.inconclusive ? 1 : 0) << '\n';
    }
}

void write_svg(std::ostream& os, const SurfaceModel& s, const ClosedGeodesic& g, const KGeodesicReport& r,
               const std::string& header) {
    std::vector<SurfacePoint> marks;
    if (r.cut_t) {
        marks.push_back(evaluate(s, g, *r.cut_t).first);
        marks.push_back(evaluate(s, g, *r.cut_t + two_pi / r.k).first);
    }
    write_svg(os, s, {&g.arc}, header, marks);
}

}  // namespace kgeo
