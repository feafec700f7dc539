#include "kgeo/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "format.hpp"
#include "svg.hpp"

namespace kgeo {

namespace {

constexpr double pi = std::numbers::pi;

void check_c(double c) {
    if (!(c > 0.0 && c < 1.0)) throw Error(ErrorCode::InvalidArgument, "ellipsoid family needs 0 < c < 1");
}

}  // namespace

ClosedGeodesic ellipsoid_equator(double c) {
    const auto e = SurfaceModel::ellipsoid(c);
    return trace_closed(e, {pi / 2, 0.0}, {0.0, 1.0}, 2 * pi);
}

double equator_cut_distance(double c, int fan) {
    check_c(c);
    const auto e = SurfaceModel::ellipsoid(c);
    const SurfacePoint p{pi / 2, 0.0};
    const auto conj = first_conjugate(e, p, normalized(e, p, {0.0, 1.0}), pi);
    DistanceOptions opt;
    opt.fan = fan;
    const double tol = tol_len(e);
    // True once the equatorial arc of length s has stopped minimizing.
    auto past_cut = [&](double s) {
        if (conj && *conj <= s) return true;
        const SurfacePoint q{pi / 2, s};
        const auto m = minimizers(e, q, p, opt);
        for (const auto& x : m.candidates)
            if (x.length <= s + tol && std::abs(ambient_vector(e, m.q, x.direction).z()) > 1e-3) return true;
        return false;
    };
    double lo = 0.0, hi = conj ? std::min(*conj, pi) : pi;
    if (!past_cut(hi)) return hi;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (past_cut(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double find_c0(double c_lo, double c_hi, const C0Options& opt) {
    check_c(c_lo);
    check_c(c_hi);
    const double level = 2 * pi / opt.k;
    auto f = [&](double c) { return equator_cut_distance(c, opt.fan) - level; };
    if (!(c_lo < c_hi) || !(f(c_lo) < 0.0) || !(f(c_hi) > 0.0))
        throw Error(ErrorCode::BadBracket, "cut distance does not cross 2pi/k on the bracket");
    while (c_hi - c_lo >= opt.tol) {
        const double mid = 0.5 * (c_lo + c_hi);
        (f(mid) < 0.0 ? c_lo : c_hi) = mid;
    }
    return 0.5 * (c_lo + c_hi);
}

GeodesicFamily ellipsoid_equator_family() {
    return {"ellipsoid equator", [](double c) { return SurfaceModel::ellipsoid(c); },
            [](const SurfaceModel& s) { return trace_closed(s, {pi / 2, 0.0}, {0.0, 1.0}, 2 * pi); }};
}

GeodesicFamily shrinking_loop_family() {
    return {"shrinking torus loop", [](double c) { return SurfaceModel::torus(1.0, c); },
            [](const SurfaceModel& s) {
                const double b = std::get<FlatTorus>(s.variant()).b;
                return trace_closed(s, {0.0, 0.0}, {0.0, 1.0}, b);
            }};
}

PersistenceReport persistence_experiment(const GeodesicFamily& family, const std::vector<double>& cs, double c_limit,
                                         int k, int grid) {
    PersistenceReport r;
    if (cs.empty()) throw Error(ErrorCode::InvalidArgument, "empty parameter sequence");
    r.no_variation = std::all_of(cs.begin(), cs.end(), [&](double c) { return c == cs.front(); });
    if (r.no_variation) return r;

    auto row_at = [&](double c) {
        PersistenceRow row;
        row.c = c;
        const SurfaceModel s = family.surface(c);
        const ClosedGeodesic g = family.geodesic(s);
        const BalancedClass cls = build_class(s, g, k, grid);
        row.exists = cls.rotating;
        row.smooth = cls.rotating && cls.smooth;
        row.nonsmooth = cls.nonsmooth;
        row.energy = cls.energies.empty() ? 0.0 : cls.energies.front();
        return row;
    };

    r.smooth_before_limit = true;
    for (double c : cs) {
        r.rows.push_back(row_at(c));
        r.smooth_before_limit = r.smooth_before_limit && r.rows.back().smooth;
    }
    // The limit: a geodesic that shrinks away leaves only the trivial class of a collapsed tuple.
    PersistenceRow lim;
    lim.c = c_limit;
    try {
        const SurfaceModel s = family.surface(c_limit);
        if (family.geodesic(s).length() < 1e-9 * s.diameter_scale()) r.limit_trivial = true;
        else lim = row_at(c_limit);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidArgument && e.code() != ErrorCode::CollapsedTuple &&
            e.code() != ErrorCode::ZeroVector)
            throw;
        r.limit_trivial = true;
    }
    if (r.limit_trivial) {
        lim.exists = true;
        lim.energy = 0.0;
    }
    r.rows.push_back(lim);
    r.limit_exists = lim.exists;
    r.limit_nonsmooth = lim.nonsmooth;
    return r;
}

BlowupReport blowup_experiment(const std::vector<double>& cs, int k_max) {
    BlowupReport r;
    r.k_max = k_max;
    int prev = 0;
    for (size_t i = 0; i < cs.size(); ++i) {
        check_c(cs[i]);
        if (i > 0 && !(cs[i] < cs[i - 1])) throw Error(ErrorCode::InvalidArgument, "c sequence must decrease");
        const auto e = SurfaceModel::ellipsoid(cs[i]);
        const MinimalK m = minimal_k(e, ellipsoid_equator(cs[i]), k_max);
        r.rows.push_back({cs[i], m.k});
        const int v = m.k ? *m.k : k_max + 1;
        r.exceeded = r.exceeded || !m.k;
        r.monotone = r.monotone && v >= prev;
        prev = v;
    }
    return r;
}

std::vector<SweepRecord> sweep(const std::vector<double>& cs_in, const SweepOptions& opt) {
    std::vector<double> cs = cs_in;
    std::sort(cs.begin(), cs.end());
    std::vector<SweepRecord> out;
    for (double c : cs) {
        check_c(c);
        SweepRecord rec;
        rec.c = c;
        const auto e = SurfaceModel::ellipsoid(c);
        const auto g = ellipsoid_equator(c);
        rec.equator_length = g.length();
        rec.cut_distance = equator_cut_distance(c, opt.fan);
        rec.verdict = is_k_geodesic(e, g, opt.k).verdict;
        rec.minimal_k = minimal_k(e, g, opt.k_max).k;
        if (rec.verdict != KVerdict::NotKGeodesic) {
            const auto cls = build_class(e, g, opt.k, opt.class_grid);
            rec.class_found = cls.rotating;
            rec.class_smooth = cls.rotating && cls.smooth;
        }
        out.push_back(rec);
    }
    return out;
}

void write_csv(std::ostream& os, const std::vector<SweepRecord>& rows, const std::string& header) {
    detail::comment_header(os, header);
    os << "c,cut_distance,equator_length,verdict,minimal_k,class_found,class_smooth\n";
    os << std::setprecision(12);
    for (const auto& r : rows) {
        os << r.c << ',' << r.cut_distance << ',' << r.equator_length << ',' << to_string(r.verdict) << ',';
        if (r.minimal_k) os << *r.minimal_k;
        else os << "NotFound";
        os << ',' << (r.class_found ? 1 : 0) << ',' << (r.class_smooth ? 1 : 0) << '\n';
    }
}

void write_svg(std::ostream& os, const std::vector<SweepRecord>& rows, int k, std::optional<double> c0,
               const std::string& header) {
    double x0 = 0.0, x1 = 1.0;
    if (!rows.empty()) {
        x0 = rows.front().c;
        x1 = rows.back().c;
        for (const auto& r : rows) {
            x0 = std::min(x0, r.c);
            x1 = std::max(x1, r.c);
        }
        if (x1 - x0 < 1e-9) x1 = x0 + 1e-3;
    }
    detail::SvgCanvas canvas(x0, x1, 0.0, pi);
    canvas.frame("c", "cut distance");
    canvas.hline(2 * pi / k, "#c33");
    if (c0) canvas.vline(*c0, "#33c");
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) pts.emplace_back(r.c, r.cut_distance);
    canvas.polyline(pts, "#222", 10.0);
    for (const auto& [x, y] : pts) canvas.circle(x, y, 3.0, "#222");
    canvas.write(os, header);
}

}  // namespace kgeo
