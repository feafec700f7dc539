#include "kgeo/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "format.hpp"
#include "kgeo/classify.hpp"
#include "kgeo/energy.hpp"
#include "kgeo/error.hpp"
#include "kgeo/sweep.hpp"

namespace kgeo::cli {

namespace {

constexpr double pi = std::numbers::pi;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(12) << x;
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double to_double(const std::string& s) {
    try {
        size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size()) throw UsageError("not a number: " + s);
        return x;
    } catch (const std::logic_error&) {
        throw UsageError("not a number: " + s);
    }
}

SurfacePoint parse_point(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() < 2 || parts.size() > 3) throw UsageError("point must be u,v or u,v,sheet: " + text);
    SurfacePoint p{to_double(parts[0]), to_double(parts[1])};
    if (parts.size() == 3) {
        if (parts[2] == "back") p.sheet = Sheet::back;
        else if (parts[2] != "front") throw UsageError("sheet must be front or back: " + text);
    }
    return p;
}

std::vector<SurfacePoint> parse_points(const std::string& text) {
    std::vector<SurfacePoint> out;
    for (const auto& item : split(text, ';')) out.push_back(parse_point(item));
    return out;
}

TangentVector parse_vector(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError("vector must be a,b: " + text);
    return {to_double(parts[0]), to_double(parts[1])};
}

void print_point(std::ostream& os, const SurfacePoint& p) {
    os << num(p.u) << ',' << num(p.v);
    if (p.sheet == Sheet::back) os << ",back";
}

SurfacePoint require_point(const std::string& text, const char* name) {
    if (text.empty()) throw UsageError(std::string("missing --") + name);
    return parse_point(text);
}

SurfacePoint random_point(const SurfaceModel& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    switch (s.kind()) {
        case SurfaceKind::sphere:
        case SurfaceKind::ellipsoid: return canonicalize(s, {std::acos(1.0 - 2.0 * U(rng)), 2 * pi * U(rng)});
        case SurfaceKind::torus: {
            const auto& t = std::get<FlatTorus>(s.variant());
            return {t.a * U(rng), t.b * U(rng)};
        }
        case SurfaceKind::polygon: {
            const auto& v = s.polygon().vertices;
            std::vector<double> w(v.size());
            double sum = 0.0;
            for (auto& x : w) sum += (x = -std::log(1.0 - U(rng)));
            Eigen::Vector2d p = Eigen::Vector2d::Zero();
            for (size_t i = 0; i < v.size(); ++i) p += w[i] / sum * v[i];
            return {p.x(), p.y(), U(rng) < 0.5 ? Sheet::front : Sheet::back};
        }
    }
    return {};
}

ClosedGeodesic meridian(const SurfaceModel& s, double lon) {
    const double A = s.axis_equatorial(), C = s.axis_polar();
    double len = 2 * pi * A;
    if (C < A) len = 4 * A * std::comp_ellint_2(std::sqrt(1 - C * C / (A * A)));
    else if (C > A) len = 4 * C * std::comp_ellint_2(std::sqrt(1 - A * A / (C * C)));
    return trace_closed(s, canonicalize(s, {pi / 2, lon}), {1.0, 0.0}, len);
}

ClosedGeodesic pick_geodesic(const SurfaceModel& s, const RunConfig& c) {
    std::string which = c.geodesic;
    if (!c.start.empty()) which = "custom";
    if (which == "custom") {
        if (c.start.empty() || c.dir.empty() || !(c.length > 0.0))
            throw UsageError("custom geodesic needs --start, --dir and --length");
        return trace_closed(s, parse_point(c.start), parse_vector(c.dir), c.length);
    }
    const bool embedded = !s.is_flat();
    if (which == "default") which = embedded ? "equator" : "horizontal";
    if (embedded && which == "equator")
        return trace_closed(s, {pi / 2, c.longitude}, {0.0, 1.0}, 2 * pi * s.axis_equatorial());
    if (embedded && which == "meridian") return meridian(s, c.longitude);
    if (s.kind() == SurfaceKind::torus && which == "horizontal") {
        const auto& t = std::get<FlatTorus>(s.variant());
        return trace_closed(s, {0.0, 0.0}, {1.0, 0.0}, t.a);
    }
    throw UsageError("geodesic '" + which + "' is not available on this surface; use --start/--dir/--length");
}

std::filesystem::path out_dir(const RunConfig& c) {
    std::string dir = c.out_dir;
    if (dir.empty())
        if (const char* env = std::getenv("KGEO_OUT_DIR")) dir = env;
    if (dir.empty()) dir = ".";
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const RunConfig& c, const std::string& name, const std::function<void(std::ostream&)>& body,
                std::ostream& out) {
    const auto path = out_dir(c) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    body(f);
    out << "wrote " << path.string() << '\n';
}

nlohmann::ordered_json config_json(const RunConfig& c) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& line : split(c.header(), '\n')) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

// ---------------------------------------------------------------- commands

int cmd_distance(const RunConfig& c, std::ostream& out, bool list) {
    const auto s = parse_surface(c.surface);
    const auto m = minimizers(s, require_point(c.q, "q"), require_point(c.p, "p"));
    out << "distance " << num(m.distance) << '\n';
    out << "multiplicity " << m.multiplicity() << (m.continuum ? " (continuum)" : "") << '\n';
    if (list)
        for (const auto& x : m.minimizers)
            out << "direction " << num(x.direction.a) << ',' << num(x.direction.b) << " length " << num(x.length)
                << '\n';
    write_file(c, c.command + ".json", [&](std::ostream& os) { write_json(os, s, m, c.header()); }, out);
    return 0;
}

int cmd_ddist(const RunConfig& c, std::ostream& out) {
    const auto s = parse_surface(c.surface);
    const auto p = require_point(c.p, "p"), q = require_point(c.q, "q");
    if (c.v.empty()) throw UsageError("missing --v");
    const auto v = parse_vector(c.v);
    const double dd = directional_derivative(s, p, q, v);
    out << "ddist " << num(dd) << '\n';
    nlohmann::ordered_json j;
    j["config"] = config_json(c);
    j["derivative"] = detail::round12(dd);
    write_file(c, "ddist.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; }, out);
    return 0;
}

TuplePoint tuple_from(const RunConfig& c, const SurfaceModel& s) {
    DistanceOptions dopt;
    dopt.fan = c.fan;
    if (!c.points.empty()) return TuplePoint(s, parse_points(c.points), dopt);
    if (c.random_k >= 2) {
        std::mt19937_64 rng(c.seed);
        std::vector<SurfacePoint> pts;
        for (int i = 0; i < c.random_k; ++i) pts.push_back(random_point(s, rng));
        return TuplePoint(s, pts, dopt);
    }
    throw UsageError("give --points or --random-k");
}

BalanceOptions balance_options(const RunConfig& c) {
    BalanceOptions b;
    b.tol_antipodal = c.tol_antipodal;
    return b;
}

int cmd_energy(const RunConfig& c, std::ostream& out) {
    const auto s = parse_surface(c.surface);
    const auto x = tuple_from(c, s);
    const double E = uniform_energy(x);
    out << "E " << num(E) << '\n';
    nlohmann::ordered_json j;
    j["config"] = config_json(c);
    j["energy"] = detail::round12(E);
    try {
        const auto g = energy_gradient(x);
        auto arr = nlohmann::ordered_json::array();
        for (const auto& gi : g) arr.push_back({detail::round12(gi.a), detail::round12(gi.b)});
        j["gradient"] = arr;
        for (const auto& gi : g) out << "grad " << num(gi.a) << ',' << num(gi.b) << '\n';
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotDifferentiable && e.code() != ErrorCode::OrdinaryPair) throw;
        j["gradient"] = nullptr;
        out << "grad undefined: " << e.what() << '\n';
    }
    write_file(c, "energy.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; }, out);
    return 0;
}

int cmd_balance(const RunConfig& c, std::ostream& out) {
    const auto s = parse_surface(c.surface);
    const auto x = tuple_from(c, s);
    const auto r = balance_test(x, balance_options(c));
    out << "kind " << to_string(r.kind) << '\n';
    out << "spacing_residual " << num(r.spacing_residual) << '\n';
    out << "antipodal_residual " << num(r.antipodal_residual) << '\n';
    write_file(c, "balance.json", [&](std::ostream& os) { write_json(os, x, r, c.header()); }, out);
    return 0;
}

int cmd_find(const RunConfig& c, std::ostream& out) {
    const auto s = parse_surface(c.surface);
    const auto seed = tuple_from(c, s);
    SearchOptions opt;
    if (c.method == "descent") opt.method = SearchMethod::EnergyDescent;
    else if (c.method != "residual") throw UsageError("method must be residual or descent");
    opt.max_iterations = c.max_iterations;
    opt.balance = balance_options(c);
    const auto r = find_balanced(seed, opt);
    out << "status " << to_string(r.status) << '\n';
    out << "iterations " << r.iterations << '\n';
    out << "E " << num(uniform_energy(r.tuple)) << '\n';
    out << "kind " << to_string(r.report.kind) << '\n';
    for (int i = 0; i < r.tuple.k(); ++i) {
        out << "point ";
        print_point(out, r.tuple[i]);
        out << '\n';
    }
    write_file(c, "find.json", [&](std::ostream& os) { write_json(os, r.tuple, r.report, c.header()); }, out);
    write_file(c, "find_trace.csv", [&](std::ostream& os) { write_trace_csv(os, r, c.header()); }, out);
    return 0;
}

int cmd_classify(const RunConfig& c, std::ostream& out) {
    const auto s = parse_surface(c.surface);
    const auto g = pick_geodesic(s, c);
    KGeodesicOptions opt;
    if (c.grid > 0) opt.grid = c.grid;
    opt.tol_factor = c.tol_factor;
    std::vector<KGeodesicReport> reports;
    if (c.minimal) {
        const auto m = minimal_k(s, g, c.k_max, opt);
        reports = m.reports;
        if (m.k) out << "minimal_k " << *m.k << '\n';
        else out << "minimal_k NotFound(" << c.k_max << ")\n";
    } else {
        reports.push_back(is_k_geodesic(s, g, c.k, opt));
    }
    const auto& last = reports.back();
    out << "length " << num(g.length()) << '\n';
    out << "k " << last.k << '\n';
    out << "verdict " << to_string(last.verdict) << '\n';
    out << "defect " << num(last.defect) << '\n';
    if (last.cut_t) out << "cut_t " << num(*last.cut_t) << ' ' << to_string(*last.cut_kind) << '\n';
    if (last.inconclusive) out << "inconclusive pairs present\n";
    write_file(c, "classify.csv", [&](std::ostream& os) { write_csv(os, s, reports, c.header()); }, out);
    write_file(c, "classify.svg", [&](std::ostream& os) { write_svg(os, s, g, last, c.header()); }, out);
    return 0;
}

int cmd_gs(const RunConfig& c, std::ostream& out) {
    const auto s = parse_surface(c.surface);
    const auto p = require_point(c.p, "p");
    std::ostringstream csv;
    detail::comment_header(csv, c.header());
    csv << std::setprecision(12);
    if (c.enumerate) {
        const auto pts = enumerate_gs_critical(s, p, c.grid > 0 ? c.grid : 32);
        out << "critical_points " << pts.size() << '\n';
        csv << "u,v,sheet\n";
        for (const auto& x : pts) {
            out << "critical ";
            print_point(out, x);
            out << '\n';
            csv << x.u << ',' << x.v << ',' << (x.sheet == Sheet::back ? "back" : "front") << '\n';
        }
    } else {
        const auto r = gs_critical(s, p, require_point(c.q, "q"));
        out << "critical " << (r.critical ? "true" : "false") << '\n';
        out << "max_gap " << num(r.max_gap) << '\n';
        if (r.witness) out << "witness " << num(r.witness->a) << ',' << num(r.witness->b) << '\n';
        csv << "angle,gap\n";
        for (size_t i = 0; i < r.angles.size(); ++i) csv << r.angles[i] << ',' << r.gaps[i] << '\n';
    }
    write_file(c, "gs.csv", [&](std::ostream& os) { os << csv.str(); }, out);
    return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    if (c.family != "ellipsoid") throw UsageError("only the ellipsoid family is available");
    const auto b = split(c.bracket, ',');
    if (b.size() != 2) throw UsageError("bracket must be lo,hi");
    const double lo = to_double(b[0]), hi = to_double(b[1]);
    C0Options copt;
    copt.k = c.k;
    copt.fan = c.fan;
    const double c0 = find_c0(lo, hi, copt);
    out << "c0 " << num(c0) << '\n';
    std::vector<double> cs;
    for (int i = 0; i < c.samples; ++i) cs.push_back(c.samples == 1 ? lo : lo + (hi - lo) * i / (c.samples - 1));
    SweepOptions sopt;
    sopt.k = c.k;
    sopt.k_max = c.k_max;
    sopt.fan = c.fan;
    if (c.grid > 0) sopt.class_grid = c.grid;
    const auto rows = sweep(cs, sopt);
    for (const auto& r : rows)
        out << "c " << num(r.c) << " cut_distance " << num(r.cut_distance) << ' ' << to_string(r.verdict) << '\n';
    const std::string header = c.header() + "\nc0=" + num(c0);
    write_file(c, "sweep.csv", [&](std::ostream& os) { write_csv(os, rows, header); }, out);
    write_file(c, "sweep.svg", [&](std::ostream& os) { write_svg(os, rows, c.k, c0, header); }, out);
    return 0;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    const auto s = parse_surface(c.surface);
    if (s.is_flat()) throw Error(ErrorCode::HypothesisUnmet, "flat surfaces have no positive curvature bound");
    RunConfig gc = c;
    if (gc.geodesic == "default") gc.geodesic = s.kind() == SurfaceKind::sphere ? "equator" : "meridian";
    const auto gamma = pick_geodesic(s, gc);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(0.0, 2 * pi);
    std::vector<ClosedGeodesic> cands;
    if (s.kind() == SurfaceKind::sphere) {
        const SurfacePoint p = evaluate(s, gamma, 0.0).first;
        for (int i = 0; i < c.candidates; ++i)
            cands.push_back(trace_closed(s, p, from_frame_angle(s, p, U(rng)), gamma.length()));
    } else {
        for (int i = 0; i < c.candidates; ++i) cands.push_back(meridian(s, U(rng)));
        cands.push_back(trace_closed(s, {pi / 2, 0.0}, {0.0, 1.0}, 2 * pi * s.axis_equatorial()));
    }
    const auto r = verify_theorem_behavior(s, gamma, cands, min_curvature(s));
    out << "length " << num(r.length) << '\n';
    out << "H " << num(r.H) << '\n';
    out << "violations " << r.violations << '\n';
    std::ostringstream csv;
    detail::comment_header(csv, c.header());
    csv << std::setprecision(12) << "candidate,length,crossings,half_geodesic,length_ok,antipode_ok,same_length,"
                                    "antipode_miss\n";
    for (size_t i = 0; i < r.candidates.size(); ++i) {
        const auto& cc = r.candidates[i];
        csv << i << ',' << cc.length << ',' << cc.crossings.size() << ',' << cc.half_geodesic << ',' << cc.length_ok
            << ',' << cc.antipode_ok << ',' << cc.same_length << ',' << cc.antipode_miss << '\n';
    }
    write_file(c, "verify_thm.csv", [&](std::ostream& os) { os << csv.str(); }, out);
    return 0;
}

void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) throw UsageError("bad config line: " + line);
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r\"");
            const auto b = s.find_last_not_of(" \t\r\"");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!c.set(key, value)) throw UsageError("unknown config key: " + key);
    }
}

void validate(const RunConfig& c) {
    if (!(c.tol_factor > 0.0) || !(c.tol_antipodal > 0.0)) throw UsageError("tolerances must be positive");
    if (c.k < 2) throw UsageError("k must be at least 2");
    if (c.k_max < 2) throw UsageError("k-max must be at least 2");
    if (c.samples < 1 || c.fan < 8 || c.candidates < 0 || c.grid < 0) throw UsageError("sizes must be positive");
}

}  // namespace

std::string RunConfig::header() const {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "command=" << command << '\n'
       << "surface=" << surface << '\n'
       << "seed=" << seed << '\n'
       << "p=" << p << '\n'
       << "q=" << q << '\n'
       << "v=" << v << '\n'
       << "points=" << points << '\n'
       << "random-k=" << random_k << '\n'
       << "geodesic=" << geodesic << '\n'
       << "start=" << start << '\n'
       << "dir=" << dir << '\n'
       << "length=" << length << '\n'
       << "longitude=" << longitude << '\n'
       << "k=" << k << '\n'
       << "k-max=" << k_max << '\n'
       << "minimal=" << minimal << '\n'
       << "grid=" << grid << '\n'
       << "tol-factor=" << tol_factor << '\n'
       << "tol-antipodal=" << tol_antipodal << '\n'
       << "method=" << method << '\n'
       << "max-iterations=" << max_iterations << '\n'
       << "enumerate=" << enumerate << '\n'
       << "family=" << family << '\n'
       << "bracket=" << bracket << '\n'
       << "samples=" << samples << '\n'
       << "fan=" << fan << '\n'
       << "candidates=" << candidates;
    return os.str();
}

bool RunConfig::set(const std::string& key, const std::string& value) {
    auto as_int = [&] { return static_cast<int>(to_double(value)); };
    auto as_bool = [&] { return value == "1" || value == "true" || value == "yes"; };
    const std::map<std::string, std::function<void()>> table = {
        {"surface", [&] { surface = value; }},
        {"out", [&] { out_dir = value; }},
        {"seed", [&] { seed = std::stoull(value); }},
        {"p", [&] { p = value; }},
        {"q", [&] { q = value; }},
        {"v", [&] { v = value; }},
        {"points", [&] { points = value; }},
        {"random-k", [&] { random_k = as_int(); }},
        {"geodesic", [&] { geodesic = value; }},
        {"start", [&] { start = value; }},
        {"dir", [&] { dir = value; }},
        {"length", [&] { length = to_double(value); }},
        {"longitude", [&] { longitude = to_double(value); }},
        {"k", [&] { k = as_int(); }},
        {"k-max", [&] { k_max = as_int(); }},
        {"minimal", [&] { minimal = as_bool(); }},
        {"grid", [&] { grid = as_int(); }},
        {"tol-factor", [&] { tol_factor = to_double(value); }},
        {"tol-antipodal", [&] { tol_antipodal = to_double(value); }},
        {"method", [&] { method = value; }},
        {"max-iterations", [&] { max_iterations = as_int(); }},
        {"enumerate", [&] { enumerate = as_bool(); }},
        {"family", [&] { family = value; }},
        {"bracket", [&] { bracket = value; }},
        {"samples", [&] { samples = as_int(); }},
        {"fan", [&] { fan = as_int(); }},
        {"candidates", [&] { candidates = as_int(); }},
    };
    const auto it = table.find(key);
    if (it == table.end()) return false;
    it->second();
    return true;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    std::string config_path;
    CLI::App app{"Balanced points and 1/k-geodesics on surfaces", "kgeo"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"distance", "distance and minimizing geodesics from q to p"},
        {"minimizers", "list the minimizing directions at q toward p"},
        {"ddist", "one-sided derivative of d_p at q along v"},
        {"energy", "uniform energy and gradient of a tuple"},
        {"balance", "balanced-point test of a tuple"},
        {"find", "search for a balanced tuple from a seed"},
        {"classify", "1/k-geodesic verdict or minimal k of a closed geodesic"},
        {"gs", "Grove-Shiohama criticality of q for d_p, or enumeration"},
        {"sweep", "ellipsoid family: threshold c0 and sweep table"},
        {"verify-thm", "length and antipode checks for a half-geodesic"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        subs[name] = sub;
        sub->add_option("--surface", c.surface, "surface descriptor, e.g. \"torus a=1 b=1\"");
        sub->add_option("--config", config_path, "key=value file; its values override flags");
        sub->add_option("--out", c.out_dir, "output directory (default $KGEO_OUT_DIR or .)");
        sub->add_option("--seed", c.seed, "seed for random sampling");
        sub->add_option("--fan", c.fan, "ellipsoid BVP start count");
    }
    for (const char* name : {"distance", "minimizers", "ddist"}) {
        subs[name]->add_option("--p", c.p, "base point u,v[,back]");
        subs[name]->add_option("--q", c.q, "query point u,v[,back]");
    }
    subs["ddist"]->add_option("--v", c.v, "tangent vector a,b at q");
    for (const char* name : {"energy", "balance", "find"}) {
        subs[name]->add_option("--points", c.points, "tuple u,v;u,v;...");
        subs[name]->add_option("--random-k", c.random_k, "random seed tuple of this size");
        subs[name]->add_option("--tol-antipodal", c.tol_antipodal, "balance tolerance");
    }
    subs["find"]->add_option("--method", c.method, "residual or descent");
    subs["find"]->add_option("--max-iterations", c.max_iterations, "iteration cap");
    for (const char* name : {"classify", "verify-thm"}) {
        subs[name]->add_option("--geodesic", c.geodesic, "equator, meridian, horizontal or custom");
        subs[name]->add_option("--start", c.start, "custom geodesic start point");
        subs[name]->add_option("--dir", c.dir, "custom geodesic initial direction");
        subs[name]->add_option("--length", c.length, "custom geodesic length");
        subs[name]->add_option("--longitude", c.longitude, "longitude of the equator start or meridian");
    }
    subs["classify"]->add_option("--k", c.k, "k of the 1/k test");
    subs["classify"]->add_option("--k-max", c.k_max, "search bound for --minimal");
    subs["classify"]->add_flag("--minimal", c.minimal, "report the minimal k");
    subs["classify"]->add_option("--grid", c.grid, "sampling grid");
    subs["classify"]->add_option("--tol-factor", c.tol_factor, "defect tolerance relative to length");
    subs["gs"]->add_option("--p", c.p, "base point u,v[,back]");
    subs["gs"]->add_option("--q", c.q, "query point u,v[,back]");
    subs["gs"]->add_flag("--enumerate", c.enumerate, "list all critical points of d_p");
    subs["gs"]->add_option("--grid", c.grid, "enumeration grid size");
    subs["sweep"]->add_option("--family", c.family, "parameter family (ellipsoid)");
    subs["sweep"]->add_option("--k", c.k, "k of the threshold 2pi/k");
    subs["sweep"]->add_option("--k-max", c.k_max, "minimal k search bound");
    subs["sweep"]->add_option("--bracket", c.bracket, "c_lo,c_hi");
    subs["sweep"]->add_option("--samples", c.samples, "number of c values in the table");
    subs["sweep"]->add_option("--grid", c.grid, "class sampling grid");
    subs["verify-thm"]->add_option("--candidates", c.candidates, "number of random candidate geodesics");

    CLI::App* active = nullptr;
    try {
        app.parse(argc, argv);
        for (auto* sub : app.get_subcommands()) active = sub;
        c.command = active->get_name();
        if (!config_path.empty()) apply_config_file(c, config_path);
        validate(c);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        for (auto* sub : app.get_subcommands()) active = sub;
        err << (active ? active->help() : app.help());
        return 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << active->help();
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        const std::string& cmd = c.command;
        if (cmd == "distance") return cmd_distance(c, out, false);
        if (cmd == "minimizers") return cmd_distance(c, out, true);
        if (cmd == "ddist") return cmd_ddist(c, out);
        if (cmd == "energy") return cmd_energy(c, out);
        if (cmd == "balance") return cmd_balance(c, out);
        if (cmd == "find") return cmd_find(c, out);
        if (cmd == "classify") return cmd_classify(c, out);
        if (cmd == "gs") return cmd_gs(c, out);
        if (cmd == "sweep") return cmd_sweep(c, out);
        if (cmd == "verify-thm") return cmd_verify(c, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << active->help();
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidArgument ? 1 : 2;
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"kgeo"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace kgeo::cli
