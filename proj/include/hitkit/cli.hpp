#pragma once

// Command-line front end: run manifests, kernel tables, sample files and
// verification reports. Exit codes: 0 ok, 2 usage, 3 numerical failure,
// 4 verification failure.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diffusion_sim.hpp"
#include "kernels.hpp"
#include "verify.hpp"

#ifndef HITKIT_VERSION
#define HITKIT_VERSION "0.1.0"
#endif

namespace hitkit::cli {

using json = nlohmann::json;

inline constexpr int exit_ok = 0, exit_usage = 2, exit_numerical = 3, exit_verify = 4;

inline std::string version() { return HITKIT_VERSION; }

struct Axis {
    std::string name;
    std::vector<double> values;
};

struct RunManifest {
    std::string command = "eval";
    StabilityParams params;
    std::string geometry;
    std::vector<double> start;
    std::vector<Axis> grid;
    SimConfig sim;
    std::string out_path; // empty: standard output
    std::string format = "csv";
    std::string suite;
    double tol = 1e-8;

    json to_json() const {
        json g = json::array();
        for (auto& a : grid) g.push_back({{"name", a.name}, {"values", a.values}});
        return {{"command", command},
                {"params", {{"alpha", params.alpha}, {"mass", params.mass}, {"lambda", params.lambda}}},
                {"geometry", geometry},
                {"start", start},
                {"grid", g},
                {"sim",
                 {{"seed", sim.seed},
                  {"n_paths", sim.n_paths},
                  {"dt", sim.dt},
                  {"substeps", sim.substeps},
                  {"bridge_correction", sim.bridge_correction},
                  {"richardson", sim.richardson},
                  {"horizon_steps", sim.horizon_steps}}},
                {"output", {{"path", out_path}, {"format", format}}},
                {"suite", suite},
                {"tol", tol}};
    }

    void validate() const;
};

// Axis from {"name", "values"} or {"name", "lo", "hi", "n"}.
inline Axis axis_from_json(const json& j) {
    Axis a;
    a.name = j.at("name").get<std::string>();
    if (j.contains("values")) {
        a.values = j.at("values").get<std::vector<double>>();
    } else {
        double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
        int n = j.at("n").get<int>();
        if (n < 1) throw DomainError("grid axis " + a.name + ": n must be >= 1");
        for (int i = 0; i < n; ++i) a.values.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    }
    return a;
}

inline RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    try {
        if (j.contains("command")) m.command = j.at("command").get<std::string>();
        if (j.contains("params")) {
            auto& p = j.at("params");
            if (p.contains("alpha")) m.params.alpha = p.at("alpha").get<double>();
            if (p.contains("mass")) m.params.mass = p.at("mass").get<double>();
            if (p.contains("lambda")) m.params.lambda = p.at("lambda").get<double>();
        }
        if (j.contains("geometry")) m.geometry = j.at("geometry").get<std::string>();
        if (j.contains("start")) m.start = j.at("start").get<std::vector<double>>();
        if (j.contains("grid"))
            for (auto& a : j.at("grid")) m.grid.push_back(axis_from_json(a));
        if (j.contains("sim")) {
            auto& s = j.at("sim");
            if (s.contains("seed")) m.sim.seed = s.at("seed").get<std::uint64_t>();
            if (s.contains("n_paths")) m.sim.n_paths = s.at("n_paths").get<long>();
            if (s.contains("dt")) m.sim.dt = s.at("dt").get<double>();
            if (s.contains("substeps")) m.sim.substeps = s.at("substeps").get<int>();
            if (s.contains("bridge_correction")) m.sim.bridge_correction = s.at("bridge_correction").get<bool>();
            if (s.contains("richardson")) m.sim.richardson = s.at("richardson").get<bool>();
            if (s.contains("horizon_steps")) m.sim.horizon_steps = s.at("horizon_steps").get<long>();
        }
        if (j.contains("output")) {
            auto& o = j.at("output");
            if (o.contains("path")) m.out_path = o.at("path").get<std::string>();
            if (o.contains("format")) m.format = o.at("format").get<std::string>();
        }
        if (j.contains("suite")) m.suite = j.at("suite").get<std::string>();
        if (j.contains("tol")) m.tol = j.at("tol").get<double>();
    } catch (const json::exception& e) {
        throw DomainError(std::string("manifest: ") + e.what());
    }
    return m;
}

// "name=lo:hi:n" (n evenly spaced points) or "name=v1,v2,...".
inline Axis parse_axis(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw DomainError("grid axis '" + spec + "': expected name=...");
    Axis a;
    a.name = spec.substr(0, eq);
    std::string rest = spec.substr(eq + 1);
    auto num = [&](const std::string& s) {
        double v;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size())
            throw DomainError("grid axis '" + spec + "': bad number '" + s + "'");
        return v;
    };
    if (rest.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(rest);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw DomainError("grid axis '" + spec + "': expected lo:hi:n");
        json j = {{"name", a.name}, {"lo", num(parts[0])}, {"hi", num(parts[1])}, {"n", int(num(parts[2]))}};
        return axis_from_json(j);
    }
    std::stringstream ss(rest);
    for (std::string p; std::getline(ss, p, ',');) a.values.push_back(num(p));
    return a;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');) {
        double x;
        auto r = std::from_chars(p.data(), p.data() + p.size(), x);
        if (r.ec != std::errc() || r.ptr != p.data() + p.size()) throw DomainError("bad number '" + p + "'");
        v.push_back(x);
    }
    return v;
}

inline const std::vector<std::string>& eval_geometries() {
    static const std::vector<std::string> g = {"halfline2d",          "halfspace", "interval", "strip_ft",
                                               "halfline_complement", "resolvent"};
    return g;
}

inline const std::vector<std::string>& simulate_geometries() {
    static const std::vector<std::string> g = {"halfline2d", "halfspace", "strip", "interval", "halfline_complement"};
    return g;
}

inline void RunManifest::validate() const {
    auto in = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    if (!in({"eval", "simulate", "verify", "report"}, command)) throw DomainError("unknown command " + command);
    if (format != "csv" && format != "json") throw DomainError("format must be csv or json");
    for (auto& a : grid) {
        if (a.values.empty()) throw DomainError("grid axis " + a.name + " is empty");
        for (std::size_t i = 1; i < a.values.size(); ++i)
            if (!(a.values[i] > a.values[i - 1]))
                throw DomainError("grid axis " + a.name + " must be strictly increasing");
    }
    if (command == "verify") {
        if (!verify::known_suite(suite)) throw DomainError("unknown suite '" + suite + "'");
        return;
    }
    if (command == "report") return;
    params.validate();
    sim.validate();
    if (!(tol > 0.0 && tol < 1.0)) throw DomainError("tol must lie in (0, 1)");
    if (command == "eval" && !in(eval_geometries(), geometry)) throw DomainError("unknown eval geometry '" + geometry + "'");
    if (command == "simulate" && !in(simulate_geometries(), geometry))
        throw DomainError("unknown simulate geometry '" + geometry + "'");
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

namespace detail {

inline void require_axes(const RunManifest& m, const std::vector<std::string>& names) {
    if (m.grid.size() != names.size()) {
        std::string want;
        for (auto& n : names) want += (want.empty() ? "" : ", ") + n;
        throw DomainError("geometry " + m.geometry + " needs grid axes: " + want);
    }
    for (std::size_t i = 0; i < names.size(); ++i)
        if (m.grid[i].name != names[i])
            throw DomainError("geometry " + m.geometry + ": axis " + std::to_string(i + 1) + " must be " + names[i]);
}

inline std::vector<std::string> numbered(const std::string& stem, int from, int to) {
    std::vector<std::string> v;
    for (int i = from; i <= to; ++i) v.push_back(stem + std::to_string(i));
    return v;
}

// Visits every point of the tensor grid in row-major order.
template <class F>
void for_each_point(const std::vector<Axis>& grid, F f) {
    std::vector<std::size_t> idx(grid.size(), 0);
    std::vector<double> pt(grid.size());
    for (;;) {
        for (std::size_t i = 0; i < grid.size(); ++i) pt[i] = grid[i].values[idx[i]];
        f(pt);
        std::size_t k = grid.size();
        while (k > 0) {
            --k;
            if (++idx[k] < grid[k].values.size()) break;
            idx[k] = 0;
            if (k == 0) return;
        }
        if (grid.empty()) return;
    }
}

inline double lambda_of(const RunManifest& m) {
    if (m.params.lambda > 0.0) return m.params.lambda;
    return m.params.mass > 0.0 ? StabilityParams::lambda_for_mass(m.params.alpha, m.params.mass) : 0.0;
}

} // namespace detail

// Kernel table: one row per grid point, columns inputs..., value, err_est.
inline Table cmd_eval(const RunManifest& m) {
    m.validate();
    Table t;
    const double a = m.params.alpha;
    quad::QuadSpec q;
    q.tol = m.tol;
    const std::string& g = m.geometry;
    std::function<std::pair<double, double>(const std::vector<double>&)> f;
    if (g == "halfline2d") {
        detail::require_axes(m, {"r"});
        if (m.start.size() != 2) throw DomainError("halfline2d: start needs (z1, z2)");
        double lam = m.params.lambda, z1 = m.start[0], z2 = m.start[1];
        f = [=](const std::vector<double>& p) -> std::pair<double, double> {
            if (z1 == 0.0) return {halfline2d_boundary_kernel(a, lam, z2, p[0]), 0.0};
            auto r = halfline2d_laplace_kernel_q(a, lam, std::fabs(z1), z2, p[0], q);
            return {r.value, r.err_est};
        };
    } else if (g == "halfspace") {
        int n = int(m.grid.size());
        if (n < 1) throw DomainError("halfspace: needs grid axes s1..sn");
        detail::require_axes(m, detail::numbered("s", 1, n));
        double lam = detail::lambda_of(m), mass = m.params.mass;
        auto y = m.start;
        if (y.size() == std::size_t(n)) {
            f = [=](const std::vector<double>& p) -> std::pair<double, double> {
                if (mass > 0.0) return {halfspace_poisson_relativistic(a, mass, n, y, p), 0.0};
                if (lam > 0.0) return {halfspace_H_lambda(a, n, lam, y, p), 0.0};
                return {halfspace_poisson_stable(a, n, y, p), 0.0};
            };
        } else if (y.size() == std::size_t(n) + 1) {
            f = [=](const std::vector<double>& p) -> std::pair<double, double> {
                auto r = halfspace_laplace_kernel_q(a, n, lam, y, p, q);
                return {r.value, r.err_est};
            };
        } else {
            throw DomainError("halfspace: start needs n (boundary) or n+1 coordinates");
        }
    } else if (g == "interval") {
        detail::require_axes(m, {"r"});
        if (m.params.lambda != 0.0 || m.params.mass != 0.0) throw DomainError("interval: closed form needs lambda = m = 0");
        double z2;
        if (m.start.size() == 1) z2 = m.start[0];
        else if (m.start.size() == 2 && m.start[0] == 0.0) z2 = m.start[1];
        else throw DomainError("interval: start needs (0, z2)");
        f = [=](const std::vector<double>& p) -> std::pair<double, double> {
            return {interval_poisson(a, z2, p[0]), 0.0};
        };
    } else if (g == "strip_ft") {
        // residual Re(lhs) - rhs of the strip Fourier relation per bin (r_i, r_{i+1})
        if (m.grid.size() != 2 || m.grid[0].name != "r" || m.grid[1].name != "w")
            throw DomainError("strip_ft: needs grid axes r (bin edges) and w");
        if (m.start.size() != 3 || m.start[0] != 0.0) throw DomainError("strip_ft: start needs (0, y2, y3)");
        t.columns = {"r_lo", "r_hi", "w", "value", "err_est"};
        const auto& r = m.grid[0].values;
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            for (double w : m.grid[1].values) {
                auto res = strip_ft_check(a, m.params.lambda, m.start[1], m.start[2], r[i], r[i + 1],
                                          m.start[2] + w, m.sim);
                t.rows.push_back({r[i], r[i + 1], w, res.lhs.real() - res.rhs, std::hypot(res.lhs_se, res.rhs_se)});
            }
        return t;
    } else if (g == "halfline_complement") {
        double mass = m.params.mass;
        if (m.grid.size() == 1) {
            detail::require_axes(m, {"r"});
            if (m.start.size() != 2) throw DomainError("halfline_complement: start needs (y1, y2)");
            double y1 = m.start[0], y2 = m.start[1];
            f = [=](const std::vector<double>& p) -> std::pair<double, double> {
                auto r = halfline_complement_kernel_q(a, mass, y1, y2, p[0], q);
                return {r.value, r.err_est};
            };
        } else {
            int n = int(m.grid.size()) + 1;
            detail::require_axes(m, detail::numbered("s", 2, n));
            auto y = m.start;
            if (y.size() != std::size_t(n)) throw DomainError("halfline_complement: start needs n coordinates");
            f = [=](const std::vector<double>& p) -> std::pair<double, double> {
                return {halfline_complement_nd(a, mass, n, y, p), 0.0};
            };
        }
    } else if (g == "resolvent") {
        int k = int(m.grid.size());
        detail::require_axes(m, detail::numbered("y", 1, k));
        if (m.start.size() != std::size_t(k)) throw DomainError("resolvent: start and grid need the same dimension");
        auto x = m.start;
        double mass = m.params.mass, lam = m.params.lambda;
        if (mass > 0.0) {
            f = [=](const std::vector<double>& p) -> std::pair<double, double> {
                return {resolvent_relativistic(a, k, mass, x, p), 0.0};
            };
        } else {
            if (k < 2) throw DomainError("resolvent: needs at least 2 coordinates for lambda > 0");
            f = [=](const std::vector<double>& p) -> std::pair<double, double> {
                return {resolvent_U_lambda(a, k - 1, lam, x, p), 0.0};
            };
        }
    }
    for (auto& ax : m.grid) t.columns.push_back(ax.name);
    t.columns.push_back("value");
    t.columns.push_back("err_est");
    detail::for_each_point(m.grid, [&](const std::vector<double>& p) {
        auto [v, e] = f(p);
        std::vector<double> row = p;
        row.push_back(v);
        row.push_back(e);
        t.rows.push_back(std::move(row));
    });
    return t;
}

struct SimulateResult {
    Table table;
    long horizon_failures = 0;
};

// Sample file: path, place_1..place_k, time_functional, exact_place, exact_time, ok.
inline SimulateResult cmd_simulate(const RunManifest& m) {
    m.validate();
    const double a = m.params.alpha;
    const std::string& g = m.geometry;
    std::function<HitSample(Rng&)> draw;
    std::size_t dims = 0;
    const auto& y = m.start;
    if (g == "halfline2d") {
        if (y.size() != 2) throw DomainError("halfline2d: start needs (z1, z2)");
        hitkit::detail::halfline_pair(std::fabs(y[0]), y[1]);
        dims = 1;
        draw = [&](Rng& rng) { return sample_halfline_hit_with_time(a, std::fabs(y[0]), y[1], m.sim, rng); };
    } else if (g == "halfspace") {
        if (y.size() < 2) throw DomainError("halfspace: start needs n+1 >= 2 coordinates");
        int n = int(y.size()) - 1;
        dims = std::size_t(n);
        draw = [&, n](Rng& rng) { return sample_halfspace_hit_nd(a, n, y, m.sim, rng); };
    } else if (g == "strip" || g == "interval") {
        if (y.size() < 2) throw DomainError("strip: start needs at least (y1, y2)");
        hitkit::detail::strip_pair(std::fabs(y[0]), y[1]);
        dims = y.size() - 1;
        draw = [&](Rng& rng) { return sample_strip_hit_nd(a, y, m.sim, rng); };
    } else if (g == "halfline_complement") {
        if (y.size() < 3) throw DomainError("halfline_complement: start needs at least 3 coordinates");
        if (!(a > 1.0)) throw DomainError("halfline_complement: needs 1 < alpha < 2");
        dims = y.size() - 2;
        draw = [&](Rng& rng) { return sample_halfline_complement_hit(a, y, m.sim, rng); };
    }
    SimulateResult out;
    auto& t = out.table;
    t.columns = {"path"};
    for (std::size_t i = 1; i <= dims; ++i) t.columns.push_back("place_" + std::to_string(i));
    for (const char* c : {"time_functional", "exact_place", "exact_time", "ok"}) t.columns.push_back(c);
    auto rows = run_paths<std::vector<double>>(m.sim.n_paths, m.sim.seed, [&](long i, Rng& rng) {
        std::vector<double> row = {double(i)};
        try {
            HitSample s = draw(rng);
            for (std::size_t k = 0; k < dims; ++k) row.push_back(k < s.place.size() ? s.place[k] : NAN);
            row.push_back(s.time_functional);
            row.push_back(s.exact_place ? 1.0 : 0.0);
            row.push_back(s.exact_time ? 1.0 : 0.0);
            row.push_back(1.0);
        } catch (const HorizonError&) {
            for (std::size_t k = 0; k < dims; ++k) row.push_back(NAN);
            row.insert(row.end(), {NAN, 0.0, 0.0, 0.0});
        }
        return row;
    });
    for (auto& r : rows) out.horizon_failures += r.back() == 0.0;
    t.rows = std::move(rows);
    return out;
}

// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// UTC time stamp; SOURCE_DATE_EPOCH pins it for reproducible files.
inline std::string wall_clock() {
    std::time_t t = std::time(nullptr);
    if (const char* s = std::getenv("SOURCE_DATE_EPOCH")) t = std::time_t(std::strtoll(s, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json header_json(const RunManifest& m) {
    return {{"version", version()}, {"manifest", m.to_json()}, {"seed", m.sim.seed}, {"wall_clock", wall_clock()}};
}

inline std::string render(const Table& t, const RunManifest& m) {
    json h = header_json(m);
    if (m.format == "json") {
        json rows = json::array();
        for (auto& r : t.rows) {
            json row = json::array();
            for (double v : r) row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
            rows.push_back(row);
        }
        h["columns"] = t.columns;
        h["rows"] = rows;
        return h.dump(1) + "\n";
    }
    std::string s;
    s += "# version: " + h["version"].get<std::string>() + "\n";
    s += "# manifest: " + h["manifest"].dump() + "\n";
    s += "# seed: " + std::to_string(m.sim.seed) + "\n";
    s += "# wall_clock: " + h["wall_clock"].get<std::string>() + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) s += ',';
            s += format_double(r[i]);
        }
        s += '\n';
    }
    return s;
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file " + path);
    f << text;
}

// Prints a verification report; nonzero when any criterion failed.
inline int report(const json& rep, std::ostream& out) {
    bool ok = true;
    for (auto& c : rep.at("criteria")) {
        bool passed = c.at("passed").get<bool>();
        ok = ok && passed;
        out << c.at("id").get<std::string>() << " " << (passed ? "PASS" : "FAIL") << " "
            << c.at("name").get<std::string>() << " [" << c.at("seconds").get<double>() << "s]";
        auto msg = c.value("message", std::string());
        if (!msg.empty()) out << " " << msg;
        out << "\n";
    }
    return ok ? exit_ok : exit_verify;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"hitkit: hitting distributions of stable and relativistic stable processes"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    std::string manifest_path, grid_flag_dummy;
    std::vector<std::string> grid_specs;
    std::string start_spec, report_in;
    struct Opt {
        std::optional<double> alpha, mass, lambda, dt, tol;
        std::optional<long> paths;
        std::optional<int> substeps;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> geometry, out, format, suite;
    } o;
    auto add_common = [&](CLI::App* c) {
        c->add_option("--manifest", manifest_path, "JSON run manifest; flags override its values");
        c->add_option("--alpha", o.alpha, "stability index in (0, 2)");
        c->add_option("--mass", o.mass, "relativistic mass m >= 0");
        c->add_option("--lambda", o.lambda, "Laplace parameter lambda >= 0");
        c->add_option("--geometry", o.geometry, "geometry id");
        c->add_option("--start", start_spec, "start point, comma separated");
        c->add_option("--grid", grid_specs, "axis name=lo:hi:n or name=v1,v2,...; repeat per axis");
        c->add_option("--paths", o.paths, "number of Monte Carlo paths");
        c->add_option("--dt", o.dt, "Euler step for the strip pair");
        c->add_option("--substeps", o.substeps, "skeleton points for the time functional");
        c->add_option("--seed", o.seed, "master seed");
        c->add_option("--out", o.out, "output file, '-' for standard output");
        c->add_option("--format", o.format, "csv or json");
        c->add_option("--tol", o.tol, "relative quadrature tolerance");
    };
    auto* eval = app.add_subcommand("eval", "evaluate a kernel on a grid");
    auto* sim = app.add_subcommand("simulate", "draw exit samples");
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    auto* rep = app.add_subcommand("report", "summarise a verification report");
    for (auto* c : {eval, sim, ver}) add_common(c);
    ver->add_option("--suite", o.suite, "suite id (A1..A11, fast, all, or an alias)");
    rep->add_option("report", report_in, "verification report (JSON)")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    try {
        if (rep->parsed()) {
            std::ifstream f(report_in);
            if (!f) throw DomainError("cannot open " + report_in);
            json j;
            try {
                j = json::parse(f);
                return report(j, out);
            } catch (const json::exception& e) {
                throw DomainError(std::string("report: ") + e.what());
            }
        }
        RunManifest m;
        if (!manifest_path.empty()) {
            std::ifstream f(manifest_path);
            if (!f) throw DomainError("cannot open manifest " + manifest_path);
            json j;
            try {
                j = json::parse(f);
            } catch (const json::exception& e) {
                throw DomainError(std::string("manifest: ") + e.what());
            }
            m = manifest_from_json(j);
        }
        m.command = eval->parsed() ? "eval" : sim->parsed() ? "simulate" : "verify";
        if (o.alpha) m.params.alpha = *o.alpha;
        if (o.mass) m.params.mass = *o.mass;
        if (o.lambda) m.params.lambda = *o.lambda;
        if (o.geometry) m.geometry = *o.geometry;
        if (!start_spec.empty()) m.start = parse_list(start_spec);
        if (!grid_specs.empty()) {
            m.grid.clear();
            for (auto& s : grid_specs) m.grid.push_back(parse_axis(s));
        }
        if (o.paths) m.sim.n_paths = *o.paths;
        if (o.dt) m.sim.dt = *o.dt;
        if (o.substeps) m.sim.substeps = *o.substeps;
        if (o.seed) m.sim.seed = *o.seed;
        if (o.out) m.out_path = *o.out;
        if (o.format) m.format = *o.format;
        if (o.suite) m.suite = *o.suite;
        if (o.tol) m.tol = *o.tol;
        m.validate();
        if (m.command == "eval") {
            write_output(m.out_path, render(cmd_eval(m), m), out);
            return exit_ok;
        }
        if (m.command == "simulate") {
            auto res = cmd_simulate(m);
            write_output(m.out_path, render(res.table, m), out);
            double rate = double(res.horizon_failures) / double(m.sim.n_paths);
            if (rate > 1e-3) {
                err << "simulate: " << res.horizon_failures << " paths hit the step budget (" << rate * 100.0
                    << "%)\n";
                return exit_numerical;
            }
            return exit_ok;
        }
        verify::VerifyOptions vo;
        vo.seed = m.sim.seed;
        json crit = json::array();
        bool all = true;
        verify::run_suite(m.suite, vo, [&](const verify::CriterionResult& r) {
            err << verify::summary_line(r) << "\n";
            crit.push_back(verify::to_json(r));
            all = all && r.passed;
        });
        json h = header_json(m);
        h["suite"] = m.suite;
        h["criteria"] = crit;
        h["all_passed"] = all;
        write_output(m.out_path, h.dump(1) + "\n", out);
        return all ? exit_ok : exit_verify;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    }
}

} // namespace hitkit::cli
