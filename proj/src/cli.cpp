// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cchan/cli.hpp"

#include "cchan/resolvent.hpp"
#include "cchan/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cchan {
namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }

Tolerances scaled_tolerances(const CliOptions& opt) {
    if (!(opt.tol_scale > 0.0) || !std::isfinite(opt.tol_scale)) {
        parse_error("--tol-scale must be positive");
    }
    return Tolerances{}.scaled(opt.tol_scale);
}

double task_number(const json& task, const char* key, double fallback) {
    if (!task.contains(key)) return fallback;
    if (!task[key].is_number()) parse_error(std::string("task.") + key + " must be a number");
    return task[key].get<double>();
}

int task_int(const json& task, const char* key, int fallback) {
    if (!task.contains(key)) return fallback;
    if (!task[key].is_number_integer()) {
        parse_error(std::string("task.") + key + " must be an integer");
    }
    return task[key].get<int>();
}

cplx parse_complex(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    parse_error(field + " must be a number or a [re, im] pair");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes a CSV with 17 significant digits; returns the path written.
std::string write_csv(const CliOptions& opt, const std::string& name,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    const fs::path path = fs::path(opt.out_dir) / name;
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::ParseError, "cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    return path.string();
}

json base_report(const std::string& task, const json& inputs) {
    return {{"schema", kSchemaVersion},
            {"task", task},
            {"inputs", inputs},
            {"results", json::object()},
            {"warnings", json::array()}};
}

// Human-oriented reading of a scalar 2x2 unitary condition.
json describe_scalar(const Eigen::Matrix2cd& lambda) {
    const double tol = 1e-8;
    const BoundaryCondition bc(validate_u(Matrix(lambda), Tolerances{}.scaled(10.0)));
    json j;
    j["lambda"] = matrix_to_json(Matrix(lambda));
    if (const auto t = bc.to_transfer()) {
        const ScalarTransferNormalForm nf = scalar_normal_form(*t);
        Eigen::Matrix2d r = nf.real;
        double theta = nf.theta;
        if (r(0, 0) < 0.0) {
            r = -r;
            theta = std::fmod(theta + kPi, 2.0 * kPi);
        }
        const bool no_phase = std::abs(theta) < tol || std::abs(theta - 2.0 * kPi) < tol;
        if (no_phase && std::abs(r(0, 0) - 1.0) < tol && std::abs(r(1, 1) - 1.0) < tol &&
            std::abs(r(1, 0)) < tol) {
            j["kind"] = "delta";
            j["strength"] = r(0, 1);
        } else if (no_phase && std::abs(r(0, 0) - 1.0) < tol && std::abs(r(1, 1) - 1.0) < tol &&
                   std::abs(r(0, 1)) < tol) {
            j["kind"] = "delta_prime";
            j["strength"] = r(1, 0);
        } else {
            j["kind"] = "connecting";
            j["phase"] = theta;
            j["transfer_real"] = {{r(0, 0), r(0, 1)}, {r(1, 0), r(1, 1)}};
        }
        return j;
    }
    // Separated: a g + b g' = 0 on each side.
    auto side = [&](cplx u, double sign) {
        const double phi = std::arg(u);
        json s;
        if (std::abs(u + 1.0) < tol) {
            s["type"] = "dirichlet";
        } else if (std::abs(u - 1.0) < tol) {
            s["type"] = "neumann";
        } else {
            s["type"] = "robin";
        }
        s["a"] = std::sin(0.5 * phi);
        s["b"] = sign * std::cos(0.5 * phi);
        return s;
    };
    const json minus = side(lambda(0, 0), -1.0);
    const json plus = side(lambda(1, 1), 1.0);
    if (minus["type"] == "dirichlet" && plus["type"] == "dirichlet") {
        j["kind"] = "dirichlet";
    } else if (minus["type"] == "neumann" && plus["type"] == "neumann") {
        j["kind"] = "neumann";
    } else {
        j["kind"] = "separated";
    }
    j["minus"] = minus;
    j["plus"] = plus;
    return j;
}

json spectrum_to_json(const BandSpectrum& bs) {
    json bands = json::array();
    for (const Band& b : bs.bands) {
        bands.push_back({{"lo", b.lo}, {"hi", b.hi}, {"truncated", b.truncated}});
    }
    json eigs = json::array();
    for (const SpectralEigenvalue& e : bs.eigenvalues) {
        eigs.push_back({{"E", e.energy},
                        {"multiplicity", e.multiplicity},
                        {"infinite_degeneracy", e.infinite_degeneracy},
                        {"embedded", e.embedded},
                        {"at_band_edge", e.at_band_edge}});
    }
    const GapReport gr = gap_report(bs);
    json gaps = json::array();
    for (const Gap& g : gr.gaps) gaps.push_back({{"lo", g.lo}, {"hi", g.hi}, {"width", g.width()}});
    return {{"e_max", bs.e_max},
            {"bands", bands},
            {"gaps", gaps},
            {"gap_count", gr.count()},
            {"eigenvalues", eigs}};
}

void write_spectrum_csv(const CliOptions& opt, const BandSpectrum& bs, json& report) {
    if (opt.out_dir.empty()) return;
    std::vector<std::vector<double>> band_rows;
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        band_rows.push_back({static_cast<double>(i), bs.bands[i].lo, bs.bands[i].hi});
    }
    std::vector<std::vector<double>> gap_rows;
    const GapReport gr = gap_report(bs);
    for (std::size_t i = 0; i < gr.gaps.size(); ++i) {
        gap_rows.push_back({static_cast<double>(i), gr.gaps[i].lo, gr.gaps[i].hi,
                            gr.gaps[i].width()});
    }
    report["files"].push_back(write_csv(opt, "bands.csv", {"band_index", "E_lo", "E_hi"}, band_rows));
    report["files"].push_back(
        write_csv(opt, "gaps.csv", {"gap_index", "E_lo", "E_hi", "width"}, gap_rows));
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ParseError:
            return kExitParse;
        case ErrorKind::ShapeMismatch:
        case ErrorKind::NotSelfAdjoint:
        case ErrorKind::RankDeficient:
        case ErrorKind::NotUnitary:
        case ErrorKind::NotConnecting:
        case ErrorKind::DegenerateSubspace:
        case ErrorKind::InvalidSystem:
            return kExitInvalidBc;
        case ErrorKind::NotSimultaneouslyDiagonalizable:
        case ErrorKind::NotReducible:
            return kExitNotReducible;
        case ErrorKind::OnEssentialSpectrum:
        case ErrorKind::NotRegular:
        case ErrorKind::WindowTooCoarse:
            return kExitNumeric;
    }
    return kExitNumeric;
}

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) parse_error("cannot open config file " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        parse_error(path + ": " + e.what());
    }
}

namespace {

int parse_n(const json& config) {
    if (!config.is_object()) parse_error("config must be a JSON object");
    if (!config.contains("n") || !config["n"].is_number_integer()) {
        parse_error("config: \"n\" must be an integer");
    }
    const int n = config["n"].get<int>();
    if (n < 1 || n > kMaxChannels) parse_error("config: \"n\" must be in [1, 64]");
    return n;
}

const json& parse_points(const json& config) {
    if (!config.contains("points") || !config["points"].is_array() || config["points"].empty()) {
        parse_error("config: \"points\" must be a non-empty array");
    }
    const json& pts = config["points"];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string ctx = "points[" + std::to_string(i) + "]";
        if (!pts[i].is_object()) parse_error(ctx + " must be an object");
        if (!pts[i].contains("q") || !pts[i]["q"].is_number()) {
            parse_error(ctx + ": \"q\" must be a number");
        }
        if (!pts[i].contains("bc")) parse_error(ctx + ": missing \"bc\"");
    }
    return pts;
}

BoundaryCondition point_bc(const json& pt, int n, const Tolerances& tol, std::size_t index) {
    try {
        return bc_from_json(pt["bc"], n, tol);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError) {
            parse_error("points[" + std::to_string(index) + "]." + std::string(e.what()).substr(12));
        }
        throw;
    }
}

}  // namespace

SystemConfig parse_config(const json& config, const Tolerances& tol) {
    SystemConfig out;
    out.n = parse_n(config);
    const json& pts = parse_points(config);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.points.push_back({pts[i]["q"].get<double>(), point_bc(pts[i], out.n, tol, i)});
    }
    if (config.contains("period")) {
        if (!config["period"].is_number()) parse_error("config: \"period\" must be a number");
        out.period = config["period"].get<double>();
    }
    if (config.contains("task")) {
        if (!config["task"].is_object()) parse_error("config: \"task\" must be an object");
        out.task = config["task"];
    }
    return out;
}

json config_to_json(const SystemConfig& config) {
    json pts = json::array();
    for (const InteractionPoint& p : config.points) {
        pts.push_back({{"q", p.q}, {"bc", bc_to_json(p.bc)}});
    }
    json j = {{"n", config.n}, {"points", pts}, {"task", config.task}};
    if (config.period) j["period"] = *config.period;
    return j;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

RunReport cmd_validate(const json& config, const CliOptions& opt) {
    const Tolerances tol = scaled_tolerances(opt);
    const int n = parse_n(config);
    const json& pts = parse_points(config);

    RunReport rr;
    rr.report = base_report("validate", config);
    json verdicts = json::array();
    std::vector<InteractionPoint> valid_points;
    bool all_valid = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        json v = {{"index", i}, {"q", pts[i]["q"]}};
        try {
            const BoundaryCondition bc = point_bc(pts[i], n, tol, i);
            v["valid"] = true;
            v["connecting"] = bc.to_transfer().has_value();
            json cont = json::array();
            for (Continuity c : continuity_class(bc)) cont.push_back(std::string(to_string(c)));
            v["continuity"] = cont;
            v["lagrangian_defect"] = bc.subspace().lagrangian_defect();
            valid_points.push_back({pts[i]["q"].get<double>(), bc});
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ParseError) throw;
            all_valid = false;
            v["valid"] = false;
            v["error"] = std::string(to_string(e.kind()));
            v["message"] = e.what();
            if (e.index() >= 0) v["relation"] = e.index();
        }
        verdicts.push_back(std::move(v));
    }
    rr.report["results"]["points"] = verdicts;
    if (all_valid) {
        try {
            const ChannelSystem sys(n, valid_points);
            rr.report["results"]["system_valid"] = true;
            rr.report["results"]["min_gap"] = sys.min_gap();
        } catch (const Error& e) {
            all_valid = false;
            rr.report["results"]["system_valid"] = false;
            rr.report["results"]["system_error"] = e.what();
        }
    }
    rr.report["results"]["valid"] = all_valid;
    rr.exit_code = all_valid ? kExitOk : kExitInvalidBc;
    return rr;
}

RunReport cmd_convert(const json& config, const CliOptions& opt) {
    const SystemConfig cfg = parse_config(config, scaled_tolerances(opt));
    RunReport rr;
    rr.report = base_report("convert", config_to_json(cfg));
    json out = json::array();
    for (const InteractionPoint& p : cfg.points) {
        const BoundaryCondition ab(p.bc.to_ab());
        const BoundaryCondition u(p.bc.to_u());
        const BoundaryCondition lm(p.bc.to_lm());
        const auto tr = p.bc.to_transfer();
        double dist = std::max({subspace_distance(p.bc.subspace(), ab.subspace()),
                                subspace_distance(p.bc.subspace(), u.subspace()),
                                subspace_distance(p.bc.subspace(), lm.subspace())});
        json item = {{"q", p.q}, {"ab", bc_to_json(ab)}, {"u", bc_to_json(u)}, {"lm", bc_to_json(lm)}};
        if (tr) {
            const BoundaryCondition t(*tr);
            dist = std::max(dist, subspace_distance(p.bc.subspace(), t.subspace()));
            item["transfer"] = bc_to_json(t);
        } else {
            item["transfer"] = nullptr;
        }
        item["max_subspace_distance"] = dist;
        out.push_back(std::move(item));
    }
    rr.report["results"]["points"] = out;
    return rr;
}

RunReport cmd_reduce(const json& config, const CliOptions& opt) {
    const SystemConfig cfg = parse_config(config, scaled_tolerances(opt));
    const ChannelSystem sys(cfg.n, cfg.points);
    RunReport rr;
    rr.report = base_report("reduce", config_to_json(cfg));
    const ReducibilityVerdict v = is_reducible(sys);
    json& res = rr.report["results"];
    res["reducible"] = v.reducible;
    res["borderline"] = v.borderline;
    res["defect"] = v.defect;
    if (v.borderline) {
        rr.report["warnings"].push_back("commutation or normality defect near the threshold");
    }
    if (!v.reducible) {
        res["witness"] = v.witness;
        if (v.first) res["witness_blocks"].push_back(to_string(*v.first));
        if (v.second) res["witness_blocks"].push_back(to_string(*v.second));
        rr.exit_code = kExitNotReducible;
        return rr;
    }
    const ReductionResult red = reduce(sys, opt.seed);
    res["reduction"] = reduction_to_json(red);
    json scalar = json::array();
    for (std::size_t p = 0; p < red.blocks.size(); ++p) {
        for (std::size_t s = 0; s < red.blocks[p].size(); ++s) {
            json d = describe_scalar(red.blocks[p][s]);
            d["q"] = red.q[p];
            d["s"] = s;
            scalar.push_back(std::move(d));
        }
    }
    res["scalar_conditions"] = scalar;
    return rr;
}

RunReport cmd_spectrum(const json& config, const CliOptions& opt) {
    const SystemConfig cfg = parse_config(config, scaled_tolerances(opt));
    if (!cfg.period) parse_error("config: spectrum needs \"period\"");
    if (cfg.points.size() != 1) {
        throw Error(ErrorKind::InvalidSystem, "spectrum supports one interaction point per period");
    }
    const double e_max = opt.emax ? *opt.emax : task_number(cfg.task, "emax", 100.0);
    if (!(e_max > 0.0)) parse_error("E_max must be positive");
    const PeriodicSystem sys(*cfg.period, cfg.points.front().bc);

    RunReport rr;
    rr.report = base_report("spectrum", config_to_json(cfg));
    rr.report["results"]["e_max"] = e_max;
    BandSpectrum bs;
    try {
        bs = periodic_spectrum(sys, e_max, {}, opt.seed);
        rr.report["results"]["method"] = "reduction";
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotReducible) throw;
        rr.report["warnings"].push_back(std::string("not reducible, using the Floquet determinant: ") +
                                        e.what());
        const double e_lo = task_number(cfg.task, "e_lo", 0.0);
        const int pts = task_int(cfg.task, "grid_points", 2000);
        bs = floquet_band_scan(sys, e_lo, e_max, pts);
        rr.report["results"]["method"] = "floquet_scan";
    }
    rr.report["results"]["spectrum"] = spectrum_to_json(bs);
    write_spectrum_csv(opt, bs, rr.report);

    if (cfg.task.contains("floquet_dump") && !opt.out_dir.empty()) {
        const json& fd = cfg.task["floquet_dump"];
        const double k_max = task_number(fd, "k_max", std::sqrt(e_max));
        const int kp = task_int(fd, "k_points", 200);
        const int tp = task_int(fd, "theta_points", 64);
        if (kp < 2 || tp < 1 || !(k_max > 0.0)) parse_error("task.floquet_dump has invalid sizes");
        std::vector<std::vector<double>> rows;
        for (int i = 1; i <= kp; ++i) {
            const double k = k_max * i / kp;
            for (int j = 0; j < tp; ++j) {
                const double theta = 2.0 * kPi * j / tp;
                rows.push_back({k, theta, std::abs(floquet_determinant(sys, k, theta))});
            }
        }
        rr.report["files"].push_back(write_csv(opt, "floquet.csv", {"k", "theta", "abs_det"}, rows));
    }
    return rr;
}

RunReport cmd_resolvent(const json& config, const CliOptions& opt) {
    const SystemConfig cfg = parse_config(config, scaled_tolerances(opt));
    const ChannelSystem sys(cfg.n, cfg.points);
    const KreinSystem ks(sys);
    RunReport rr;
    rr.report = base_report("resolvent", config_to_json(cfg));
    json& res = rr.report["results"];

    std::optional<std::pair<double, double>> window;
    if (cfg.task.contains("window")) {
        const json& w = cfg.task["window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
            parse_error("task.window must be [E_lo, E_hi]");
        }
        window = {w[0].get<double>(), std::min(w[1].get<double>(), -1e-10)};
    }
    if (window) {
        json states = json::array();
        for (const BoundState& b : find_bound_states(ks, window->first, window->second)) {
            states.push_back({{"E", b.energy}, {"multiplicity", b.multiplicity}});
        }
        res["bound_states"] = states;
    }

    if (!cfg.task.contains("zeta")) {
        if (!window) parse_error("task needs \"zeta\" and/or \"window\"");
        return rr;
    }
    const cplx zeta = parse_complex(cfg.task["zeta"], "task.zeta");
    res["zeta"] = complex_to_json(zeta);
    try {
        const KreinCoefficients kc = krein_coefficients(ks, zeta);
        res["condition"] = kc.condition;
        if (kc.ill_conditioned) rr.report["warnings"].push_back("M Q - L is ill-conditioned");
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotRegular) throw;
        rr.exit_code = kExitNumeric;
        res["error"] = std::string(to_string(e.kind()));
        res["message"] = e.what();
        if (zeta.imag() == 0.0 && zeta.real() < 0.0) {
            const double e0 = zeta.real();
            const double lo = e0 - std::max(1.0, std::abs(e0));
            const double hi = std::min(-1e-10, e0 + 0.5 * std::abs(e0));
            try {
                double best = std::numeric_limits<double>::infinity();
                for (const BoundState& b : find_bound_states(ks, lo, hi)) {
                    if (std::abs(b.energy - e0) < std::abs(best - e0)) best = b.energy;
                }
                if (std::isfinite(best)) res["nearest_bound_state"] = best;
            } catch (const Error&) {
                // Estimate is best effort.
            }
        }
        return rr;
    }

    const json kernel = cfg.task.contains("kernel") ? cfg.task["kernel"] : json::object();
    const double lo = task_number(kernel, "lo", -2.0);
    const double hi = task_number(kernel, "hi", 2.0);
    const int pts = task_int(kernel, "points", 9);
    if (pts < 1 || !(hi >= lo)) parse_error("task.kernel has an invalid range");
    std::vector<double> xs;
    for (int i = 0; i < pts; ++i) xs.push_back(pts == 1 ? lo : lo + (hi - lo) * i / (pts - 1));

    json diagonal = json::array();
    std::vector<std::vector<double>> rows;
    for (double x : xs) {
        for (double y : xs) {
            bool on_point = false;
            for (double q : ks.points()) on_point = on_point || x == q || y == q;
            if (on_point) continue;
            const Matrix g = green_kernel(ks, zeta, x, y);
            if (x == y) diagonal.push_back({{"x", x}, {"G", matrix_to_json(g)}});
            for (Eigen::Index j = 0; j < g.rows(); ++j) {
                for (Eigen::Index k = 0; k < g.cols(); ++k) {
                    rows.push_back({x, y, static_cast<double>(j), static_cast<double>(k),
                                    g(j, k).real(), g(j, k).imag()});
                }
            }
        }
    }
    res["kernel_diagonal"] = diagonal;
    if (!opt.out_dir.empty()) {
        rr.report["files"].push_back(
            write_csv(opt, "kernel.csv", {"x", "y", "j", "k", "re_G", "im_G"}, rows));
    }
    return rr;
}

RunReport run_command(const std::string& name, const json& config, const CliOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rr;
    try {
        if (name == "validate") {
            rr = cmd_validate(config, opt);
        } else if (name == "convert") {
            rr = cmd_convert(config, opt);
        } else if (name == "reduce") {
            rr = cmd_reduce(config, opt);
        } else if (name == "spectrum") {
            rr = cmd_spectrum(config, opt);
        } else if (name == "resolvent") {
            rr = cmd_resolvent(config, opt);
        } else {
            parse_error("unknown command " + name);
        }
    } catch (const Error& e) {
        rr.exit_code = exit_code_for(e.kind());
        rr.report = base_report(name, config);
        rr.report["results"]["error"] = std::string(to_string(e.kind()));
        rr.report["results"]["message"] = e.what();
    } catch (const std::exception& e) {
        rr.exit_code = kExitNumeric;
        rr.report = base_report(name, config);
        rr.report["results"]["error"] = "Internal";
        rr.report["results"]["message"] = e.what();
    }
    const auto stop = std::chrono::steady_clock::now();
    rr.report["wall_time_s"] = std::chrono::duration<double>(stop - start).count();
    return rr;
}

}  // namespace cchan
