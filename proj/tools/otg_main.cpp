// Command-line front end: every subcommand prints a single JSON report to
// stdout (or --out) and exits 0 on success / certificate holds, 1 when a
// violation or non-deterministic-map finding is reported, 2 on usage errors,
// 3 on numerical failures (domain, inversion, convergence).

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "otg/cgeometry.hpp"
#include "otg/csv.hpp"
#include "otg/report.hpp"

namespace {

using namespace otg;

std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        out.push_back(std::stod(cell));
    }
    return out;
}

Vec parse_vec(const std::string& s) {
    const auto nums = parse_numbers(s);
    Vec v(nums.size());
    for (std::size_t i = 0; i < nums.size(); ++i) v(i) = nums[i];
    return v;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& parts, std::size_t from) {
    std::map<std::string, double> params;
    for (std::size_t i = from; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos) throw Error("expected key=value in potential parameters: " + parts[i]);
        params[parts[i].substr(0, eq)] = std::stod(parts[i].substr(eq + 1));
    }
    return params;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

// catalog:<name>[:k=v ...] | expr:<grammar string>
PotentialSpec parse_potential_arg(const std::string& arg) {
    if (arg.rfind("expr:", 0) == 0) return parse_potential(arg.substr(5));
    if (arg.rfind("catalog:", 0) == 0) {
        const auto parts = split(arg.substr(8), ':');
        return catalog(parts[0], parse_params(parts, 1));
    }
    // bare names resolve through the catalog
    return catalog(arg, {});
}

// psi:<potspec> | dalpha:<potspec>:alpha=<v> | log-cost[:n] | ecf-cost:<d> | raw:<expr>
CostSpec parse_cost_arg(const std::string& arg, int data_dims = 0) {
    if (arg.rfind("psi:", 0) == 0) return make_psi_cost(parse_potential_arg(arg.substr(4)));
    if (arg.rfind("dalpha:", 0) == 0) {
        const auto rest = arg.substr(7);
        const auto pos = rest.rfind(":alpha=");
        if (pos == std::string::npos) throw Error("dalpha cost needs ...:alpha=<value>");
        return make_dalpha_cost(parse_potential_arg(rest.substr(0, pos)), std::stod(rest.substr(pos + 7)));
    }
    if (arg == "log-cost") return make_log_cost(data_dims > 0 ? data_dims : 3);
    if (arg.rfind("log-cost:", 0) == 0) return make_log_cost(std::stoi(arg.substr(9)));
    if (arg.rfind("ecf-cost:", 0) == 0) return make_ecf_cost(std::stoi(arg.substr(9)));
    if (arg == "ecf-cost") return make_ecf_cost(data_dims > 0 ? data_dims : 2);
    if (arg.rfind("raw:", 0) == 0) return make_raw_cost(arg.substr(4));
    // convenience: bare catalog names mean the Psi-cost of that potential
    return make_psi_cost(parse_potential_arg(arg));
}

// box:lo1,lo2,...:hi1,hi2,...
Box parse_region(const std::string& arg) {
    if (arg.rfind("box:", 0) != 0) throw Error("region must be box:lo1,..:hi1,..");
    const auto parts = split(arg.substr(4), ':');
    if (parts.size() != 2) throw Error("region must be box:lo1,..:hi1,..");
    const auto lo = parse_numbers(parts[0]);
    const auto hi = parse_numbers(parts[1]);
    if (lo.size() != hi.size()) throw Error("region lo/hi dimension mismatch");
    Box box;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw Error("region: lo must be < hi in every coordinate");
        box.lohi.emplace_back(lo[i], hi[i]);
    }
    return box;
}

DiscreteMeasure measure_from_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    if (rows.empty()) throw Error("measure file '" + path + "' is empty");
    if (rows.front().size() < 2) throw Error("measure file needs coordinate columns plus a mass column");
    DiscreteMeasure m;
    const int d = static_cast<int>(rows.front().size()) - 1;
    for (const auto& r : rows) {
        Vec p(d);
        for (int i = 0; i < d; ++i) p(i) = r[i];
        m.points.push_back(std::move(p));
        m.masses.push_back(r[d]);
    }
    m.validate();
    return m;
}

std::vector<Vec> points_from_csv(const std::string& path) {
    const auto rows = read_csv_file(path);
    std::vector<Vec> pts;
    for (const auto& r : rows) {
        Vec p(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) p(i) = r[i];
        pts.push_back(std::move(p));
    }
    return pts;
}

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    double tol = 1e-9;
    double margin = 1e-6;
    bool no_timing = false;
    bool json = true;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "RNG seed");
    cmd->add_option("--out", c.out, "write the JSON report to this file instead of stdout");
    cmd->add_option("--tol", c.tol, "generic tolerance knob");
    cmd->add_option("--margin", c.margin, "domain margin");
    cmd->add_flag("--no-timing", c.no_timing, "omit timing from the report (byte-stable reruns)");
    cmd->add_flag("--json", c.json, "emit JSON (the only report format; accepted for symmetry)");
}

int emit(Report& rep, const Common& c, std::chrono::steady_clock::time_point t0, int exit_code) {
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rep.finish(!c.no_timing, ms);
    const std::string text = rep.json().dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out);
        if (!f) throw Error("cannot write '" + c.out + "'");
        f << text;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hessian-geometry toolkit for Psi-cost optimal transport regularity"};
    app.require_subcommand(1);

    // ---- catalog ----
    auto* cmd_catalog = app.add_subcommand("catalog", "list catalog potentials (or describe one)");
    std::string catalog_name;
    Common c_catalog;
    cmd_catalog->add_option("--name", catalog_name, "catalog entry to describe");
    add_common(cmd_catalog, c_catalog);

    // ---- curvature ----
    auto* cmd_curv = app.add_subcommand("curvature", "metric, Riemann and Kahler Sasaki curvature at a point");
    std::string curv_pot, curv_point;
    Common c_curv;
    cmd_curv->add_option("--potential", curv_pot, "catalog:<name>[:k=v] or expr:<string>")->required();
    cmd_curv->add_option("--point", curv_point, "comma-separated coordinates")->required();
    add_common(cmd_curv, c_curv);

    // ---- mtw-check ----
    auto* cmd_mtw = app.add_subcommand("mtw-check", "MTW tensor by all applicable routes, side by side");
    std::string mtw_pot, mtw_cost, mtw_z, mtw_x, mtw_y, mtw_xi, mtw_eta;
    Common c_mtw;
    cmd_mtw->add_option("--potential", mtw_pot, "potential target (uses z = x - y)");
    cmd_mtw->add_option("--cost", mtw_cost, "cost target (psi:..., dalpha:..., ecf-cost:d, raw:expr)");
    cmd_mtw->add_option("--z", mtw_z, "difference point for potential targets");
    cmd_mtw->add_option("--x", mtw_x, "first point for cost targets");
    cmd_mtw->add_option("--y", mtw_y, "second point for cost targets");
    cmd_mtw->add_option("--xi", mtw_xi, "vector")->required();
    cmd_mtw->add_option("--eta", mtw_eta, "covector")->required();
    add_common(cmd_mtw, c_mtw);

    // ---- certify ----
    auto* cmd_cert = app.add_subcommand("certify", "sampling-based MTW/NOAB/cross certification over a region");
    std::string cert_pot, cert_cost, cert_region, cert_mode = "mtw0";
    int cert_samples = 2000, cert_refine = 8;
    Common c_cert;
    cmd_cert->add_option("--potential", cert_pot, "potential target");
    cmd_cert->add_option("--cost", cert_cost, "cost target");
    cmd_cert->add_option("--region", cert_region, "box:lo1,..:hi1,..")->required();
    cmd_cert->add_option("--mode", cert_mode, "mtw0 | mtw-kappa | noab | cross");
    cmd_cert->add_option("--samples", cert_samples, "Latin-hypercube sample count");
    cmd_cert->add_option("--refine", cert_refine, "worst candidates refined by projected gradient descent");
    add_common(cmd_cert, c_cert);

    // ---- cexp ----
    auto* cmd_cexp = app.add_subcommand("cexp", "c-exponential map of a Psi-cost");
    std::string cexp_pot, cexp_x, cexp_p, cexp_guess;
    Common c_cexp;
    cmd_cexp->add_option("--potential", cexp_pot)->required();
    cmd_cexp->add_option("--x", cexp_x)->required();
    cmd_cexp->add_option("--p", cexp_p, "momentum covector")->required();
    cmd_cexp->add_option("--guess", cexp_guess, "inversion seed (defaults to the sampling-box centre)");
    add_common(cmd_cexp, c_cexp);

    // ---- csegment ----
    auto* cmd_cseg = app.add_subcommand("csegment", "c-segment between two targets relative to a base point");
    std::string cseg_pot, cseg_x, cseg_y0, cseg_y1;
    double cseg_t = 0.5;
    int cseg_samples = 0;
    Common c_cseg;
    cmd_cseg->add_option("--potential", cseg_pot)->required();
    cmd_cseg->add_option("--x", cseg_x)->required();
    cmd_cseg->add_option("--y0", cseg_y0)->required();
    cmd_cseg->add_option("--y1", cseg_y1)->required();
    cmd_cseg->add_option("--t", cseg_t, "parameter in [0,1]");
    cmd_cseg->add_option("--samples", cseg_samples, "emit the whole curve at k+1 evenly spaced parameters");
    add_common(cmd_cseg, c_cseg);

    // ---- cconvex ----
    auto* cmd_ccvx = app.add_subcommand("cconvex", "relative c-convexity check of finite sets");
    std::string ccvx_pot, ccvx_X, ccvx_Y, ccvx_mode = "Y";
    int ccvx_res = 32;
    bool ccvx_polytope = false;
    Common c_ccvx;
    cmd_ccvx->add_option("--potential", ccvx_pot)->required();
    cmd_ccvx->add_option("--X", ccvx_X, "CSV of base points")->required();
    cmd_ccvx->add_option("--Y", ccvx_Y, "CSV of the checked set")->required();
    cmd_ccvx->add_option("--resolution", ccvx_res, "chord samples per segment");
    cmd_ccvx->add_option("--mode", ccvx_mode, "Y (Y relative to X) or X (X relative to Y)");
    cmd_ccvx->add_flag("--polytope", ccvx_polytope, "treat Y rows as an ordered polygon boundary (2-D)");
    add_common(cmd_ccvx, c_ccvx);

    // ---- legendre ----
    auto* cmd_leg = app.add_subcommand("legendre", "Legendre dual value and gradient-map inversion");
    std::string leg_pot, leg_theta, leg_guess;
    Common c_leg;
    cmd_leg->add_option("--potential", leg_pot)->required();
    cmd_leg->add_option("--theta", leg_theta)->required();
    cmd_leg->add_option("--guess", leg_guess, "inversion seed (defaults to the sampling-box centre)");
    add_common(cmd_leg, c_leg);

    // ---- ot ----
    auto* cmd_ot = app.add_subcommand("ot", "discrete optimal transport between CSV measures");
    std::string ot_cost, ot_mu, ot_nu, ot_method = "exact", ot_plan_csv;
    double ot_eps = 1e-3;
    int ot_cyc_k = 4, ot_cyc_trials = 1000;
    bool ot_dense = false;
    Common c_ot;
    cmd_ot->add_option("--cost", ot_cost)->required();
    cmd_ot->add_option("--mu", ot_mu, "source measure CSV (coords then mass)")->required();
    cmd_ot->add_option("--nu", ot_nu, "target measure CSV")->required();
    cmd_ot->add_option("--method", ot_method, "exact | sinkhorn");
    cmd_ot->add_option("--epsilon", ot_eps, "sinkhorn regularization target");
    cmd_ot->add_option("--plan-csv", ot_plan_csv, "also write the plan as i,j,mass triplets");
    cmd_ot->add_option("--cyc-k", ot_cyc_k, "max cycle length for the monotonicity diagnostic");
    cmd_ot->add_option("--cyc-trials", ot_cyc_trials, "cycles sampled for the monotonicity diagnostic");
    cmd_ot->add_flag("--dense", ot_dense, "dense coupling in the JSON report");
    add_common(cmd_ot, c_ot);

    // ---- displace ----
    auto* cmd_disp = app.add_subcommand("displace", "displacement interpolation of a discrete map");
    std::string disp_map;
    double disp_t = 0.5;
    bool disp_flip = false;
    Common c_disp;
    cmd_disp->add_option("--map", disp_map, "CSV rows: source coords then image coords")->required();
    cmd_disp->add_option("--t", disp_t)->required();
    cmd_disp->add_flag("--flip-t", disp_flip, "use the t <-> 1-t convention");
    add_common(cmd_disp, c_disp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (cmd_catalog->parsed()) {
            Report rep("catalog", c_catalog.seed);
            if (!catalog_name.empty()) {
                const PotentialSpec spec = catalog(catalog_name, {});
                rep.inputs()["name"] = catalog_name;
                Json j;
                j["expression"] = spec.text();
                j["n"] = spec.n;
                j["domain"] = spec.domain.describe();
                Json box = Json::array();
                for (auto& [lo, hi] : spec.sample_box) box.push_back({lo, hi});
                j["sample_box"] = box;
                j["params"] = spec.params;
                rep.outputs()["potential"] = j;
            } else {
                rep.outputs()["names"] = catalog_names();
            }
            return emit(rep, c_catalog, t0, 0);
        }

        if (cmd_curv->parsed()) {
            const PotentialSpec spec = parse_potential_arg(curv_pot);
            const Vec pt = parse_vec(curv_point);
            Report rep("curvature", c_curv.seed);
            rep.inputs()["potential"] = spec.text();
            rep.inputs()["point"] = to_json(pt);
            const KahlerCurvPoint K = kahler_curvature(spec, std::span<const double>(pt.data(), pt.size()));
            rep.outputs()["g"] = to_json(K.metric.g);
            rep.outputs()["ginv"] = to_json(K.metric.ginv);
            rep.outputs()["gamma_lower"] = to_json(K.metric.gamma_lower);
            rep.outputs()["gamma_mixed"] = to_json(K.metric.gamma_mixed);
            rep.outputs()["riemann"] = to_json(K.hh);
            rep.outputs()["kahler_hh"] = to_json(K.hh);
            rep.outputs()["kahler_hv"] = to_json(K.hv);
            rep.outputs()["kahler_mixed"] = to_json(K.mixed);
            rep.outputs()["min_metric_eigenvalue"] = K.metric.min_eigenvalue;
            return emit(rep, c_curv, t0, 0);
        }

        if (cmd_mtw->parsed()) {
            Report rep("mtw-check", c_mtw.seed);
            const Vec xi = parse_vec(mtw_xi);
            const Vec eta = parse_vec(mtw_eta);
            rep.inputs()["xi"] = to_json(xi);
            rep.inputs()["eta"] = to_json(eta);
            rep.tolerance("route_agreement", 1e-8);
            Json routes = Json::object();
            if (!mtw_pot.empty()) {
                const PotentialSpec spec = parse_potential_arg(mtw_pot);
                const Vec z = parse_vec(mtw_z);
                rep.inputs()["potential"] = spec.text();
                rep.inputs()["z"] = to_json(z);
                routes["potential"] = mtw_potential(spec, z, xi, eta).value;
                routes["curvature"] = mtw_curvature(spec, z, xi, eta).value;
                const CostSpec cost = make_psi_cost(spec);
                routes["direct"] = mtw_direct(cost, z, Vec::Zero(z.size()), xi, eta).value;
                routes["cross_curvature"] = cross_curvature(spec, z, xi, eta);
            } else if (!mtw_cost.empty()) {
                const CostSpec cost = parse_cost_arg(mtw_cost);
                const Vec x = parse_vec(mtw_x);
                const Vec y = parse_vec(mtw_y);
                rep.inputs()["cost"] = cost.describe();
                rep.inputs()["x"] = to_json(x);
                rep.inputs()["y"] = to_json(y);
                routes["direct"] = mtw_direct(cost, x, y, xi, eta).value;
                if (cost.kind == CostSpec::Kind::PsiCost) {
                    const Vec z = x - y;
                    routes["potential"] = mtw_potential(cost.psi, z, xi, eta).value;
                    routes["curvature"] = mtw_curvature(cost.psi, z, xi, eta).value;
                }
                if (cost.kind == CostSpec::Kind::DAlpha) {
                    // diagnostic only: the curvature route evaluated at the
                    // interpolated point (1-a)/2 x + (1+a)/2 y. Empirically
                    // S_direct = -(1-a^2)/4 * A(mid) on the whole catalog.
                    const double a = cost.alpha;
                    const Vec mid = 0.5 * (1.0 - a) * x + 0.5 * (1.0 + a) * y;
                    routes["dalpha_scaled_curvature_diagnostic"] =
                        -0.25 * (1.0 - a * a) * cross_curvature(cost.psi, mid, xi, eta);
                }
            } else {
                throw Error("mtw-check needs --potential or --cost");
            }
            rep.outputs()["routes"] = routes;
            return emit(rep, c_mtw, t0, 0);
        }

        if (cmd_cert->parsed()) {
            Report rep("certify", c_cert.seed);
            const Box region = parse_region(cert_region);
            const CertMode mode = cert_mode_from_name(cert_mode);
            CertifyBudget budget{cert_samples, cert_refine};
            Certificate cert;
            if (!cert_pot.empty()) {
                const PotentialSpec spec = parse_potential_arg(cert_pot);
                rep.inputs()["potential"] = spec.text();
                cert = certify(spec, region, mode, budget, c_cert.seed, c_cert.margin);
            } else if (!cert_cost.empty()) {
                const CostSpec cost = parse_cost_arg(cert_cost);
                rep.inputs()["cost"] = cost.describe();
                cert = certify(cost, region, mode, budget, c_cert.seed, c_cert.margin);
            } else {
                throw Error("certify needs --potential or --cost");
            }
            rep.inputs()["region"] = cert_region;
            rep.inputs()["mode"] = cert_mode;
            rep.inputs()["samples"] = cert_samples;
            rep.tolerance("violation_threshold", -1e-9);
            rep.outputs()["certificate"] = to_json(cert);
            return emit(rep, c_cert, t0, cert.holds ? 0 : 1);
        }

        if (cmd_cexp->parsed()) {
            const PotentialSpec spec = parse_potential_arg(cexp_pot);
            const Vec x = parse_vec(cexp_x);
            const Vec p = parse_vec(cexp_p);
            Report rep("cexp", c_cexp.seed);
            rep.inputs()["potential"] = spec.text();
            rep.inputs()["x"] = to_json(x);
            rep.inputs()["p"] = to_json(p);
            const Vec y = cexp_guess.empty() ? c_exp(spec, x, p) : c_exp(spec, x, p, parse_vec(cexp_guess));
            rep.outputs()["y"] = to_json(y);
            rep.outputs()["momentum_roundtrip"] = to_json(c_momentum(spec, x, y));
            return emit(rep, c_cexp, t0, 0);
        }

        if (cmd_cseg->parsed()) {
            const PotentialSpec spec = parse_potential_arg(cseg_pot);
            const Vec x = parse_vec(cseg_x);
            const Vec y0 = parse_vec(cseg_y0);
            const Vec y1 = parse_vec(cseg_y1);
            Report rep("csegment", c_cseg.seed);
            rep.inputs()["potential"] = spec.text();
            rep.inputs()["x"] = to_json(x);
            rep.inputs()["y0"] = to_json(y0);
            rep.inputs()["y1"] = to_json(y1);
            if (cseg_samples > 0) {
                Json curve = Json::array();
                for (int k = 0; k <= cseg_samples; ++k) {
                    const double t = static_cast<double>(k) / cseg_samples;
                    curve.push_back({{"t", t}, {"y", to_json(c_segment(spec, x, y0, y1, t))}});
                }
                rep.outputs()["curve"] = curve;
            } else {
                rep.inputs()["t"] = cseg_t;
                rep.outputs()["y"] = to_json(c_segment(spec, x, y0, y1, cseg_t));
            }
            return emit(rep, c_cseg, t0, 0);
        }

        if (cmd_ccvx->parsed()) {
            const PotentialSpec spec = parse_potential_arg(ccvx_pot);
            Report rep("cconvex", c_ccvx.seed);
            rep.inputs()["potential"] = spec.text();
            rep.inputs()["X"] = ccvx_X;
            rep.inputs()["Y"] = ccvx_Y;
            rep.inputs()["resolution"] = ccvx_res;
            rep.inputs()["mode"] = ccvx_mode;
            PointSet Y;
            Y.points = points_from_csv(ccvx_Y);
            Y.polytope = ccvx_polytope;
            const auto X = points_from_csv(ccvx_X);
            const ConvexityMode mode =
                (ccvx_mode == "X") ? ConvexityMode::XRelativeToY : ConvexityMode::YRelativeToX;
            const ConvexityReport report = check_c_convexity(spec, X, Y, ccvx_res, mode);
            rep.tolerance("violation", 1e-9);
            Json j;
            j["holds"] = report.holds;
            j["mode"] = (mode == ConvexityMode::YRelativeToX) ? "Y-relative-to-X" : "X-relative-to-Y";
            j["worst_violation"] = report.worst_violation;
            j["segments_checked"] = report.segments_checked;
            j["witness"] = {{"base", to_json(report.witness.base)},
                            {"end0", to_json(report.witness.end0)},
                            {"end1", to_json(report.witness.end1)},
                            {"t", report.witness.t}};
            rep.outputs()["convexity"] = j;
            return emit(rep, c_ccvx, t0, report.holds ? 0 : 1);
        }

        if (cmd_leg->parsed()) {
            const PotentialSpec spec = parse_potential_arg(leg_pot);
            const Vec theta = parse_vec(leg_theta);
            Vec guess(spec.n);
            if (leg_guess.empty()) {
                for (int i = 0; i < spec.n; ++i)
                    guess(i) = 0.5 * (spec.sample_box[i].first + spec.sample_box[i].second);
            } else {
                guess = parse_vec(leg_guess);
            }
            Report rep("legendre", c_leg.seed);
            rep.inputs()["potential"] = spec.text();
            rep.inputs()["theta"] = to_json(theta);
            const Vec u = from_dual(spec, theta, guess);
            rep.outputs()["u"] = to_json(u);
            rep.outputs()["legendre_value"] = legendre_value(spec, theta, guess);
            rep.outputs()["roundtrip_theta"] = to_json(to_dual(spec, std::span<const double>(u.data(), u.size())));
            return emit(rep, c_leg, t0, 0);
        }

        if (cmd_ot->parsed()) {
            const DiscreteMeasure mu = measure_from_csv(ot_mu);
            const DiscreteMeasure nu = measure_from_csv(ot_nu);
            const CostSpec cost = parse_cost_arg(ot_cost, mu.dim());
            Report rep("ot", c_ot.seed);
            rep.inputs()["cost"] = cost.describe();
            rep.inputs()["mu"] = ot_mu;
            rep.inputs()["nu"] = ot_nu;
            rep.inputs()["method"] = ot_method;
            const Mat C = cost_matrix(cost, mu.points, nu.points);
            TransportPlan plan;
            if (ot_method == "exact") {
                plan = solve_exact(mu, nu, C);
                rep.outputs()["dual_potentials"] = to_json(dual_potentials(C, plan, mu.masses, nu.masses));
            } else if (ot_method == "sinkhorn") {
                rep.inputs()["epsilon"] = ot_eps;
                plan = solve_sinkhorn(mu, nu, C, ot_eps);
            } else {
                throw Error("unknown method '" + ot_method + "'");
            }
            rep.tolerance("map_tol", c_ot.tol);
            rep.outputs()["plan"] = to_json(plan, ot_dense);
            rep.outputs()["marginal_violation"] = plan.marginal_violation(mu.masses, nu.masses);
            const TransportMap map = extract_map(plan, c_ot.tol);
            rep.outputs()["map"] = to_json(map);
            const auto cyc = cyclical_monotonicity(plan, C, ot_cyc_k, ot_cyc_trials, c_ot.seed);
            rep.outputs()["cyclical_monotonicity"] = {{"trials", cyc.trials},
                                                      {"violations", cyc.violations},
                                                      {"worst_margin", cyc.worst_margin}};
            if (!ot_plan_csv.empty()) {
                std::ofstream f(ot_plan_csv);
                if (!f) throw Error("cannot write '" + ot_plan_csv + "'");
                f << "i,j,mass\n";
                f.precision(17);
                for (int i = 0; i < plan.rows; ++i)
                    for (int j = 0; j < plan.cols; ++j)
                        if (plan.coupling(i, j) > 1e-15) f << i << "," << j << "," << plan.coupling(i, j) << "\n";
            }
            const bool finding = !map.deterministic || cyc.violations > 0;
            return emit(rep, c_ot, t0, finding ? 1 : 0);
        }

        if (cmd_disp->parsed()) {
            const auto rows = read_csv_file(disp_map);
            if (rows.empty() || rows.front().size() % 2 != 0)
                throw Error("displace: map CSV needs an even number of columns (source coords then image coords)");
            const int d = static_cast<int>(rows.front().size()) / 2;
            std::vector<Vec> sources, images;
            for (const auto& r : rows) {
                Vec s(d), im(d);
                for (int i = 0; i < d; ++i) {
                    s(i) = r[i];
                    im(i) = r[d + i];
                }
                sources.push_back(s);
                images.push_back(im);
            }
            Report rep("displace", c_disp.seed);
            rep.inputs()["map"] = disp_map;
            rep.inputs()["t"] = disp_t;
            rep.inputs()["flip_t"] = disp_flip;
            const auto out = displacement(sources, images, disp_t, disp_flip);
            Json pts = Json::array();
            for (const auto& p : out) pts.push_back(to_json(p));
            rep.outputs()["points"] = pts;
            return emit(rep, c_disp, t0, 0);
        }

        std::cerr << "no subcommand\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << " (offset " << e.offset << ")\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
