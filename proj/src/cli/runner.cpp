#include "thinprobe/cli/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "thinprobe/errors.hpp"
#include "thinprobe/families.hpp"
#include "thinprobe/identity.hpp"
#include "thinprobe/probe.hpp"
#include "thinprobe/solver.hpp"

namespace thinprobe::cli {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 failed");
    }
    EVP_MD_CTX_free(ctx);
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
}

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json cjson(cplx z) { return {{"re", num(z.real())}, {"im", num(z.imag())}, {"abs", num(std::abs(z))}}; }

std::string g17(double x) { return fmt::format("{:.17g}", x); }

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Context {
    const Scenario& sc;
    const RunOptions& opt;
    std::uint64_t seed;
    std::vector<SummaryRow> rows;
    std::map<std::string, std::string> files;

    void put_json(const std::string& name, const json& j) {
        if (sc.output.wants("json")) files[name] = j.dump(2) + "\n";
    }
    void put_csv(const std::string& name, const std::string& text) {
        if (sc.output.wants("csv")) files[name] = text;
    }
    void row(std::string name, double predicted, double measured, double tol, const std::string& verdict,
             std::string note = "") {
        rows.push_back({std::move(name), predicted, measured, tol, verdict, std::move(note)});
    }
    void check(std::string name, double predicted, double measured, double tol, bool ok, std::string note = "") {
        row(std::move(name), predicted, measured, tol, ok ? "PASS" : "FAIL", std::move(note));
    }
};

ProbeSubdomain make_sub(const FamilySpec& fs, double eps) {
    const Curve curve = build_curve(fs.curve, fs.curve_params, eps, fs.L, fs.dim);
    return extract_probe_subdomain(curve, fs.b1, eps, fs.l, fs.dim, fs.kind);
}

// Smooth interior bump, 1 at the subdomain center and 0 on its boundary.
SpaceTimeFn interior_bump(const ProbeSubdomain& sub) {
    return [sub](const Vec3& x, double) {
        const double a = x[sub.along_axis()] / sub.extent(), e = sub.eta_of(x);
        double b = std::pow(std::sin(kPi * a), 2) * std::pow(std::sin(kPi * e), 2);
        if (sub.dim == 3) b *= std::pow(std::sin(kPi * x[sub.cross_axis()] / sub.eps), 2);
        return b;
    };
}

json sweep_json(const SweepResult& r) {
    json rows = json::array();
    for (const auto& w : r.rows)
        rows.push_back({{"eps", w.eps}, {"s", w.s}, {"re", w.re}, {"im", w.im}, {"abs", w.abs},
                        {"slope_so_far", num(w.slope_so_far)}});
    return {{"term", r.name},         {"predicted_exponent", num(r.predicted)},
            {"slope", num(r.fit.slope)}, {"intercept", num(r.fit.intercept)},
            {"r2", num(r.fit.r2)},     {"tolerance", r.tolerance},
            {"degenerate", r.degenerate}, {"pass", r.pass},
            {"verdict", r.verdict},    {"rows", rows}};
}

json identity_json(const IdentityReport& r) {
    json terms = json::object();
    for (const auto& [k, v] : r.terms) terms[k] = cjson(v);
    return {{"dim", r.dim},
            {"kind", kind_name(r.kind)},
            {"T1", r.T1},
            {"T2", r.T2},
            {"counts", r.counts},
            {"terms", terms},
            {"residual", cjson(r.residual)},
            {"lateral_defect", cjson(r.lateral_defect)},
            {"max_term", r.max_term},
            {"relative_residual", r.relative_residual},
            {"relative_re", r.relative_re},
            {"relative_im", r.relative_im},
            {"relative_with_lateral", r.relative_with_lateral},
            {"relative_ablated", num(r.relative_ablated)}};
}

json admissibility_json(const AdmissibilityReport& a) {
    json c = json::array();
    for (const auto& x : a.conditions)
        c.push_back({{"name", x.name},
                     {"alpha", x.alpha},
                     {"declared_C", x.declared_C},
                     {"worst_quotient", x.worst_quotient},
                     {"worst_slot", x.worst_slot},
                     {"sup_abs", x.sup_abs},
                     {"pass", x.pass}});
    return {{"pass", a.pass}, {"conditions", c}};
}

// ---------------------------------------------------------------- selfcheck

void exp_selfcheck(Context& cx) {
    std::mt19937_64 rng(cx.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst_res = 0.0, worst_rr = 0.0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
        const int dim = 2 + i % 2;
        const double s = 0.5 + 19.5 * U(rng), lam = 0.1 + 4.9 * U(rng), mu = 0.2 + 4.8 * U(rng);
        std::vector<double> d(dim);
        double nd = 0;
        for (auto& c : d) {
            c = -(0.1 + U(rng));
            nd += c * c;
        }
        for (auto& c : d) c /= std::sqrt(nd);
        const CgoParams p = make_cgo(s, lam, mu, d);
        Vec3 x = Vec3::Zero();
        for (int k = 0; k < dim; ++k) x[k] = 2 * U(rng) - 1;
        const double t = U(rng);
        const cplx u0 = eval_cgo(p, x, t).u0;
        worst_res = std::max(worst_res, std::abs(pde_residual(p, x, t, ResidualMode::analytic)) / std::abs(u0));
        worst_rr = std::max(worst_rr, std::abs(p.rho_dot_rho() + lam));
    }
    cx.check("selfcheck: cgo residual / |u0|", 0.0, worst_res, 1e-12, worst_res <= 1e-12);
    cx.check("selfcheck: |rho.rho + lambda|", 0.0, worst_rr, 1e-12, worst_rr <= 1e-12);

    const Curve curve = build_curve("straight", {}, 0.25, 1.0, 2);
    const ProbeSubdomain sub = extract_probe_subdomain(curve, 0.0, 0.25, 1.0, 2);
    const ScalarField f([](const JetPoint& p) { return p.x[0] * p.x[0] * p.x[1] + p.t * p.x[0] - p.x[1] * p.x[1]; });
    const ScalarField g([](const JetPoint& p) { return p.x[0] * p.x[1] * p.x[1] + 2.0 * p.t + p.x[0]; });
    const GreenSides gs = green_sides(as_field(f, 2), as_field(g, 2), sub, 0.0, 0.01, QuadRule::make({33, 33, 5}));
    cx.check("selfcheck: green residual (polynomial)", 0.0, gs.relative(), 1e-10, gs.relative() <= 1e-10);

    double worst_orth = 0.0;
    const std::vector<std::pair<std::string, std::vector<double>>> curves{
        {"straight", {}}, {"linear-tilt", {0.05}}, {"sine", {0.8, 3.0}}};
    for (int dim : {2, 3})
        for (const auto& [id, params] : curves) {
            const Curve c = build_curve(id, params, 0.1, 1.0, dim);
            for (double b1 : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
                const Frame fr = rotation_frame(c, b1, dim);
                const Eigen::MatrixXd R = fr.rotation_matrix();
                const double e = (R.transpose() * R - Eigen::MatrixXd::Identity(dim, dim)).norm() +
                                 std::abs(R.determinant() - 1.0);
                worst_orth = std::max(worst_orth, e);
            }
        }
    cx.check("selfcheck: frame orthogonality", 0.0, worst_orth, 1e-12, worst_orth <= 1e-12);

    json j = {{"cgo_draws", draws},
              {"cgo_worst_relative_residual", worst_res},
              {"cgo_worst_rho_rho_defect", worst_rr},
              {"green_relative_residual", gs.relative()},
              {"frame_worst_orthogonality_defect", worst_orth}};
    cx.put_json("selfcheck.json", j);
}

// ---------------------------------------------------------------- identity

IdentityReport identity_at(const FamilySpec& fs, double eps) {
    const TermContext c = make_family(fs)(eps);
    if (fs.dim == 2) return eval_terms_2d(c.pair, c.cgo, c.pair.sub, c.T1, c.T2, c.rule);
    return eval_terms_3d(c.pair, c.cgo, c.pair.sub, c.T1, c.T2, c.rule, fs.kind);
}

void exp_identity(Context& cx, FamilySpec fs, double eps) {
    fs.counts = QuadRule::make(fs.counts).refined(cx.opt.quad_refine).counts;
    const double tol = cx.sc.experiment.tolerance > 0 ? cx.sc.experiment.tolerance : (fs.dim == 2 ? 1e-6 : 1e-5);
    const IdentityReport r = identity_at(fs, eps);
    const std::string label = fs.dim == 2 ? "2d" : kind_name(fs.kind);
    cx.check("identity " + label + ": relative residual", 0.0, r.relative_residual, tol, r.relative_residual <= tol);
    cx.row("identity " + label + ": lateral defect / max term", kNaN,
           std::abs(r.lateral_defect) / std::max(r.max_term, 1e-300), kNaN, "INFO");
    json j = identity_json(r);
    j["eps"] = eps;
    if (fs.dim == 3 && fs.kind == DomainKind::slab) {
        const double inflation = r.relative_ablated / std::max(r.relative_residual, 1e-300);
        cx.check("identity slab: ablation inflation", kNaN, inflation, 1e3, inflation >= 1e3, "drop I7 + I8");
    }
    // Convergence on coarser rules below the requested one.
    const int levels = cx.sc.experiment.refine_levels;
    if (levels > 0) {
        std::vector<double> res;
        json conv = json::array();
        for (int k = levels; k >= 1; --k) {
            FamilySpec coarse = fs;
            for (auto& n : coarse.counts) {
                n = (n - 1) / (1 << k) + 1;
                if (n < 3 || n % 2 == 0) throw ConfigError("experiment.refine_levels: counts too coarse to halve");
            }
            const IdentityReport rc = identity_at(coarse, eps);
            res.push_back(rc.relative_residual);
            conv.push_back({{"counts", coarse.counts}, {"relative_residual", rc.relative_residual}});
        }
        res.push_back(r.relative_residual);
        conv.push_back({{"counts", fs.counts}, {"relative_residual", r.relative_residual}});
        double worst = std::numeric_limits<double>::infinity();
        for (size_t i = 1; i < res.size(); ++i) worst = std::min(worst, res[i - 1] / res[i]);
        cx.check("identity " + label + ": residual drop per doubling", 8.0, worst, 8.0, worst >= 8.0);
        j["convergence"] = conv;
    }
    cx.put_json("identity.json", j);
    std::string csv = "term,re,im,abs\n";
    for (const auto& [k, v] : r.terms) csv += k + "," + g17(v.real()) + "," + g17(v.imag()) + "," + g17(std::abs(v)) + "\n";
    csv += "residual," + g17(r.residual.real()) + "," + g17(r.residual.imag()) + "," + g17(std::abs(r.residual)) + "\n";
    cx.put_csv("identity.csv", csv);
}

// ---------------------------------------------------------------- sweep

void exp_sweep(Context& cx, FamilySpec fs, const std::vector<double>& eps_list) {
    fs.counts = QuadRule::make(fs.counts).refined(cx.opt.quad_refine).counts;
    const double tol = cx.sc.experiment.tolerance > 0 ? cx.sc.experiment.tolerance : 0.15;
    const TermFamily fam = make_family(fs);
    std::vector<SweepResult> sweeps;
    json js = json::array();
    bool lower_bound_done = false;
    for (const auto& term : cx.sc.experiment.terms) {
        SweepResult r = term_scaling_sweep(fam, term, eps_list, tol);
        const bool reported = r.verdict.rfind("reported", 0) == 0;
        const std::string verdict = reported ? "INFO" : (r.pass ? "PASS" : "FAIL");
        cx.row("sweep " + term + ": slope", r.predicted, r.fit.slope, tol, verdict, r.degenerate ? "degenerate" : "");
        js.push_back(sweep_json(r));
        sweeps.push_back(std::move(r));
        if ((term == "I43" || term == "I43_ratio") && !lower_bound_done) {
            lower_bound_done = true;
            const LowerBoundReport lb = lower_bound_check_I43(fam, eps_list);
            const std::string v = lb.status == "pass" ? "PASS" : (lb.status == "fail" ? "FAIL" : "INFO");
            cx.row("sweep I43: lower-bound ratio fraction", kNaN, lb.worst_fraction, 0.5, v, lb.status);
            js.push_back({{"term", "I43_lower_bound"},
                          {"status", lb.status},
                          {"eps", lb.eps},
                          {"ratios", lb.ratios},
                          {"reference", lb.reference},
                          {"worst_fraction", lb.worst_fraction}});
        }
    }
    cx.put_json("sweep.json", {{"family", fs.name}, {"window_exponent", fs.window_exponent}, {"sweeps", js}});
    cx.put_csv("sweep.csv", sweep_csv(sweeps));
}

// ---------------------------------------------------------------- solve

ConfigTriplet solver_config(const Scenario& sc, const ProbeSubdomain& sub) {
    const FamilySpec& fs = sc.family;
    const StateMap H = make_state_map(fs.H, fs.H_params, fs.H_holder, true);
    const FluxMap F = make_flux(fs.F, fs.F_params, fs.dim, fs.F_holder);
    const SourceMap f = make_source(sc.f, sc.f_params, fs.settings.source_holder);
    return in_frame(make_config(H, F, f, fs.mu), sub.frame);
}

json study_json(const ConvergenceStudy& st) {
    return {{"n", st.n}, {"nt", st.nt}, {"h", st.h}, {"errors", st.errors}, {"orders", st.orders}};
}

void exp_solve(Context& cx, double eps, const std::vector<double>& eps_list) {
    const Scenario& sc = cx.sc;
    const SolverBlock& sb = sc.solver;
    if (sc.family.dim != 2) throw ConfigError("solver: only 2D scenarios are supported");
    const ProbeSubdomain sub = make_sub(sc.family, eps);
    const double T = sb.T > 0 ? sb.T : eps * eps / 128.0;
    json j = {{"mode", sb.mode}, {"eps", eps}, {"T", T}};

    if (sb.mode == "mms") {
        const ConfigTriplet cfg = solver_config(sc, sub);
        const ScalarField exact = make_base_field(sb.exact, {}, sub);
        const ConvergenceStudy st = mms_convergence(cfg, sub, exact, T, sb.n, sb.nt, sb.levels);
        const double tol = sc.experiment.tolerance > 0 ? sc.experiment.tolerance : 1.8;
        cx.check("solve mms " + sc.family.H + "/" + sc.family.F + "/" + sc.f + ": min order", 2.0, st.min_order(), tol,
                 st.min_order() >= tol);
        j["study"] = study_json(st);
    } else if (sb.mode == "heat") {
        if (sc.family.curve != "straight") throw ConfigError("solver.mode = heat needs a straight curve");
        ConfigTriplet cfg = make_config(make_state_map("identity", {}, {0.5, 10.0}), make_flux("zero", {}, 2, {0.5, 10.0}),
                                        make_source("zero", {}, {0.5, 10.0}), sc.family.mu);
        cfg = in_frame(cfg, sub.frame);
        const ScalarField exact = make_base_field("heat", {sc.family.mu}, sub);
        const ConvergenceStudy st = mms_convergence(cfg, sub, exact, T, sb.n, sb.nt, sb.levels);
        std::vector<double> ratios;
        for (size_t k = 0; k < st.n.size(); ++k) ratios.push_back(st.errors[k] / (st.h[k] * st.h[k] + T / st.nt[k]));
        double growth = 0.0;
        for (double r : ratios) growth = std::max(growth, r / ratios.front());
        const double tol = sc.experiment.tolerance > 0 ? sc.experiment.tolerance : 1.1;
        cx.check("solve heat: error / (h^2 + dt) growth", 1.0, growth, tol, growth <= tol);
        j["study"] = study_json(st);
        j["ratios"] = ratios;
    } else if (sb.mode == "constant") {
        ConfigTriplet cfg = solver_config(sc, sub);
        const double c = sb.constant;
        const ScalarField exact([c](const JetPoint&) { return Jet(c); });
        cfg.f.forcing = mms_forcing(exact, cfg);
        const Grid2D grid = Grid2D::make(sub, sb.n, sb.n, sb.nt, T);
        const SpaceTimeField u =
            solve_forward(cfg, grid, [c](const Vec3&, double) { return c; }, [c](const Vec3&) { return c; });
        double dev = 0.0;
        for (double v : u.values) dev = std::max(dev, std::abs(v - c));
        const double tol = sc.experiment.tolerance > 0 ? sc.experiment.tolerance : 1e-12;
        cx.check("solve constant state: max deviation", 0.0, dev, tol, dev <= tol);
        j["max_deviation"] = dev;
        if (cx.opt.dump_fields) cx.files["field.csv"] = field_csv(u);
    } else {  // pair
        json runs = json::array();
        std::vector<double> es, mism;
        const std::vector<double>& list = eps_list;
        for (double e : list) {
            const ProbeSubdomain s = make_sub(sc.family, e);
            const double Te = sb.T > 0 ? sb.T : e * e / 128.0;
            ConfigTriplet cfg1 = solver_config(sc, s);
            const ScalarField exact = make_base_field(sb.exact, {}, s);
            cfg1.f.forcing = mms_forcing(exact, cfg1);
            ConfigTriplet cfg2 = cfg1;
            if (sb.perturbation == "source") {
                const SpaceTimeFn base = cfg1.f.forcing, bump = interior_bump(s);
                const double amp = sb.delta * e * e;
                cfg2.f.forcing = [base, bump, amp](const Vec3& x, double t) { return base(x, t) + amp * bump(x, t); };
            } else if (sb.perturbation == "flux") {
                std::vector<double> p = sc.family.F_params;
                for (auto& v : p) v *= 1.0 + sb.delta;
                cfg2.F = rotate_flux(make_flux(sc.family.F, p, 2, sc.family.F_holder), s.frame);
            }
            const Grid2D grid = Grid2D::make(s, sb.n, sb.n, sb.nt, Te);
            const PairSolve ps = solve_pair_with_shared_dirichlet(
                cfg1, cfg2, grid, [exact](const Vec3& x, double t) { return exact.value(x, t); },
                [exact](const Vec3& x) { return exact.value(x, 0.0); });
            json pieces = json::array();
            for (const auto& m : ps.mismatch)
                pieces.push_back({{"piece", piece_name(m.piece)}, {"u_sup", m.u_sup}, {"flux_sup", m.flux_sup}});
            runs.push_back({{"eps", e}, {"T", Te}, {"max_u_mismatch", ps.max_u_mismatch},
                            {"max_flux_mismatch", ps.max_flux_mismatch}, {"pieces", pieces}});
            es.push_back(e);
            mism.push_back(ps.max_flux_mismatch);
            cx.row(fmt::format("solve pair eps={}: flux mismatch", e), kNaN, ps.max_flux_mismatch, kNaN, "INFO",
                   sb.perturbation);
            if (cx.opt.dump_fields && e == list.front()) {
                cx.files["field1.csv"] = field_csv(ps.field1);
                cx.files["field2.csv"] = field_csv(ps.field2);
            }
        }
        j["runs"] = runs;
        if (es.size() >= 3) {
            try {
                const SlopeFit f = fit_slope(es, mism);
                cx.row("solve pair: mismatch decay slope", kNaN, f.slope, kNaN, "INFO");
                j["mismatch_slope"] = f.slope;
            } catch (const InsufficientPointsError&) {
                j["mismatch_slope"] = nullptr;
            }
        }
    }
    cx.put_json("solve.json", j);
}

// ---------------------------------------------------------------- theorem-check

void exp_theorem(Context& cx, const FamilySpec& fs, const std::vector<double>& eps_list) {
    const ExponentTable ex = make_exponent_table(fs.l, fs.alphas, fs.product);
    const std::string pc = fs.probe_case == ProbeCase::a ? "a" : "b";
    TheoremCheckOptions o;
    o.samples = cx.sc.experiment.samples;
    o.seed = cx.seed;
    json table = {{"l", ex.l},
                  {"p", ex.p},
                  {"tau_theorem", num(ex.tau_theorem)},
                  {"tau_proof", num(ex.tau_proof)},
                  {"tau1_theorem", ex.tau1_theorem},
                  {"tau1_proof", ex.tau1_proof},
                  {"beta_case_a", num(ex.beta_case_a)},
                  {"beta_case_b", ex.beta_case_b},
                  {"products_differ", ex.products_differ},
                  {"tau1_differ", ex.tau1_differ}};
    try {
        const TheoremCheck tc = theorem_bound_check(make_family(fs), fs.probe_case, ex, eps_list, o);
        cx.check("theorem case " + pc + ": gap <= C eps^tau", tc.tau, tc.fit.slope, kNaN, tc.bound_holds);
        cx.row("theorem case " + pc + ": slope >= tau - 0.2", tc.tau - 0.2, tc.fit.slope, 0.2,
               "INFO", tc.slope_ok ? "holds" : "does not hold");
        cx.put_json("verdict.json", {{"case", pc},
                                     {"tau", tc.tau},
                                     {"beta", tc.beta},
                                     {"eps_list", tc.eps},
                                     {"slopes", {tc.fit.slope}},
                                     {"bound_holds", tc.bound_holds}});
        json hyp = json::array();
        for (size_t i = 0; i < tc.hypotheses.size(); ++i) {
            const HypothesisReport& h = tc.hypotheses[i];
            json reg = json::array();
            for (const auto& c : h.regularity)
                reg.push_back({{"name", c.name}, {"worst_quotient", c.worst_quotient}, {"declared_C", c.declared_C},
                               {"pass", c.pass}});
            hyp.push_back({{"eps", tc.eps[i]},
                           {"cfg_u", admissibility_json(h.cfg_u)},
                           {"cfg_v", admissibility_json(h.cfg_v)},
                           {"regularity", reg},
                           {"lateral_w", h.lateral_w},
                           {"lateral_dnw", h.lateral_dnw},
                           {"lateral_balance", h.lateral_balance},
                           {"h_sup", h.h_sup},
                           {"pass", h.pass}});
        }
        cx.put_json("theorem.json", {{"family", fs.name},
                                     {"exponents", table},
                                     {"C", tc.C},
                                     {"eps", tc.eps},
                                     {"gaps", tc.gaps},
                                     {"bounds", tc.bounds},
                                     {"slope", tc.fit.slope},
                                     {"r2", tc.fit.r2},
                                     {"hypotheses", hyp}});
        std::string csv = "eps,gap,bound\n";
        for (size_t i = 0; i < tc.eps.size(); ++i)
            csv += g17(tc.eps[i]) + "," + g17(tc.gaps[i]) + "," + g17(tc.bounds[i]) + "\n";
        cx.put_csv("theorem.csv", csv);
    } catch (const HypothesisError& e) {
        cx.check("theorem case " + pc + ": hypotheses", kNaN, kNaN, kNaN, false, e.what());
        cx.put_json("verdict.json", {{"case", pc},
                                     {"tau", num(fs.probe_case == ProbeCase::a ? ex.tau() : ex.tau1_theorem)},
                                     {"beta", num(fs.probe_case == ProbeCase::a ? ex.beta_case_a : ex.beta_case_b)},
                                     {"eps_list", eps_list},
                                     {"slopes", json::array()},
                                     {"bound_holds", false},
                                     {"aborted", e.what()}});
    }
}

// ---------------------------------------------------------------- rdc

void exp_rdc(Context& cx, const std::vector<double>& eps_list) {
    const Scenario& sc = cx.sc;
    const int dim = sc.family.dim;
    const RdcBlock& rb = sc.rdc;
    if (static_cast<int>(rb.c0.size()) != dim || static_cast<int>(rb.A.size()) != dim * dim)
        throw ConfigError("rdc: c0 needs dim entries and A needs dim*dim entries");
    VelocityField vel;
    vel.dim = dim;
    for (int i = 0; i < dim; ++i) {
        vel.c0[i] = rb.c0[i];
        for (int k = 0; k < dim; ++k) vel.A(i, k) = rb.A[i * dim + k];
    }
    const SourceMap R = make_source(rb.reaction, rb.reaction_params, sc.family.settings.source_holder);
    const ConfigTriplet cfg = rdc_to_balance(vel, R, sc.family.mu, sc.family.F_holder);
    const AdmissibilityReport adm = validate_admissibility(cfg, sc.experiment.samples, cx.seed);
    cx.check("rdc: admissibility", kNaN, kNaN, kNaN, adm.pass);

    json gaps = json::array();
    std::vector<double> es, gs;
    double worst = 0.0;
    for (double e : eps_list) {
        const ProbeSubdomain sub = make_sub(sc.family, e);
        ConfigTriplet c2 = cfg;
        const SpaceTimeFn bump = interior_bump(sub);
        const double amp = rb.bump_amplitude * e * e;
        c2.f.forcing = [bump, amp](const Vec3& x, double t) { return amp * bump(x, t); };
        const Vec3 x0 = sub.center();
        const double gap = source_gap(cfg, c2, x0, 0.0, 0.5, Vec3::Zero());
        const double expect = amp * bump(x0, 0.0);
        worst = std::max(worst, std::abs(gap - expect) / std::max(expect, 1e-300));
        gaps.push_back({{"eps", e}, {"gap", gap}, {"expected", expect}});
        es.push_back(e);
        gs.push_back(gap);
    }
    cx.check("rdc: source gap vs eps^2 bump", 0.0, worst, 1e-12, worst <= 1e-12);
    json j = {{"flux", cfg.F.base.id}, {"admissibility", admissibility_json(adm)}, {"gaps", gaps}};
    if (es.size() >= 3) {
        const SlopeFit f = fit_slope(es, gs);
        cx.check("rdc: gap slope", 2.0, f.slope, 1e-6, std::abs(f.slope - 2.0) <= 1e-6);
        j["slope"] = f.slope;
    }
    cx.put_json("rdc.json", j);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
}

}  // namespace

Scenario selfcheck_scenario() {
    Scenario sc;
    sc.name = "selfcheck";
    sc.experiment.kind = "selfcheck";
    sc.output.dir = "runs/selfcheck";
    return sc;
}

RunResult run_scenario(Scenario sc, const RunOptions& opt) {
    RunResult res;
    const std::string started = utc_now();
    res.out_dir = opt.out_dir.empty() ? sc.output.dir : opt.out_dir;
    std::vector<double> eps_list = sc.eps_list;
    double eps = sc.eps;
    if (!opt.eps_override.empty()) {
        eps_list = opt.eps_override;
        eps = opt.eps_override.front();
    }
    Context cx{sc, opt, opt.seed.value_or(sc.seed), {}, {}};
    try {
        const std::string& kind = sc.experiment.kind;
        if (kind == "selfcheck")
            exp_selfcheck(cx);
        else if (kind == "identity")
            exp_identity(cx, sc.family, eps);
        else if (kind == "sweep")
            exp_sweep(cx, sc.family, eps_list);
        else if (kind == "solve")
            exp_solve(cx, eps, eps_list);
        else if (kind == "theorem-check")
            exp_theorem(cx, sc.family, eps_list);
        else if (kind == "rdc")
            exp_rdc(cx, eps_list);
        else
            throw ConfigError("unknown experiment kind '" + kind + "'");
        res.exit_code = 0;
        for (const auto& r : cx.rows)
            if (r.verdict == "FAIL") res.exit_code = 2;
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.error = e.what();
    }
    res.rows = cx.rows;

    json rows = json::array();
    for (const auto& r : res.rows) rows.push_back(row_to_json(r));
    json summary = {{"scenario", sc.name}, {"experiment", sc.experiment.kind}, {"rows", rows},
                    {"pass", res.exit_code == 0}};
    if (!res.error.empty()) summary["error"] = res.error;
    cx.files["summary.json"] = summary.dump(2) + "\n";
    res.files = cx.files;

    namespace fs = std::filesystem;
    try {
        fs::create_directories(res.out_dir);
        json files = json::object();
        for (const auto& [name, text] : res.files) {
            write_text(fs::path(res.out_dir) / name, text);
            files[name] = sha256_hex(text);
        }
        const json manifest = {{"tool", "thinprobe"},
                               {"version", THINPROBE_VERSION},
                               {"scenario", sc.name},
                               {"scenario_path", sc.path},
                               {"scenario_sha256", sha256_hex(sc.text)},
                               {"seed", cx.seed},
                               {"eps_override", opt.eps_override},
                               {"quad_refine", opt.quad_refine},
                               {"started_utc", started},
                               {"finished_utc", utc_now()},
                               {"files", files}};
        write_text(fs::path(res.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        res.exit_code = 1;
        res.error = res.error.empty() ? e.what() : res.error + "; " + e.what();
    }
    return res;
}

}  // namespace thinprobe::cli
