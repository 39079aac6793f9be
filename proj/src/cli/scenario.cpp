#include "thinprobe/cli/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "thinprobe/errors.hpp"

namespace thinprobe::cli {

bool OutputBlock::wants(const std::string& f) const {
    for (const auto& x : formats)
        if (x == f) return true;
    return false;
}

namespace {

// Reads keys out of one table, remembering which were consumed so the rest
// can be reported as unknown.
class Reader {
public:
    Reader(const toml::table* t, std::string prefix, std::vector<std::string>& errors)
        : t_(t), prefix_(std::move(prefix)), errors_(errors) {}

    bool present() const { return t_ != nullptr; }

    Reader sub(const std::string& key) {
        used_.insert(key);
        if (!t_) return Reader(nullptr, path(key), errors_);
        const toml::node* n = t_->get(key);
        if (!n) return Reader(nullptr, path(key), errors_);
        if (!n->is_table()) {
            errors_.push_back(path(key) + ": expected a table");
            return Reader(nullptr, path(key), errors_);
        }
        return Reader(n->as_table(), path(key), errors_);
    }

    void num(const std::string& key, double& out) {
        if (const toml::node* n = take(key)) {
            if (auto v = n->value<double>())
                out = *v;
            else
                errors_.push_back(path(key) + ": expected a number");
        }
    }

    void integer(const std::string& key, int& out) {
        if (const toml::node* n = take(key)) {
            if (n->is_integer())
                out = static_cast<int>(n->as_integer()->get());
            else
                errors_.push_back(path(key) + ": expected an integer");
        }
    }

    void u64(const std::string& key, std::uint64_t& out) {
        if (const toml::node* n = take(key)) {
            if (n->is_integer() && n->as_integer()->get() >= 0)
                out = static_cast<std::uint64_t>(n->as_integer()->get());
            else
                errors_.push_back(path(key) + ": expected a non-negative integer");
        }
    }

    void str(const std::string& key, std::string& out) {
        if (const toml::node* n = take(key)) {
            if (n->is_string())
                out = n->as_string()->get();
            else
                errors_.push_back(path(key) + ": expected a string");
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const toml::node* n = take(key)) {
            if (n->is_boolean())
                out = n->as_boolean()->get();
            else
                errors_.push_back(path(key) + ": expected true or false");
        }
    }

    void nums(const std::string& key, std::vector<double>& out) {
        if (const toml::node* n = take(key)) {
            const toml::array* a = n->as_array();
            if (!a) {
                errors_.push_back(path(key) + ": expected an array of numbers");
                return;
            }
            std::vector<double> v;
            for (size_t i = 0; i < a->size(); ++i) {
                auto x = (*a)[i].value<double>();
                if (!x) {
                    errors_.push_back(path(key) + "[" + std::to_string(i) + "]: expected a number");
                    return;
                }
                v.push_back(*x);
            }
            out = v;
        }
    }

    void ints(const std::string& key, std::vector<int>& out) {
        std::vector<double> v;
        const size_t before = errors_.size();
        nums(key, v);
        if (errors_.size() != before || v.empty()) return;
        out.clear();
        for (double x : v) {
            if (x != static_cast<int>(x)) {
                errors_.push_back(path(key) + ": expected integers");
                return;
            }
            out.push_back(static_cast<int>(x));
        }
    }

    void strs(const std::string& key, std::vector<std::string>& out) {
        if (const toml::node* n = take(key)) {
            const toml::array* a = n->as_array();
            if (!a) {
                errors_.push_back(path(key) + ": expected an array of strings");
                return;
            }
            std::vector<std::string> v;
            for (size_t i = 0; i < a->size(); ++i) {
                if (!(*a)[i].is_string()) {
                    errors_.push_back(path(key) + "[" + std::to_string(i) + "]: expected a string");
                    return;
                }
                v.push_back((*a)[i].as_string()->get());
            }
            out = v;
        }
    }

    void holder(const std::string& key, Holder& out) {
        std::vector<double> v;
        const size_t before = errors_.size();
        nums(key, v);
        if (errors_.size() != before || !t_ || !t_->get(key)) return;
        if (v.size() != 2) {
            errors_.push_back(path(key) + ": expected [alpha, C]");
            return;
        }
        out = {v[0], v[1]};
    }

    // Flags every key that nobody asked for.
    void finish() {
        if (!t_) return;
        for (const auto& [k, n] : *t_) {
            const std::string key(k.str());
            if (!used_.count(key)) errors_.push_back(path(key) + ": unknown key");
        }
    }

private:
    const toml::node* take(const std::string& key) {
        used_.insert(key);
        return t_ ? t_->get(key) : nullptr;
    }
    std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    const toml::table* t_;
    std::string prefix_;
    std::vector<std::string>& errors_;
    std::set<std::string> used_;
};

template <class Fn>
void checked(std::vector<std::string>& errors, const std::string& key, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        errors.push_back(key + ": " + e.what());
    }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << origin << ": " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(os.str());
    }

    std::vector<std::string> errors;
    Scenario sc;
    sc.path = origin;
    sc.text = text;

    Reader top(&root, "", errors);
    top.str("name", sc.name);
    top.u64("seed", sc.seed);

    Reader model = top.sub("model");
    std::string preset;
    model.str("preset", preset);
    if (!preset.empty()) checked(errors, "model.preset", [&] { sc.family = family_preset(preset); });
    FamilySpec& fs = sc.family;

    Reader geo = top.sub("geometry");
    geo.integer("dim", fs.dim);
    std::string kind;
    geo.str("kind", kind);
    if (kind == "slab")
        fs.kind = DomainKind::slab;
    else if (kind == "nozzle")
        fs.kind = DomainKind::nozzle;
    else if (!kind.empty())
        errors.push_back("geometry.kind: expected \"nozzle\" or \"slab\"");
    geo.str("curve", fs.curve);
    geo.nums("curve_params", fs.curve_params);
    geo.num("eps", sc.eps);
    geo.nums("eps_list", sc.eps_list);
    geo.num("l", fs.l);
    geo.num("L", fs.L);
    geo.num("b1", fs.b1);
    geo.finish();
    if (fs.dim != 2 && fs.dim != 3) errors.push_back("geometry.dim: must be 2 or 3");
    if (!(sc.eps > 0)) errors.push_back("geometry.eps: must be positive");
    for (double e : sc.eps_list)
        if (!(e > 0)) errors.push_back("geometry.eps_list: entries must be positive");

    Reader cgo = top.sub("cgo");
    cgo.num("lambda", fs.lambda);
    cgo.num("mu", fs.mu);
    cgo.nums("d", fs.d);
    std::string pc;
    cgo.str("case", pc);
    if (pc == "a")
        fs.probe_case = ProbeCase::a;
    else if (pc == "b")
        fs.probe_case = ProbeCase::b;
    else if (!pc.empty())
        errors.push_back("cgo.case: expected \"a\" or \"b\"");
    std::vector<double> al;
    cgo.nums("alphas", al);
    if (!al.empty()) {
        if (al.size() != 4)
            errors.push_back("cgo.alphas: expected 4 exponents");
        else
            fs.alphas = {al[0], al[1], al[2], al[3]};
    }
    std::string prod;
    cgo.str("product", prod);
    if (prod == "theorem")
        fs.product = ProductChoice::theorem;
    else if (prod == "proof")
        fs.product = ProductChoice::proof;
    else if (!prod.empty())
        errors.push_back("cgo.product: expected \"theorem\" or \"proof\"");
    cgo.finish();
    if (static_cast<int>(fs.d.size()) != fs.dim && !fs.d.empty())
        errors.push_back("cgo.d: expected " + std::to_string(fs.dim) + " components");

    model.str("H", fs.H);
    model.nums("H_params", fs.H_params);
    model.boolean("H_c1", fs.H_c1);
    model.holder("H_holder", fs.H_holder);
    model.str("F", fs.F);
    model.nums("F_params", fs.F_params);
    model.holder("F_holder", fs.F_holder);
    model.str("f", sc.f);
    model.nums("f_params", sc.f_params);
    model.str("base_u", fs.base_u);
    model.nums("base_params", fs.base_params);
    Reader pair = model.sub("pair");
    PairSettings& ps = fs.settings;
    pair.num("q", ps.q);
    pair.num("amplitude", ps.amplitude);
    std::string prof, psi;
    pair.str("profile", prof);
    if (!prof.empty()) checked(errors, "model.pair.profile", [&] { ps.profile = profile_from_name(prof); });
    pair.str("psi", psi);
    if (!psi.empty()) checked(errors, "model.pair.psi", [&] { ps.psi = psi_from_name(psi); });
    pair.boolean("gradient_flux_gap", ps.gradient_flux_gap);
    pair.num("drift", ps.drift);
    pair.num("raw_flux_gap", ps.raw_flux_gap);
    pair.holder("source_holder", ps.source_holder);
    pair.holder("solution_holder", ps.solution_holder);
    pair.finish();
    model.finish();

    Reader sol = top.sub("solver");
    sol.str("mode", sc.solver.mode);
    sol.integer("n", sc.solver.n);
    sol.integer("nt", sc.solver.nt);
    sol.integer("levels", sc.solver.levels);
    sol.num("T", sc.solver.T);
    sol.str("exact", sc.solver.exact);
    sol.num("constant", sc.solver.constant);
    sol.str("perturbation", sc.solver.perturbation);
    sol.num("delta", sc.solver.delta);
    sol.finish();
    {
        const std::string& m = sc.solver.mode;
        if (m != "mms" && m != "heat" && m != "constant" && m != "pair")
            errors.push_back("solver.mode: expected mms, heat, constant or pair");
        const std::string& p = sc.solver.perturbation;
        if (p != "none" && p != "source" && p != "flux")
            errors.push_back("solver.perturbation: expected none, source or flux");
        if (sc.solver.n < 5 || sc.solver.n % 2 == 0) errors.push_back("solver.n: must be odd and at least 5");
        if (sc.solver.nt < 1) errors.push_back("solver.nt: must be positive");
        if (sc.solver.levels < 1) errors.push_back("solver.levels: must be positive");
    }

    Reader rdc = top.sub("rdc");
    rdc.nums("c0", sc.rdc.c0);
    rdc.nums("A", sc.rdc.A);
    rdc.str("reaction", sc.rdc.reaction);
    rdc.nums("reaction_params", sc.rdc.reaction_params);
    rdc.num("bump_amplitude", sc.rdc.bump_amplitude);
    rdc.finish();

    Reader ex = top.sub("experiment");
    if (!ex.present()) errors.push_back("experiment: missing table");
    ex.str("kind", sc.experiment.kind);
    ex.strs("terms", sc.experiment.terms);
    ex.num("tolerance", sc.experiment.tolerance);
    ex.integer("refine_levels", sc.experiment.refine_levels);
    ex.integer("samples", sc.experiment.samples);
    ex.num("window_exponent", fs.window_exponent);
    ex.num("T1", fs.T1);
    ex.ints("counts", fs.counts);
    ex.finish();
    {
        static const std::set<std::string> kinds{"selfcheck", "identity", "sweep", "solve", "theorem-check", "rdc"};
        if (ex.present() && !kinds.count(sc.experiment.kind))
            errors.push_back("experiment.kind: expected one of selfcheck, identity, sweep, solve, theorem-check, rdc");
        if (sc.experiment.kind == "sweep" && sc.experiment.terms.empty())
            errors.push_back("experiment.terms: a sweep needs at least one term");
        if (sc.experiment.samples < 100) errors.push_back("experiment.samples: must be at least 100");
    }

    Reader out = top.sub("output");
    out.str("dir", sc.output.dir);
    out.strs("formats", sc.output.formats);
    out.finish();
    for (const auto& f : sc.output.formats)
        if (f != "json" && f != "csv") errors.push_back("output.formats: unknown format '" + f + "'");
    if (sc.output.dir.empty()) sc.output.dir = "runs/" + sc.name;

    top.finish();

    if (!errors.empty()) {
        std::string msg = origin + ": invalid scenario";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_scenario(os.str(), path);
}

}  // namespace thinprobe::cli
