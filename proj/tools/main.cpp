// Batch front-end. Exit codes: 0 success, 1 malformed configuration,
// 2 a required condition fails, 3 a solver fails.
#include "config.hpp"

#include "sublin/acceptance.hpp"
#include "sublin/branch.hpp"
#include "sublin/deadcore.hpp"
#include "sublin/eigen.hpp"
#include "sublin/errors.hpp"
#include "sublin/radial.hpp"
#include "sublin/solve.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sublin;
using cli::Config;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::uint64_t seed = 1;
    bool seedGiven = false;
    std::size_t nodes = 0;
    bool faultTstar = false;
};

class Run {
public:
    Run(const Config& c, const Options& o) : cfg(c), opt(o)
    {
        seed = o.seedGiven ? o.seed : c.seed();
        std::string dir = o.out.empty() ? c.output() : o.out;
        outDir = dir.empty() ? fs::path("out") : fs::path(dir);
        fs::create_directories(outDir / "fields");
        report["command"] = c.command();
        report["seed"] = seed;
    }

    GridPtr grid(const GridSpec* fallback = nullptr) const
    {
        if (!cfg.root().contains("grid") && fallback) {
            GridSpec s = *fallback;
            if (opt.nodes) s.nodes = opt.nodes;
            return build_grid(s);
        }
        return build_grid(cfg.grid(opt.nodes));
    }

    void field(const std::string& name, const Field& f) const
    {
        write_field_csv((outDir / "fields" / (name + ".csv")).string(), f);
    }

    std::ofstream file(const std::string& name) const
    {
        std::ofstream out(outDir / name);
        if (!out) throw std::runtime_error("cannot write " + (outDir / name).string());
        return out;
    }

    void finish(const std::string& status)
    {
        report["status"] = status;
        file("report.json") << report.dump(2) << '\n';
    }

    const Config& cfg;
    const Options& opt;
    std::uint64_t seed = 1;
    fs::path outDir;
    json report;
};

json positivity_json(const PositivityClass& p)
{
    json z = json::array();
    for (const auto& r : p.zeroSet) z.push_back({r.first, r.last});
    return {{"class", to_string(p.cls)}, {"min", p.minValue}, {"boundaryMin", p.boundaryMin}, {"zeroSetNodes", z}};
}

json hypotheses_json(const HypothesisReport& h)
{
    return {{"integral", h.integral}, {"changesSign", h.changesSign}, {"H0", h.H0},
            {"componentCount", h.componentCount}, {"H1", h.H1}, {"H1prime", h.H1prime}, {"Hplus", h.Hplus}};
}

std::string tag(double x)
{
    std::ostringstream s;
    s << x;
    return s.str();
}

// ---- eig -------------------------------------------------------------------

void cmd_eig(Run& run)
{
    const auto g = run.grid();
    const Weight w = run.cfg.weight(g);
    run.report["hypotheses"] = hypotheses_json(check_hypotheses(w));
    const EigenPair pair = principal_indefinite_eigen(*g, w);
    run.report["mu1"] = pair.eigenvalue;
    run.report["residualNorm"] = pair.residualNorm;
    run.report["normalizationCheck"] = pair.normalizationCheck;
    try {
        run.report["tstar"] = compute_tstar(*g, w, pair);
    } catch (const SolverError& e) {
        run.report["tstar"] = nullptr;
        run.report["tstarNote"] = e.what();
    }
    run.field("weight", w.values());
    run.field("phi1", pair.eigenfunction);
}

// ---- solve -----------------------------------------------------------------

Field read_init(const Run& run, const GridPtr& g, const std::string& path)
{
    std::ifstream in(path);
    if (!in) run.cfg.fail("init", "cannot open initial field \"" + path + "\"");
    try {
        return read_field_csv(in, g);
    } catch (const std::exception& e) {
        run.cfg.fail("init", path + ": " + e.what());
    }
}

void cmd_solve(Run& run)
{
    const auto g = run.grid();
    const Weight w = run.cfg.weight(g);
    const json& s = run.cfg.section("solve");
    const double q = run.cfg.required_number(s, "q");
    if (!(q > 0.0 && q < 1.0)) run.cfg.fail("q", "solve needs q in (0, 1)");
    const std::string method = run.cfg.string(s, "method", "minimize");
    const std::string init = run.cfg.string(s, "init", method == "newton" ? "asymptotic" : "indicator");
    const SolveParams params = run.cfg.solver();

    Field guess;
    if (init == "indicator")
        guess = Field(g, [&] {
            std::vector<double> v(g->size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] > 0.0 ? 1.0 : 0.0;
            return v;
        }());
    else if (init == "ones")
        guess = Field(g, 1.0);
    else if (init == "asymptotic") {
        const EigenPair pair = principal_indefinite_eigen(*g, w);
        guess = asymptotic_state(w, pair, compute_tstar(*g, w, pair), q);
    } else
        guess = read_init(run, g, init);

    Field u;
    if (method == "minimize") {
        MinimizeTrace tr;
        u = minimize_energy(*g, w, q, guess, params, &tr);
        run.report["iterations"] = tr.iterations;
    } else if (method == "newton") {
        u = newton_refine(*g, w, q, guess, params);
    } else {
        run.cfg.fail("method", "\"method\" must be \"minimize\" or \"newton\"");
    }
    const auto pc = classify_positivity(u);
    run.report["q"] = q;
    run.report["method"] = method;
    run.report["energy"] = energy(w, q, u);
    run.report["relativeResidual"] = relative_residual(w, q, u);
    run.report["maxU"] = u.max();
    run.report["positivity"] = positivity_json(pc);
    if (pc.cls == Positivity::interiorOfCone) {
        const auto st = linearized_eigen(*g, w, q, u);
        run.report["gamma1"] = st.gamma1;
        run.report["stability"] = to_string(st.classification);
    }
    run.field("u", u);
}

// ---- branch ----------------------------------------------------------------

void cmd_branch(Run& run)
{
    const auto g = run.grid();
    const Weight w = run.cfg.weight(g);
    const SolveParams params = run.cfg.solver();
    const json& b = run.cfg.section("branch");
    BranchSchedule sch;
    sch.qStart = run.cfg.number(b, "qStart", sch.qStart);
    sch.qMin = run.cfg.number(b, "qMin", sch.qMin);
    sch.initialStep = run.cfg.number(b, "initialStep", sch.initialStep);
    sch.maxStep = run.cfg.number(b, "maxStep", sch.maxStep);
    sch.minStep = run.cfg.number(b, "minStep", sch.minStep);
    sch.stops = run.cfg.numbers(b, "stops", {});
    if (!(sch.qMin > 0.0 && sch.qMin < sch.qStart && sch.qStart < 1.0))
        run.cfg.fail("qMin", "branch needs 0 < qMin < qStart < 1");

    const Branch br = trace_branch(*g, w, sch, params);
    run.file("branch.csv") << [&] {
        std::ostringstream s;
        write_branch_csv(s, br);
        return s.str();
    }();
    run.report["mu1"] = br.mu1;
    run.report["tstar"] = br.tstar;
    run.report["termination"] = to_string(br.terminationReason);
    run.report["points"] = br.points.size();
    if (!br.points.empty()) run.field("u_qmin", br.points.back().u);

    const EigenPair pair = principal_indefinite_eigen(*g, w);
    if (b.value("ls", false)) {
        BranchSchedule ns = sch;
        ns.stops.push_back(0.99);
        ns.stops.push_back(0.97);
        const Branch nb = trace_branch(*g, w.scaled(pair.eigenvalue), ns, params);
        const LSReport ls = ls_identities(*g, w, pair, br.tstar, &nb, params);
        json samples = json::array();
        for (const auto& [q, gm] : ls.gammaSamples) samples.push_back({q, gm});
        run.report["ls"] = {{"tstarIdentity", ls.tstarIdentity},
                            {"tstarIdentityScale", ls.tstarIdentityScale},
                            {"phiQT", ls.phiQT},
                            {"gammaSlopePredicted", ls.gammaSlopePredicted},
                            {"gammaSlopeMeasured", ls.gammaSlopeMeasured},
                            {"gammaSamples", samples},
                            {"identityOK", ls.identity_ok()},
                            {"slopeOK", ls.slope_ok()}};
    }
    if (b.contains("probeAboveOne")) {
        const double qp = run.cfg.number(b, "probeAboveOne", 0.0);
        if (!(qp > 1.0)) run.cfg.fail("probeAboveOne", "\"probeAboveOne\" must exceed 1");
        const BranchPoint p = probe_above_one(*g, w, pair, br.tstar, qp, params);
        run.report["probeAboveOne"] = {{"q", qp},
                                       {"gamma1", p.gamma1 ? json(*p.gamma1) : json(nullptr)},
                                       {"positivity", to_string(p.positivity.cls)}};
    }
    const auto probes = run.cfg.numbers(b, "probes", {});
    if (!probes.empty()) {
        MultistartParams ms;
        ms.seed = run.seed;
        ms.starts = static_cast<int>(run.cfg.number(b, "starts", ms.starts));
        const IntervalEstimate est = estimate_interval_I(*g, w, br, probes, ms, params);
        json ev = json::array();
        for (const auto& e : est.evidence) {
            json cls = json::array();
            for (auto c : e.distinctClasses) cls.push_back(to_string(c));
            ev.push_back({{"q", e.q},
                          {"attempts", e.attempts},
                          {"trivial", e.trivial},
                          {"failed", e.failed},
                          {"foundInterior", e.foundInterior},
                          {"foundNonInterior", e.foundNonInterior},
                          {"classes", cls}});
        }
        run.report["interval"] = {{"qiLower", est.qiLower ? json(*est.qiLower) : json(nullptr)},
                                  {"qiUpper", est.qiUpper},
                                  {"evidence", ev}};
    }
}

// ---- radial-check ----------------------------------------------------------

json trail_json(const std::vector<ConditionCheck>& trail)
{
    json t = json::array();
    for (const auto& c : trail) t.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
    return t;
}

[[noreturn]] void condition_failed(const ConditionCheck& c, const std::string& why)
{
    throw ConditionError(c.name, c.lhs, c.rhs, why);
}

void cmd_radial(Run& run)
{
    const auto g = run.grid();
    const Weight w = run.cfg.weight(g);
    const json& r = run.cfg.section("radial");
    const json& wsec = run.cfg.section("weight");
    const double qDefault = wsec.contains("q") ? run.cfg.number(wsec, "q", 0.5) : 0.5;
    const double q = run.cfg.number(r, "q", qDefault);
    const double span = g->is_ball() ? g->right() : 0.5 * (g->right() - g->left());
    const double R0 = run.cfg.number(r, "R0", wsec.contains("R0") ? run.cfg.number(wsec, "R0", 0.0) : span / 3.0);
    const std::string orient = run.cfg.string(r, "orientation", "inner-lower");
    if (orient != "inner-lower" && orient != "inner-upper")
        run.cfg.fail("orientation", "\"orientation\" must be \"inner-lower\" or \"inner-upper\"");
    const Orientation side = orient == "inner-lower" ? Orientation::InnerIsLower : Orientation::InnerIsUpper;

    const ConditionReport rc = check_radial_conditions(w, q, R0, side);
    run.report["q"] = q;
    run.report["R0"] = rc.R0;
    run.report["conditions"] = {{"cqThreshold", rc.cqThreshold}, {"infernoLHS", rc.infernoLHS},
                                {"infernoRHS", rc.infernoRHS},   {"infernoHolds", rc.infernoHolds},
                                {"sipiLHS", rc.sipiLHS},         {"sipiRHS", rc.sipiRHS},
                                {"sipiHolds", rc.sipiHolds},     {"K", std::isfinite(rc.K) ? json(rc.K) : json(nullptr)}};
    if (rc.KNinterval) run.report["conditions"]["KNinterval"] = {rc.KNinterval->first, rc.KNinterval->second};

    std::string kind = run.cfg.string(r, "construction", "auto");
    if (kind == "auto") kind = rc.innerNonnegative ? "cc" : "rad2";
    Field glued;
    double gamma = 1.0;
    std::optional<RadialSplit> split;
    run.report["construction"] = kind;
    if (kind == "cc") {
        const CCConstruction cc = build_cc(w, q, R0, side);
        run.report["trail"] = trail_json(cc.conditionTrail);
        run.report["flux"] = {{"vPrime", cc.fluxCheck.vPrime}, {"zPrime", cc.fluxCheck.zPrime}, {"ok", cc.fluxCheck.ok}};
        glued = cc.glued;
        gamma = cc.gamma;
        split = cc.split;
    } else if (kind == "rad2") {
        const Rad2Construction c = build_rad2(w, q, R0, side);
        run.report["trail"] = trail_json(c.conditionTrail);
        run.report["epsilon"] = c.epsilon;
        run.report["delta"] = c.delta;
        for (const auto& t : c.conditionTrail)
            if (!t.holds) condition_failed(t, "inequality of the inner-negative construction fails");
        glued = c.glued;
        gamma = c.gammaEps;
        split = c.split;
    } else {
        run.cfg.fail("construction", "\"construction\" must be \"auto\", \"cc\" or \"rad2\"");
    }
    const auto vr = verify_weak_subsolution(w.scaled(gamma), q, glued, split);
    run.report["verify"] = {{"maxWeakResidual", vr.maxWeakResidual},
                            {"interfaceFluxGap", vr.interfaceFluxGap},
                            {"verdict", vr.verdict}};
    run.field("glued", glued);
    if (!vr.verdict) throw ConditionError("subsolution", vr.maxWeakResidual, 0.0, "glued field is not a weak subsolution");

    const Field sub = rescale_solution(glued, 1.0 / gamma, q);
    const Field u = monotone_iterate(*g, w, q, {sub, large_supersolution(*g, w, q, sub.max()), true}, run.cfg.solver());
    run.report["positivity"] = positivity_json(classify_positivity(u));
    run.field("u", u);
}

// ---- deadcore --------------------------------------------------------------

Field read_profile(const Run& run, const GridPtr& g, const json& sec, const char* key)
{
    return read_init(run, g, run.cfg.string(sec, key, ""));
}

void cmd_deadcore(Run& run)
{
    const GridSpec fallback = GridSpec::interval(-1.0, 1.0, 2049);
    const auto g = run.grid(&fallback);
    const json& d = run.cfg.section("deadcore");
    Field b1, b2;
    if (d.contains("b1") || d.contains("b2")) {
        b1 = read_profile(run, g, d, "b1");
        b2 = read_profile(run, g, d, "b2");
    } else {
        const double c = g->is_ball() ? 0.0 : 0.5 * (g->left() + g->right());
        b1 = sample(g, [c](double x) { return std::abs(x - c) > 0.5 ? 1.0 : 0.0; });
        b2 = sample(g, [c](double x) { return std::max(0.25 - (x - c) * (x - c), 0.0); });
    }
    const double sigma = run.cfg.number(d, "sigma", 0.2);
    const double qbar = run.cfg.number(d, "qbar", 0.5);
    const auto deltas = run.cfg.numbers(d, "deltas", {10.0, 40.0, 160.0});
    if (deltas.empty()) run.cfg.fail("deltas", "\"deltas\" must not be empty");

    const auto reps = verify_deadcore_formation(g, b1, b2, sigma, qbar, deltas, run.cfg.solver());
    run.file("sweep.csv") << [&] {
        std::ostringstream s;
        write_sweep_csv(s, reps);
        return s.str();
    }();
    auto intervals = [](const std::vector<Interval>& v) {
        json a = json::array();
        for (const auto& i : v) a.push_back({i.lo, i.hi});
        return a;
    };
    json pts = json::array();
    for (const auto& r : reps) {
        pts.push_back({{"delta", r.delta},
                       {"q", r.q},
                       {"positivity", to_string(r.positivity)},
                       {"measuredZeroSet", intervals(r.measuredZeroSet)},
                       {"predictedCore", intervals(r.predictedCore)},
                       {"dDelta", r.dDelta},
                       {"a0", r.a0},
                       {"C", r.uniformBound},
                       {"maxU", r.maxU},
                       {"boundHolds", r.boundHolds},
                       {"windowOK", r.windowOK},
                       {"coreDistance", std::isfinite(r.coreDistance) ? json(r.coreDistance) : json(nullptr)},
                       {"containmentOK", r.containmentOK}});
        run.field("u_q" + tag(r.q) + "_delta" + tag(r.delta), r.u);
    }
    run.report["points"] = pts;
    json summary = json::object();
    for (double q : {0.5 * qbar, qbar}) {
        const auto onset = empirical_deadcore_onset(reps, q);
        const double slope = core_distance_slope(reps, q);
        summary[tag(q)] = {{"onset", onset ? json(*onset) : json(nullptr)},
                           {"coreDistanceSlope", std::isfinite(slope) ? json(slope) : json(nullptr)}};
    }
    run.report["summary"] = summary;
}

// ---- nearzero --------------------------------------------------------------

void cmd_nearzero(Run& run)
{
    const GridSpec fallback = GridSpec::interval(0.0, std::numbers::pi, 1025);
    const auto g = run.grid(&fallback);
    const Weight w = run.cfg.root().contains("weight")
                         ? run.cfg.weight(g)
                         : make_weight(g, CorpusCase{"cosine", {{"amplitude", 1.0}, {"shift", 0.0}}});
    const json& n = run.cfg.section("nearzero");
    const double t0 = run.cfg.number(n, "t0", 2.0);
    const auto eps = run.cfg.numbers(n, "epsilons", {1e-3, 1e-4});
    const NearZeroReport r = near_zero_analysis(*g, w, t0, eps);
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"epsilon", e.epsilon},
                           {"qEpsilon", e.qEpsilon},
                           {"ratio", e.ratio},
                           {"picardIterations", e.picardIterations}});
    run.report["t0"] = t0;
    run.report["positivityMargin"] = r.positivityMargin;
    run.report["S"] = r.S;
    run.report["volume"] = r.volume;
    run.report["predictedSlope"] = r.predictedSlope;
    run.report["entries"] = entries;
    run.field("u0", r.u0);
}

// ---- validate --------------------------------------------------------------

int cmd_validate(const Options& opt)
{
    AcceptanceOptions ao;
    ao.seed = opt.seed;
    ao.invertTstar = opt.faultTstar;
    std::vector<AcceptanceItem> items;
    bool ok = true;
    for (int id : acceptance_ids()) {
        items.push_back(run_acceptance_item(id, ao));
        ok = ok && items.back().pass;
    }
    print_acceptance_table(std::cout, items);
    if (!opt.out.empty()) {
        fs::create_directories(opt.out);
        json rep = {{"command", "validate"}, {"seed", opt.seed}, {"status", ok ? "ok" : "failed"}};
        json arr = json::array();
        for (const auto& it : items) arr.push_back({{"id", it.id}, {"name", it.name}, {"pass", it.pass}, {"details", it.details}});
        rep["items"] = arr;
        std::ofstream(fs::path(opt.out) / "report.json") << rep.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

int execute(const std::string& sub, const Options& opt)
{
    if (sub == "validate" && opt.config.empty()) return cmd_validate(opt);
    if (opt.config.empty()) {
        std::cerr << "error: --config is required for " << (sub.empty() ? "a run" : sub) << '\n';
        return 1;
    }
    std::optional<Config> cfg;
    try {
        cfg.emplace(cli::load_config(opt.config));
        const std::string command = cfg->command();
        if (!sub.empty() && sub != command)
            cfg->fail("command", "configuration is for \"" + command + "\" but the subcommand is \"" + sub + "\"");
        if (command == "validate") {
            Options o = opt;
            if (!o.seedGiven) o.seed = cfg->seed();
            if (o.out.empty()) o.out = cfg->output();
            return cmd_validate(o);
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    std::optional<Run> run;
    try {
        run.emplace(*cfg, opt);
        const std::string command = cfg->command();
        if (command == "eig") cmd_eig(*run);
        else if (command == "solve") cmd_solve(*run);
        else if (command == "branch") cmd_branch(*run);
        else if (command == "radial-check") cmd_radial(*run);
        else if (command == "deadcore") cmd_deadcore(*run);
        else if (command == "nearzero") cmd_nearzero(*run);
        run->finish("ok");
        return 0;
    } catch (const cli::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const ConditionError& e) {
        std::cerr << "condition failed: " << e.what() << '\n';
        if (run) {
            run->report["failure"] = {{"name", e.name()}, {"lhs", e.lhs()}, {"rhs", e.rhs()}, {"message", e.what()}};
            run->finish("condition-failed");
        }
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver failed: " << e.what() << '\n';
        if (run) {
            run->report["failure"] = {{"message", e.what()}};
            run->finish("solver-failed");
        }
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << opt.config << ":1: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << opt.config << ":1: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sublinear indefinite-weight problems: eigenpairs, solutions, branches, constructions"};
    app.require_subcommand(0, 1);
    Options opt;
    auto common = [&](CLI::App* a) {
        a->add_option("--config", opt.config, "JSON run configuration");
        a->add_option("--out", opt.out, "output directory (report.json, fields/, branch.csv, sweep.csv)");
        a->add_option("--seed", opt.seed, "multistart seed")->each([&](const std::string&) { opt.seedGiven = true; });
        a->add_option("--nodes", opt.nodes, "grid node count override")->check(CLI::Range(16, 1 << 20));
    };
    common(&app);
    const char* subs[][2] = {{"eig", "principal eigenpair and t*"},
                             {"solve", "one solution at a fixed exponent"},
                             {"branch", "continuation of the positive branch in q"},
                             {"radial-check", "radial subsolution constructions"},
                             {"deadcore", "dead-core sweep over delta"},
                             {"nearzero", "perturbation analysis near q = 0"},
                             {"validate", "run the acceptance suite"}};
    for (const auto& s : subs) {
        CLI::App* a = app.add_subcommand(s[0], s[1]);
        common(a);
        if (std::string(s[0]) == "validate") a->add_flag("--inject-tstar-fault", opt.faultTstar)->group("");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    std::string sub;
    if (!app.get_subcommands().empty()) sub = app.get_subcommands().front()->get_name();
    if (sub.empty() && opt.config.empty()) {
        std::cerr << app.help();
        return 1;
    }
    return execute(sub, opt);
}
