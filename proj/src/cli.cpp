#include "agentcap/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "agentcap/capstruct.hpp"
#include "agentcap/family.hpp"
#include "agentcap/kernels.hpp"
#include "agentcap/kkt.hpp"
#include "agentcap/lattice.hpp"
#include "agentcap/pareto.hpp"
#include "agentcap/scaling.hpp"
#include "agentcap/scenario_io.hpp"

namespace agentcap::cli {

using nlohmann::json;

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::Parse: return 2;
    case ErrorCode::Validation:
    case ErrorCode::Configuration: return 3;
    case ErrorCode::Budget: return 4;
    case ErrorCode::EmptySelection: return 5;
    case ErrorCode::Convergence: return 6;
    case ErrorCode::EmptyFeasibleSet: return 7;
    case ErrorCode::DegenerateScaling:
    case ErrorCode::DegenerateDiscount:
    case ErrorCode::DegenerateFit: return 8;
    case ErrorCode::SingularJacobian: return 9;
    case ErrorCode::UndefinedPoint:
    case ErrorCode::UnsupportedCost:
    case ErrorCode::Differentiability:
    case ErrorCode::Interiority: return 10;
    }
    return 1;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw Error(ErrorCode::Configuration, "cannot write " + path.string());
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string flag(bool b) { return b ? "1" : "0"; }

struct Common {
    std::string scenario;
    std::string out;
    double budget = 1e7;
};

struct Context {
    const std::vector<std::string>& args;
    std::filesystem::path out_dir;
    Scenario scenario;
    double evaluations = 0.0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

double count_range(const GridRange& g) { return static_cast<double>(g.values().size()); }

double family_size(const Scenario& s) {
    const auto& f = s.family;
    switch (f.kind) {
    case FamilyKind::Grid:
    case FamilyKind::MonotoneBoundedSlope: {
        double prod = 1.0;
        for (const auto& g : f.per_state) prod *= count_range(g);
        return prod;
    }
    case FamilyKind::LinearShare:
        return count_range(f.beta) * (f.rent_indexed ? count_range(f.rent) : count_range(f.wage));
    case FamilyKind::Debt: return count_range(f.face);
    case FamilyKind::LiveOrDie: return count_range(f.threshold);
    }
    return 0.0;
}

double candidate_count(const Scenario& s) {
    if (s.cost.kind == CostKind::Effort) return static_cast<double>(s.cost.efforts.size());
    // C(m + n - 1, n - 1) in floating point so huge grids do not overflow
    const double m = s.simplex_grid;
    const auto n = static_cast<double>(s.n());
    double c = 1.0;
    for (double i = 1.0; i < n; i += 1.0) c = c * (m + i) / i;
    return c;
}

// One enumeration's worth of (contract, distribution) evaluations.
double enumeration_cost(const Scenario& s) {
    const double per = family_size(s) * candidate_count(s);
    // rent-indexed shares run an extra best-response scan per beta
    return s.family.kind == FamilyKind::LinearShare && s.family.rent_indexed ? 2.0 * per : per;
}

void charge(Context& ctx, double evaluations, double budget) {
    ctx.evaluations += evaluations;
    if (ctx.evaluations > budget) {
        std::ostringstream os;
        os << "enumeration needs " << ctx.evaluations << " evaluations, budget is " << budget;
        throw Error(ErrorCode::Budget, os.str());
    }
}

void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::Validation, "alpha out of [0,1]");
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    // "a,b,c" or "min:max:step"
    auto to_num = [&](const std::string& t) {
        try {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::Parse, what + ": not a number: '" + t + "'");
        }
    };
    std::vector<std::string> parts;
    std::string cur;
    const char sep = text.find(':') != std::string::npos ? ':' : ',';
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (sep == ':') {
        if (parts.size() != 3) throw Error(ErrorCode::Parse, what + ": expected min:max:step");
        GridRange g{to_num(parts[0]), to_num(parts[1]), to_num(parts[2]), {}};
        return g.values();
    }
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(to_num(p));
    return out;
}

std::vector<std::string> profile_header(const Scenario& s) {
    std::vector<std::string> h = family_param_names(s);
    for (const auto& l : s.states.labels) h.push_back("b_" + l);
    for (const auto& l : s.states.labels) h.push_back("p_" + l);
    for (const char* c : {"agent_utility", "principal_payoff", "capacity_binding"}) h.emplace_back(c);
    return h;
}

std::vector<std::string> profile_row(const Profile& p) {
    std::vector<std::string> r;
    for (double v : p.contract_params) r.push_back(format_double(v));
    for (double v : p.contract.b) r.push_back(format_double(v));
    for (double v : p.dist.p) r.push_back(format_double(v));
    r.push_back(format_double(p.agent_utility));
    r.push_back(format_double(p.principal_payoff));
    r.push_back(flag(p.capacity_binding));
    return r;
}

void write_profiles(const std::filesystem::path& path, const Scenario& s, const std::vector<Profile>& ps) {
    CsvWriter csv(path);
    csv.row(profile_header(s));
    for (const auto& p : ps) csv.row(profile_row(p));
}

json profile_json(const Profile& p) {
    return json{{"contract", p.contract.b}, {"distribution", p.dist.p}, {"cost", p.cost},
                {"agent_utility", p.agent_utility}, {"principal_payoff", p.principal_payoff},
                {"capacity_binding", p.capacity_binding}};
}

json slacks_json(const InequalitySlacks& s) {
    return json{{"output_over_payment", s.output_over_payment},
                {"payment_over_scaled_output", s.payment_over_scaled_output},
                {"scaled_output", s.scaled_output},
                {"participation", s.participation}};
}

void write_summary(const Context& ctx, const std::string& command, json result) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
    json j;
    j["schema_version"] = "1";
    j["command"] = {{"name", command}, {"argv", ctx.args}};
    j["scenario_digest"] = scenario_digest(ctx.scenario);
    j["runtime"] = {{"threads", thread_count()}, {"evaluations", ctx.evaluations}, {"elapsed_seconds", elapsed}};
    j["result"] = std::move(result);
    std::ofstream out(ctx.out_dir / "summary.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Configuration, "cannot write summary.json");
    out << j.dump(2) << '\n';
}

int cmd_solve(Context& ctx, double alpha, double budget) {
    const Scenario& s = ctx.scenario;
    check_alpha(alpha);
    charge(ctx, enumeration_cost(s), budget);
    const auto ep = enumerate_problem(s);
    const ParetoSet ps = pareto_filter(ep.profiles_at(alpha), s.tol_u);
    write_profiles(ctx.out_dir / "pareto.csv", s, ps.profiles);
    const Selection sel = select(ps, s.reservation);
    write_profiles(ctx.out_dir / "selection.csv", s, sel.profiles);
    write_summary(ctx, "solve",
                  {{"alpha", alpha},
                   {"pareto_size", ps.profiles.size()},
                   {"agent_utility_levels", ps.agent_utility_levels},
                   {"selection_size", sel.profiles.size()},
                   {"chosen_level", sel.chosen_level}});
    return 0;
}

json alpha_json(const AlphaStarResult& a) {
    json j{{"alpha_star", a.alpha_star}, {"lo", a.lo}, {"hi", a.hi}, {"non_monotone", a.non_monotone}};
    j["slack_witness"] = a.slack_witness ? profile_json(*a.slack_witness) : json(nullptr);
    return j;
}

int cmd_alpha_star(Context& ctx, double eps, double budget) {
    const Scenario& s = ctx.scenario;
    if (!(eps > 0.0)) throw Error(ErrorCode::Validation, "eps must be positive");
    charge(ctx, enumeration_cost(s), budget);
    const auto ep = enumerate_problem(s);
    const Selection base = base_selection(ep, s.reservation);
    AlphaStarOptions opt;
    opt.eps = eps;
    const auto res = alpha_star(ep, base.chosen_level, opt);
    CsvWriter csv(ctx.out_dir / "alpha_star_trace.csv");
    csv.row({"alpha", "all_slack"});
    for (const auto& t : res.trace) csv.row({format_double(t.alpha), flag(t.all_slack)});
    json j = alpha_json(res);
    j["u_bar"] = base.chosen_level;
    j["eps"] = eps;
    write_summary(ctx, "alpha-star", j);
    return 0;
}

int cmd_verify(Context& ctx, double step, double budget) {
    const Scenario& s = ctx.scenario;
    if (!(step > 0.0 && step <= 1.0)) throw Error(ErrorCode::Validation, "alpha grid step must lie in (0,1]");
    // the witness check enumerates the capacity-free scenario as well
    charge(ctx, 2.0 * enumeration_cost(s), budget);
    const auto rep = verify_theorem(s, s.reservation, alpha_grid(step));
    CsvWriter csv(ctx.out_dir / "theorem_checks.csv");
    csv.row({"alpha", "in_range", "all_slack", "inclusion_ok", "converse_ok", "candidates", "binding_candidates"});
    for (const auto& c : rep.checks) {
        csv.row({format_double(c.alpha), flag(c.in_range), flag(c.all_slack), flag(c.inclusion_ok),
                 flag(c.converse_ok), std::to_string(c.candidates), std::to_string(c.binding_candidates)});
    }
    json j;
    j["alpha"] = alpha_json(rep.alpha);
    j["u_bar"] = rep.u_bar;
    j["base_set_size"] = rep.base_set.size();
    j["inclusion_ok"] = rep.inclusion_ok();
    j["converse_ok"] = rep.converse_ok();
    j["pairs_checked"] = rep.pairs_checked;
    j["worst_slacks"] = slacks_json(rep.worst);
    j["step2_cases"] = rep.step2_cases;
    j["step2_worst"] = rep.step2_worst;
    j["slack_witness_ok"] = rep.slack_witness_ok;
    j["violations"] = rep.violations;
    write_summary(ctx, "verify", j);
    return 0;
}

int cmd_sweep(Context& ctx, const std::string& grid_text, double eps, double budget) {
    const Scenario& s = ctx.scenario;
    const auto ks = parse_list(grid_text, "--k-grid");
    if (ks.empty()) throw Error(ErrorCode::Validation, "empty k grid");
    charge(ctx, static_cast<double>(ks.size()) * enumeration_cost(s), budget);
    AlphaStarOptions opt;
    opt.eps = eps;
    const auto points = sweep_alpha_star(s, ks, opt);
    CsvWriter csv(ctx.out_dir / "sweep.csv");
    csv.row({"k", "alpha_star", "lo", "hi", "non_monotone"});
    json rows = json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        csv.row({format_double(p.capacity), format_double(p.alpha_star), format_double(p.lo), format_double(p.hi),
                 flag(p.non_monotone)});
        rows.push_back({{"k", p.capacity}, {"alpha_star", p.alpha_star}});
        if (i > 0 && p.alpha_star < points[i - 1].alpha_star - eps) monotone = false;
    }
    write_summary(ctx, "sweep", {{"points", rows}, {"nondecreasing", monotone}});
    return 0;
}

int cmd_capstruct(Context& ctx, std::optional<double> face, std::optional<double> threshold,
                  std::optional<double> alpha_override, double budget) {
    const Scenario& s = ctx.scenario;
    if (face.has_value() == threshold.has_value()) {
        throw Error(ErrorCode::Validation, "capstruct needs exactly one of --face or --threshold");
    }
    double a_star = 0.0;
    json j;
    if (alpha_override) {
        check_alpha(*alpha_override);
        a_star = *alpha_override;
        j["alpha_star_source"] = "flag";
    } else {
        charge(ctx, enumeration_cost(s), budget);
        const auto ep = enumerate_problem(s);
        a_star = alpha_star(ep, base_selection(ep, s.reservation).chosen_level).alpha_star;
        j["alpha_star_source"] = "scenario";
    }
    j["alpha_star"] = a_star;

    CsvWriter csv(ctx.out_dir / "legs.csv");
    double worst_sum = 0.0;
    if (face) {
        const auto d = debt_equity_decompose(s.y, *face, a_star);
        const auto direct = scaled_debt_contract(s.y, *face, a_star);
        const auto factored = scaled_debt_contract_factored(s.y, *face, a_star);
        double form_gap = 0.0;
        csv.row({"state", "y", "agent", "debt", "equity"});
        for (std::size_t i = 0; i < s.n(); ++i) {
            csv.row({s.states.labels[i], format_double(s.y[i]), format_double(d.agent_leg[i]),
                     format_double(d.debt_leg[i]), format_double(d.equity_leg[i])});
            worst_sum = std::max(worst_sum, std::abs(d.agent_leg[i] + d.debt_leg[i] + d.equity_leg[i] - s.y[i]));
            form_gap = std::max(form_gap, std::abs(direct[i] - factored[i]));
        }
        j["kind"] = "debt";
        j["face"] = *face;
        j["face_scaled"] = d.face_scaled;
        j["debt_forms_max_gap"] = form_gap;
    } else {
        const auto d = live_or_die_decompose(s.y, *threshold, a_star);
        csv.row({"state", "y", "agent", "principal"});
        for (std::size_t i = 0; i < s.n(); ++i) {
            csv.row({s.states.labels[i], format_double(s.y[i]), format_double(d.agent_leg[i]),
                     format_double(d.principal_leg[i])});
            worst_sum = std::max(worst_sum, std::abs(d.agent_leg[i] + d.principal_leg[i] - s.y[i]));
        }
        j["kind"] = "live_or_die";
        j["threshold"] = *threshold;
    }
    j["legs_sum_max_error"] = worst_sum;
    write_summary(ctx, "capstruct", j);
    return 0;
}

ActiveSet parse_active_set(const std::string& text) {
    ActiveSet a{false, false};
    if (text == "none" || text.empty()) return a;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "capacity") a.capacity = true;
        else if (item == "participation") a.participation = true;
        else throw Error(ErrorCode::Validation, "unknown active constraint '" + item + "'");
    }
    return a;
}

int cmd_kkt(Context& ctx, const std::string& active_text, double beta, double tol) {
    const Scenario& s = ctx.scenario;
    const ActiveSet active = parse_active_set(active_text);
    FocSolverOptions opt;
    opt.tol = tol;
    const auto res = solve_principal_foc(s, initial_foc_point(s, beta), active, opt);
    const auto& pt = res.point;

    json j;
    j["active_set"] = {{"capacity", active.capacity}, {"participation", active.participation}};
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["max_residual"] = res.max_residual;
    j["multipliers"] = {{"rho", pt.rho}, {"mu", pt.mu}, {"tau", pt.tau}, {"delta", pt.delta}, {"zeta", pt.zeta}};

    std::optional<AffineRepresentation> affine;
    try {
        affine = affine_representation_check(s, pt, s.y);
    } catch (const Error& e) {
        j["affine_error"] = e.what();
    }
    if (affine) {
        j["affine"] = {{"slope", affine->slope}, {"intercept_a", affine->intercept_a},
                       {"curvature_b", affine->curvature_b}, {"fit_residual", affine->fit_residual},
                       {"multiplier_slope", affine->multiplier_slope}};
    }

    {
        CsvWriter csv(ctx.out_dir / "kkt_point.csv");
        csv.row({"state", "b", "p", "phi"});
        for (std::size_t i = 0; i < s.n(); ++i)
            csv.row({s.states.labels[i], format_double(pt.b[i]), format_double(pt.p[i]), format_double(pt.phi[i])});
    }
    {
        CsvWriter csv(ctx.out_dir / "kkt_residuals.csv");
        csv.row({"block", "index", "value"});
        const auto& r = res.residuals;
        auto block = [&](const char* name, const std::vector<double>& v) {
            for (std::size_t i = 0; i < v.size(); ++i) csv.row({name, std::to_string(i), format_double(v[i])});
        };
        block("stationarity_p", r.stationarity_p);
        block("stationarity_b", r.stationarity_b);
        csv.row({"orthogonality", "0", format_double(r.orthogonality)});
        block("agent_foc", r.agent_foc);
        csv.row({"adding_up", "0", format_double(r.adding_up)});
        csv.row({"capacity_gap", "0", format_double(r.capacity_gap)});
        csv.row({"participation_gap", "0", format_double(r.participation_gap)});
    }
    write_summary(ctx, "kkt", j);
    if (!res.converged) {
        throw Error(ErrorCode::Convergence,
                    "first-order system did not converge: max residual " + format_double(res.max_residual));
    }
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Capacity-constrained principal-agent solver", "agentcap"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", common.scenario, "scenario JSON file")->required();
        sub->add_option("--out", common.out, "output directory")->required();
        sub->add_option("--budget", common.budget, "maximum (contract, distribution) evaluations");
    };

    double alpha = 1.0;
    double eps = 1e-4;
    double grid_step = 0.05;
    std::string k_grid;
    std::optional<double> face;
    std::optional<double> threshold;
    std::optional<double> alpha_override;
    std::string active_set = "participation";
    double beta = 1.0;
    double kkt_tol = 1e-10;

    auto* solve = app.add_subcommand("solve", "Pareto set P(alpha) and selection P(alpha, r)");
    add_common(solve);
    solve->add_option("--alpha", alpha, "output scaling in [0,1]");

    auto* astar = app.add_subcommand("alpha-star", "output-scaling factor alpha*");
    add_common(astar);
    astar->add_option("--eps", eps, "bisection tolerance");

    auto* verify = app.add_subcommand("verify", "brute-force check of the scaling equivalence");
    add_common(verify);
    verify->add_option("--alpha-grid", grid_step, "alpha grid step");

    auto* sweep = app.add_subcommand("sweep", "alpha* across capacities");
    add_common(sweep);
    sweep->add_option("--k-grid", k_grid, "capacities: a,b,c or min:max:step")->required();
    sweep->add_option("--eps", eps, "bisection tolerance");

    auto* cap = app.add_subcommand("capstruct", "debt/equity or live-or-die legs");
    add_common(cap);
    cap->add_option("--face", face, "debt face value");
    cap->add_option("--threshold", threshold, "live-or-die threshold");
    cap->add_option("--alpha-star", alpha_override, "use this alpha* instead of solving for it");

    auto* kkt = app.add_subcommand("kkt", "solve the principal's first-order system");
    add_common(kkt);
    kkt->add_option("--active-set", active_set, "comma list of capacity,participation or none");
    kkt->add_option("--beta", beta, "initial contract b = beta * y");
    kkt->add_option("--tol", kkt_tol, "residual tolerance");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        if (!rev.empty()) rev.pop_back();  // program name
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "agentcap: " << e.what() << '\n';
        return 2;
    }

    try {
        Context ctx{args, common.out, {}};
        ctx.scenario = load_scenario(common.scenario);
        require_valid(ctx.scenario);
        std::filesystem::create_directories(ctx.out_dir);

        if (solve->parsed()) return cmd_solve(ctx, alpha, common.budget);
        if (astar->parsed()) return cmd_alpha_star(ctx, eps, common.budget);
        if (verify->parsed()) return cmd_verify(ctx, grid_step, common.budget);
        if (sweep->parsed()) return cmd_sweep(ctx, k_grid, eps, common.budget);
        if (cap->parsed()) return cmd_capstruct(ctx, face, threshold, alpha_override, common.budget);
        if (kkt->parsed()) return cmd_kkt(ctx, active_set, beta, kkt_tol);
    } catch (const Error& e) {
        err << "agentcap: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "agentcap: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

} // namespace agentcap::cli
