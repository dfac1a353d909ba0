#include "agentcap/scenario_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "agentcap/error.hpp"

namespace agentcap {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::Parse, "scenario: " + where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema_error(where, std::string("missing key '") + key + "'");
    return j.at(key);
}

double num(const json& j, const std::string& where) {
    if (!j.is_number()) schema_error(where, "expected a number");
    return j.get<double>();
}

std::vector<double> num_list(const json& j, const std::string& where) {
    if (!j.is_array()) schema_error(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

GridRange range_from(const json& j, const std::string& where) {
    if (j.is_number()) return GridRange::single(j.get<double>());
    if (j.is_array()) return GridRange::list(num_list(j, where));
    if (j.is_object() && j.contains("values")) return GridRange::list(num_list(j.at("values"), where + ".values"));
    if (!j.is_object()) schema_error(where, "expected a number, a list, or {min, max, step}");
    GridRange g;
    g.min = num(need(j, "min", where), where + ".min");
    g.max = num(need(j, "max", where), where + ".max");
    g.step = j.contains("step") ? num(j.at("step"), where + ".step") : 0.0;
    return g;
}

json range_to(const GridRange& g) {
    if (!g.explicit_values.empty()) return json{{"values", g.explicit_values}};
    return json{{"min", g.min}, {"max", g.max}, {"step", g.step}};
}

CostFunction cost_from(const json& j) {
    const std::string where = "cost";
    const auto kind = need(j, "kind", where);
    if (!kind.is_string()) schema_error("cost.kind", "expected a string");
    const json params = j.contains("params") ? j.at("params") : json::object();
    CostFunction c;
    if (params.contains("scale")) c.scale = num(params.at("scale"), "cost.params.scale");
    const std::string k = kind.get<std::string>();
    if (k == "quadratic") {
        c.kind = CostKind::Quadratic;
        const auto& q = need(params, "Q", "cost.params");
        if (!q.is_array()) schema_error("cost.params.Q", "expected a matrix");
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto row = num_list(q[i], "cost.params.Q[" + std::to_string(i) + "]");
            c.Q.insert(c.Q.end(), row.begin(), row.end());
        }
        if (params.contains("q0")) c.q0 = num_list(params.at("q0"), "cost.params.q0");
    } else if (k == "relative_entropy") {
        c.kind = CostKind::RelativeEntropy;
        c.q0 = num_list(need(params, "q0", "cost.params"), "cost.params.q0");
        if (params.contains("theta")) c.theta = num(params.at("theta"), "cost.params.theta");
    } else if (k == "table") {
        c.kind = CostKind::Table;
        const auto& pts = need(params, "points", "cost.params");
        if (!pts.is_array()) schema_error("cost.params.points", "expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string w = "cost.params.points[" + std::to_string(i) + "]";
            std::vector<int> counts;
            for (double v : num_list(need(pts[i], "counts", w), w + ".counts")) counts.push_back(static_cast<int>(v));
            c.table[counts] = num(need(pts[i], "cost", w), w + ".cost");
        }
    } else if (k == "effort") {
        c.kind = CostKind::Effort;
        const auto& pts = need(params, "efforts", "cost.params");
        if (!pts.is_array()) schema_error("cost.params.efforts", "expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string w = "cost.params.efforts[" + std::to_string(i) + "]";
            EffortPoint e;
            e.effort = num(need(pts[i], "effort", w), w + ".effort");
            e.dist.p = num_list(need(pts[i], "p", w), w + ".p");
            e.cost = num(need(pts[i], "cost", w), w + ".cost");
            c.efforts.push_back(std::move(e));
        }
    } else {
        schema_error("cost.kind", "unknown kind '" + k + "'");
    }
    return c;
}

json cost_to(const CostFunction& c, std::size_t n) {
    json params{{"scale", c.scale}};
    std::string kind;
    switch (c.kind) {
    case CostKind::Quadratic: {
        kind = "quadratic";
        json q = json::array();
        if (c.Q.size() != n * n) {
            q = c.Q;  // malformed; kept flat so validation can report it
            params["Q"] = q;
            params["q0"] = c.q0;
            break;
        }
        for (std::size_t i = 0; i < n; ++i)
            q.push_back(std::vector<double>(c.Q.begin() + static_cast<std::ptrdiff_t>(i * n),
                                            c.Q.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
        params["Q"] = q;
        params["q0"] = c.q0;
        break;
    }
    case CostKind::RelativeEntropy:
        kind = "relative_entropy";
        params["q0"] = c.q0;
        params["theta"] = c.theta;
        break;
    case CostKind::Table: {
        kind = "table";
        json pts = json::array();
        for (const auto& [counts, v] : c.table) pts.push_back({{"counts", counts}, {"cost", v}});
        params["points"] = pts;
        break;
    }
    case CostKind::Effort: {
        kind = "effort";
        json pts = json::array();
        for (const auto& e : c.efforts) pts.push_back({{"effort", e.effort}, {"p", e.dist.p}, {"cost", e.cost}});
        params["efforts"] = pts;
        break;
    }
    }
    return json{{"kind", kind}, {"params", params}};
}

ContractFamily family_from(const json& j) {
    const auto& kind = need(j, "kind", "contract_family");
    if (!kind.is_string()) schema_error("contract_family.kind", "expected a string");
    const json params = j.contains("params") ? j.at("params") : json::object();
    const std::string w = "contract_family.params";
    ContractFamily f;
    const std::string k = kind.get<std::string>();
    auto per_state = [&] {
        const auto& ps = need(params, "per_state", w);
        if (!ps.is_array()) schema_error(w + ".per_state", "expected an array of ranges");
        for (std::size_t i = 0; i < ps.size(); ++i)
            f.per_state.push_back(range_from(ps[i], w + ".per_state[" + std::to_string(i) + "]"));
    };
    if (k == "grid") {
        f.kind = FamilyKind::Grid;
        per_state();
    } else if (k == "monotone_bounded_slope") {
        f.kind = FamilyKind::MonotoneBoundedSlope;
        per_state();
    } else if (k == "linear_share") {
        f.kind = FamilyKind::LinearShare;
        f.beta = range_from(need(params, "beta", w), w + ".beta");
        if (params.contains("rent_indexed")) {
            if (!params.at("rent_indexed").is_boolean()) schema_error(w + ".rent_indexed", "expected a boolean");
            f.rent_indexed = params.at("rent_indexed").get<bool>();
        }
        if (f.rent_indexed) f.rent = range_from(need(params, "rent", w), w + ".rent");
        else f.wage = range_from(need(params, "wage", w), w + ".wage");
    } else if (k == "debt") {
        f.kind = FamilyKind::Debt;
        f.face = range_from(need(params, "face", w), w + ".face");
    } else if (k == "live_or_die") {
        f.kind = FamilyKind::LiveOrDie;
        f.threshold = range_from(need(params, "threshold", w), w + ".threshold");
    } else {
        schema_error("contract_family.kind", "unknown kind '" + k + "'");
    }
    return f;
}

json family_to(const ContractFamily& f) {
    json params = json::object();
    std::string kind;
    auto per_state = [&] {
        json ps = json::array();
        for (const auto& g : f.per_state) ps.push_back(range_to(g));
        params["per_state"] = ps;
    };
    switch (f.kind) {
    case FamilyKind::Grid: kind = "grid"; per_state(); break;
    case FamilyKind::MonotoneBoundedSlope: kind = "monotone_bounded_slope"; per_state(); break;
    case FamilyKind::LinearShare:
        kind = "linear_share";
        params["beta"] = range_to(f.beta);
        params["rent_indexed"] = f.rent_indexed;
        if (f.rent_indexed) params["rent"] = range_to(f.rent);
        else params["wage"] = range_to(f.wage);
        break;
    case FamilyKind::Debt: kind = "debt"; params["face"] = range_to(f.face); break;
    case FamilyKind::LiveOrDie: kind = "live_or_die"; params["threshold"] = range_to(f.threshold); break;
    }
    return json{{"kind", kind}, {"params", params}};
}

AgentUtility utility_from(const json& j) {
    const auto& kind = need(j, "kind", "utility");
    if (!kind.is_string()) schema_error("utility.kind", "expected a string");
    const json params = j.contains("params") ? j.at("params") : json::object();
    AgentUtility u;
    const std::string k = kind.get<std::string>();
    if (k == "risk_neutral") {
        u.kind = UtilityKind::RiskNeutral;
    } else if (k == "cara") {
        u.kind = UtilityKind::Cara;
        u.a = num(need(params, "a", "utility.params"), "utility.params.a");
    } else if (k == "crra") {
        u.kind = UtilityKind::Crra;
        u.gamma = num(need(params, "gamma", "utility.params"), "utility.params.gamma");
        if (params.contains("offset")) u.offset = num(params.at("offset"), "utility.params.offset");
    } else {
        schema_error("utility.kind", "unknown kind '" + k + "'");
    }
    return u;
}

json utility_to(const AgentUtility& u) {
    switch (u.kind) {
    case UtilityKind::RiskNeutral: return json{{"kind", "risk_neutral"}, {"params", json::object()}};
    case UtilityKind::Cara: return json{{"kind", "cara"}, {"params", {{"a", u.a}}}};
    case UtilityKind::Crra: return json{{"kind", "crra"}, {"params", {{"gamma", u.gamma}, {"offset", u.offset}}}};
    }
    return {};
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        throw Error(ErrorCode::Parse, "scenario: syntax error at line " + std::to_string(line) + ", column " +
                                          std::to_string(col));
    }
    if (!j.is_object()) schema_error("document", "expected an object");

    Scenario s;
    const auto& states = need(j, "states", "document");
    if (!states.is_array()) schema_error("states", "expected an array of labels");
    for (const auto& l : states) {
        if (!l.is_string()) schema_error("states", "labels must be strings");
        s.states.labels.push_back(l.get<std::string>());
    }
    s.y.y = num_list(need(j, "output", "document"), "output");
    s.cost = cost_from(need(j, "cost", "document"));
    s.capacity = num(need(j, "capacity", "document"), "capacity");
    s.family = family_from(need(j, "contract_family", "document"));
    s.utility = j.contains("utility") ? utility_from(j.at("utility")) : AgentUtility{};
    if (j.contains("reservation")) s.reservation = num(j.at("reservation"), "reservation");
    if (j.contains("simplex_grid")) {
        const auto& m = j.at("simplex_grid");
        if (!m.is_number_integer()) schema_error("simplex_grid", "expected an integer");
        s.simplex_grid = m.get<int>();
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        if (t.contains("utility")) s.tol_u = num(t.at("utility"), "tolerances.utility");
    }
    // the baseline defaults to zero for quadratic costs
    if (s.cost.kind == CostKind::Quadratic && s.cost.q0.empty()) s.cost.q0.assign(s.n(), 0.0);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Parse, "cannot read scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.what());
    }
}

std::string serialize_scenario(const Scenario& s) {
    json j;
    j["states"] = s.states.labels;
    j["output"] = s.y.y;
    j["cost"] = cost_to(s.cost, s.n());
    j["capacity"] = s.capacity;
    j["contract_family"] = family_to(s.family);
    j["utility"] = utility_to(s.utility);
    j["reservation"] = s.reservation;
    j["simplex_grid"] = s.simplex_grid;
    j["tolerances"] = {{"utility", s.tol_u}};
    return j.dump(2) + "\n";
}

std::string scenario_digest(const Scenario& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : serialize_scenario(s)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

} // namespace agentcap
