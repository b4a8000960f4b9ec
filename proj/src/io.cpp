#include "mree/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mree {

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path, "");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json_text(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &err) {
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(err.byte == 0 ? 0 : err.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                             err.what(),
                         "", line, col);
    }
}

namespace {

std::string at_key(const std::string &path, const std::string &key) { return path.empty() ? key : path + "." + key; }
std::string at_index(const std::string &path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json &field(const Json &obj, const std::string &key, const std::string &path) {
    if (!obj.is_object()) throw ParseError((path.empty() ? "document" : path) + ": expected an object", path);
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(at_key(path, key) + ": missing field", at_key(path, key));
    return *it;
}

double as_number(const Json &v, const std::string &path) {
    if (!v.is_number()) throw ParseError(path + ": expected a number", path);
    return v.get<double>();
}

std::string as_string(const Json &v, const std::string &path) {
    if (!v.is_string()) throw ParseError(path + ": expected a string", path);
    return v.get<std::string>();
}

const Json &as_array(const Json &v, const std::string &path) {
    if (!v.is_array()) throw ParseError(path + ": expected a list", path);
    return v;
}

std::vector<double> as_vector(const Json &v, const std::string &path) {
    std::vector<double> out;
    for (std::size_t i = 0; i < as_array(v, path).size(); ++i) out.push_back(as_number(v[i], at_index(path, i)));
    return out;
}

const char *coeff_key(Family f) {
    switch (f) {
    case Family::linear: return "c";
    case Family::ces: return "w";
    default: return "alpha";
    }
}

UtilitySpec utility_from_json(const Json &u, const std::string &path, const UtilitySpec *base) {
    UtilitySpec spec;
    if (base) spec.family = base->family;
    if (u.is_object() && u.contains("family")) {
        auto name = as_string(u["family"], at_key(path, "family"));
        auto fam = family_from_name(name);
        if (!fam) throw ParseError(at_key(path, "family") + ": unknown family '" + name + "'", at_key(path, "family"));
        spec.family = *fam;
    } else if (!base) {
        field(u, "family", path);
    }
    const std::string ppath = at_key(path, "params");
    const Json &params = field(u, "params", path);
    spec.coeffs = as_vector(field(params, coeff_key(spec.family), ppath), at_key(ppath, coeff_key(spec.family)));
    if (spec.family == Family::ces) spec.rho = as_number(field(params, "rho", ppath), at_key(ppath, "rho"));
    return spec;
}

Json utility_to_json(const UtilitySpec &u) {
    Json params = Json::object();
    params[coeff_key(u.family)] = u.coeffs;
    if (u.family == Family::ces) params["rho"] = u.rho;
    Json j = Json::object();
    j["family"] = family_name(u.family);
    j["params"] = std::move(params);
    return j;
}

} // namespace

Economy economy_from_json(const Json &doc, bool validate) {
    Economy e;
    const Json &goods = field(doc, "goods", "");
    if (!goods.is_number_integer() || goods.get<long long>() <= 0)
        throw ParseError("goods: expected a positive integer", "goods");
    e.goods = goods.get<std::size_t>();

    const Json &states = as_array(field(doc, "states", ""), "states");
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string path = at_index("states", i);
        e.states.ids.push_back(as_string(field(states[i], "id", path), at_key(path, "id")));
        e.states.probs.push_back(as_number(field(states[i], "prob", path), at_key(path, "prob")));
    }
    const std::size_t n = e.states.size();
    auto state_of = [&](const std::string &id, const std::string &path) {
        for (std::size_t s = 0; s < n; ++s)
            if (e.states.ids[s] == id) return s;
        throw EconomyError(path, "unknown state id '" + id + "'");
    };

    const Json &agents = as_array(field(doc, "agents", ""), "agents");
    const std::size_t m = agents.size();
    e.endowment = Endowment(m, n, e.goods);
    for (std::size_t t = 0; t < m; ++t) {
        const Json &a = agents[t];
        const std::string path = at_index("agents", t);
        e.agents.ids.push_back(as_string(field(a, "id", path), at_key(path, "id")));
        e.agents.weights.push_back(as_number(field(a, "weight", path), at_key(path, "weight")));

        const std::string ppath = at_key(path, "partition");
        const Json &blocks = as_array(field(a, "partition", path), ppath);
        std::vector<std::vector<std::size_t>> idx;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const std::string bpath = at_index(ppath, b);
            idx.emplace_back();
            for (std::size_t k = 0; k < as_array(blocks[b], bpath).size(); ++k)
                idx.back().push_back(state_of(as_string(blocks[b][k], at_index(bpath, k)), at_index(bpath, k)));
        }
        try {
            e.partitions.emplace_back(std::move(idx), n);
        } catch (const std::invalid_argument &err) {
            throw EconomyError(ppath, err.what());
        }

        const std::string upath = at_key(path, "utility");
        const Json &u = field(a, "utility", path);
        const UtilitySpec base = utility_from_json(u, upath, nullptr);
        std::vector<UtilitySpec> row(n, base);
        if (u.contains("overrides")) {
            const std::string opath = at_key(upath, "overrides");
            const Json &ov = u["overrides"];
            if (!ov.is_object()) throw ParseError(opath + ": expected an object keyed by state id", opath);
            for (const auto &[sid, spec] : ov.items())
                row[state_of(sid, at_key(opath, sid))] = utility_from_json(spec, at_key(opath, sid), &base);
        }
        e.utility.push_back(std::move(row));

        const std::string epath = at_key(path, "endowment");
        const Json &endow = field(a, "endowment", path);
        if (!endow.is_object()) throw ParseError(epath + ": expected an object keyed by state id", epath);
        for (const auto &[sid, vec] : endow.items()) state_of(sid, at_key(epath, sid));
        for (std::size_t s = 0; s < n; ++s) {
            auto v = as_vector(field(endow, e.states.ids[s], epath), at_key(epath, e.states.ids[s]));
            if (v.size() != e.goods)
                throw EconomyError(at_key(epath, e.states.ids[s]),
                                   "expected " + std::to_string(e.goods) + " quantities");
            e.endowment.set_bundle(t, s, v);
        }

        if (a.contains("prior") && !a["prior"].is_null())
            e.priors.emplace_back(as_vector(a["prior"], at_key(path, "prior")));
        else
            e.priors.emplace_back(std::nullopt);
    }
    if (validate) require_valid(e);
    return e;
}

Economy parse_economy_text(const std::string &text, bool validate) {
    return economy_from_json(parse_json_text(text), validate);
}

Economy parse_economy(const std::string &path, bool validate) { return parse_economy_text(read_file(path), validate); }

Json economy_to_json(const Economy &e) {
    Json doc = Json::object();
    doc["goods"] = e.goods;
    Json states = Json::array();
    for (std::size_t s = 0; s < e.states.size(); ++s) states.push_back({{"id", e.states.ids[s]}, {"prob", e.states.probs[s]}});
    doc["states"] = std::move(states);

    Json agents = Json::array();
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        Json a = Json::object();
        a["id"] = e.agents.ids[t];
        a["weight"] = e.agents.weights[t];
        Json blocks = Json::array();
        for (const auto &b : e.partitions[t].blocks()) {
            Json block = Json::array();
            for (std::size_t s : b) block.push_back(e.states.ids[s]);
            blocks.push_back(std::move(block));
        }
        a["partition"] = std::move(blocks);

        Json u = utility_to_json(e.utility[t][0]);
        Json overrides = Json::object();
        for (std::size_t s = 1; s < e.states.size(); ++s)
            if (!(e.utility[t][s] == e.utility[t][0])) overrides[e.states.ids[s]] = utility_to_json(e.utility[t][s]);
        if (!overrides.empty()) u["overrides"] = std::move(overrides);
        a["utility"] = std::move(u);

        Json endow = Json::object();
        for (std::size_t s = 0; s < e.states.size(); ++s) {
            auto b = e.endow(t, s);
            endow[e.states.ids[s]] = std::vector<double>(b.begin(), b.end());
        }
        a["endowment"] = std::move(endow);
        if (t < e.priors.size() && e.priors[t]) a["prior"] = *e.priors[t];
        agents.push_back(std::move(a));
    }
    doc["agents"] = std::move(agents);
    return doc;
}

std::string serialize_economy(const Economy &e) { return economy_to_json(e).dump(2) + "\n"; }

Json solution_to_json(const Economy &e, const Allocation &f, const PriceSystem &pi) {
    Json doc = Json::object();
    doc["schema_version"] = solution_schema_version;
    Json alloc = Json::object();
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        Json row = Json::object();
        for (std::size_t s = 0; s < e.states.size(); ++s) row[e.states.ids[s]] = vector_json(f.bundle(t, s));
        alloc[e.agents.ids[t]] = std::move(row);
    }
    doc["allocation"] = std::move(alloc);
    Json prices = Json::object();
    for (std::size_t s = 0; s < e.states.size(); ++s) prices[e.states.ids[s]] = vector_json(pi[s].span());
    doc["prices"] = std::move(prices);
    return doc;
}

Solution solution_from_json(const Economy &e, const Json &doc) {
    const Json &version = field(doc, "schema_version", "");
    if (!version.is_number_integer() || version.get<int>() != solution_schema_version)
        throw ParseError("schema_version: expected " + std::to_string(solution_schema_version), "schema_version");
    Solution sol;
    sol.allocation = Allocation(e.agents.size(), e.states.size(), e.goods);
    const Json &alloc = field(doc, "allocation", "");
    for (std::size_t t = 0; t < e.agents.size(); ++t) {
        const std::string apath = at_key("allocation", e.agents.ids[t]);
        const Json &row = field(alloc, e.agents.ids[t], "allocation");
        for (std::size_t s = 0; s < e.states.size(); ++s) {
            const std::string spath = at_key(apath, e.states.ids[s]);
            auto v = as_vector(field(row, e.states.ids[s], apath), spath);
            if (v.size() != e.goods) throw ParseError(spath + ": expected " + std::to_string(e.goods) + " quantities", spath);
            sol.allocation.set_bundle(t, s, v);
        }
    }
    const Json &prices = field(doc, "prices", "");
    for (std::size_t s = 0; s < e.states.size(); ++s) {
        const std::string ppath = at_key("prices", e.states.ids[s]);
        auto v = as_vector(field(prices, e.states.ids[s], "prices"), ppath);
        if (v.size() != e.goods) throw ParseError(ppath + ": expected " + std::to_string(e.goods) + " prices", ppath);
        try {
            sol.prices.prices.emplace_back(std::move(v));
        } catch (const EconomyError &err) {
            throw ParseError(ppath + ": " + err.what(), ppath);
        }
    }
    return sol;
}

Solution parse_solution(const Economy &e, const std::string &path) {
    return solution_from_json(e, parse_json_text(read_file(path)));
}

Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

Json vector_json(std::span<const double> v) {
    Json out = Json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

Json config_json(const Config &cfg) {
    Json j = Json::object();
    j["tol_clear"] = cfg.tol_clear;
    j["tol_budget"] = cfg.tol_budget;
    j["tol_pref"] = cfg.tol_pref;
    j["tol_price"] = cfg.tol_price;
    j["tol_dev"] = cfg.tol_dev;
    j["tol_tie"] = cfg.tol_tie;
    j["p_min"] = cfg.p_min;
    j["resolution"] = cfg.resolution;
    j["grid_n"] = cfg.grid_n;
    j["max_iter"] = cfg.max_iter;
    j["step0"] = cfg.step0;
    j["demand_max_iter"] = cfg.demand_max_iter;
    j["demand_tol"] = cfg.demand_tol;
    j["max_points"] = cfg.max_points;
    j["combo_budget"] = cfg.combo_budget;
    j["deviation_combo_budget"] = cfg.deviation_combo_budget;
    j["support_directions"] = cfg.support_directions;
    j["selection_samples"] = cfg.selection_samples;
    j["local_window"] = cfg.local_window;
    j["seed"] = cfg.seed;
    j["parallel"] = cfg.parallel;
    return j;
}

} // namespace mree
