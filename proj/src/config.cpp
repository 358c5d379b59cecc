#include <algorithm>
#include <cmath>
#include <fstream>

#include "cfma/experiments.hpp"

namespace cfma {

using nlohmann::json;

const char* to_string(Scenario s)
{
    switch (s) {
    case Scenario::simo: return "simo";
    case Scenario::diagonal_mimo: return "diagonal-mimo";
    case Scenario::generic_mimo: return "generic-mimo";
    }
    return "?";
}

const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::scs: return "scs";
    case Scheme::scs_perm: return "scs-perm";
    case Scheme::pcs: return "pcs";
    }
    return "?";
}

Scenario parse_scenario(const std::string& s)
{
    if (s == "simo")
        return Scenario::simo;
    if (s == "diagonal-mimo" || s == "diagonal")
        return Scenario::diagonal_mimo;
    if (s == "generic-mimo" || s == "generic")
        return Scenario::generic_mimo;
    throw Error(Errc::config_error, "unknown scenario '" + s + "'");
}

Scheme parse_scheme(const std::string& s)
{
    if (s == "scs")
        return Scheme::scs;
    if (s == "scs-perm")
        return Scheme::scs_perm;
    if (s == "pcs")
        return Scheme::pcs;
    throw Error(Errc::config_error, "unknown scheme '" + s + "'");
}

std::vector<double> power_grid(double start, double stop, double step)
{
    if (!(step > 0.0) || stop < start)
        throw Error(Errc::config_error, "power grid needs step > 0 and stop >= start");
    std::vector<double> grid;
    const long long n = std::llround(std::floor((stop - start) / step + 1e-9));
    for (long long k = 0; k <= n; ++k)
        grid.push_back(start + static_cast<double>(k) * step);
    return grid;
}

void SweepConfig::validate() const
{
    if (realizations < 1)
        throw Error(Errc::config_error, "realizations must be at least 1");
    if (power_grid_db.empty())
        throw Error(Errc::config_error, "power grid is empty");
    if (!std::is_sorted(power_grid_db.begin(), power_grid_db.end()))
        throw Error(Errc::config_error, "power grid must be sorted");
    if (!(dist.lo < dist.hi))
        throw Error(Errc::config_error, "distribution needs lo < hi");
    if (r < 1 || t < 1)
        throw Error(Errc::config_error, "antenna counts must be positive");
    if (scenario == Scenario::simo && t != 1)
        throw Error(Errc::config_error, "simo scenario needs t = 1");
    if (scenario == Scenario::diagonal_mimo && r != t)
        throw Error(Errc::config_error, "diagonal scenario needs r = t");
    if (schemes.empty())
        throw Error(Errc::config_error, "no schemes selected");
    if (threads < 1)
        throw Error(Errc::config_error, "threads must be positive");
    if (pcs_search.entry_bound < 1 || pcs_search.entry_bound > 5)
        throw Error(Errc::config_error, "entry bound must lie in [1, 5]");
    if (pcs_search.beta_grid.points < 1 || !(pcs_search.beta_grid.lo > 0.0) ||
        pcs_search.beta_grid.hi < pcs_search.beta_grid.lo)
        throw Error(Errc::config_error, "invalid beta grid");
    if (pcs_search.max_candidates < 1)
        throw Error(Errc::config_error, "max_candidates must be positive");
}

SweepConfig config_from_json(const json& j)
{
    try {
        SweepConfig cfg;
        if (!j.is_object())
            throw Error(Errc::config_error, "config must be a JSON object");
        for (const auto& [key, _] : j.items()) {
            static const char* known[] = {"scenario", "r", "t", "dims", "dist", "power_grid_db", "realizations",
                                          "seed", "schemes", "pcs_search", "threads"};
            if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; }))
                throw Error(Errc::config_error, "unknown config key '" + key + "'");
        }
        if (j.contains("scenario"))
            cfg.scenario = parse_scenario(j.at("scenario").get<std::string>());
        if (cfg.scenario == Scenario::simo)
            cfg.t = 1;
        if (j.contains("dims")) {
            const auto dims = j.at("dims").get<std::vector<int>>();
            if (dims.size() != 2)
                throw Error(Errc::config_error, "dims must be [r, t]");
            cfg.r = dims[0];
            cfg.t = dims[1];
        }
        if (j.contains("r"))
            cfg.r = j.at("r").get<int>();
        if (j.contains("t"))
            cfg.t = j.at("t").get<int>();
        if (j.contains("dist")) {
            const json& d = j.at("dist");
            cfg.dist.lo = d.at("lo").get<double>();
            cfg.dist.hi = d.at("hi").get<double>();
        }
        if (j.contains("power_grid_db")) {
            const json& g = j.at("power_grid_db");
            if (g.is_array())
                cfg.power_grid_db = g.get<std::vector<double>>();
            else
                cfg.power_grid_db = power_grid(g.at("start").get<double>(), g.at("stop").get<double>(),
                                               g.at("step").get<double>());
        } else {
            cfg.power_grid_db = power_grid(0.0, 24.0, 1.0);
        }
        if (j.contains("realizations"))
            cfg.realizations = j.at("realizations").get<long long>();
        if (j.contains("seed"))
            cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("schemes")) {
            cfg.schemes.clear();
            for (const auto& s : j.at("schemes"))
                cfg.schemes.push_back(parse_scheme(s.get<std::string>()));
        }
        if (j.contains("threads"))
            cfg.threads = j.at("threads").get<int>();
        if (j.contains("pcs_search")) {
            const json& p = j.at("pcs_search");
            cfg.pcs_search.entry_bound = p.value("entry_bound", cfg.pcs_search.entry_bound);
            cfg.pcs_search.max_candidates = p.value("max_candidates", cfg.pcs_search.max_candidates);
            if (p.contains("beta_grid")) {
                const json& b = p.at("beta_grid");
                cfg.pcs_search.beta_grid.points = b.value("points", cfg.pcs_search.beta_grid.points);
                cfg.pcs_search.beta_grid.lo = b.value("lo", cfg.pcs_search.beta_grid.lo);
                cfg.pcs_search.beta_grid.hi = b.value("hi", cfg.pcs_search.beta_grid.hi);
            }
        }
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw Error(Errc::config_error, e.what());
    }
}

SweepConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_failure, "cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::config_error, std::string("malformed JSON config: ") + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const SweepConfig& cfg)
{
    json schemes = json::array();
    for (Scheme s : cfg.schemes)
        schemes.push_back(to_string(s));
    return json{
        {"scenario", to_string(cfg.scenario)},
        {"r", cfg.r},
        {"t", cfg.t},
        {"dist", {{"kind", "uniform"}, {"lo", cfg.dist.lo}, {"hi", cfg.dist.hi}}},
        {"power_grid_db", cfg.power_grid_db},
        {"realizations", cfg.realizations},
        {"seed", cfg.seed},
        {"schemes", schemes},
        {"threads", cfg.threads},
        {"pcs_search",
         {{"entry_bound", cfg.pcs_search.entry_bound},
          {"max_candidates", cfg.pcs_search.max_candidates},
          {"beta_grid",
           {{"points", cfg.pcs_search.beta_grid.points},
            {"lo", cfg.pcs_search.beta_grid.lo},
            {"hi", cfg.pcs_search.beta_grid.hi}}}}},
    };
}

} // namespace cfma
