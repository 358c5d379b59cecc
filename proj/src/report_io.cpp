#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "cfma/experiments.hpp"
#include "cfma/rng.hpp"

namespace cfma {

using nlohmann::json;

Format parse_format(const std::string& s)
{
    if (s == "csv")
        return Format::csv;
    if (s == "json")
        return Format::json;
    throw Error(Errc::config_error, "unknown format '" + s + "'");
}

namespace {

std::string sig6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

json artifact_meta(const json& config, bool with_timestamp)
{
    json meta{{"config", config},
              {"rng", rng_identifier},
              {"realization_policy", "one channel draw per realization, reused across the power grid"}};
    if (with_timestamp)
        meta["generated_at"] = utc_timestamp();
    return meta;
}

std::string curve_csv(const RaCurve& curve, const json& meta)
{
    std::ostringstream out;
    for (const auto& [key, value] : meta.items())
        out << "# " << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    out << "p_db,scheme,realizations,achievable,errors,r_a\n";
    for (const RaRow& row : curve.rows)
        out << sig6(row.p_db) << ',' << row.scheme << ',' << row.realizations << ',' << row.achievable << ','
            << row.errors << ',' << sig6(row.r_a()) << '\n';
    return out.str();
}

json curve_json(const RaCurve& curve, const json& meta)
{
    json rows = json::array();
    for (const RaRow& row : curve.rows)
        rows.push_back({{"p_db", row.p_db},
                        {"scheme", row.scheme},
                        {"realizations", row.realizations},
                        {"achievable", row.achievable},
                        {"errors", row.errors},
                        {"r_a", row.r_a()}});
    json out = meta;
    out["rows"] = rows;
    return out;
}

std::vector<RaRow> read_csv_rows(const std::string& text)
{
    std::vector<RaRow> rows;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        if (!header) {
            if (line != "p_db,scheme,realizations,achievable,errors,r_a")
                throw Error(Errc::io_failure, "unexpected CSV header");
            header = true;
            continue;
        }
        std::istringstream fields(line);
        std::string p, scheme, n, a, e, ra;
        if (!std::getline(fields, p, ',') || !std::getline(fields, scheme, ',') || !std::getline(fields, n, ',') ||
            !std::getline(fields, a, ',') || !std::getline(fields, e, ',') || !std::getline(fields, ra))
            throw Error(Errc::io_failure, "malformed CSV row");
        rows.push_back(RaRow{std::stod(p), scheme, std::stoll(n), std::stoll(a), std::stoll(e)});
    }
    return rows;
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::io_failure, "cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out)
        throw Error(Errc::io_failure, "failed writing '" + path + "'");
}

} // namespace cfma
