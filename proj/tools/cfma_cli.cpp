#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cfma/experiments.hpp"

using namespace cfma;
using nlohmann::json;

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    std::string scheme;
    std::optional<int> entry_bound;
    std::optional<long long> realizations;
    std::string scenario;
    std::string dist;
    std::string grid;
    std::string dims;
    std::optional<int> threads;
};

std::vector<double> parse_numbers(const std::string& text, char sep)
{
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(Errc::config_error, "cannot parse number '" + item + "'");
        }
    }
    return out;
}

// "a,b;c,d" -> 2x2 matrix
Matrix parse_matrix(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string row;
    while (std::getline(in, row, ';'))
        rows.push_back(parse_numbers(row, ','));
    if (rows.empty() || rows[0].empty())
        throw Error(Errc::config_error, "empty matrix");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw Error(Errc::config_error, "ragged matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

// "start:stop:step" or "p1,p2,..."
std::vector<double> parse_grid(const std::string& text)
{
    if (text.find(':') != std::string::npos) {
        const auto parts = parse_numbers(text, ':');
        if (parts.size() != 3)
            throw Error(Errc::config_error, "power grid range must be start:stop:step");
        return power_grid(parts[0], parts[1], parts[2]);
    }
    return parse_numbers(text, ',');
}

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config_path, "JSON config file mirroring the sweep settings");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--out", f.out, "output path (default: stdout)");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--scheme", f.scheme, "scs, pcs, both or scs-perm")
        ->check(CLI::IsMember({"scs", "pcs", "both", "scs-perm"}));
    cmd->add_option("--entry-bound", f.entry_bound, "largest |entry| in the unimodular search");
    cmd->add_option("--power-grid", f.grid, "dB grid as start:stop:step or a comma list");
}

void add_sweep_flags(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--realizations", f.realizations, "number of channel draws");
    cmd->add_option("--scenario", f.scenario, "simo, diagonal-mimo or generic-mimo");
    cmd->add_option("--dist", f.dist, "uniform bounds as lo,hi");
    cmd->add_option("--dims", f.dims, "antenna counts as r,t");
    cmd->add_option("--threads", f.threads, "worker threads");
}

std::vector<Scheme> schemes_for(const std::string& s)
{
    if (s == "both")
        return {Scheme::scs, Scheme::pcs};
    return {parse_scheme(s)};
}

SweepConfig build_config(const CommonFlags& f)
{
    SweepConfig cfg;
    cfg.power_grid_db = power_grid(0.0, 24.0, 1.0);
    if (!f.config_path.empty())
        cfg = load_config(f.config_path);
    if (!f.scenario.empty()) {
        cfg.scenario = parse_scenario(f.scenario);
        if (cfg.scenario == Scenario::simo)
            cfg.t = 1;
    }
    if (!f.dims.empty()) {
        const auto d = parse_numbers(f.dims, ',');
        if (d.size() != 2)
            throw Error(Errc::config_error, "--dims expects r,t");
        cfg.r = static_cast<int>(d[0]);
        cfg.t = static_cast<int>(d[1]);
    }
    if (!f.dist.empty()) {
        const auto d = parse_numbers(f.dist, ',');
        if (d.size() != 2)
            throw Error(Errc::config_error, "--dist expects lo,hi");
        cfg.dist = Uniform{d[0], d[1]};
    }
    if (!f.grid.empty())
        cfg.power_grid_db = parse_grid(f.grid);
    if (f.seed)
        cfg.seed = *f.seed;
    if (f.realizations)
        cfg.realizations = *f.realizations;
    if (f.threads)
        cfg.threads = *f.threads;
    if (!f.scheme.empty())
        cfg.schemes = schemes_for(f.scheme);
    if (f.entry_bound)
        cfg.pcs_search.entry_bound = *f.entry_bound;
    cfg.validate();
    return cfg;
}

void emit(const std::string& content, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << content;
        if (!std::cout)
            throw Error(Errc::io_failure, "failed writing to stdout");
    } else {
        write_text_file(path, content);
    }
}

void emit_curve(const RaCurve& curve, const json& meta, const CommonFlags& f)
{
    if (parse_format(f.format) == Format::csv)
        emit(curve_csv(curve, meta), f.out);
    else
        emit(curve_json(curve, meta).dump(2) + "\n", f.out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compute-forward multiple access achievability for two-user MIMO MACs"};
    app.require_subcommand(1);

    CommonFlags sweep_f, table_f, perm_f, check_f;
    std::string h1_text, h2_text;
    double check_p_db = 0.0;

    CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo R_A sweep over a power grid");
    add_common(sweep, sweep_f);
    add_sweep_flags(sweep, sweep_f);

    CLI::App* table1 = app.add_subcommand("table1", "per-power verdicts for one fixed channel");
    add_common(table1, table_f);
    table1->add_option("--h1", h1_text, "H1 as rows separated by ';', entries by ','");
    table1->add_option("--h2", h2_text, "H2 in the same layout");

    CLI::App* perm = app.add_subcommand("perm-compare", "paired SCS vs SCS with permutation precoders");
    add_common(perm, perm_f);
    add_sweep_flags(perm, perm_f);

    CLI::App* check = app.add_subcommand("check", "verdicts for a single channel and power");
    add_common(check, check_f);
    check->add_option("--h1", h1_text, "H1 as rows separated by ';', entries by ','")->required();
    check->add_option("--h2", h2_text, "H2 in the same layout")->required();
    check->add_option("--p-db", check_p_db, "power in dB")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (sweep->parsed()) {
            const SweepConfig cfg = build_config(sweep_f);
            emit_curve(run_ra_sweep(cfg), artifact_meta(config_to_json(cfg)), sweep_f);
        } else if (perm->parsed()) {
            const SweepConfig cfg = build_config(perm_f);
            json meta = artifact_meta(config_to_json(cfg));
            meta["config"]["schemes"] = {"scs", "scs-perm"};
            emit_curve(run_permutation_compare(cfg), meta, perm_f);
        } else if (table1->parsed() || check->parsed()) {
            CommonFlags& f = table1->parsed() ? table_f : check_f;
            ChannelPair ch = table1_channel();
            if (!h1_text.empty() || !h2_text.empty()) {
                if (h1_text.empty() || h2_text.empty())
                    throw Error(Errc::config_error, "both --h1 and --h2 are required");
                ch = ChannelPair(parse_matrix(h1_text), parse_matrix(h2_text));
            }
            PcsSearch search;
            std::vector<double> grid = power_grid(0.0, 24.0, 2.0);
            if (!f.config_path.empty()) {
                const SweepConfig cfg = load_config(f.config_path);
                search = cfg.pcs_search;
                grid = cfg.power_grid_db;
            }
            if (f.entry_bound)
                search.entry_bound = *f.entry_bound;
            if (!f.grid.empty())
                grid = parse_grid(f.grid);
            if (check->parsed())
                grid = {check_p_db};
            if (search.entry_bound < 1 || search.entry_bound > 5)
                throw Error(Errc::config_error, "entry bound must lie in [1, 5]");
            const std::string scheme = f.scheme.empty() ? "both" : f.scheme;
            if (scheme == "scs-perm")
                throw Error(Errc::config_error, "scs-perm is only available for sweeps");
            const bool run_scs = scheme != "pcs";
            const bool run_pcs = scheme != "scs";
            const auto rows = run_table1(ch, grid, search, run_scs, run_pcs);

            json config{{"h1", json::array()}, {"h2", json::array()}, {"power_grid_db", grid},
                        {"pcs_search",
                         {{"entry_bound", search.entry_bound},
                          {"max_candidates", search.max_candidates},
                          {"beta_grid",
                           {{"points", search.beta_grid.points},
                            {"lo", search.beta_grid.lo},
                            {"hi", search.beta_grid.hi}}}}}};
            for (Eigen::Index i = 0; i < ch.r(); ++i) {
                config["h1"].push_back(std::vector<double>(ch.t()));
                config["h2"].push_back(std::vector<double>(ch.t()));
                for (Eigen::Index j = 0; j < ch.t(); ++j) {
                    config["h1"][i][j] = ch.h1(i, j);
                    config["h2"][i][j] = ch.h2(i, j);
                }
            }
            json meta = artifact_meta(config);
            if (parse_format(f.format) == Format::csv) {
                emit(curve_csv(table1_curve(rows), meta), f.out);
            } else {
                json out = curve_json(table1_curve(rows), meta);
                out["details"] = table1_json(rows);
                emit(out.dump(2) + "\n", f.out);
            }
        }
    } catch (const Error& e) {
        std::cerr << "cfma: " << e.what() << '\n';
        if (e.code() == Errc::io_failure)
            return kIoError;
        if (e.code() == Errc::config_error || e.code() == Errc::dimension_mismatch ||
            e.code() == Errc::degenerate_input)
            return kConfigError;
        return 1;
    }
    return 0;
}
