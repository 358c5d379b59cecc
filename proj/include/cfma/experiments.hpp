#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfma/channel.hpp"
#include "cfma/pcs.hpp"
#include "cfma/scs.hpp"

namespace cfma {

enum class Scenario { simo, diagonal_mimo, generic_mimo };
enum class Scheme { scs, scs_perm, pcs };

const char* to_string(Scenario s);
const char* to_string(Scheme s);
Scenario parse_scenario(const std::string& s);
Scheme parse_scheme(const std::string& s);

struct SweepConfig {
    Scenario scenario = Scenario::generic_mimo;
    int r = 2;
    int t = 2;
    Uniform dist{0.0, 1.0};
    std::vector<double> power_grid_db;
    long long realizations = 1000;
    std::uint64_t seed = 1;
    std::vector<Scheme> schemes{Scheme::scs};
    PcsSearch pcs_search;
    int threads = 1;

    void validate() const;
};

std::vector<double> power_grid(double start, double stop, double step);

SweepConfig config_from_json(const nlohmann::json& j);
SweepConfig load_config(const std::string& path);
nlohmann::json config_to_json(const SweepConfig& cfg);

struct RaRow {
    double p_db = 0.0;
    std::string scheme;
    long long realizations = 0;
    long long achievable = 0;
    long long errors = 0;

    double r_a() const { return realizations > 0 ? static_cast<double>(achievable) / static_cast<double>(realizations) : 0.0; }
};

struct RaCurve {
    std::vector<RaRow> rows;

    const RaRow* find(double p_db, const std::string& scheme) const;
};

// Channel for realization `index`; depends only on (seed, index, scenario, dims, dist).
ChannelPair draw_channel(const SweepConfig& cfg, std::uint64_t index);

// Tallies realizations [begin, end); merging shards by addition reproduces
// the single-pass counts.
RaCurve run_ra_shard(const SweepConfig& cfg, long long begin, long long end);
RaCurve merge_curves(const RaCurve& a, const RaCurve& b);
RaCurve run_ra_sweep(const SweepConfig& cfg);

struct Table1Row {
    double p_db = 0.0;
    std::optional<ScsReport> scs;
    std::optional<PcsReport> pcs;
    std::string error;
};

std::vector<Table1Row> run_table1(const ChannelPair& ch, const std::vector<double>& power_grid_db,
                                  const PcsSearch& pcs_search, bool run_scs = true, bool run_pcs = true);
RaCurve table1_curve(const std::vector<Table1Row>& rows);
nlohmann::json table1_json(const std::vector<Table1Row>& rows);

// SCS against SCS with permutation precoders on the same realizations, plus
// a "delta" row per power point holding the difference in counts and R_A.
RaCurve run_permutation_compare(const SweepConfig& cfg);

ChannelPair table1_channel();

enum class Format { csv, json };
Format parse_format(const std::string& s);

std::string curve_csv(const RaCurve& curve, const nlohmann::json& meta);
nlohmann::json curve_json(const RaCurve& curve, const nlohmann::json& meta);
std::vector<RaRow> read_csv_rows(const std::string& text);

// Metadata block shared by every artifact: config, RNG identifier, sweep policy, timestamp.
nlohmann::json artifact_meta(const nlohmann::json& config, bool with_timestamp = true);

void write_text_file(const std::string& path, const std::string& content);

} // namespace cfma
