#include "cfma/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace cfma {

using nlohmann::json;

const RaRow* RaCurve::find(double p_db, const std::string& scheme) const
{
    for (const RaRow& row : rows)
        if (row.scheme == scheme && std::abs(row.p_db - p_db) < 1e-9)
            return &row;
    return nullptr;
}

ChannelPair draw_channel(const SweepConfig& cfg, std::uint64_t index)
{
    switch (cfg.scenario) {
    case Scenario::diagonal_mimo: return diagonal_random_channel(cfg.r, cfg.dist, cfg.seed, index);
    case Scenario::simo: return random_channel(cfg.r, 1, cfg.dist, cfg.seed, index);
    case Scenario::generic_mimo: break;
    }
    return random_channel(cfg.r, cfg.t, cfg.dist, cfg.seed, index);
}

namespace {

RaCurve empty_curve(const SweepConfig& cfg, const std::vector<std::string>& labels)
{
    RaCurve curve;
    for (double p : cfg.power_grid_db)
        for (const std::string& label : labels)
            curve.rows.push_back(RaRow{p, label, 0, 0, 0});
    return curve;
}

std::vector<std::string> scheme_labels(const SweepConfig& cfg)
{
    std::vector<std::string> labels;
    for (Scheme s : cfg.schemes)
        labels.emplace_back(to_string(s));
    return labels;
}

bool run_scheme(Scheme scheme, const ChannelPair& ch, const CapacityResult& cap, const PcsSearch& search)
{
    switch (scheme) {
    case Scheme::scs: return scs_check(ch, cap, PrecoderStrategy::cholesky).achievable;
    case Scheme::scs_perm: return scs_check(ch, cap, PrecoderStrategy::permutations).achievable;
    case Scheme::pcs: return pcs_check(ch, cap, search).achievable;
    }
    return false;
}

} // namespace

RaCurve run_ra_shard(const SweepConfig& cfg, long long begin, long long end)
{
    const std::size_t k = cfg.schemes.size();
    RaCurve curve = empty_curve(cfg, scheme_labels(cfg));
    for (long long n = begin; n < end; ++n) {
        const ChannelPair ch = draw_channel(cfg, static_cast<std::uint64_t>(n));
        for (std::size_t pi = 0; pi < cfg.power_grid_db.size(); ++pi) {
            RaRow* rows = &curve.rows[pi * k];
            std::optional<CapacityResult> cap;
            try {
                cap = sum_capacity(ch, db_to_linear(cfg.power_grid_db[pi]));
            } catch (const Error&) {
            }
            for (std::size_t s = 0; s < k; ++s) {
                ++rows[s].realizations;
                if (!cap) {
                    ++rows[s].errors;
                    continue;
                }
                try {
                    if (run_scheme(cfg.schemes[s], ch, *cap, cfg.pcs_search))
                        ++rows[s].achievable;
                } catch (const Error&) {
                    ++rows[s].errors;
                }
            }
        }
    }
    return curve;
}

RaCurve merge_curves(const RaCurve& a, const RaCurve& b)
{
    if (a.rows.size() != b.rows.size())
        throw Error(Errc::dimension_mismatch, "cannot merge curves of different shape");
    RaCurve out = a;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        if (out.rows[i].scheme != b.rows[i].scheme || out.rows[i].p_db != b.rows[i].p_db)
            throw Error(Errc::dimension_mismatch, "cannot merge curves with different rows");
        out.rows[i].realizations += b.rows[i].realizations;
        out.rows[i].achievable += b.rows[i].achievable;
        out.rows[i].errors += b.rows[i].errors;
    }
    return out;
}

RaCurve run_ra_sweep(const SweepConfig& cfg)
{
    cfg.validate();
    const long long workers = std::min<long long>(cfg.threads, cfg.realizations);
    if (workers <= 1)
        return run_ra_shard(cfg, 0, cfg.realizations);
    std::vector<RaCurve> parts(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (long long w = 0; w < workers; ++w) {
        const long long begin = cfg.realizations * w / workers;
        const long long end = cfg.realizations * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] { parts[static_cast<std::size_t>(w)] = run_ra_shard(cfg, begin, end); });
    }
    for (std::thread& th : pool)
        th.join();
    RaCurve total = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i)
        total = merge_curves(total, parts[i]);
    return total;
}

RaCurve run_permutation_compare(const SweepConfig& cfg)
{
    SweepConfig paired = cfg;
    paired.schemes = {Scheme::scs, Scheme::scs_perm};
    const RaCurve base = run_ra_sweep(paired);
    RaCurve out;
    for (std::size_t i = 0; i + 1 < base.rows.size(); i += 2) {
        const RaRow& plain = base.rows[i];
        const RaRow& perm = base.rows[i + 1];
        out.rows.push_back(plain);
        out.rows.push_back(perm);
        out.rows.push_back(RaRow{plain.p_db, "delta", plain.realizations, perm.achievable - plain.achievable,
                                 plain.errors + perm.errors});
    }
    return out;
}

ChannelPair table1_channel()
{
    Matrix h1(2, 2), h2(2, 2);
    h1 << 1.3, 1.2, 1.3, 1.8;
    h2 << 1.4, 1.2, 1.2, 1.9;
    return ChannelPair(h1, h2);
}

std::vector<Table1Row> run_table1(const ChannelPair& ch, const std::vector<double>& power_grid_db,
                                  const PcsSearch& pcs_search, bool run_scs, bool run_pcs)
{
    std::vector<Table1Row> rows;
    for (double p_db : power_grid_db) {
        Table1Row row;
        row.p_db = p_db;
        try {
            const CapacityResult cap = sum_capacity(ch, db_to_linear(p_db));
            if (run_scs)
                row.scs = scs_check(ch, cap, PrecoderStrategy::cholesky);
            if (run_pcs)
                row.pcs = pcs_check(ch, cap, pcs_search);
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

RaCurve table1_curve(const std::vector<Table1Row>& rows)
{
    RaCurve curve;
    for (const Table1Row& row : rows) {
        const bool failed = !row.error.empty();
        if (row.scs || failed)
            curve.rows.push_back(RaRow{row.p_db, "scs", 1, row.scs && row.scs->achievable ? 1 : 0, failed ? 1 : 0});
        if (row.pcs || failed)
            curve.rows.push_back(RaRow{row.p_db, "pcs", 1, row.pcs && row.pcs->achievable ? 1 : 0, failed ? 1 : 0});
    }
    return curve;
}

namespace {

json matrix_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json int_matrix_json(const IntMatrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

} // namespace

json table1_json(const std::vector<Table1Row>& rows)
{
    json out = json::array();
    for (const Table1Row& row : rows) {
        json r{{"p_db", row.p_db}};
        if (!row.error.empty())
            r["error"] = row.error;
        if (row.scs) {
            const ScsReport& s = *row.scs;
            json js{{"achievable", s.achievable},
                    {"precoder", s.precoder_label()},
                    {"g_min", s.g_min},
                    {"g_coefficients", s.g_poly.coefficients()},
                    {"c_sum_bits", s.capacity.c_sum}};
            if (s.gamma_witness)
                js["gamma_witness"] = *s.gamma_witness;
            if (s.gamma_interval)
                js["gamma_interval"] = {s.gamma_interval->first, s.gamma_interval->second};
            r["scs"] = js;
        }
        if (row.pcs) {
            const PcsReport& p = *row.pcs;
            json jp{{"achievable", p.achievable},
                    {"t1", p.system.t1},
                    {"t2", p.system.t2},
                    {"capacity_bits", p.capacity_bits},
                    {"sum_rate_bits", p.sum_rate},
                    {"candidates_examined", p.candidates_examined},
                    {"budget_exhausted", p.budget_exhausted}};
            if (p.witness) {
                jp["witness"] = {{"A", int_matrix_json(p.witness->a)},
                                 {"pi", p.witness->pi},
                                 {"beta", vector_json(p.witness->beta)},
                                 {"sigma_hat2", vector_json(p.witness->sigma_hat2)},
                                 {"rates", vector_json(p.witness->rates)}};
            }
            jp["h_tilde"] = matrix_json(p.system.h_tilde);
            r["pcs"] = jp;
        }
        out.push_back(r);
    }
    return out;
}

} // namespace cfma
