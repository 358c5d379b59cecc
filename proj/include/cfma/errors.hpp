#pragma once

#include <stdexcept>
#include <string>

namespace cfma {

enum class Errc {
    not_psd,
    no_convergence,
    degenerate_input,
    infeasible_rates,
    degenerate_power_split,
    inapplicable,
    rank_mismatch,
    singular_projection,
    search_space_too_large,
    dimension_mismatch,
    io_failure,
    config_error,
};

inline const char* to_string(Errc code)
{
    switch (code) {
    case Errc::not_psd: return "NotPSD";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::degenerate_input: return "DegenerateInput";
    case Errc::infeasible_rates: return "InfeasibleRates";
    case Errc::degenerate_power_split: return "DegeneratePowerSplit";
    case Errc::inapplicable: return "Inapplicable";
    case Errc::rank_mismatch: return "RankMismatch";
    case Errc::singular_projection: return "SingularProjection";
    case Errc::search_space_too_large: return "SearchSpaceTooLarge";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::io_failure: return "IoFailure";
    case Errc::config_error: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace cfma
