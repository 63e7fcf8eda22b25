#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ionflux/config.hpp"
#include "ionflux/experiments.hpp"
#include "ionflux/langevin.hpp"
#include "ionflux/scenario.hpp"

namespace ionflux {

inline constexpr std::string_view kSteadyHeader =
    "site,omega_n/omega1,T_n_mK,j_n_W,J_L_W,J_R_W,residual";
inline constexpr std::string_view kLangevinHeader =
    "site,omega_n/omega1,T_n_mK,T_n_se_mK,j_n_W,j_n_se_W,J_L_W,J_L_se_W,J_R_W,J_R_se_W";
inline constexpr std::string_view kSeriesHeader = "time_us,J_L_W,J_R_W,J_total_W";
inline constexpr std::string_view kCompareHeader =
    "delta_omega_ratio,graded_J_max_W,graded_R,segmented_J_max_W,segmented_R,graded_status,"
    "segmented_status";

/// Sweep header: axis names followed by J_fwd_W,J_bwd_W,R,status.
std::string sweep_header(const SweepResult& result);

std::string version_string();

struct Provenance
{
  std::string command;
  std::string config_hash;
  std::string solver;
};

Provenance make_provenance(std::string command, const RunConfig& config, std::string solver);

void write_steady_csv(std::ostream& out, const SteadyStateReport& report);
void write_langevin_csv(std::ostream& out, const LangevinReport& report);
void write_series_csv(std::ostream& out, const CurrentSeries& series);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_compare_csv(std::ostream& out, const ProfileComparison& comparison);

nlohmann::json steady_json(const SteadyStateReport& report, const Provenance& provenance);
nlohmann::json langevin_json(const LangevinReport& report, const Provenance& provenance);
nlohmann::json sweep_json(const SweepResult& result, const Provenance& provenance);
nlohmann::json compare_json(const ProfileComparison& comparison, const Provenance& provenance);

}  // namespace ionflux
