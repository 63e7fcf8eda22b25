#include "ionflux/report_io.hpp"

#include <cmath>
#include <cstdio>

#ifndef IONFLUX_VERSION
#define IONFLUX_VERSION "0.0.0"
#endif

namespace ionflux {

namespace {

std::string sci(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9e", v);
  return buf;
}

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c == '"' ? "\"\"" : std::string(1, c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

nlohmann::json finite_or_null(double v)
{
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json vector_json(const Eigen::VectorXd& v)
{
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(finite_or_null(v[i]));
  }
  return out;
}

nlohmann::json provenance_json(const Provenance& p)
{
  return {{"tool", "ionflux"},
          {"version", version_string()},
          {"command", p.command},
          {"config_hash", p.config_hash},
          {"solver", p.solver}};
}

nlohmann::json rows_json(const SweepResult& result)
{
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : result.rows) {
    nlohmann::json params;
    for (std::size_t a = 0; a < result.axis_names.size(); ++a) {
      params[result.axis_names[a]] = row.parameters[a];
    }
    rows.push_back({{"parameters", params},
                    {"J_fwd_W", finite_or_null(row.J_forward)},
                    {"J_bwd_W", finite_or_null(row.J_backward)},
                    {"R", finite_or_null(row.R)},
                    {"status", row.status},
                    {"diagnostics", {{"energy_balance", row.energy_balance}, {"warnings", row.warnings}}}});
  }
  return rows;
}

}  // namespace

std::string version_string()
{
  return IONFLUX_VERSION;
}

Provenance make_provenance(std::string command, const RunConfig& config, std::string solver)
{
  return {std::move(command), config_hash(config), std::move(solver)};
}

std::string sweep_header(const SweepResult& result)
{
  std::string header;
  for (const auto& name : result.axis_names) {
    header += name + ",";
  }
  return header + "J_fwd_W,J_bwd_W,R,status";
}

void write_steady_csv(std::ostream& out, const SteadyStateReport& report)
{
  out << kSteadyHeader << "\n";
  for (Eigen::Index n = 0; n < report.temperatures_mK.size(); ++n) {
    out << n + 1 << "," << num(report.omega_ratio[n]) << "," << num(report.temperatures_mK[n]) << ","
        << sci(report.site_currents_W[n]) << "," << sci(report.J_L_W) << "," << sci(report.J_R_W)
        << "," << sci(report.state.moment_residual) << "\n";
  }
}

void write_langevin_csv(std::ostream& out, const LangevinReport& report)
{
  out << kLangevinHeader << "\n";
  for (Eigen::Index n = 0; n < report.temperatures_mK.size(); ++n) {
    out << n + 1 << "," << num(report.omega_ratio[n]) << "," << num(report.temperatures_mK[n]) << ","
        << num(report.temperatures_se_mK[n]) << "," << sci(report.site_currents_W[n]) << ","
        << sci(report.site_currents_se_W[n]) << "," << sci(report.J_L_W) << ","
        << sci(report.J_L_se_W) << "," << sci(report.J_R_W) << "," << sci(report.J_R_se_W) << "\n";
  }
}

void write_series_csv(std::ostream& out, const CurrentSeries& series)
{
  out << kSeriesHeader << "\n";
  for (std::size_t b = 0; b < series.time.size(); ++b) {
    out << num(series.time[b]) << "," << sci(series.left[b]) << "," << sci(series.right[b]) << ","
        << sci(series.total[b]) << "\n";
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result)
{
  out << sweep_header(result) << "\n";
  for (const SweepRow& row : result.rows) {
    for (double p : row.parameters) {
      out << num(p) << ",";
    }
    out << sci(row.J_forward) << "," << sci(row.J_backward) << "," << num(row.R) << ","
        << csv_field(row.status) << "\n";
  }
}

void write_compare_csv(std::ostream& out, const ProfileComparison& comparison)
{
  out << kCompareHeader << "\n";
  for (std::size_t k = 0; k < comparison.graded.rows.size(); ++k) {
    const SweepRow& g = comparison.graded.rows[k];
    const SweepRow& s = comparison.segmented.rows[k];
    out << num(g.parameters[0]) << "," << sci(g.max_flux()) << "," << num(g.R) << ","
        << sci(s.max_flux()) << "," << num(s.R) << "," << csv_field(g.status) << ","
        << csv_field(s.status) << "\n";
  }
}

nlohmann::json steady_json(const SteadyStateReport& report, const Provenance& provenance)
{
  return {{"provenance", provenance_json(provenance)},
          {"omega_ratio", vector_json(report.omega_ratio)},
          {"positions_um", vector_json(report.positions_um)},
          {"T_mK", vector_json(report.temperatures_mK)},
          {"j_W", vector_json(report.site_currents_W)},
          {"J_L_W", report.J_L_W},
          {"J_R_W", report.J_R_W},
          {"bath_T_mK", {{"left", report.left_bath_mK}, {"right", report.right_bath_mK}}},
          {"diagnostics",
           {{"moment_residual", report.state.moment_residual},
            {"condition_estimate", report.state.condition_estimate},
            {"energy_balance", report.state.energy_balance},
            {"stationarity_residual", report.state.stationarity_residual},
            {"equilibrium_residual", report.equilibrium_residual},
            {"warnings", report.warnings}}}};
}

nlohmann::json langevin_json(const LangevinReport& report, const Provenance& provenance)
{
  const IntegratorConfig& integ = report.integrator;
  return {{"provenance", provenance_json(provenance)},
          {"trials", report.result.estimate.trials},
          {"integrator",
           {{"dt_s", integ.dt * report.units.time},
            {"burn_in_s", integ.burn_in * report.units.time},
            {"t_end_s", integ.t_end * report.units.time},
            {"scheme", std::string(scheme_name(integ.scheme))}}},
          {"omega_ratio", vector_json(report.omega_ratio)},
          {"T_mK", vector_json(report.temperatures_mK)},
          {"T_se_mK", vector_json(report.temperatures_se_mK)},
          {"j_W", vector_json(report.site_currents_W)},
          {"j_se_W", vector_json(report.site_currents_se_W)},
          {"J_L_W", report.J_L_W},
          {"J_L_se_W", finite_or_null(report.J_L_se_W)},
          {"J_R_W", report.J_R_W},
          {"J_R_se_W", finite_or_null(report.J_R_se_W)},
          {"series",
           {{"time_us", report.series_W.time},
            {"J_L_W", report.series_W.left},
            {"J_R_W", report.series_W.right}}},
          {"warnings", report.warnings}};
}

nlohmann::json sweep_json(const SweepResult& result, const Provenance& provenance)
{
  nlohmann::json out = {{"provenance", provenance_json(provenance)},
                        {"axes", result.axis_names},
                        {"rows", rows_json(result)}};
  if (result.axis_names.size() == 1) {
    out["zero_crossings"] = find_zero_crossings(result);
  }
  return out;
}

nlohmann::json compare_json(const ProfileComparison& comparison, const Provenance& provenance)
{
  return {{"provenance", provenance_json(provenance)},
          {"graded", rows_json(comparison.graded)},
          {"segmented", rows_json(comparison.segmented)}};
}

}  // namespace ionflux
