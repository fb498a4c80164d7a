#pragma once

// Output bundle: CSV tables (12 significant digits, energies in q, times in
// 1/q), JSON summaries and matplotlib scripts that read the CSVs back.

#include "giantssh/protocols.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace giantssh {

void write_spectrum_csv(std::ostream& os, const EigenSystem& es, double q);
void write_sweep_csv(std::ostream& os, const SweepResult& sr, double q);
void write_crossings_csv(std::ostream& os, std::span<const CrossingReport> crossings, double q);

/// t_q,norm,f_init,f_target,p_atoms,p_vac
void write_fidelity_csv(std::ostream& os, const TrajectoryRecord& tr, double q);
/// t_q,site_index,site_kind,cell,probability  (site_index and cell 1-based)
void write_frames_csv(std::ostream& os, const TrajectoryRecord& tr, double q);
/// t_q,atom,omega_q
void write_schedule_csv(std::ostream& os, const TrajectoryRecord& tr, double q);

nlohmann::json to_json(const ShapeReport& r);
nlohmann::json to_json(const CrossingReport& c, double q);
nlohmann::json to_json(const PreparationResult& p, double q);
nlohmann::json to_json(const TransferResult& t, double q);

/// {"error": {"type": ..., "messages": [...]}}
nlohmann::json error_record(const std::exception& e);

enum class PlotKind { Spectrum, Sweep, Trajectory };

/// A standalone python script plotting the CSVs found next to it.
std::string plot_script(PlotKind kind, const std::string& prefix = "");

/// Writes `content` to dir/name, creating dir. Throws std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

}  // namespace giantssh
