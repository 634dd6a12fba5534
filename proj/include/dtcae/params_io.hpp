#pragma once

#include <filesystem>
#include <string>

#include "dtcae/params.hpp"
#include "dtcae/solver.hpp"

namespace dtcae {

// Params file: {"alpha":n,"Wa":M,"W0":M,"Wt":[M...],"Ua":M,"U0":M,"Ut":[M...],
// "Theta":M} with M = {"rows":r,"cols":c,"data":[row-major entries]}.
std::string params_to_json(const ModelParams& params);
ModelParams params_from_json(const std::string& text);
void save_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

// Report file: {"trace":[{"total","label","attr","match","neighbor"}...],
// "iterations":n,"converged":bool}. Wall times are not serialized.
std::string report_to_json(const TrainReport& report);
void save_report(const TrainReport& report, const std::filesystem::path& path);

}  // namespace dtcae
