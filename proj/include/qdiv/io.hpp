#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qdiv/channels.hpp"
#include "qdiv/divergences.hpp"
#include "qdiv/operator_core.hpp"

namespace qdiv {

// JSON fixture formats shared by the CLI and the test corpus. Matrices are
// {dim, subsystem_dims, re, im} with row-major coefficient arrays; channels
// are {dim_in, dim_out, kraus: [{re, im}, ...]}.

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, int rows, int cols);

nlohmann::json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const nlohmann::json& j);

nlohmann::json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j);

nlohmann::json divergence_result_to_json(const DivergenceResult& r);

DensityMatrix load_state(const std::string& path);
KrausChannel load_channel(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

/// Shortest round-trippable decimal representation; keeps emitted reports
/// bit-stable across runs.
std::string format_double(double v);

/// Parses "name:key=value,key=value" channel constructor expressions used by
/// the CLI ("depolarizing", "replacer", "classical", "random"), or loads a
/// JSON channel file when the string names an existing path.
KrausChannel channel_from_spec_string(const std::string& text);

}  // namespace qdiv
