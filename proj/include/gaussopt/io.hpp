#pragma once

#include <string>
#include <vector>

#include "gaussopt/channels.hpp"
#include "gaussopt/harness.hpp"
#include "json.hpp"

namespace gaussopt {

// State wire format: {"mode_dims":[...], "matrix":[[[re,im],...],...]},
// row-major. The loader re-validates every DensityMatrix invariant and
// rejects on violation.
nlohmann::ordered_json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const nlohmann::json& j,
                              const GlobalConfig& cfg = {});

// Channels serialize as kind + parameters + cutoffs; Kraus data is
// regenerated on load, never stored.
nlohmann::ordered_json channel_to_json(const ChannelRep& c);
ChannelRep channel_from_json(const nlohmann::json& j,
                             const GlobalConfig& cfg = {});

nlohmann::ordered_json prob_to_json(const ProbVector& p);
ProbVector prob_from_json(const nlohmann::json& j, const GlobalConfig& cfg = {});

nlohmann::ordered_json report_to_json(const VerificationReport& r);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// One CSV row per sweep point; fields are pre-rendered strings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace gaussopt
