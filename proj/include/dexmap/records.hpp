#pragma once

#include "dexmap/sampler.hpp"
#include "dexmap/stability.hpp"
#include "dexmap/transfer.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dexmap {

inline constexpr const char* kToolName = "dexmap";
inline constexpr const char* kToolVersion = "0.1.0";

// JSON forms of the pipeline types. Readers throw nlohmann::json::exception
// on missing or mistyped fields; unknown fields are ignored.

nlohmann::json to_json(const GraspPose& p);
GraspPose pose_from_json(const nlohmann::json& j);

EnergyBreakdown energy_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GraspRecord& r);
GraspRecord grasp_record_from_json(const nlohmann::json& j);

/// One transfer of a dataset record to a target hand.
struct TransferRecord {
  int index = 0;          ///< position in the source dataset
  std::string source_hand;
  int source_chain = 0;
  std::string hand;
  std::string object;
  DistanceMetric metric = DistanceMetric::aligned;
  std::uint64_t seed = 0;
  TransferResult result;  ///< `seconds` is not serialized
};
nlohmann::json to_json(const TransferRecord& r);
TransferRecord transfer_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StabilityReport& r);
StabilityReport stability_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DiversityStats& d);

// Configs: every field is written; missing fields keep `defaults`.
nlohmann::json to_json(const MalaConfig& c);
MalaConfig mala_config_from_json(const nlohmann::json& j, MalaConfig defaults = {});
nlohmann::json to_json(const TransferConfig& c);
TransferConfig transfer_config_from_json(const nlohmann::json& j, TransferConfig defaults = {});
nlohmann::json to_json(const StabilityConfig& c);
StabilityConfig stability_config_from_json(const nlohmann::json& j, StabilityConfig defaults = {});

/// First line of every JSON-lines artifact.
nlohmann::json make_header(const std::string& kind, std::uint64_t seed, const nlohmann::json& config);

/// Writes a header line then one compact line per record.
void write_jsonl(const std::filesystem::path& path, const nlohmann::json& header,
                 const std::vector<nlohmann::json>& records);

struct JsonlContents {
  nlohmann::json header;           ///< null when the file has none
  std::vector<nlohmann::json> records;
  int skipped = 0;                 ///< unparseable lines
};
/// Blank lines are ignored. Throws ParseError when the file cannot be opened.
JsonlContents read_jsonl(const std::filesystem::path& path);

}  // namespace dexmap
