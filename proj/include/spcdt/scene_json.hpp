#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "spcdt/pairing.hpp"
#include "spcdt/scene.hpp"
#include "spcdt/tree.hpp"

namespace spcdt {

using Json = nlohmann::ordered_json;

Json evaluation_to_json(const EvaluationReport& report);
Json plan_to_json(const PairingPlan& plan);
Json options_to_json(const SceneOptions& options);
Json placement_to_json(const PlotPlacement& placement);

/// Scene wire format. Keys appear in a fixed order so equal scenes dump to
/// equal bytes.
Json scene_to_json(const SceneGraph& scene);

/// Updates only the keys present in `patch`; unknown keys and ill-typed
/// values raise InputError.
void patch_options(SceneOptions& options, const Json& patch);
PlotPlacement placement_from_json(const Json& j);

/// Layout overrides file: {"placements": [...], "options": {...}}.
struct LayoutOverrides {
  std::vector<PlotPlacement> placements;
  Json options = Json::object();
};
LayoutOverrides layout_from_json(const Json& j);

/// Parses text as JSON, raising InputError with the parser's message.
Json parse_json(const std::string& text);

}  // namespace spcdt
