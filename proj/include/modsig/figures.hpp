#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "modsig/selector.hpp"

namespace modsig {

// kind: "histogram" or "valley_hill" (histogram plus reflected-hill overlay).
struct FigureConfig {
  std::string id;
  std::string title;
  std::string kind = "histogram";
  SequenceSelector sequence;
  std::string beta;
  std::size_t bins = 512;
};

FigureConfig figure_from_json(const nlohmann::ordered_json& j);
std::vector<FigureConfig> load_figures(const std::filesystem::path& dir);  // *.json sorted by name

// Writes <id>.csv and <id>.svg into outdir and returns the summary.
nlohmann::ordered_json render_figure(const FigureConfig& fig, const std::filesystem::path& outdir, unsigned workers);

}  // namespace modsig
