#include "modsig/figures.hpp"

#include <algorithm>
#include <fstream>

#include "modsig/limits.hpp"
#include "modsig/svg.hpp"

namespace modsig {

FigureConfig figure_from_json(const nlohmann::ordered_json& j) {
  FigureConfig f;
  f.id = j.at("id").get<std::string>();
  f.title = j.value("title", f.id);
  f.kind = j.value("kind", f.kind);
  f.sequence = selector_from_json(j.at("sequence"));
  f.beta = j.at("beta").get<std::string>();
  f.bins = j.value("bins", f.bins);
  if (f.kind != "histogram" && f.kind != "valley_hill") throw std::invalid_argument("unknown figure kind " + f.kind);
  return f;
}

std::vector<FigureConfig> load_figures(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<FigureConfig> out;
  for (const auto& p : files) {
    std::ifstream in(p);
    out.push_back(figure_from_json(nlohmann::ordered_json::parse(in)));
  }
  return out;
}

nlohmann::ordered_json render_figure(const FigureConfig& fig, const std::filesystem::path& outdir, unsigned workers) {
  std::filesystem::create_directories(outdir);
  const Frequency beta = parse_frequency(fig.beta);
  auto phases = sequence_phases(fig.sequence, beta);
  auto hist = histogram_phases(phases, fig.bins, workers);
  hist.frequency_label = beta.label();
  hist.sequence_label = fig.sequence.key();
  auto mu = fourier_coeffs_phases(phases, 1, workers);

  nlohmann::ordered_json j;
  j["id"] = fig.id;
  j["title"] = fig.title;
  j["sequence"] = to_json(fig.sequence);
  j["beta"] = fig.beta;
  j["terms"] = phases.size();
  j["bins"] = fig.bins;
  j["max_bin_deviation"] = hist.max_deviation();
  j["mu_1_abs"] = std::abs(mu[0]);

  SvgChart chart;
  chart.title = fig.title;
  chart.y_reference = 1.0;
  SvgSeries bars;
  for (std::size_t b = 0; b < hist.bins; ++b) bars.y.push_back(hist.density(b));
  if (fig.kind == "valley_hill") {
    auto vh = valley_hill_analysis(hist, beta);
    j["valley_hill"] = to_json(vh);
    if (vh.decided) {
      const double B = static_cast<double>(hist.bins);
      auto shade = [&](const BinRun& r) {
        double a = static_cast<double>(r.first) / B, b = a + static_cast<double>(r.length) / B;
        if (b <= 1) chart.shaded.push_back({a, b});
        else {
          chart.shaded.push_back({a, 1});
          chart.shaded.push_back({0, b - 1});
        }
      };
      shade(vh.valley);
      shade(vh.hill);
      bars.color = "#cc0000";
      bars.bars = false;
      bars.label = "density";
      SvgSeries overlay{vh.overlay, "#3465a4", false, "reflected hill shifted by {2 alpha}"};
      chart.series.push_back(bars);
      chart.series.push_back(overlay);
    }
  }
  if (chart.series.empty()) chart.series.push_back(bars);

  {
    std::ofstream csv(outdir / (fig.id + ".csv"));
    write_csv(csv, hist);
  }
  {
    std::ofstream svg(outdir / (fig.id + ".svg"));
    write_svg(svg, chart);
  }
  j["files"] = {fig.id + ".csv", fig.id + ".svg"};
  return j;
}

}  // namespace modsig
