#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "modsig/acceptance.hpp"
#include "modsig/algebra.hpp"
#include "modsig/figures.hpp"
#include "modsig/limits.hpp"
#include "modsig/parallel.hpp"
#include "modsig/selector.hpp"
#include "modsig/svg.hpp"
#include "modsig/weyl.hpp"

namespace fs = std::filesystem;
using namespace modsig;

namespace {

struct SelectorArgs {
  std::string name = "hofstadter";
  int d = 3;
  std::int64_t base = 2;
  std::string map;
  std::string count;
  std::string value_limit;
  std::string registry;

  SequenceSelector get(std::uint64_t default_count = 0) const {
    SequenceSelector s;
    s.name = name;
    s.d = d;
    s.base = base;
    s.map = map;
    s.count = count.empty() ? default_count : parse_count(count);
    s.value_limit = value_limit.empty() ? 0 : parse_count(value_limit);
    s.registry_path = registry;
    return s;
  }
};

void add_selector(CLI::App* app, SelectorArgs& a) {
  app->add_option("--seq", a.name, "sequence name")->check(CLI::IsMember(sequence_names()));
  app->add_option("--d", a.d, "Hofstadter depth or generalized Narayana parameter")->check(CLI::Range(1, 64));
  app->add_option("--base", a.base, "base for --seq power")->check(CLI::Range(2, 1 << 30));
  app->add_option("--map", a.map, "replacement map name for --seq replacement");
  app->add_option("--n,--count", a.count, "number of terms (accepts 1e7, 2^20)");
  app->add_option("--value-limit", a.value_limit, "ulam: keep terms <= this value");
  app->add_option("--registry", a.registry, "registry JSON (default: builtin)");
}

fs::path cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MODSIG_CACHE_DIR"); env && *env) return env;
  return ".modsig-cache";
}

fs::path cache_file(const fs::path& dir, const SequenceSelector& s) { return dir / (s.key() + ".msq"); }

// Exact table, from the cache when one was written by `generate`.
SequenceTable load_table(const SequenceSelector& s, const fs::path& dir) {
  fs::path p = cache_file(dir, s);
  if (fs::exists(p)) {
    std::ifstream in(p, std::ios::binary);
    return read_cache(in);
  }
  return materialize(s);
}

std::vector<Phase> load_phases(const SequenceSelector& s, const fs::path& dir, const Frequency& beta) {
  fs::path p = cache_file(dir, s);
  if (!fs::exists(p)) return sequence_phases(s, beta);
  auto t = load_table(s, dir);
  if (t.is_machine()) return phases_of<std::int64_t>(t.machine(), beta);
  std::size_t bits = 64;
  for (std::size_t i = 1; i <= t.size(); ++i) bits = std::max(bits, bit_length(t.term(i)));
  PhaseReducer red(beta, static_cast<unsigned>(bits));
  std::vector<Phase> out;
  for (std::size_t i = 1; i <= t.size(); ++i) out.push_back(red(t.term(i)));
  return out;
}

void emit_json(const nlohmann::ordered_json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  out << j.dump(2) << "\n";
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modsig: hidden signals in integer sequences modulo one"};
  app.require_subcommand(1);
  unsigned workers = default_workers();
  std::string cache_flag;
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--cache-dir", cache_flag, "sequence cache (default $MODSIG_CACHE_DIR or .modsig-cache)");

  // generate
  auto* gen = app.add_subcommand("generate", "materialize a sequence prefix into the cache and a CSV");
  SelectorArgs gen_sel;
  std::string gen_csv;
  add_selector(gen, gen_sel);
  gen->add_option("--csv", gen_csv, "CSV output (default <cache>/<key>.csv)");

  // scan
  auto* scan = app.add_subcommand("scan", "FFT scan of the multiplicity vector for hidden frequencies");
  SelectorArgs scan_sel;
  std::size_t grid = 0, top = 5;
  std::string scan_out, scan_csv;
  add_selector(scan, scan_sel);
  scan->add_option("--grid", grid, "grid size M (default: next power of two above the largest value)");
  scan->add_option("--top", top, "number of peaks to report");
  scan->add_option("--csv", scan_csv, "spectrum CSV output");
  scan->add_option("--out", scan_out, "JSON output (default stdout)");

  // histogram
  auto* histo = app.add_subcommand("histogram", "histogram of {beta a_n} on the circle");
  SelectorArgs hist_sel;
  std::string hist_beta, hist_prefix;
  std::size_t bins = 512;
  add_selector(histo, hist_sel);
  histo->add_option("--beta", hist_beta, "frequency specifier")->required();
  histo->add_option("--bins", bins, "bin count")->check(CLI::Range(1, 1 << 24));
  histo->add_option("--out", hist_prefix, "output prefix for .csv/.svg/.json (default: JSON to stdout only)");

  // weyl
  auto* weyl = app.add_subcommand("weyl", "normalized Weyl sums at checkpoints");
  SelectorArgs weyl_sel;
  std::string weyl_beta, weyl_out, weyl_map;
  std::size_t weyl_index = 0;
  add_selector(weyl, weyl_sel);
  weyl->add_option("--beta", weyl_beta, "frequency specifier")->required();
  weyl->add_option("--recurrence-map", weyl_map, "use the base-recurrence engine for this registry map");
  weyl->add_option("--upto-index", weyl_index, "recurrence engine: checkpoints a_1..a_k");
  weyl->add_option("--out", weyl_out, "JSON output (default stdout)");

  // decay
  auto* decay = app.add_subcommand("decay", "classify ||beta a_k|| as decaying or not");
  SelectorArgs decay_sel;
  decay_sel.name = "narayana";
  std::string decay_beta, decay_out;
  std::size_t k_first = 10, k_last = 0;
  add_selector(decay, decay_sel);
  decay->add_option("--beta", decay_beta, "frequency specifier")->required();
  decay->add_option("--first", k_first, "first index of the window");
  decay->add_option("--last", k_last, "last index of the window (default: count)");
  decay->add_option("--out", decay_out, "JSON output (default stdout)");

  // roots
  auto* roots = app.add_subcommand("roots", "certified root isolation, Pisot test, closed forms");
  std::string poly, roots_out, closed_seq;
  long bits = 128;
  bool inverse = false;
  roots->add_option("--poly", poly, "trinomial:D, alpha:D, cyclotomic:M or ascending c0,c1,...");
  roots->add_option("--bits", bits, "starting precision")->check(CLI::Range(53L, 1L << 16));
  roots->add_option("--closed-form", closed_seq, "recurrence sequence name for a closed-form decomposition");
  roots->add_flag("--inverse", inverse, "closed form in the a_n = sum c_i alpha_i^-n orientation");
  roots->add_option("--out", roots_out, "JSON output (default stdout)");

  // report
  auto* report = app.add_subcommand("report", "all figures plus all acceptance criteria");
  std::string config_dir = "configs/figures", report_dir = "report";
  std::vector<int> criteria;
  bool skip_acceptance = false;
  report->add_option("--configs", config_dir, "directory of figure configs");
  report->add_option("--out-dir", report_dir, "output directory");
  report->add_option("--criterion", criteria, "restrict acceptance criteria (repeatable)")
      ->check(CLI::Range(1, kCriterionCount));
  report->add_flag("--skip-acceptance", skip_acceptance, "figures only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const fs::path cdir = cache_dir(cache_flag);

    if (*gen) {
      auto s = gen_sel.get();
      auto t = materialize(s);
      fs::create_directories(cdir);
      {
        std::ofstream out(cache_file(cdir, s), std::ios::binary);
        write_cache(out, t);
      }
      fs::path csv = gen_csv.empty() ? cdir / (s.key() + ".csv") : fs::path(gen_csv);
      auto out = open_out(csv);
      write_csv(out, t);
      std::cerr << t.size() << " terms of " << t.label() << " -> " << cache_file(cdir, s).string() << ", "
                << csv.string() << "\n";
    } else if (*scan) {
      auto s = scan_sel.get();
      auto t = load_table(s, cdir);
      if (!t.is_machine()) throw RangeError("scan needs terms that fit 64 bits");
      auto spec = fft_scan(t.machine(), t.size(), grid, s.key());
      nlohmann::ordered_json j;
      j["sequence"] = to_json(s);
      j["grid_size"] = spec.grid_size;
      j["terms"] = spec.term_count;
      j["truncated"] = spec.truncated;
      auto& peaks = j["peaks"] = nlohmann::ordered_json::array();
      for (const auto& p : top_peaks(spec, top))
        peaks.push_back({{"grid_index", p.grid_index}, {"frequency", p.frequency}, {"magnitude", p.magnitude}});
      if (!scan_csv.empty()) {
        auto out = open_out(scan_csv);
        write_csv(out, spec);
      }
      emit_json(j, scan_out);
    } else if (*histo) {
      auto s = hist_sel.get();
      auto beta = parse_frequency(hist_beta);
      auto phases = load_phases(s, cdir, beta);
      auto h = histogram_phases(phases, bins, workers);
      h.frequency_label = beta.label();
      h.sequence_label = s.key();
      auto mu = fourier_coeffs_phases(phases, 1, workers);
      nlohmann::ordered_json j;
      j["sequence"] = to_json(s);
      j["beta"] = hist_beta;
      j["terms"] = h.total;
      j["bins"] = bins;
      j["max_bin_deviation"] = h.max_deviation();
      j["mu_1_abs"] = std::abs(mu[0]);
      if (!hist_prefix.empty()) {
        {
          auto out = open_out(hist_prefix + ".csv");
          write_csv(out, h);
        }
        SvgChart chart;
        chart.title = beta.label() + " * " + s.key() + " mod 1";
        chart.y_reference = 1;
        SvgSeries bars;
        for (std::size_t b = 0; b < bins; ++b) bars.y.push_back(h.density(b));
        chart.series.push_back(bars);
        auto out = open_out(hist_prefix + ".svg");
        write_svg(out, chart);
        emit_json(j, hist_prefix + ".json");
      } else {
        emit_json(j, "");
      }
    } else if (*weyl) {
      auto beta = parse_frequency(weyl_beta);
      nlohmann::ordered_json j;
      if (!weyl_map.empty()) {
        auto reg = weyl_sel.registry.empty() ? Registry::builtin() : Registry::load(weyl_sel.registry);
        if (weyl_index == 0) throw std::invalid_argument("--recurrence-map needs --upto-index");
        auto probe = reg.map(weyl_map, BigInt(2));
        // grow the base until a_{upto_index} exists
        BigInt limit = 2;
        while (probe.source.size() <= weyl_index) {
          limit *= 4;
          probe = reg.map(weyl_map, limit);
        }
        auto rec = weyl_recurrence(probe, beta, weyl_index);
        WeylSeries w{beta.label(), weyl_map, rec, rec.empty() ? 0 : rec.back().n};
        j = to_json(w);
      } else {
        auto s = weyl_sel.get();
        auto phases = load_phases(s, cdir, beta);
        auto cps = geometric_checkpoints(phases.size());
        auto w = weyl_direct_phases(phases, cps, workers);
        w.frequency_label = beta.label();
        w.sequence_label = s.key();
        j = to_json(w);
      }
      emit_json(j, weyl_out);
    } else if (*decay) {
      auto s = decay_sel.get(120);
      auto t = load_table(s, cdir);
      auto rep = classify_decay(parse_frequency(decay_beta), t, k_first, k_last ? k_last : t.size());
      emit_json(to_json(rep), decay_out);
    } else if (*roots) {
      nlohmann::ordered_json j;
      if (!closed_seq.empty()) {
        SequenceSelector s;
        s.name = closed_seq;
        s.count = 60;
        auto cf = closed_form(materialize(s), inverse ? ClosedFormOrientation::inverse_powers
                                                      : ClosedFormOrientation::powers);
        j = to_json(cf);
      } else {
        if (poly.empty()) throw std::invalid_argument("roots needs --poly or --closed-form");
        auto p = parse_polynomial(poly);
        j = to_json(isolate_roots(p, bits));
        j["is_pisot"] = is_pisot(p);
      }
      emit_json(j, roots_out);
    } else if (*report) {
      fs::path out(report_dir);
      fs::create_directories(out);
      nlohmann::ordered_json j;
      auto& figs = j["figures"] = nlohmann::ordered_json::array();
      for (const auto& f : load_figures(config_dir)) {
        std::cerr << "figure " << f.id << "\n";
        figs.push_back(render_figure(f, out, workers));
      }
      int failed = 0;
      if (!skip_acceptance) {
        if (criteria.empty())
          for (int i = 1; i <= kCriterionCount; ++i) criteria.push_back(i);
        auto& acc = j["acceptance"] = nlohmann::ordered_json::array();
        for (int id : criteria) {
          auto r = run_criterion(id, workers);
          std::cerr << "criterion " << id << " " << (r.pass ? "PASS" : "FAIL") << "  " << r.summary << "\n";
          failed += !r.pass;
          acc.push_back(to_json(r));
        }
        j["acceptance_failed"] = failed;
      }
      emit_json(j, (out / "report.json").string());
    }
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return 2;
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return 2;
  } catch (const SignatureError& e) {
    std::cerr << "signature failure: " << e.what() << "\n";
    return 2;
  } catch (const IndeterminateError& e) {
    std::cerr << "indeterminate: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
