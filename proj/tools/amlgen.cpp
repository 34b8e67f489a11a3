#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "amlgen/analyzer.hpp"
#include "amlgen/calibrator.hpp"
#include "amlgen/config.hpp"
#include "amlgen/pipeline.hpp"
#include "amlgen/population.hpp"
#include "amlgen/presets.hpp"
#include "amlgen/sidecar.hpp"
#include "amlgen/split.hpp"

using namespace amlgen;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitIntegrity = 4;

struct GenerateArgs {
  std::string config;
  std::string out;
  std::string preset;
  double scale = 1.0;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool calibrate = false;
  bool progress = false;
};

WorldConfig load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_document(doc);
}

int run_generate(const GenerateArgs& a) {
  WorldConfig config = a.config.empty() ? default_config() : load_document(a.config);
  std::optional<PresetTargets> targets;
  if (!a.preset.empty()) {
    auto preset = parse_preset(a.preset);
    if (!preset) throw ConfigError("unknown preset " + a.preset);
    config = preset_config(*preset, a.scale, config);
    targets = preset_targets(*preset);
  }
  if (a.seed) config.seed = *a.seed;
  validate_config(config);

  if (a.calibrate) {
    CalibrationTargets t;
    t.annual_tx_per_account = config.target_annual_tx_per_account;
    if (targets) t.laundering_ratio = targets->laundering_ratio;
    CalibrationOptions opts;
    opts.threads = a.threads;
    const auto cal = calibrate(config, t, opts);
    config = cal.config;
    std::filesystem::create_directories(a.out);
    std::ofstream f(std::filesystem::path(a.out) / "calibration.json");
    f << to_json(cal).dump(2) << '\n';
    if (cal.warning) std::cerr << "warning: calibration did not converge in " << opts.max_iters << " iterations\n";
  }

  SimOptions sim;
  sim.threads = a.threads;
  sim.progress = a.progress;
  const auto r = generate_dataset(config, a.out, sim);
  const auto& k = r.simulation.counters;
  std::cerr << "wrote " << k.transactions << " transactions (" << k.laundering << " laundering, "
            << r.simulation.patterns.size() << " patterns) to " << a.out << "\n";
  if (k.mandatory_payments > 0 && k.skipped_payments * 100 >= k.mandatory_payments) {
    std::cerr << "warning: " << k.skipped_payments << " of " << k.mandatory_payments
              << " mandatory payments skipped (>= 1%)\n";
  }
  return 0;
}

int run_split(const std::string& in, const std::string& out, const std::string& fractions) {
  const SplitFractions f = parse_fractions(fractions);
  const auto b = temporal_split(in, out, f);
  std::cout << to_json(b).dump(2) << '\n';
  return 0;
}

int run_filter(const std::string& in, BankId bank, const std::string& out) {
  const auto r = filter_bank(in, bank, out);
  if (!r.bank_seen) std::cerr << "warning: bank " << bank << " does not occur in " << in << "\n";
  std::cerr << "kept " << r.rows_out << " of " << r.rows_in << " rows\n";
  return 0;
}

int run_analyze(const std::string& in, const std::string& sidecar_path, bool json, double span_days) {
  const DatasetScan scan = scan_csv(in);
  const Summary s = summarize(scan);
  std::optional<ActivityReport> activity;
  if (scan.rows() > 0 && (span_days > 0 || scan.last() > scan.first())) activity = activity_histograms(scan, span_days);
  std::optional<RateBreakdown> rates;
  std::optional<PatternReport> patterns;
  if (!sidecar_path.empty()) {
    const auto instances = read_sidecar(sidecar_path);
    rates = rate_breakdown(scan, instances);
    patterns = pattern_report(instances);
  }
  if (json) {
    nlohmann::json doc{{"summary", to_json(s)}};
    if (activity) doc["activity"] = to_json(*activity);
    if (rates) doc["rates"] = to_json(*rates);
    if (patterns) doc["patterns"] = to_json(*patterns);
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << format_report(s, activity ? &*activity : nullptr, rates ? &*rates : nullptr,
                               patterns ? &*patterns : nullptr);
  }
  for (const auto& m : s.malformed) std::cerr << in << ":" << m.line << ": " << m.message << "\n";
  return 0;
}

int run_validate(const std::string& in, const std::string& sidecar_path) {
  const auto instances = read_sidecar(sidecar_path);
  const auto rep = check_dataset(in, instances);
  for (const auto& v : rep.violations) std::cout << v << '\n';
  std::cout << rep.checked_patterns << " patterns checked, " << rep.partial_patterns << " partial, "
            << rep.violations.size() << " violations\n";
  return rep.clean() ? 0 : kExitIntegrity;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"amlgen: synthetic multi-bank transaction generator with labeled laundering"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "simulate a world and write a dataset");
  g->add_option("--config", gen.config, "WorldConfig JSON or a run manifest");
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--preset", gen.preset, "hi-small|hi-medium|hi-large|li-small|li-medium|li-large");
  g->add_option("--scale", gen.scale, "row-count scale applied to the preset");
  g->add_option("--seed", gen.seed, "override the config seed");
  g->add_option("--threads", gen.threads, "worker threads; output does not depend on it")->check(CLI::PositiveNumber);
  g->add_flag("--calibrate", gen.calibrate, "tune activity and laundering rates with pilot runs first");
  g->add_flag("--progress", gen.progress, "report throughput on stderr");

  std::string in, out, fractions = "0.6,0.2,0.2", sidecar;
  BankId bank = 0;
  bool json = false;
  double span_days = 0.0;

  auto* s = app.add_subcommand("split", "60/20/20 temporal split");
  s->add_option("--in", in)->required();
  s->add_option("--out", out)->required();
  s->add_option("--fractions", fractions);

  auto* f = app.add_subcommand("filter-bank", "rows touching one bank");
  f->add_option("--in", in)->required();
  f->add_option("--bank", bank)->required();
  f->add_option("--out", out)->required();

  auto* an = app.add_subcommand("analyze", "descriptive statistics");
  an->add_option("--in", in)->required();
  an->add_option("--sidecar", sidecar);
  an->add_flag("--json", json);
  an->add_option("--span-days", span_days, "annualization span; default is the data span");

  auto* v = app.add_subcommand("validate", "pattern validators and sidecar integrity");
  v->add_option("--in", in)->required();
  v->add_option("--sidecar", sidecar)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*g) return run_generate(gen);
    if (*s) return run_split(in, out, fractions);
    if (*f) return run_filter(in, bank, out);
    if (*an) return run_analyze(in, sidecar, json, span_days);
    if (*v) return run_validate(in, sidecar);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const PopulationError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
