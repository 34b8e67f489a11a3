#include "amlgen/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "amlgen/csv.hpp"
#include "amlgen/population.hpp"
#include "amlgen/sidecar.hpp"

namespace amlgen {

DatasetPaths dataset_paths(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  return {(dir / "transactions.csv").string(), (dir / "patterns.txt").string(), (dir / "patterns.json").string(),
          (dir / "manifest.json").string()};
}

nlohmann::json run_manifest(const WorldConfig& config, const SimulationResult& r) {
  const auto& k = r.counters;
  nlohmann::json by_kind = nlohmann::json::object();
  for (std::size_t i = 0; i < k.by_kind.size(); ++i) by_kind[std::string(to_string(static_cast<TxKind>(i)))] = k.by_kind[i];
  return {
      {"seed", config.seed},
      {"config_hash", config_hash(config)},
      {"config", to_json(config)},
      {"counts",
       {
           {"transactions", k.transactions},
           {"laundering", k.laundering},
           {"pattern_laundering", k.pattern_laundering},
           {"other_laundering", k.other_laundering},
           {"accounts", k.accounts_seen},
           {"banks", k.banks_seen},
           {"patterns", r.patterns.size()},
           {"patterns_complete", k.patterns_complete},
           {"patterns_partial", k.patterns_partial},
           {"patterns_downsized", r.patterns_downsized},
           {"patterns_dropped", r.patterns_dropped},
           {"skipped_payments", k.skipped_payments},
           {"mandatory_payments", k.mandatory_payments},
           {"by_kind", std::move(by_kind)},
       }},
  };
}

WorldConfig config_from_document(const nlohmann::json& doc) {
  if (doc.is_object() && doc.contains("config") && doc.contains("config_hash")) {
    WorldConfig c = config_from_json(doc.at("config"));
    if (config_hash(c) != doc.at("config_hash").get<std::string>()) {
      throw ConfigError("manifest config_hash does not match its config");
    }
    return c;
  }
  return config_from_json(doc);
}

GenerateResult generate_dataset(const WorldConfig& config, const std::string& out_dir, const SimOptions& options) {
  validate_config(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  GenerateResult out;
  out.paths = dataset_paths(out_dir);
  Population pop = build_population(config, options.threads);
  out.population_entities = pop.entities.size();
  out.population_accounts = pop.accounts.size();

  CsvWriter writer(out.paths.transactions);
  out.simulation = run_simulation(pop, config, writer, options);
  writer.close();

  write_sidecar(out.simulation.patterns, out.paths.sidecar, writer.rows());
  write_sidecar_json(out.simulation.patterns, out.paths.sidecar_json);

  out.manifest = run_manifest(config, out.simulation);
  std::ofstream m(out.paths.manifest, std::ios::binary | std::ios::trunc);
  if (!m) throw IoError("cannot open " + out.paths.manifest + " for writing");
  m << out.manifest.dump(2) << '\n';
  m.close();
  if (!m) throw IoError("write failed: " + out.paths.manifest);
  return out;
}

}  // namespace amlgen
