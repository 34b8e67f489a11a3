#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "amlgen/config.hpp"
#include "amlgen/engine.hpp"

namespace amlgen {

struct DatasetPaths {
  std::string transactions;
  std::string sidecar;
  std::string sidecar_json;
  std::string manifest;
};

DatasetPaths dataset_paths(const std::string& out_dir);

struct GenerateResult {
  SimulationResult simulation;
  std::uint64_t population_entities = 0;
  std::uint64_t population_accounts = 0;
  nlohmann::json manifest;
  DatasetPaths paths;
};

// Builds the population, runs the economy and writes transactions.csv,
// patterns.txt, patterns.json and manifest.json into out_dir.
GenerateResult generate_dataset(const WorldConfig& config, const std::string& out_dir, const SimOptions& options = {});

// Run manifest: everything needed to reproduce the run (never the thread count).
nlohmann::json run_manifest(const WorldConfig& config, const SimulationResult& result);

// A run manifest or a bare config document.
WorldConfig config_from_document(const nlohmann::json& doc);

}  // namespace amlgen
