#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "amlgen/config.hpp"
#include "doctest.h"
#include "fixtures.hpp"

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(AMLGEN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string small_config(const std::string& dir) {
  amlgen::WorldConfig c = amlgen::default_config();
  c.num_individuals = 1500;
  c.num_companies = 80;
  c.num_banks = 6;
  c.sim_days = 20;
  c.criminal_fraction = 0.01;
  c.pattern_span_days = {1.0, 5.0};
  c.pattern_budget = {1, 1, 1, 1, 1, 1, 1, 1};
  const std::string path = dir + "/small.json";
  write_file(path, amlgen::to_json(c).dump(2));
  return path;
}

}  // namespace

TEST_CASE("generate, analyze, validate, split and filter through the CLI") {
  const std::string dir = fixtures::temp_dir("cli");
  const std::string cfg = small_config(dir);
  REQUIRE(run("generate --config " + cfg + " --out " + dir + "/a --threads 1") == 0);
  REQUIRE(run("generate --config " + cfg + " --out " + dir + "/b --threads 4") == 0);
  for (const char* f : {"transactions.csv", "patterns.txt", "patterns.json", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir + "/a/" + f));
    CHECK(slurp(dir + "/a/" + f) == slurp(dir + "/b/" + f));
  }
  // Rerunning from the manifest reproduces the dataset.
  CHECK(run("generate --config " + dir + "/a/manifest.json --out " + dir + "/c") == 0);
  CHECK(slurp(dir + "/c/transactions.csv") == slurp(dir + "/a/transactions.csv"));
  CHECK(run("generate --config " + cfg + " --seed 99 --out " + dir + "/d") == 0);
  CHECK(slurp(dir + "/d/transactions.csv") != slurp(dir + "/a/transactions.csv"));

  const std::string csv = dir + "/a/transactions.csv";
  CHECK(run("analyze --in " + csv + " --sidecar " + dir + "/a/patterns.txt --json") == 0);
  CHECK(run("validate --in " + csv + " --sidecar " + dir + "/a/patterns.txt") == 0);
  CHECK(run("split --in " + csv + " --out " + dir + "/split") == 0);
  CHECK(std::filesystem::exists(dir + "/split/split.json"));
  CHECK(run("filter-bank --in " + csv + " --bank 0 --out " + dir + "/bank0.csv") == 0);
  CHECK(run("filter-bank --in " + csv + " --bank 4000 --out " + dir + "/none.csv") == 0);

  // A sidecar row that is not laundering is an integrity failure.
  std::string side = slurp(dir + "/a/patterns.txt");
  const auto pos = side.find("\nstep ");
  REQUIRE(pos != std::string::npos);
  const auto eol = side.find('\n', pos + 1);
  const auto sp = side.rfind(' ', eol);
  side.replace(sp + 1, eol - sp - 1, "0");
  write_file(dir + "/bad.txt", side);
  const int bad = run("validate --in " + csv + " --sidecar " + dir + "/bad.txt");
  CHECK(bad == 4);
}

TEST_CASE("exit codes") {
  const std::string dir = fixtures::temp_dir("cli_codes");
  auto c = amlgen::to_json(amlgen::default_config());
  c["format_distribution"][0]["p"] = c["format_distribution"][0]["p"].get<double>() - 0.03;
  write_file(dir + "/bad.json", c.dump());
  CHECK(run("generate --config " + dir + "/bad.json --out " + dir + "/x") == 2);
  write_file(dir + "/typo.json", R"({"num_individals": 5})");
  CHECK(run("generate --config " + dir + "/typo.json --out " + dir + "/x") == 2);
  write_file(dir + "/garbage.json", "{not json");
  CHECK(run("generate --config " + dir + "/garbage.json --out " + dir + "/x") == 2);
  CHECK(run("generate --preset hi-tiny --out " + dir + "/x") == 2);
  CHECK(run("generate --config " + dir + "/missing.json --out " + dir + "/x") == 3);
  CHECK(run("analyze --in " + dir + "/missing.csv") == 3);
  CHECK(run("split --in " + dir + "/missing.csv --out " + dir + "/s") == 3);
  CHECK(run("split --in x --out y --fractions 0.5,0.3,0.3") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("--help") == 0);

  write_file(dir + "/tiny.csv", "Timestamp,From Bank,Account,To Bank,Account,Amount Received,Receiving Currency,"
                                "Amount Paid,Payment Currency,Payment Format,Is Laundering\n");
  CHECK(run("split --in " + dir + "/tiny.csv --out " + dir + "/s") == 4);
  CHECK(run("analyze --in " + dir + "/tiny.csv") == 0);
}
