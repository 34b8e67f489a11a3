#include "amlgen/split.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amlgen/csv.hpp"

namespace amlgen {

namespace {

std::string fraction_text(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("write failed: " + path);
}

std::string_view first_field(std::string_view line) { return line.substr(0, line.find(',')); }

std::string_view field(std::string_view line, int index) {
  for (int i = 0; i < index; ++i) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) return {};
    line.remove_prefix(comma + 1);
  }
  return first_field(line);
}

}  // namespace

void check_fractions(const SplitFractions& f) {
  std::vector<ConfigViolation> v;
  for (double x : {f.train, f.validation, f.test}) {
    if (!(x >= 0.0 && x <= 1.0)) {
      v.push_back({"fractions", "each fraction must lie in [0,1], got " + fraction_text(x)});
    }
  }
  const double sum = f.train + f.validation + f.test;
  if (std::abs(sum - 1.0) > 1e-9) v.push_back({"fractions", "fractions sum to " + fraction_text(sum)});
  if (!v.empty()) throw ConfigError(std::move(v));
}

SplitFractions parse_fractions(const std::string& text) {
  std::vector<double> parts;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    std::string item(rest.substr(0, comma));
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("fractions: cannot parse '" + item + "'");
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (parts.size() != 3) throw ConfigError("fractions: expected three comma-separated values");
  SplitFractions f{parts[0], parts[1], parts[2]};
  check_fractions(f);
  return f;
}

SplitBounds split_bounds(const std::vector<SimTime>& ts, const SplitFractions& fractions) {
  check_fractions(fractions);
  const std::uint64_t n = ts.size();
  if (n < 5) throw IntegrityError("split needs at least 5 rows, got " + std::to_string(n));
  for (std::uint64_t i = 1; i < n; ++i) {
    if (ts[i] < ts[i - 1]) throw IntegrityError("rows not ordered by timestamp at row " + std::to_string(i));
  }
  const double dn = static_cast<double>(n);
  auto b1 = static_cast<std::uint64_t>(std::llround(fractions.train * dn));
  auto b2 = static_cast<std::uint64_t>(std::llround((fractions.train + fractions.validation) * dn));
  b1 = std::min(b1, n);
  b2 = std::clamp(b2, b1, n);

  SplitBounds b;
  b.rows = n;
  b.train = {0, b1};
  b.val_eval = {b1, b2};
  b.test_eval = {b2, n};
  b.t1 = ts[std::min(b1, n - 1)];
  b.t2 = ts[std::min(b2, n - 1)];
  auto tie_at = [&](std::uint64_t k) { return k > 0 && k < n && ts[k - 1] == ts[k]; };
  if (ts.front() == ts.back()) {
    b.notes.push_back("all rows share one timestamp; ranges split by index order");
  } else {
    if (tie_at(b1)) b.notes.push_back("t1 falls inside a run of equal timestamps; split by index order");
    if (tie_at(b2)) b.notes.push_back("t2 falls inside a run of equal timestamps; split by index order");
  }
  return b;
}

nlohmann::json to_json(const SplitBounds& b) {
  auto range = [](const RowRange& r) { return nlohmann::json::array({r.begin, r.end}); };
  return {
      {"rows", b.rows},
      {"t1", format_timestamp(b.t1)},
      {"t2", format_timestamp(b.t2)},
      {"train_range", range(b.train)},
      {"val_eval_range", range(b.val_eval)},
      {"test_eval_range", range(b.test_eval)},
      {"files", {{"train", "train.csv"}, {"validation", "validation.csv"}, {"test", "test.csv"}}},
      {"notes", b.notes},
  };
}

SplitPaths split_paths(const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  return {(dir / "train.csv").string(), (dir / "validation.csv").string(), (dir / "test.csv").string(),
          (dir / "split.json").string()};
}

SplitBounds temporal_split(const std::string& csv_path, const std::string& out_dir,
                           const SplitFractions& fractions) {
  check_fractions(fractions);
  std::vector<SimTime> ts;
  {
    CsvReader reader(csv_path);
    std::string line;
    while (reader.next_line(line)) {
      auto t = parse_timestamp(first_field(line));
      if (!t) throw IntegrityError(csv_path + ": bad timestamp on line " + std::to_string(reader.line_number()));
      ts.push_back(*t);
    }
  }
  SplitBounds bounds = split_bounds(ts, fractions);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const SplitPaths paths = split_paths(out_dir);
  auto train = open_out(paths.train);
  auto val = open_out(paths.validation);
  auto test = open_out(paths.test);
  for (auto* f : {&train, &val, &test}) *f << kCsvHeader << '\n';

  CsvReader reader(csv_path);
  std::string line;
  std::uint64_t i = 0;
  while (reader.next_line(line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line.push_back('\n');
    if (i < bounds.train.end) train << line;
    if (i < bounds.val_eval.end) val << line;
    test << line;
    ++i;
  }
  finish(train, paths.train);
  finish(val, paths.validation);
  finish(test, paths.test);

  auto manifest = open_out(paths.manifest);
  manifest << to_json(bounds).dump(2) << '\n';
  finish(manifest, paths.manifest);
  return bounds;
}

FilterResult filter_bank(const std::string& csv_path, BankId bank, const std::string& out_path) {
  char buf[16];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, bank);
  const std::string_view wanted(buf, static_cast<std::size_t>(end - buf));

  CsvReader reader(csv_path);
  auto out = open_out(out_path);
  out << kCsvHeader << '\n';
  FilterResult r;
  std::string line;
  while (reader.next_line(line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++r.rows_in;
    const std::string_view view(line);
    if (field(view, 1) == wanted || field(view, 3) == wanted) {
      out << line << '\n';
      ++r.rows_out;
    }
  }
  finish(out, out_path);
  r.bank_seen = r.rows_out > 0;
  return r;
}

}  // namespace amlgen
