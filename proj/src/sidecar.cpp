#include "amlgen/sidecar.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace amlgen {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && end == text.data() + text.size();
}

std::vector<std::string_view> words(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > begin) out.push_back(line.substr(begin, i - begin));
  }
  return out;
}

}  // namespace

std::string format_sidecar_block(const PatternInstance& p) {
  std::ostringstream out;
  out << "BEGIN PATTERN " << p.pattern_id << ' ' << to_string(p.kind) << '\n';
  out << "status " << (p.complete ? "complete" : "partial") << '\n';
  out << "controller " << p.controller << '\n';
  out << "start " << format_timestamp(p.start) << '\n';
  out << "span " << p.span << '\n';
  out << "reused " << (p.reused_accounts ? 1 : 0) << '\n';
  out << "downsized " << (p.downsized ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < p.members.size(); ++i) {
    const auto& m = p.members[i];
    const double retention = i < p.retention.size() ? p.retention[i] : 0.0;
    out << "member " << i << ' ' << to_string(m.role) << ' ' << m.layer << ' ' << m.bank_id << ' '
        << m.account_id.view() << ' ' << format_double(retention) << '\n';
  }
  for (std::size_t s = 0; s < p.planned_steps.size(); ++s) {
    const auto& st = p.planned_steps[s];
    out << "step " << st.layer << ' ' << st.from << ' ' << st.to << ' ' << st.offset << ' ' << st.amount << ' ';
    const auto row = s < p.emitted_tx.size() ? p.emitted_tx[s] : std::nullopt;
    if (row) {
      out << *row;
    } else {
      out << '-';
    }
    out << '\n';
  }
  out << "END PATTERN " << p.pattern_id << '\n';
  return out.str();
}

std::size_t write_sidecar(std::span<const PatternInstance> instances, const std::string& path,
                          std::uint64_t row_count) {
  for (const auto& p : instances) {
    for (const auto& row : p.emitted_tx) {
      if (row && *row >= row_count) {
        throw IntegrityError("pattern " + std::to_string(p.pattern_id) + " references row " +
                             std::to_string(*row) + " of " + std::to_string(row_count));
      }
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& p : instances) out << format_sidecar_block(p);
  out.close();
  if (!out) throw IoError("write failed: " + path);
  return instances.size();
}

nlohmann::json sidecar_json(std::span<const PatternInstance> instances) {
  using nlohmann::json;
  json list = json::array();
  for (const auto& p : instances) {
    json members = json::array();
    for (const auto& m : p.members) {
      members.push_back({{"role", to_string(m.role)},
                         {"layer", m.layer},
                         {"bank", m.bank_id},
                         {"account", m.account_id.str()}});
    }
    json rows = json::array();
    for (const auto& r : p.emitted_tx) {
      if (r) rows.push_back(*r);
    }
    list.push_back({{"pattern_id", p.pattern_id},
                    {"kind", to_string(p.kind)},
                    {"complete", p.complete},
                    {"controller", p.controller},
                    {"start", format_timestamp(p.start)},
                    {"span_minutes", p.span},
                    {"nodes", p.members.size()},
                    {"planned_steps", p.planned_steps.size()},
                    {"reused_accounts", p.reused_accounts},
                    {"downsized", p.downsized},
                    {"members", std::move(members)},
                    {"rows", std::move(rows)}});
  }
  return json{{"count", instances.size()}, {"patterns", std::move(list)}};
}

void write_sidecar_json(std::span<const PatternInstance> instances, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << sidecar_json(instances).dump(1) << '\n';
  out.close();
  if (!out) throw IoError("write failed: " + path);
}

std::vector<PatternInstance> parse_sidecar(std::istream& in) {
  std::vector<PatternInstance> out;
  std::string line;
  std::uint64_t line_no = 0;
  std::optional<PatternInstance> cur;
  auto fail = [&](const std::string& what) {
    throw IntegrityError("sidecar line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto w = words(line);
    if (w.empty()) continue;
    if (!cur) {
      if (w.size() != 4 || w[0] != "BEGIN" || w[1] != "PATTERN") fail("expected BEGIN PATTERN");
      cur.emplace();
      auto kind = parse_pattern_kind(w[3]);
      if (!parse_number(w[2], cur->pattern_id) || !kind) fail("bad pattern header");
      cur->kind = *kind;
      continue;
    }
    const std::string_view key = w[0];
    if (key == "END") {
      PatternId id = 0;
      if (w.size() != 3 || w[1] != "PATTERN" || !parse_number(w[2], id) || id != cur->pattern_id) {
        fail("mismatched END");
      }
      out.push_back(std::move(*cur));
      cur.reset();
    } else if (key == "status" && w.size() == 2) {
      if (w[1] != "complete" && w[1] != "partial") fail("bad status");
      cur->complete = w[1] == "complete";
    } else if (key == "controller" && w.size() == 2) {
      if (!parse_number(w[1], cur->controller)) fail("bad controller");
    } else if (key == "start" && w.size() == 3) {
      const std::string text = std::string(w[1]) + ' ' + std::string(w[2]);
      auto t = parse_timestamp(text);
      if (!t) fail("bad start");
      cur->start = *t;
    } else if (key == "span" && w.size() == 2) {
      if (!parse_number(w[1], cur->span)) fail("bad span");
    } else if ((key == "reused" || key == "downsized") && w.size() == 2) {
      if (w[1] != "0" && w[1] != "1") fail("bad flag");
      (key == "reused" ? cur->reused_accounts : cur->downsized) = w[1] == "1";
    } else if (key == "member" && w.size() == 7) {
      std::size_t index = 0;
      PatternMember m;
      double retention = 0.0;
      auto role = parse_role(w[2]);
      auto account = AccountId::parse(w[5]);
      if (!parse_number(w[1], index) || index != cur->members.size() || !role || !parse_number(w[3], m.layer) ||
          !parse_number(w[4], m.bank_id) || !account || !parse_number(w[6], retention)) {
        fail("bad member");
      }
      m.role = *role;
      m.account_id = *account;
      cur->members.push_back(m);
      cur->retention.push_back(retention);
    } else if (key == "step" && w.size() == 7) {
      PlannedStep s;
      if (!parse_number(w[1], s.layer) || !parse_number(w[2], s.from) || !parse_number(w[3], s.to) ||
          !parse_number(w[4], s.offset) || !parse_number(w[5], s.amount)) {
        fail("bad step");
      }
      std::optional<RowIndex> row;
      if (w[6] != "-") {
        RowIndex r = 0;
        if (!parse_number(w[6], r)) fail("bad row");
        row = r;
      }
      if (s.from >= cur->members.size() || s.to >= cur->members.size()) fail("step references unknown member");
      cur->planned_steps.push_back(s);
      cur->emitted_tx.push_back(row);
    } else {
      fail("unrecognized line");
    }
  }
  if (cur) {
    ++line_no;
    fail("unterminated block");
  }
  return out;
}

std::vector<PatternInstance> read_sidecar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return parse_sidecar(in);
}

std::vector<RowIndex> sidecar_rows(std::span<const PatternInstance> instances) {
  std::vector<RowIndex> rows;
  for (const auto& p : instances) {
    for (const auto& r : p.emitted_tx) {
      if (r) rows.push_back(*r);
    }
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

}  // namespace amlgen
