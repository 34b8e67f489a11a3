#include "amlgen/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <nlohmann/json.hpp>

#include "amlgen/patterns.hpp"

namespace amlgen {

std::size_t node_bin(std::size_t nodes) {
  for (std::size_t b = kNodeBinLower.size(); b-- > 0;) {
    if (nodes >= static_cast<std::size_t>(kNodeBinLower[b])) return b;
  }
  return 0;
}

std::vector<double> default_rate_edges() { return {0, 16, 32, 64, 128}; }

void DatasetScan::add(const Transaction& tx, RowIndex row) {
  if (rows_ == 0) {
    first_ = last_ = tx.timestamp;
  } else {
    if (tx.timestamp < last_) ordered_ = false;
    first_ = std::min(first_, tx.timestamp);
    last_ = std::max(last_, tx.timestamp);
  }
  ++rows_;
  if (tx.is_laundering) laundering_rows_.push_back(row);
  ++outgoing_[key(tx.from_bank, tx.from_account)];
  outgoing_.try_emplace(key(tx.to_bank, tx.to_account), 0);
  banks_.insert(tx.from_bank);
  banks_.insert(tx.to_bank);
  ++formats_[static_cast<std::size_t>(tx.payment_format)];
}

std::vector<std::uint64_t> DatasetScan::outgoing_counts() const {
  std::vector<std::uint64_t> out;
  out.reserve(outgoing_.size());
  for (const auto& [k, n] : outgoing_) out.push_back(n);
  return out;
}

DatasetScan scan_csv(const std::string& path) {
  CsvReader reader(path);
  DatasetScan scan;
  Transaction tx;
  while (reader.next(tx)) scan.add(tx, reader.line_number() - 2);
  for (const auto& issue : reader.issues()) scan.add_issue(issue);
  return scan;
}

DatasetScan scan_rows(std::span<const Transaction> rows) {
  DatasetScan scan;
  for (std::size_t i = 0; i < rows.size(); ++i) scan.add(rows[i], i);
  return scan;
}

namespace {

std::optional<double> ratio(std::uint64_t total, std::uint64_t part) {
  if (part == 0) return std::nullopt;
  return static_cast<double>(total) / static_cast<double>(part);
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string ratio_text(const std::optional<double>& v) {
  if (!v) return "none";
  std::ostringstream s;
  s << "1/" << std::fixed << std::setprecision(0) << *v;
  return s.str();
}

}  // namespace

Summary summarize(const DatasetScan& scan) {
  Summary s;
  s.transactions = scan.rows();
  s.unique_accounts = scan.accounts();
  s.unique_banks = scan.banks();
  s.first = scan.first();
  s.last = scan.last();
  s.laundering = scan.laundering();
  s.laundering_ratio = ratio(s.transactions, s.laundering);
  s.malformed = scan.issues();
  return s;
}

RateBreakdown rate_breakdown(const DatasetScan& scan, std::span<const PatternInstance> sidecar) {
  const auto& laundering = scan.laundering_rows();
  std::vector<RowIndex> rows;
  for (const auto& p : sidecar) {
    for (const auto& r : p.emitted_tx) {
      if (!r) continue;
      if (!std::binary_search(laundering.begin(), laundering.end(), *r)) {
        throw IntegrityError("sidecar pattern " + std::to_string(p.pattern_id) + " references row " +
                             std::to_string(*r) + (*r >= scan.rows() ? ", which does not exist" : ", which is not laundering"));
      }
      rows.push_back(*r);
    }
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  RateBreakdown r;
  r.pattern = rows.size();
  r.total = laundering.size();
  r.other = r.total - r.pattern;
  r.pattern_ratio = ratio(scan.rows(), r.pattern);
  r.other_ratio = ratio(scan.rows(), r.other);
  r.total_ratio = ratio(scan.rows(), r.total);
  if (r.pattern > 0) r.other_per_pattern = static_cast<double>(r.other) / static_cast<double>(r.pattern);
  return r;
}

PatternReport pattern_report(std::span<const PatternInstance> sidecar) {
  PatternReport rep;
  for (const auto& p : sidecar) {
    auto& row = rep.kinds[static_cast<std::size_t>(p.kind)];
    ++row.instances;
    if (!p.complete) ++row.partial;
    const auto emitted = static_cast<std::uint64_t>(
        std::count_if(p.emitted_tx.begin(), p.emitted_tx.end(), [](const auto& r) { return r.has_value(); }));
    row.transactions += emitted;
    rep.transactions += emitted;
    ++rep.node_histogram[node_bin(p.members.size())];
    ++rep.instances;
  }
  return rep;
}

ActivityReport activity_histograms(const DatasetScan& scan, double span_days, std::vector<double> rate_edges) {
  ActivityReport rep;
  rep.span_days = span_days > 0.0 ? span_days
                                  : static_cast<double>(scan.last() - scan.first()) / static_cast<double>(kMinutesPerDay);
  if (!(rep.span_days > 0.0)) throw std::invalid_argument("dataset spans zero time");
  if (rate_edges.empty() || !std::is_sorted(rate_edges.begin(), rate_edges.end())) {
    throw std::invalid_argument("rate bin edges must be nonempty and ascending");
  }
  rep.rate_edges = std::move(rate_edges);
  rep.rate_counts.assign(rep.rate_edges.size(), 0);
  const double scale = 365.25 / rep.span_days;
  double total = 0.0;
  const auto counts = scan.outgoing_counts();
  for (auto n : counts) {
    const double rate = static_cast<double>(n) * scale;
    total += rate;
    auto it = std::upper_bound(rep.rate_edges.begin(), rep.rate_edges.end(), rate);
    const std::size_t bin = it == rep.rate_edges.begin() ? 0 : static_cast<std::size_t>(it - rep.rate_edges.begin()) - 1;
    ++rep.rate_counts[bin];
  }
  rep.mean_annual_rate = counts.empty() ? 0.0 : total / static_cast<double>(counts.size());
  rep.format_counts = scan.formats();
  for (std::size_t f = 0; f < kPaymentFormatCount; ++f) {
    rep.format_fractions[f] =
        scan.rows() ? static_cast<double>(rep.format_counts[f]) / static_cast<double>(scan.rows()) : 0.0;
  }
  return rep;
}

ChiSquare chi_square(std::span<const std::uint64_t> observed, std::span<const double> probabilities) {
  if (observed.size() != probabilities.size()) throw std::invalid_argument("chi_square: size mismatch");
  std::uint64_t n = 0;
  for (auto o : observed) n += o;
  ChiSquare out;
  int categories = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probabilities[i] * static_cast<double>(n);
    if (expected <= 0.0) {
      if (observed[i] > 0) {
        out.p_value = 0.0;
        out.statistic = std::numeric_limits<double>::infinity();
        return out;
      }
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected;
    out.statistic += d * d / expected;
    ++categories;
  }
  out.dof = categories - 1;
  if (out.dof < 1) return out;
  boost::math::chi_squared dist(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

IntegrityReport check_dataset(const std::string& csv_path, std::span<const PatternInstance> sidecar) {
  IntegrityReport rep;
  std::unordered_map<RowIndex, Transaction> needed;
  for (const auto& p : sidecar) {
    for (const auto& r : p.emitted_tx) {
      if (r) needed.emplace(*r, Transaction{});
    }
  }

  CsvReader reader(csv_path);
  std::unordered_set<RowIndex> found;
  Transaction tx;
  RowIndex rows = 0;
  SimTime last = 0;
  while (reader.next(tx)) {
    const RowIndex row = reader.line_number() - 2;
    rows = row + 1;
    if (tx.timestamp < last) rep.violations.push_back("row " + std::to_string(row) + " is out of timestamp order");
    last = std::max(last, tx.timestamp);
    if (auto it = needed.find(row); it != needed.end()) {
      it->second = tx;
      found.insert(row);
    }
  }
  for (const auto& issue : reader.issues()) {
    rep.violations.push_back("line " + std::to_string(issue.line) + ": " + issue.message);
  }

  for (const auto& p : sidecar) {
    const std::string tag = "pattern " + std::to_string(p.pattern_id) + ": ";
    bool rows_ok = true;
    for (const auto& r : p.emitted_tx) {
      if (!r) continue;
      if (!found.count(*r)) {
        rep.violations.push_back(tag + "row " + std::to_string(*r) + " not in the CSV (" + std::to_string(rows) +
                                 " rows)");
        rows_ok = false;
      } else if (!needed.at(*r).is_laundering) {
        rep.violations.push_back(tag + "row " + std::to_string(*r) + " is not labeled laundering");
        rows_ok = false;
      }
    }
    if (p.members.size() >= static_cast<std::size_t>(kMaxPatternNodes + 1)) {
      rep.violations.push_back(tag + "node count " + std::to_string(p.members.size()) + " in the [18,inf) bin");
    }
    if (!p.complete) {
      ++rep.partial_patterns;
      continue;
    }
    if (!rows_ok) continue;
    std::vector<Transaction> emitted;
    bool all_rows = true;
    for (const auto& r : p.emitted_tx) {
      if (!r) {
        all_rows = false;
        break;
      }
      Transaction t = needed.at(*r);
      t.pattern_id = p.pattern_id;
      emitted.push_back(t);
    }
    if (!all_rows) {
      rep.violations.push_back(tag + "marked complete but has steps without rows");
      continue;
    }
    ++rep.checked_patterns;
    for (auto& v : validate(p, emitted)) rep.violations.push_back(tag + v);
  }
  return rep;
}

nlohmann::json to_json(const Summary& s) {
  nlohmann::json malformed = nlohmann::json::array();
  for (const auto& m : s.malformed) malformed.push_back({{"line", m.line}, {"message", m.message}});
  return {
      {"transactions", s.transactions},
      {"unique_accounts", s.unique_accounts},
      {"unique_banks", s.unique_banks},
      {"first_timestamp", s.transactions ? nlohmann::json(format_timestamp(s.first)) : nlohmann::json(nullptr)},
      {"last_timestamp", s.transactions ? nlohmann::json(format_timestamp(s.last)) : nlohmann::json(nullptr)},
      {"laundering", s.laundering},
      {"laundering_ratio", optional_json(s.laundering_ratio)},
      {"malformed_rows", std::move(malformed)},
  };
}

nlohmann::json to_json(const RateBreakdown& r) {
  return {
      {"pattern", r.pattern},
      {"other", r.other},
      {"total", r.total},
      {"pattern_ratio", optional_json(r.pattern_ratio)},
      {"other_ratio", optional_json(r.other_ratio)},
      {"total_ratio", optional_json(r.total_ratio)},
      {"other_per_pattern", optional_json(r.other_per_pattern)},
  };
}

nlohmann::json to_json(const PatternReport& r) {
  nlohmann::json kinds = nlohmann::json::object();
  for (std::size_t k = 0; k < kPatternKindCount; ++k) {
    const auto& row = r.kinds[k];
    kinds[std::string(to_string(kAllPatternKinds[k]))] = {
        {"instances", row.instances}, {"transactions", row.transactions}, {"partial", row.partial}};
  }
  nlohmann::json hist = nlohmann::json::array();
  for (std::size_t b = 0; b < r.node_histogram.size(); ++b) {
    hist.push_back({{"min", kNodeBinLower[b]},
                    {"max", b + 1 < kNodeBinLower.size() ? nlohmann::json(kNodeBinLower[b + 1]) : nlohmann::json(nullptr)},
                    {"count", r.node_histogram[b]}});
  }
  return {{"instances", r.instances}, {"transactions", r.transactions}, {"kinds", std::move(kinds)},
          {"node_histogram", std::move(hist)}};
}

nlohmann::json to_json(const ActivityReport& r) {
  nlohmann::json bins = nlohmann::json::array();
  for (std::size_t b = 0; b < r.rate_edges.size(); ++b) {
    bins.push_back({{"min", r.rate_edges[b]},
                    {"max", b + 1 < r.rate_edges.size() ? nlohmann::json(r.rate_edges[b + 1]) : nlohmann::json(nullptr)},
                    {"accounts", r.rate_counts[b]}});
  }
  nlohmann::json formats = nlohmann::json::object();
  for (std::size_t f = 0; f < kPaymentFormatCount; ++f) {
    formats[std::string(to_string(static_cast<PaymentFormat>(f)))] = {{"count", r.format_counts[f]},
                                                                       {"fraction", r.format_fractions[f]}};
  }
  return {{"span_days", r.span_days},
          {"mean_annual_tx_per_account", r.mean_annual_rate},
          {"annualized_rate_histogram", std::move(bins)},
          {"payment_formats", std::move(formats)}};
}

std::string format_report(const Summary& s, const ActivityReport* activity, const RateBreakdown* rates,
                          const PatternReport* patterns) {
  std::ostringstream out;
  out << "transactions      " << s.transactions << '\n';
  out << "unique accounts   " << s.unique_accounts << '\n';
  out << "unique banks      " << s.unique_banks << '\n';
  if (s.transactions) out << "date range        " << format_timestamp(s.first) << " .. " << format_timestamp(s.last) << '\n';
  out << "laundering        " << s.laundering << " (" << ratio_text(s.laundering_ratio) << ")\n";
  if (!s.malformed.empty()) out << "malformed rows    " << s.malformed.size() << '\n';
  if (rates) {
    out << "\nlaundering rates\n";
    out << "  patterns        " << rates->pattern << " (" << ratio_text(rates->pattern_ratio) << ")\n";
    out << "  other           " << rates->other << " (" << ratio_text(rates->other_ratio) << ")\n";
    out << "  total           " << rates->total << " (" << ratio_text(rates->total_ratio) << ")\n";
  }
  if (patterns) {
    out << "\npatterns          instances  transactions\n";
    for (std::size_t k = 0; k < kPatternKindCount; ++k) {
      out << "  " << std::left << std::setw(16) << to_string(kAllPatternKinds[k]) << std::right << std::setw(9)
          << patterns->kinds[k].instances << std::setw(14) << patterns->kinds[k].transactions << '\n';
    }
    out << "node histogram\n";
    for (std::size_t b = 0; b < kNodeBinLower.size(); ++b) {
      std::string label = std::to_string(kNodeBinLower[b]) + "-" +
                          (b + 1 < kNodeBinLower.size() ? std::to_string(kNodeBinLower[b + 1]) : std::string("inf"));
      out << "  " << std::left << std::setw(16) << label << std::right << std::setw(9) << patterns->node_histogram[b]
          << '\n';
    }
  }
  if (activity) {
    out << "\nannualized tx/account (span " << std::fixed << std::setprecision(2) << activity->span_days
        << " days, mean " << activity->mean_annual_rate << ")\n";
    for (std::size_t b = 0; b < activity->rate_edges.size(); ++b) {
      std::ostringstream label;
      label << std::defaultfloat << activity->rate_edges[b];
      if (b + 1 < activity->rate_edges.size()) {
        label << "-" << activity->rate_edges[b + 1];
      } else {
        label << "+";
      }
      out << "  " << std::left << std::setw(16) << label.str() << std::right << std::setw(9)
          << activity->rate_counts[b] << '\n';
    }
    out << "payment formats\n";
    for (std::size_t f = 0; f < kPaymentFormatCount; ++f) {
      out << "  " << std::left << std::setw(16) << to_string(static_cast<PaymentFormat>(f)) << std::right
          << std::setw(9) << activity->format_counts[f] << std::setw(10) << std::setprecision(4)
          << activity->format_fractions[f] << '\n';
    }
  }
  return out.str();
}

}  // namespace amlgen
