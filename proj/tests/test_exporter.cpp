#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amlgen/csv.hpp"
#include "amlgen/errors.hpp"
#include "amlgen/sidecar.hpp"
#include "amlgen/split.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace amlgen;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

Transaction row(SimTime t, BankId from, BankId to, Amount amount, bool laundering = false) {
  const auto usd = *find_currency("US Dollar");
  const auto eur = *find_currency("Euro");
  Transaction tx;
  tx.timestamp = t;
  tx.from_bank = from;
  tx.from_account = AccountId::from_value(0x800000000ULL + from);
  tx.to_bank = to;
  tx.to_account = AccountId::from_value(0x900000000ULL + to);
  tx.amount_paid = amount;
  tx.payment_currency = usd;
  tx.amount_received = amount * 9 / 10;
  tx.receiving_currency = eur;
  tx.payment_format = PaymentFormat::Wire;
  tx.is_laundering = laundering;
  return tx;
}

std::string write_rows(const std::string& dir, const std::vector<Transaction>& rows) {
  const std::string path = dir + "/tx.csv";
  write_csv(rows, path);
  return path;
}

}  // namespace

TEST_CASE("csv header and row shape") {
  const std::string dir = fixtures::temp_dir("csv_shape");
  const SimTime t = to_sim_time({2022, 9, 1}, 0, 8);
  const auto path = write_rows(dir, {row(t, 10, 3208, 1'234'56, true)});
  const auto lines = lines_of(path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "Timestamp,From Bank,Account,To Bank,Account,Amount Received,Receiving Currency,Amount Paid,"
                    "Payment Currency,Payment Format,Is Laundering");
  CHECK(lines[1] == "2022/09/01 00:08,10,80000000A,3208,900000C88,1111.10,Euro,1234.56,US Dollar,Wire,1");
}

TEST_CASE("csv round trip preserves every visible field") {
  const std::string dir = fixtures::temp_dir("csv_round");
  RandomStream rng = rng_stream(4, "csv", 0);
  std::vector<Transaction> rows;
  SimTime t = to_sim_time({2022, 9, 1});
  const auto catalog = currency_catalog();
  for (int i = 0; i < 2000; ++i) {
    t += rng.uniform_int(0, 3);
    Transaction tx = row(t, static_cast<BankId>(rng.uniform_int(0, 30000)), static_cast<BankId>(rng.uniform_int(0, 9)),
                         rng.uniform_int(1, 1'000'000'000), rng.bernoulli(0.1));
    tx.payment_currency = static_cast<CurrencyId>(rng.uniform_int(0, static_cast<std::int64_t>(catalog.size()) - 1));
    tx.receiving_currency = static_cast<CurrencyId>(rng.uniform_int(0, static_cast<std::int64_t>(catalog.size()) - 1));
    tx.payment_format = static_cast<PaymentFormat>(rng.uniform_int(0, kPaymentFormatCount - 1));
    rows.push_back(tx);
  }
  const auto path = write_rows(dir, rows);
  const auto back = read_csv(path);
  CHECK(back.issues.empty());
  REQUIRE(back.rows.size() == rows.size());
  std::size_t diff = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) diff += !rows[i].same_row(back.rows[i]);
  CHECK(diff == 0);
  // Re-writing the parsed rows reproduces the file byte for byte.
  write_csv(back.rows, dir + "/again.csv");
  CHECK(slurp(dir + "/again.csv") == slurp(path));
}

TEST_CASE("empty export is header only") {
  const std::string dir = fixtures::temp_dir("csv_empty");
  const auto path = write_rows(dir, {});
  CHECK(slurp(path) == std::string(kCsvHeader) + "\n");
  CHECK(read_csv(path).rows.empty());
}

TEST_CASE("csv writer enforces order and reader reports bad lines") {
  const std::string dir = fixtures::temp_dir("csv_bad");
  {
    CsvWriter w(dir + "/tx.csv");
    w.append(row(100, 1, 2, 500));
    CHECK_THROWS_AS(w.append(row(99, 1, 2, 500)), IntegrityError);
    w.close();
    CHECK(w.rows() == 1);
  }
  {
    std::ofstream out(dir + "/mixed.csv");
    out << kCsvHeader << '\n'
        << "2022/09/01 00:08,10,80000000A,3208,900000C88,1111.10,Euro,1234.56,US Dollar,Wire,1\n"
        << "2022/09/01 00:09,10,80000000A,3208,900000C88,1111.10,Euro,1234.56,US Dollar,Telegram,1\n"
        << "garbage\n";
  }
  const auto c = read_csv(dir + "/mixed.csv");
  CHECK(c.rows.size() == 1);
  REQUIRE(c.issues.size() == 2);
  CHECK(c.issues[0].line == 3);
  CHECK(c.issues[1].line == 4);
  {
    std::ofstream out(dir + "/noheader.csv");
    out << "Timestamp,From Bank\n";
  }
  CHECK_THROWS_AS(read_csv(dir + "/noheader.csv"), IoError);
  CHECK_THROWS_AS(read_csv(dir + "/missing.csv"), IoError);
  std::string err;
  CHECK_FALSE(parse_csv_row("2022/09/01 00:08,10,80000000A,3208,900000C88,1111.10,Euro,1234.56,US Dollar,Wire,2",
                            &err));
  CHECK_FALSE(err.empty());
}

TEST_CASE("sidecar round trip") {
  const std::string dir = fixtures::temp_dir("sidecar");
  PatternInstance p;
  p.pattern_id = 7;
  p.kind = PatternKind::ScatterGather;
  p.controller = 42;
  p.start = to_sim_time({2022, 9, 3}, 12, 0);
  p.span = 3000;
  p.reused_accounts = true;
  for (int i = 0; i < 4; ++i) {
    PatternMember m;
    m.account_id = AccountId::from_value(0x123456780ULL + i);
    m.bank_id = static_cast<BankId>(i * 11);
    m.role = i == 0 ? Role::Source : (i == 3 ? Role::Sink : Role::Intermediate);
    m.layer = i == 0 ? 0 : (i == 3 ? 2 : 1);
    p.members.push_back(m);
  }
  p.retention = {0.0, 0.0317, 0.049999999999999989, 0.0};
  p.planned_steps = {{10, 0, 1, 5000, 0}, {20, 0, 2, 5000, 0}, {1600, 1, 3, 4900, 1}, {1700, 2, 3, 4800, 1}};
  p.emitted_tx = {RowIndex{3}, RowIndex{5}, RowIndex{9}, std::nullopt};
  PatternInstance q = p;
  q.pattern_id = 8;
  q.complete = true;
  q.emitted_tx = {RowIndex{4}, RowIndex{6}, RowIndex{10}, RowIndex{11}};

  const std::vector<PatternInstance> both{p, q};
  write_sidecar(both, dir + "/patterns.txt", 12);
  const auto back = read_sidecar(dir + "/patterns.txt");
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& a = both[k];
    const auto& b = back[k];
    CHECK(b.pattern_id == a.pattern_id);
    CHECK(b.kind == a.kind);
    CHECK(b.controller == a.controller);
    CHECK(b.start == a.start);
    CHECK(b.span == a.span);
    CHECK(b.complete == a.complete);
    CHECK(b.reused_accounts == a.reused_accounts);
    CHECK(b.retention == a.retention);
    CHECK(b.emitted_tx == a.emitted_tx);
    REQUIRE(b.members.size() == a.members.size());
    for (std::size_t i = 0; i < a.members.size(); ++i) {
      CHECK(b.members[i].account_id == a.members[i].account_id);
      CHECK(b.members[i].bank_id == a.members[i].bank_id);
      CHECK(b.members[i].role == a.members[i].role);
      CHECK(b.members[i].layer == a.members[i].layer);
      CHECK(b.members[i].account == kNone);
    }
    REQUIRE(b.planned_steps.size() == a.planned_steps.size());
    for (std::size_t i = 0; i < a.planned_steps.size(); ++i) {
      CHECK(b.planned_steps[i].offset == a.planned_steps[i].offset);
      CHECK(b.planned_steps[i].amount == a.planned_steps[i].amount);
      CHECK(b.planned_steps[i].from == a.planned_steps[i].from);
      CHECK(b.planned_steps[i].layer == a.planned_steps[i].layer);
    }
  }
  CHECK(sidecar_rows(back) == std::vector<RowIndex>{3, 4, 5, 6, 9, 10, 11});
  const auto j = sidecar_json(both);
  CHECK(j["count"] == 2);
  CHECK(j["patterns"][0]["kind"] == "scatter-gather");

  CHECK_THROWS_AS(write_sidecar(both, dir + "/bad.txt", 11), IntegrityError);
  std::istringstream broken("BEGIN PATTERN 1 cycle\nstatus maybe\nEND PATTERN 1\n");
  CHECK_THROWS_WITH_AS(parse_sidecar(broken), doctest::Contains("sidecar line 2"), IntegrityError);
  std::istringstream empty("");
  CHECK(parse_sidecar(empty).empty());
}

TEST_CASE("temporal split of ten rows") {
  std::vector<SimTime> ts(10);
  for (int i = 0; i < 10; ++i) ts[i] = 1000 + 10 * i;
  const auto b = split_bounds(ts, {});
  CHECK(b.train == RowRange{0, 6});
  CHECK(b.val_eval == RowRange{6, 8});
  CHECK(b.test_eval == RowRange{8, 10});
  CHECK(b.t1 == 1060);
  CHECK(b.t2 == 1080);
  CHECK(b.notes.empty());

  std::vector<SimTime> tied{1, 2, 3, 4, 5, 5, 5, 8, 9, 10};
  const auto c = split_bounds(tied, {});
  CHECK(c.train.end == 6);
  REQUIRE(c.notes.size() == 1);
  CHECK(c.notes[0].find("t1") != std::string::npos);
  CHECK(split_bounds(std::vector<SimTime>(7, 3), {}).notes.size() == 1);

  CHECK_THROWS_AS(split_bounds({1, 2, 3, 4}, {}), IntegrityError);
  CHECK_THROWS_AS(split_bounds({1, 2, 3, 5, 4}, {}), IntegrityError);
  CHECK_THROWS_WITH_AS(split_bounds(ts, {0.5, 0.3, 0.3}), doctest::Contains("fractions sum to 1.1"), ConfigError);
  CHECK_THROWS_AS(parse_fractions("0.6,0.2"), ConfigError);
  CHECK(parse_fractions("0.8,0.1,0.1").train == 0.8);
}

TEST_CASE("split files nest and preserve bytes") {
  const std::string dir = fixtures::temp_dir("split");
  std::vector<Transaction> rows;
  for (int i = 0; i < 101; ++i) rows.push_back(row(500 + i / 3, 1, 2, 100 + i, i % 7 == 0));
  const auto path = write_rows(dir, rows);
  const auto b = temporal_split(path, dir + "/out");
  const auto paths = split_paths(dir + "/out");
  CHECK(b.train.end == 61);
  CHECK(b.val_eval.end == 81);
  const auto all = lines_of(path);
  const auto train = lines_of(paths.train);
  const auto val = lines_of(paths.validation);
  const auto test = lines_of(paths.test);
  CHECK(train.size() == 62);
  CHECK(val.size() == 82);
  CHECK(test == all);
  for (std::size_t i = 0; i < train.size(); ++i) CHECK(train[i] == val[i]);
  for (std::size_t i = 0; i < val.size(); ++i) CHECK(val[i] == test[i]);
  std::ifstream mf(paths.manifest);
  const auto m = nlohmann::json::parse(mf);
  CHECK(m["rows"] == 101);
  CHECK(m["val_eval_range"] == nlohmann::json::array({61, 81}));
  CHECK(m["t1"] == format_timestamp(rows[61].timestamp));
}

TEST_CASE("bank filter keeps rows touching the bank") {
  const std::string dir = fixtures::temp_dir("filter");
  std::vector<Transaction> rows{row(1, 1, 2, 10), row(2, 2, 1, 20), row(3, 3, 3, 30), row(4, 12, 21, 40),
                                row(5, 2, 2, 50), row(6, 1, 1, 60)};
  const auto path = write_rows(dir, rows);
  const auto all = lines_of(path);

  const auto r1 = filter_bank(path, 1, dir + "/b1.csv");
  CHECK(r1.rows_in == 6);
  CHECK(r1.rows_out == 3);
  CHECK(r1.bank_seen);
  const auto b1 = lines_of(dir + "/b1.csv");
  CHECK(b1 == std::vector<std::string>{all[0], all[1], all[2], all[6]});

  const auto r9 = filter_bank(path, 9, dir + "/b9.csv");
  CHECK_FALSE(r9.bank_seen);
  CHECK(slurp(dir + "/b9.csv") == std::string(kCsvHeader) + "\n");

  // Union of the per-bank views covers every row; filtering twice changes nothing.
  const auto r2 = filter_bank(path, 2, dir + "/b2.csv");
  std::set<std::string> covered;
  for (BankId bank : {1u, 2u, 3u, 12u, 21u}) {
    filter_bank(path, bank, dir + "/v.csv");
    const auto v = lines_of(dir + "/v.csv");
    covered.insert(v.begin() + 1, v.end());
  }
  CHECK(covered == std::set<std::string>(all.begin() + 1, all.end()));
  filter_bank(dir + "/b2.csv", 2, dir + "/b2b.csv");
  CHECK(slurp(dir + "/b2b.csv") == slurp(dir + "/b2.csv"));
  CHECK(r2.rows_out == 3);
  const auto r12 = filter_bank(path, 12, dir + "/b12.csv");
  CHECK(r12.rows_out == 1);  // "12" must not match bank 1 or 2 textually
}
