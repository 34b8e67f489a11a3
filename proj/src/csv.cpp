#include "amlgen/csv.hpp"

#include <array>
#include <charconv>

namespace amlgen {

namespace {

constexpr std::size_t kColumns = 11;
constexpr std::size_t kFlushBytes = 1 << 20;

bool split_fields(std::string_view line, std::array<std::string_view, kColumns>& fields) {
  std::size_t count = 0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      if (count == kColumns) return false;
      fields[count++] = line.substr(begin, i - begin);
      begin = i + 1;
    }
  }
  return count == kColumns;
}

std::optional<BankId> parse_bank(std::string_view text) {
  BankId value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

void append_bank(std::string& out, BankId bank) {
  char buf[16];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, bank);
  out.append(buf, end);
}

}  // namespace

void append_csv_row(std::string& out, const Transaction& tx) {
  append_timestamp(out, tx.timestamp);
  out.push_back(',');
  append_bank(out, tx.from_bank);
  out.push_back(',');
  out.append(tx.from_account.view());
  out.push_back(',');
  append_bank(out, tx.to_bank);
  out.push_back(',');
  out.append(tx.to_account.view());
  out.push_back(',');
  append_amount(out, tx.amount_received, currency_decimals(tx.receiving_currency));
  out.push_back(',');
  out.append(currency_name(tx.receiving_currency));
  out.push_back(',');
  append_amount(out, tx.amount_paid, currency_decimals(tx.payment_currency));
  out.push_back(',');
  out.append(currency_name(tx.payment_currency));
  out.push_back(',');
  out.append(to_string(tx.payment_format));
  out.push_back(',');
  out.push_back(tx.is_laundering ? '1' : '0');
}

std::string format_csv_row(const Transaction& tx) {
  std::string out;
  append_csv_row(out, tx);
  return out;
}

std::optional<Transaction> parse_csv_row(std::string_view line, std::string* error) {
  auto fail = [&](const char* what) -> std::optional<Transaction> {
    if (error) *error = what;
    return std::nullopt;
  };
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::array<std::string_view, kColumns> f;
  if (!split_fields(line, f)) return fail("expected 11 columns");

  Transaction tx;
  auto ts = parse_timestamp(f[0]);
  if (!ts) return fail("bad timestamp");
  tx.timestamp = *ts;
  auto from_bank = parse_bank(f[1]);
  auto to_bank = parse_bank(f[3]);
  if (!from_bank || !to_bank) return fail("bad bank id");
  tx.from_bank = *from_bank;
  tx.to_bank = *to_bank;
  auto from_acct = AccountId::parse(f[2]);
  auto to_acct = AccountId::parse(f[4]);
  if (!from_acct || !to_acct) return fail("bad account id");
  tx.from_account = *from_acct;
  tx.to_account = *to_acct;
  auto recv_cur = find_currency(f[6]);
  auto pay_cur = find_currency(f[8]);
  if (!recv_cur || !pay_cur) return fail("unknown currency");
  tx.receiving_currency = *recv_cur;
  tx.payment_currency = *pay_cur;
  auto received = parse_amount(f[5], *recv_cur);
  auto paid = parse_amount(f[7], *pay_cur);
  if (!received || !paid) return fail("bad amount");
  tx.amount_received = *received;
  tx.amount_paid = *paid;
  auto format = parse_payment_format(f[9]);
  if (!format) return fail("unknown payment format");
  tx.payment_format = *format;
  if (f[10] == "1") {
    tx.is_laundering = true;
  } else if (f[10] != "0") {
    return fail("Is Laundering must be 0 or 1");
  }
  return tx;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open " + path + " for writing");
  buffer_.reserve(kFlushBytes + 256);
  buffer_.append(kCsvHeader);
  buffer_.push_back('\n');
}

CsvWriter::~CsvWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void CsvWriter::write(const Transaction& tx, RowIndex) {
  if (rows_ > 0 && tx.timestamp < last_) {
    throw IntegrityError("row " + std::to_string(rows_) + " is earlier than the previous row");
  }
  last_ = tx.timestamp;
  append_csv_row(buffer_, tx);
  buffer_.push_back('\n');
  ++rows_;
  if (buffer_.size() >= kFlushBytes) flush_buffer();
}

void CsvWriter::flush_buffer() {
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  if (!out_) throw IoError("write failed: " + path_);
}

void CsvWriter::close() {
  if (closed_) return;
  closed_ = true;
  flush_buffer();
  out_.close();
  if (!out_) throw IoError("close failed: " + path_);
}

std::uint64_t write_csv(std::span<const Transaction> rows, const std::string& path) {
  CsvWriter writer(path);
  for (const auto& tx : rows) writer.append(tx);
  writer.close();
  return writer.rows();
}

CsvReader::CsvReader(const std::string& path) : in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open " + path);
  if (!std::getline(in_, scratch_)) throw IoError(path + ": missing header");
  if (!scratch_.empty() && scratch_.back() == '\r') scratch_.pop_back();
  if (scratch_ != kCsvHeader) throw IoError(path + ": unexpected header");
}

bool CsvReader::next_line(std::string& line) {
  if (!std::getline(in_, line)) return false;
  ++line_;
  return true;
}

bool CsvReader::next(Transaction& tx) {
  std::string error;
  while (next_line(scratch_)) {
    if (auto parsed = parse_csv_row(scratch_, &error)) {
      tx = *parsed;
      return true;
    }
    issues_.push_back({line_, error});
  }
  return false;
}

CsvContents read_csv(const std::string& path) {
  CsvReader reader(path);
  CsvContents out;
  Transaction tx;
  while (reader.next(tx)) out.rows.push_back(tx);
  out.issues = reader.issues();
  return out;
}

}  // namespace amlgen
