#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amlgen/domain.hpp"
#include "amlgen/engine.hpp"
#include "amlgen/errors.hpp"

namespace amlgen {

// Columns are positional: the two "Account" headers are deliberate duplicates.
constexpr std::string_view kCsvHeader =
    "Timestamp,From Bank,Account,To Bank,Account,Amount Received,Receiving Currency,Amount Paid,"
    "Payment Currency,Payment Format,Is Laundering";

void append_csv_row(std::string& out, const Transaction& tx);
std::string format_csv_row(const Transaction& tx);

// Parses one data line (no trailing newline). Only CSV-visible fields are set.
std::optional<Transaction> parse_csv_row(std::string_view line, std::string* error = nullptr);

// Streaming writer. Rows must arrive in nondecreasing timestamp order.
class CsvWriter : public TransactionSink {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter() override;

  void write(const Transaction& tx, RowIndex row) override;
  void append(const Transaction& tx) { write(tx, rows_); }
  // Flushes and closes; throws IoError if any write failed.
  void close();
  std::uint64_t rows() const { return rows_; }

 private:
  void flush_buffer();

  std::string path_;
  std::ofstream out_;
  std::string buffer_;
  std::uint64_t rows_ = 0;
  SimTime last_ = 0;
  bool closed_ = false;
};

std::uint64_t write_csv(std::span<const Transaction> rows, const std::string& path);

struct CsvIssue {
  std::uint64_t line = 0;  // 1-based file line
  std::string message;
};

// Streaming reader over data rows; malformed lines are recorded and skipped.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  // Next well-formed row; false at end of file.
  bool next(Transaction& tx);
  // Next raw data line, unparsed; false at end of file.
  bool next_line(std::string& line);
  std::uint64_t line_number() const { return line_; }
  const std::vector<CsvIssue>& issues() const { return issues_; }

 private:
  std::ifstream in_;
  std::string scratch_;
  std::uint64_t line_ = 1;
  std::vector<CsvIssue> issues_;
};

struct CsvContents {
  std::vector<Transaction> rows;
  std::vector<CsvIssue> issues;
};

CsvContents read_csv(const std::string& path);

}  // namespace amlgen
