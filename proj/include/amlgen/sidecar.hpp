#pragma once

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "amlgen/domain.hpp"
#include "amlgen/errors.hpp"

namespace amlgen {

// Ground-truth sidecar: one plain-text block per instance.
//
//   BEGIN PATTERN <id> <kind>
//   status complete|partial
//   controller <entity index>
//   start <timestamp>
//   span <minutes>
//   reused 0|1
//   downsized 0|1
//   member <index> <role> <layer> <bank> <account> <retention>
//   step <layer> <from> <to> <offset> <amount> <row|->
//   END PATTERN <id>
//
// Rows are 0-based CSV data-row indices; "-" marks a step that never ran.
std::string format_sidecar_block(const PatternInstance& instance);

// Throws IntegrityError when a row index is >= row_count.
std::size_t write_sidecar(std::span<const PatternInstance> instances, const std::string& path,
                          std::uint64_t row_count);

nlohmann::json sidecar_json(std::span<const PatternInstance> instances);
void write_sidecar_json(std::span<const PatternInstance> instances, const std::string& path);

// Inverse of write_sidecar. Account indices are not stored and come back as kNone.
std::vector<PatternInstance> parse_sidecar(std::istream& in);
std::vector<PatternInstance> read_sidecar(const std::string& path);

// Every emitted row index in the sidecar, sorted and unique.
std::vector<RowIndex> sidecar_rows(std::span<const PatternInstance> instances);

}  // namespace amlgen
