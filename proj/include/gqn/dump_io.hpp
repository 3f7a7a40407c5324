#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "gqn/observation.hpp"

namespace gqn {

// One recorded step: what the agent saw, what it did, what it got.
struct DumpRecord {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  bool done = false;

  bool operator==(const DumpRecord&) const = default;
};

// One JSON object per record, fixed key order, no trailing newline. Numbers
// print with enough digits to round-trip exactly.
std::string serialize_record(const DumpRecord& record);

// Lazy line-by-line reader. Whitespace-only lines are skipped; anything else
// must parse. Errors cite the 1-based line number: ParseError for malformed
// JSON or missing/mistyped fields, ValidationError for well-formed records
// whose values break the observation invariants.
class DumpReader {
 public:
  explicit DumpReader(std::istream& in) : in_(in) {}

  std::optional<DumpRecord> next();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

// Reads a whole dump file; DataError if the file cannot be opened.
std::vector<DumpRecord> read_dump_file(const std::string& path);

}  // namespace gqn
