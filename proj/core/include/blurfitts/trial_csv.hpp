#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blurfitts/protocol.hpp"

namespace blurfitts {

/// Trial-log column layout shared with the browser task runner.
inline constexpr std::string_view trial_csv_header =
    "participant,block,A,W,B,session,trial,attempt,t_ms,x,y,cx,cy,hit";

/// A schema violation, tagged with the 1-based line it was found on.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Writes the header and one row per click. Times are rounded to whole
/// milliseconds; coordinates use the shortest round-trip decimal form.
void write_trial_csv(std::ostream& out, const std::vector<SessionLog>& logs);

/// Parses a trial log. Lines starting with '#' before the header are
/// metadata and skipped. Rows are grouped into sessions by
/// (participant, block, A, W, B, session) in order of first appearance.
std::vector<SessionLog> read_trial_csv(std::istream& in);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double value);

}  // namespace blurfitts
