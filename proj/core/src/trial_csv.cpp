#include "blurfitts/trial_csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

namespace blurfitts {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_real(std::string_view field, std::string_view column, std::size_t line) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw SchemaError(line, "column '" + std::string(column) + "' is not a number: '" +
                                std::string(field) + "'");
  return value;
}

long long parse_integer(std::string_view field, std::string_view column, std::size_t line) {
  long long value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end)
    throw SchemaError(line, "column '" + std::string(column) + "' is not an integer: '" +
                                std::string(field) + "'");
  return value;
}

}  // namespace

SchemaError::SchemaError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return {buf, ptr};
}

void write_trial_csv(std::ostream& out, const std::vector<SessionLog>& logs) {
  out << trial_csv_header << '\n';
  for (const auto& log : logs) {
    for (const auto& t : log.trials) {
      out << log.participant << ',' << to_string(log.block) << ',' << format_number(t.condition.A)
          << ',' << format_number(t.condition.W) << ',' << format_number(t.condition.B) << ','
          << log.session << ',' << t.trial_index << ',' << t.attempt << ','
          << std::llround(t.click_time) << ',' << format_number(t.click_point.x) << ','
          << format_number(t.click_point.y) << ',' << format_number(t.target_center.x) << ','
          << format_number(t.target_center.y) << ',' << (t.hit ? 1 : 0) << '\n';
    }
  }
}

std::vector<SessionLog> read_trial_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;

  using Key = std::tuple<std::string, Block, TaskCondition, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<SessionLog> logs;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      throw SchemaError(line_no, "CR line ending; trial logs use LF");
    if (!have_header) {
      if (!line.empty() && line.front() == '#') continue;
      if (line != trial_csv_header)
        throw SchemaError(line_no, "expected header '" + std::string(trial_csv_header) + "'");
      have_header = true;
      continue;
    }
    if (line.empty()) continue;

    const auto f = split(line);
    if (f.size() != 14)
      throw SchemaError(line_no, "expected 14 fields, found " + std::to_string(f.size()));
    if (f[0].empty()) throw SchemaError(line_no, "empty participant id");

    Block block;
    try {
      block = parse_block(f[1]);
    } catch (const DomainError& e) {
      throw SchemaError(line_no, e.what());
    }

    TaskCondition cond{parse_real(f[2], "A", line_no), parse_real(f[3], "W", line_no),
                       static_cast<double>(parse_integer(f[4], "B", line_no))};
    try {
      validate_condition(cond);
    } catch (const DomainError& e) {
      throw SchemaError(line_no, e.what());
    }

    const auto session = parse_integer(f[5], "session", line_no);
    const auto trial = parse_integer(f[6], "trial", line_no);
    const auto attempt = parse_integer(f[7], "attempt", line_no);
    if (session < 0) throw SchemaError(line_no, "negative session index");
    if (trial < 0) throw SchemaError(line_no, "negative trial index");
    if (attempt < 1) throw SchemaError(line_no, "attempt numbers start at 1");
    const auto hit = parse_integer(f[13], "hit", line_no);
    if (hit != 0 && hit != 1) throw SchemaError(line_no, "hit must be 0 or 1");

    TrialRecord rec;
    rec.condition = cond;
    rec.trial_index = static_cast<std::size_t>(trial);
    rec.attempt = static_cast<int>(attempt);
    rec.click_time = static_cast<double>(parse_integer(f[8], "t_ms", line_no));
    rec.click_point = {parse_real(f[9], "x", line_no), parse_real(f[10], "y", line_no)};
    rec.target_center = {parse_real(f[11], "cx", line_no), parse_real(f[12], "cy", line_no)};
    rec.hit = hit == 1;

    Key key{std::string(f[0]), block, cond, static_cast<std::size_t>(session)};
    auto [it, inserted] = index.try_emplace(key, logs.size());
    if (inserted) {
      SessionLog log;
      log.participant = std::string(f[0]);
      log.block = block;
      log.condition = cond;
      log.session = static_cast<std::size_t>(session);
      logs.push_back(std::move(log));
    }
    logs[it->second].trials.push_back(rec);
  }
  if (!have_header) throw SchemaError(line_no == 0 ? 1 : line_no, "missing header");
  return logs;
}

}  // namespace blurfitts
