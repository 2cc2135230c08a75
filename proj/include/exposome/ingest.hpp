#pragma once
// File ingestion: JSON Lines and CSV corpora in, validated records plus
// line-addressed rejects out. Rejects never abort a run; only unreadable
// input or a bad CSV header is fatal. fold_identities() then collapses
// records into the weighted identity ledger the graphs are built from.

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "exposome/dates.hpp"
#include "exposome/ohp.hpp"

namespace exposome {

struct RejectReport {
  std::size_t line_number = 0;
  std::string record_id;  // when recoverable from the line
  std::vector<ValidationError> errors;
};

struct ParseResult {
  std::vector<OhpRecord> records;
  std::vector<RejectReport> rejects;
  std::vector<RejectReport> warnings;  // e.g. duplicate record ids; the record is kept
  std::size_t total_lines = 0;
  std::size_t blank_lines = 0;
};

class BadHeaderError : public std::runtime_error {
 public:
  explicit BadHeaderError(const std::string& what) : std::runtime_error(what) {}
};

class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline bool is_blank(std::string_view line) {
  return trim(line).empty();
}

// Accepts the record; duplicate ids are kept but noted as warnings, since
// identity weighting is the authoritative deduplication.
inline void accept_record(ParseResult& result, OhpRecord record, std::size_t line,
                          std::map<std::string, std::size_t>& ids_seen) {
  const auto [it, inserted] = ids_seen.emplace(record.record_id, line);
  if (!inserted) {
    result.warnings.push_back(
        {line, record.record_id, {{ValidationCode::DuplicateRecordId, {}}}});
  }
  result.records.push_back(std::move(record));
}

// Splits one CSV line honoring double quotes; returns false on unbalanced
// quotes or stray characters after a closing quote.
inline bool split_csv_line(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool in_quotes = false;
  bool quoted_field = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty()) return false;
      in_quotes = true;
      quoted_field = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
      quoted_field = false;
    } else {
      if (quoted_field) return false;  // text after closing quote
      field += c;
    }
  }
  if (in_quotes) return false;
  out.push_back(field);
  return true;
}

inline const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header = {
      "record_id", "reported_on", "center",      "pathology",
      "occupation", "sector",     "agent1_code", "agent1_resp",
      "agent2_code", "agent2_resp", "agent3_code", "agent3_resp",
      "agent4_code", "agent4_resp", "agent5_code", "agent5_resp"};
  return header;
}

inline std::optional<long long> parse_integer(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  std::size_t pos = 0;
  try {
    const long long value = std::stoll(t, &pos);
    if (pos != t.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

// One JSON object per line; blank lines are skipped, malformed lines become
// rejects. Every input line is accounted for: accepted + rejected + blank.
inline ParseResult parse_jsonl(std::istream& in) {
  ParseResult result;
  std::map<std::string, std::size_t> ids_seen;
  std::string line;
  while (std::getline(in, line)) {
    ++result.total_lines;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (result.total_lines == 1 && line.size() >= 3 &&
        static_cast<unsigned char>(line[0]) == 0xEF) {
      line.erase(0, 3);
    }
    if (detail::is_blank(line)) {
      ++result.blank_lines;
      continue;
    }
    nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      result.rejects.push_back(
          {result.total_lines, {}, {{ValidationCode::MalformedLine, {}}}});
      continue;
    }
    RawRecord raw;
    auto text_field = [&](const char* name) -> std::string {
      const auto it = parsed.find(name);
      if (it == parsed.end() || !it->is_string()) return {};
      return it->get<std::string>();
    };
    raw.record_id = text_field("record_id");
    raw.reported_on = text_field("reported_on");
    raw.center = text_field("center");
    raw.pathology = text_field("pathology");
    raw.occupation = text_field("occupation");
    raw.sector = text_field("sector");
    if (const auto agents = parsed.find("agents");
        agents != parsed.end() && agents->is_array()) {
      for (const auto& entry : *agents) {
        RawAgent agent;
        if (entry.is_object()) {
          if (const auto code = entry.find("code");
              code != entry.end() && code->is_string()) {
            agent.code = code->get<std::string>();
          }
          if (const auto resp = entry.find("responsibility");
              resp != entry.end() && resp->is_number_integer()) {
            agent.responsibility = resp->get<long long>();
          }
        }
        raw.agents.push_back(std::move(agent));
      }
    }
    auto outcome = validate_record(raw);
    if (outcome.ok()) {
      detail::accept_record(result, std::move(*outcome.record), result.total_lines,
                            ids_seen);
    } else {
      result.rejects.push_back(
          {result.total_lines, trim(raw.record_id), std::move(outcome.errors)});
    }
  }
  if (in.bad()) throw InputError("I/O error while reading JSON lines input");
  return result;
}

// Comma-separated with optional quoting. Agent columns must be packed
// densely from agent1 on; a used slot needs both code and responsibility.
inline ParseResult parse_csv(std::istream& in) {
  ParseResult result;
  std::map<std::string, std::size_t> ids_seen;
  std::string line;
  std::vector<std::string> cols;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++result.total_lines;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (result.total_lines == 1 && line.size() >= 3 &&
        static_cast<unsigned char>(line[0]) == 0xEF) {
      line.erase(0, 3);
    }
    if (!saw_header) {
      if (!detail::split_csv_line(line, cols) || cols != detail::csv_header()) {
        throw BadHeaderError("BAD_HEADER: first line must be the canonical column list");
      }
      saw_header = true;
      continue;
    }
    if (detail::is_blank(line)) {
      ++result.blank_lines;
      continue;
    }
    if (!detail::split_csv_line(line, cols) || cols.size() != detail::csv_header().size()) {
      result.rejects.push_back(
          {result.total_lines, {}, {{ValidationCode::MalformedLine, {}}}});
      continue;
    }
    RawRecord raw;
    raw.record_id = cols[0];
    raw.reported_on = cols[1];
    raw.center = cols[2];
    raw.pathology = cols[3];
    raw.occupation = cols[4];
    raw.sector = cols[5];

    bool sparse = false;
    bool gap_seen = false;
    for (std::size_t slot = 0; slot < kMaxAgents; ++slot) {
      const std::string code = trim(cols[6 + 2 * slot]);
      const std::string resp = trim(cols[7 + 2 * slot]);
      if (code.empty() && resp.empty()) {
        gap_seen = true;
        continue;
      }
      if (gap_seen || code.empty()) {  // used slot after a gap, or code-less slot
        sparse = true;
        break;
      }
      raw.agents.push_back({code, detail::parse_integer(resp)});
    }
    if (sparse) {
      result.rejects.push_back({result.total_lines, trim(raw.record_id),
                                {{ValidationCode::SparseAgents, {}}}});
      continue;
    }
    auto outcome = validate_record(raw);
    if (outcome.ok()) {
      detail::accept_record(result, std::move(*outcome.record), result.total_lines,
                            ids_seen);
    } else {
      result.rejects.push_back(
          {result.total_lines, trim(raw.record_id), std::move(outcome.errors)});
    }
  }
  if (in.bad()) throw InputError("I/O error while reading CSV input");
  if (!saw_header) throw BadHeaderError("BAD_HEADER: empty input, header required");
  return result;
}

// Dispatches on extension: .csv parses as CSV, anything else as JSON lines.
inline ParseResult parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path);
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? parse_csv(in) : parse_jsonl(in);
}

// Canonical JSON line for one record; parse_jsonl() reads it back verbatim.
inline std::string to_json_line(const OhpRecord& record) {
  nlohmann::ordered_json object;
  object["record_id"] = record.record_id;
  object["reported_on"] = record.reported_on.to_string();
  object["center"] = record.center;
  object["pathology"] = record.pathology;
  object["occupation"] = record.occupation;
  object["sector"] = record.sector;
  auto agents = nlohmann::ordered_json::array();
  for (const auto& agent : record.agents) {
    agents.push_back({{"code", agent.code}, {"responsibility", agent.responsibility}});
  }
  object["agents"] = std::move(agents);
  return object.dump();
}

// ---------------------------------------------------------------------------
// Identity ledger

struct LedgerEntry {
  std::uint64_t weight = 0;
  Date first_seen;
  Date last_seen;
  std::map<std::string, int> max_responsibility;  // per agent code

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

// Identities with their multiplicities. The sum of weights always equals the
// number of records folded in.
class IdentityLedger {
 public:
  using Map = std::map<OhpIdentity, LedgerEntry>;
  using const_iterator = Map::const_iterator;

  void add_record(const OhpRecord& record) {
    OhpIdentity identity = identity_of(record);
    auto [it, inserted] = entries_.try_emplace(std::move(identity));
    LedgerEntry& entry = it->second;
    if (inserted) {
      entry.first_seen = record.reported_on;
      entry.last_seen = record.reported_on;
    } else {
      entry.first_seen = std::min(entry.first_seen, record.reported_on);
      entry.last_seen = std::max(entry.last_seen, record.reported_on);
    }
    entry.weight += 1;
    for (const auto& agent : record.agents) {
      auto [rit, _] = entry.max_responsibility.try_emplace(agent.code, agent.responsibility);
      rit->second = std::max(rit->second, agent.responsibility);
    }
  }

  // Direct insertion for synthetic ledgers and tests.
  void add(OhpIdentity identity, std::uint64_t weight, Date first_seen, Date last_seen,
           std::map<std::string, int> max_responsibility = {}) {
    auto [it, inserted] = entries_.try_emplace(std::move(identity));
    LedgerEntry& entry = it->second;
    if (inserted) {
      entry.first_seen = first_seen;
      entry.last_seen = last_seen;
    } else {
      entry.first_seen = std::min(entry.first_seen, first_seen);
      entry.last_seen = std::max(entry.last_seen, last_seen);
    }
    entry.weight += weight;
    for (const auto& [code, resp] : max_responsibility) {
      auto [rit, _] = entry.max_responsibility.try_emplace(code, resp);
      rit->second = std::max(rit->second, resp);
    }
  }

  // Commutative merge: weights add, date ranges widen, responsibilities max.
  void merge(const IdentityLedger& other) {
    for (const auto& [identity, entry] : other.entries_) {
      add(identity, entry.weight, entry.first_seen, entry.last_seen,
          entry.max_responsibility);
    }
  }

  std::uint64_t total_weight() const {
    std::uint64_t total = 0;
    for (const auto& [_, entry] : entries_) total += entry.weight;
    return total;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }
  const_iterator find(const OhpIdentity& identity) const { return entries_.find(identity); }

  friend bool operator==(const IdentityLedger&, const IdentityLedger&) = default;

 private:
  Map entries_;
};

inline IdentityLedger fold_identities(std::span<const OhpRecord> records) {
  IdentityLedger ledger;
  for (const auto& record : records) ledger.add_record(record);
  return ledger;
}

}  // namespace exposome
