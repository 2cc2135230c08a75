#pragma once
// Occupational health problem (OHP) domain model: one reported case is a
// principal pathology plus 1..5 noxious agents (each with a responsibility
// degree), an occupation and an activity sector. Identity collapses the
// agent list to a sorted set and ignores responsibilities and dates, so
// repeated reports of the same problem can be counted together.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "exposome/dates.hpp"

namespace exposome {

inline constexpr std::size_t kMaxAgents = 5;
inline constexpr int kMinResponsibility = 0;  // doubtful
inline constexpr int kMaxResponsibility = 3;  // high

struct AgentExposure {
  std::string code;
  int responsibility = 0;

  friend bool operator==(const AgentExposure&, const AgentExposure&) = default;
};

struct OhpRecord {
  std::string record_id;
  Date reported_on;
  std::string center;
  std::string pathology;
  std::string occupation;
  std::string sector;
  std::vector<AgentExposure> agents;

  friend bool operator==(const OhpRecord&, const OhpRecord&) = default;
};

// What makes two reports "the same problem": pathology at full resolution
// plus the deduplicated, sorted agent codes, occupation and sector.
struct OhpIdentity {
  std::string pathology;
  std::vector<std::string> agent_set;  // sorted, unique
  std::string occupation;
  std::string sector;

  friend auto operator<=>(const OhpIdentity&, const OhpIdentity&) = default;
};

enum class PathologyLevel { Category, Subgroup, Disease };

inline std::string_view to_string(PathologyLevel level) {
  switch (level) {
    case PathologyLevel::Category: return "category";
    case PathologyLevel::Subgroup: return "subgroup";
    case PathologyLevel::Disease: return "disease";
  }
  return "?";
}

inline std::optional<PathologyLevel> parse_level(std::string_view text) {
  if (text == "category") return PathologyLevel::Category;
  if (text == "subgroup") return PathologyLevel::Subgroup;
  if (text == "disease") return PathologyLevel::Disease;
  return std::nullopt;
}

// True when `coarse` is strictly coarser than `fine`.
inline bool is_coarser(PathologyLevel coarse, PathologyLevel fine) {
  return static_cast<int>(coarse) < static_cast<int>(fine);
}

// ---------------------------------------------------------------------------
// Validation

enum class ValidationCode {
  MaxAgentsExceeded,
  NoAgents,
  BadResponsibility,
  BadDate,
  EmptyField,
  MalformedLine,   // parse-level: unparseable input line
  SparseAgents,    // parse-level: CSV agent columns with gaps
  DuplicateRecordId,
};

inline std::string_view to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::MaxAgentsExceeded: return "MAX_AGENTS_EXCEEDED";
    case ValidationCode::NoAgents: return "NO_AGENTS";
    case ValidationCode::BadResponsibility: return "BAD_RESPONSIBILITY";
    case ValidationCode::BadDate: return "BAD_DATE";
    case ValidationCode::EmptyField: return "EMPTY_FIELD";
    case ValidationCode::MalformedLine: return "MALFORMED_LINE";
    case ValidationCode::SparseAgents: return "SPARSE_AGENTS";
    case ValidationCode::DuplicateRecordId: return "DUPLICATE_RECORD_ID";
  }
  return "?";
}

struct ValidationError {
  ValidationCode code;
  std::string field;  // set for EmptyField, empty otherwise

  friend auto operator<=>(const ValidationError&, const ValidationError&) = default;

  std::string to_string() const {
    std::string s{exposome::to_string(code)};
    if (!field.empty()) {
      s += '(';
      s += field;
      s += ')';
    }
    return s;
  }
};

// Pre-validation view of one record as parsed from a file. Agent
// responsibilities are nullopt when missing or not an integer.
struct RawAgent {
  std::string code;
  std::optional<long long> responsibility;
};

struct RawRecord {
  std::string record_id;
  std::string reported_on;
  std::string center;
  std::string pathology;
  std::string occupation;
  std::string sector;
  std::vector<RawAgent> agents;
};

struct ValidationOutcome {
  std::optional<OhpRecord> record;
  std::vector<ValidationError> errors;  // sorted, unique

  bool ok() const { return record.has_value(); }
};

inline std::string trim(std::string_view text) {
  const auto* ws = " \t\r\n\f\v";
  const auto begin = text.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(ws);
  return std::string{text.substr(begin, end - begin + 1)};
}

// Checks every rule and reports all violations, not just the first.
inline ValidationOutcome validate_record(const RawRecord& raw) {
  ValidationOutcome out;
  std::vector<ValidationError> errors;

  OhpRecord record;
  record.record_id = trim(raw.record_id);
  record.center = trim(raw.center);
  record.pathology = trim(raw.pathology);
  record.occupation = trim(raw.occupation);
  record.sector = trim(raw.sector);

  auto require = [&](const std::string& value, const char* name) {
    if (value.empty()) errors.push_back({ValidationCode::EmptyField, name});
  };
  require(record.record_id, "record_id");
  require(record.center, "center");
  require(record.pathology, "pathology");
  require(record.occupation, "occupation");
  require(record.sector, "sector");

  const auto date = Date::parse(trim(raw.reported_on));
  if (!date) {
    errors.push_back({ValidationCode::BadDate, {}});
  } else {
    record.reported_on = *date;
  }

  if (raw.agents.empty()) {
    errors.push_back({ValidationCode::NoAgents, {}});
  } else if (raw.agents.size() > kMaxAgents) {
    errors.push_back({ValidationCode::MaxAgentsExceeded, {}});
  }
  for (const auto& agent : raw.agents) {
    AgentExposure exposure;
    exposure.code = trim(agent.code);
    if (exposure.code.empty()) {
      errors.push_back({ValidationCode::EmptyField, "agent_code"});
    }
    if (!agent.responsibility || *agent.responsibility < kMinResponsibility ||
        *agent.responsibility > kMaxResponsibility) {
      errors.push_back({ValidationCode::BadResponsibility, {}});
    } else {
      exposure.responsibility = static_cast<int>(*agent.responsibility);
    }
    record.agents.push_back(std::move(exposure));
  }

  std::sort(errors.begin(), errors.end());
  errors.erase(std::unique(errors.begin(), errors.end()), errors.end());
  out.errors = std::move(errors);
  if (out.errors.empty()) out.record = std::move(record);
  return out;
}

// Identity is invariant under agent order and repetition; responsibilities
// and the report date are deliberately not part of it.
inline OhpIdentity identity_of(const OhpRecord& record) {
  OhpIdentity identity;
  identity.pathology = record.pathology;
  identity.occupation = record.occupation;
  identity.sector = record.sector;
  identity.agent_set.reserve(record.agents.size());
  for (const auto& agent : record.agents) identity.agent_set.push_back(agent.code);
  std::sort(identity.agent_set.begin(), identity.agent_set.end());
  identity.agent_set.erase(
      std::unique(identity.agent_set.begin(), identity.agent_set.end()),
      identity.agent_set.end());
  return identity;
}

// ---------------------------------------------------------------------------
// Pathology hierarchy

class UnknownCodeError : public std::runtime_error {
 public:
  explicit UnknownCodeError(const std::string& code)
      : std::runtime_error("UNKNOWN_CODE: " + code) {}
};

class BadHierarchyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optional explicit hierarchy: TSV rows `code<TAB>subgroup<TAB>category`
// with a mandatory header. Subgroup codes must map to a single category.
class HierarchyTable {
 public:
  static HierarchyTable parse_tsv(std::istream& in) {
    HierarchyTable table;
    std::string line;
    std::size_t line_number = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_number == 1 && line.size() >= 3 &&
          static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3);  // UTF-8 BOM
      }
      if (trim(line).empty()) continue;
      std::vector<std::string> cols;
      std::size_t start = 0;
      while (true) {
        const auto tab = line.find('\t', start);
        cols.push_back(trim(line.substr(start, tab - start)));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (!saw_header) {
        if (cols != std::vector<std::string>{"code", "subgroup", "category"}) {
          throw BadHierarchyError("hierarchy table: bad header at line " +
                                  std::to_string(line_number));
        }
        saw_header = true;
        continue;
      }
      if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
        throw BadHierarchyError("hierarchy table: malformed row at line " +
                                std::to_string(line_number));
      }
      const auto [it, inserted] =
          table.by_code_.emplace(cols[0], std::pair{cols[1], cols[2]});
      if (!inserted && it->second != std::pair{cols[1], cols[2]}) {
        throw BadHierarchyError("hierarchy table: conflicting rows for code " + cols[0]);
      }
      const auto [sit, s_inserted] = table.subgroup_category_.emplace(cols[1], cols[2]);
      if (!s_inserted && sit->second != cols[2]) {
        throw BadHierarchyError("hierarchy table: subgroup " + cols[1] +
                                " mapped to two categories");
      }
      table.categories_.insert(cols[2]);
    }
    if (!saw_header) throw BadHierarchyError("hierarchy table: missing header");
    return table;
  }

  std::optional<std::string> subgroup_of(const std::string& code) const {
    if (const auto it = by_code_.find(code); it != by_code_.end()) return it->second.first;
    if (subgroup_category_.contains(code)) return code;  // already a subgroup
    return std::nullopt;
  }

  std::optional<std::string> category_of(const std::string& code) const {
    if (const auto it = by_code_.find(code); it != by_code_.end()) return it->second.second;
    if (const auto it = subgroup_category_.find(code); it != subgroup_category_.end()) {
      return it->second;
    }
    if (categories_.contains(code)) return code;  // already a category
    return std::nullopt;
  }

  std::size_t size() const { return by_code_.size(); }

 private:
  std::map<std::string, std::pair<std::string, std::string>> by_code_;
  std::map<std::string, std::string> subgroup_category_;
  std::set<std::string> categories_;
};

// Default prefix rule for ICD-10-like codes: the subgroup truncates the code
// before the first '.', the category is the subgroup's first alphabetic
// character. Degenerate codes fall back to the nearest coarser form so that
// category(subgroup(c)) == category(c) holds for any input.
inline std::string default_subgroup(const std::string& code) {
  const auto dot = code.find('.');
  std::string truncated = dot == std::string::npos ? code : code.substr(0, dot);
  return truncated.empty() ? code : truncated;
}

inline std::string default_category(const std::string& code) {
  const std::string subgroup = default_subgroup(code);
  for (char c : subgroup) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z')) return std::string(1, c);
  }
  return subgroup;
}

// Maps `code` to its ancestor at `level`. Without a table the prefix rule
// applies; with a table an absent code raises UnknownCodeError.
inline std::string pathology_at(const std::string& code, PathologyLevel level,
                                const HierarchyTable* hierarchy = nullptr) {
  if (level == PathologyLevel::Disease) return code;
  if (hierarchy == nullptr) {
    return level == PathologyLevel::Subgroup ? default_subgroup(code)
                                             : default_category(code);
  }
  const auto mapped = level == PathologyLevel::Subgroup ? hierarchy->subgroup_of(code)
                                                        : hierarchy->category_of(code);
  if (!mapped) throw UnknownCodeError(code);
  return *mapped;
}

}  // namespace exposome
