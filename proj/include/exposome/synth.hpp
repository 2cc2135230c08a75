#pragma once
// Seeded synthetic OHP corpora. One SplitMix64 stream per seed drives every
// draw in a fixed order, so equal configs produce byte-identical corpora.
// Element popularity follows a Zipf(skew) law over each vocabulary; planted
// identities are injected at chosen dates to rehearse emergence detection.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "exposome/dates.hpp"
#include "exposome/ingest.hpp"
#include "exposome/ohp.hpp"
#include "exposome/rng.hpp"

namespace exposome {

// A planted identity: `count` records at start_date, repeated every
// `every_days` (0 = single burst) until the corpus date range ends.
struct PlantSpec {
  std::string pathology;
  std::vector<std::string> agents;
  std::string occupation;
  std::string sector;
  Date start_date;
  std::uint32_t count = 1;
  std::int32_t every_days = 0;
};

struct SynthConfig {
  std::uint64_t seed = 42;
  std::uint64_t n_records = 1000;
  std::uint32_t n_pathologies = 400;
  std::uint32_t n_agents = 600;
  std::uint32_t n_occupations = 250;
  std::uint32_t n_sectors = 25;
  Date date_start = Date::from_ymd(2000, 1, 1);
  Date date_end = Date::from_ymd(2009, 12, 31);
  std::array<double, 5> agent_count_probs = {0.50, 0.25, 0.15, 0.07, 0.03};
  double skew = 1.0;
  std::vector<PlantSpec> plants;

  std::vector<std::string> validate() const {
    std::vector<std::string> problems;
    if (n_pathologies == 0 || n_agents == 0 || n_occupations == 0 || n_sectors == 0) {
      problems.push_back("vocabulary sizes must be positive");
    }
    if (date_end < date_start) problems.push_back("date range is empty");
    double total = 0.0;
    for (double p : agent_count_probs) {
      if (p < 0.0) problems.push_back("agent count probabilities must be non-negative");
      total += p;
    }
    if (total < 1.0 - 1e-9 || total > 1.0 + 1e-9) {
      problems.push_back("agent count probabilities must sum to 1");
    }
    if (skew < 0.0) problems.push_back("skew must be non-negative");
    for (const auto& plant : plants) {
      if (plant.pathology.empty() || plant.occupation.empty() || plant.sector.empty() ||
          plant.agents.empty() || plant.agents.size() > kMaxAgents) {
        problems.push_back("plant template must be a valid identity");
      }
      if (plant.count == 0) problems.push_back("plant count must be positive");
      if (plant.every_days < 0) problems.push_back("plant period must be non-negative");
    }
    return problems;
  }
};

namespace detail {

inline std::string padded(std::uint64_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return digits;
}

// Vocabulary tokens, index 0 being the most popular rank. Pathology codes are
// ICD-10-like: ten diseases per subgroup, subgroups cycling over letters.
inline std::string pathology_token(std::uint32_t i) {
  const std::uint32_t subgroup = i / 10;
  const char letter = static_cast<char>('A' + subgroup % 26);
  return std::string(1, letter) + padded(subgroup / 26, 2) + "." + std::to_string(i % 10);
}

inline std::string agent_token(std::uint32_t i, std::size_t width) {
  return "AG" + padded(i, width);
}
inline std::string occupation_token(std::uint32_t i, std::size_t width) {
  return "OC" + padded(i, width);
}
inline std::string sector_token(std::uint32_t i, std::size_t width) {
  return "SE" + padded(i, width);
}

inline std::size_t digits_for(std::uint32_t n) {
  return std::max<std::size_t>(3, std::to_string(n > 0 ? n - 1 : 0).size());
}

}  // namespace detail

// Draw order per record: date, pathology, occupation, sector, agent count,
// agent codes (redrawn until distinct), one responsibility per agent, center.
inline std::vector<OhpRecord> generate(const SynthConfig& config) {
  if (const auto problems = config.validate(); !problems.empty()) {
    throw std::invalid_argument("invalid generator config: " + problems.front());
  }

  SplitMix64 rng(config.seed);
  const ZipfSampler pathology_rank(config.n_pathologies, config.skew);
  const ZipfSampler agent_rank(config.n_agents, config.skew);
  const ZipfSampler occupation_rank(config.n_occupations, config.skew);
  const ZipfSampler sector_rank(config.n_sectors, config.skew);

  const std::size_t agent_width = detail::digits_for(config.n_agents);
  const std::size_t occupation_width = detail::digits_for(config.n_occupations);
  const std::size_t sector_width = detail::digits_for(config.n_sectors);
  const std::size_t id_width =
      std::max<std::size_t>(6, std::to_string(config.n_records).size());
  const std::uint64_t range_days =
      static_cast<std::uint64_t>(days_between(config.date_start, config.date_end)) + 1;

  std::vector<OhpRecord> records;
  records.reserve(config.n_records);

  for (std::uint64_t i = 0; i < config.n_records; ++i) {
    OhpRecord record;
    record.record_id = "R" + detail::padded(i + 1, id_width);
    record.reported_on =
        config.date_start.plus_days(static_cast<std::int32_t>(rng.next_below(range_days)));
    record.pathology =
        detail::pathology_token(static_cast<std::uint32_t>(pathology_rank.sample(rng)));
    record.occupation = detail::occupation_token(
        static_cast<std::uint32_t>(occupation_rank.sample(rng)), occupation_width);
    record.sector = detail::sector_token(
        static_cast<std::uint32_t>(sector_rank.sample(rng)), sector_width);

    double u = rng.next_double();
    std::size_t agent_count = 1;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < config.agent_count_probs.size(); ++k) {
      cumulative += config.agent_count_probs[k];
      if (u < cumulative) {
        agent_count = k + 1;
        break;
      }
      agent_count = config.agent_count_probs.size();
    }
    agent_count = std::min<std::size_t>(agent_count, config.n_agents);

    std::vector<std::uint32_t> chosen;
    std::size_t misses = 0;
    while (chosen.size() < agent_count) {
      const auto rank = static_cast<std::uint32_t>(agent_rank.sample(rng));
      if (std::find(chosen.begin(), chosen.end(), rank) == chosen.end()) {
        chosen.push_back(rank);
      } else if (++misses >= 64) {
        // Extreme skews starve the rejection loop; fall back to the first
        // rank not taken yet, keeping the draw deterministic.
        std::uint32_t next_rank = 0;
        while (std::find(chosen.begin(), chosen.end(), next_rank) != chosen.end()) {
          ++next_rank;
        }
        chosen.push_back(next_rank);
      }
    }
    for (const std::uint32_t rank : chosen) {
      AgentExposure agent;
      agent.code = detail::agent_token(rank, agent_width);
      agent.responsibility = 1 + static_cast<int>(rng.next_below(3));
      record.agents.push_back(std::move(agent));
    }
    record.center = "CTR" + detail::padded(rng.next_below(12), 2);
    records.push_back(std::move(record));
  }

  std::uint64_t plant_seq = 0;
  for (std::size_t p = 0; p < config.plants.size(); ++p) {
    const PlantSpec& plant = config.plants[p];
    Date when = plant.start_date;
    do {
      for (std::uint32_t k = 0; k < plant.count; ++k) {
        OhpRecord record;
        record.record_id =
            "P" + detail::padded(p + 1, 2) + "-" + detail::padded(++plant_seq, 4);
        record.reported_on = when;
        record.center = "PLANT";
        record.pathology = plant.pathology;
        record.occupation = plant.occupation;
        record.sector = plant.sector;
        for (const auto& agent : plant.agents) record.agents.push_back({agent, 3});
        records.push_back(std::move(record));
      }
      if (plant.every_days <= 0) break;
      when = when.plus_days(plant.every_days);
    } while (when <= config.date_end);
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const OhpRecord& a, const OhpRecord& b) {
                     if (a.reported_on != b.reported_on) return a.reported_on < b.reported_on;
                     return a.record_id < b.record_id;
                   });
  return records;
}

// JSON config document; every field is optional and defaults apply.
inline SynthConfig synth_config_from_json(const nlohmann::json& doc) {
  SynthConfig config;
  auto set_field = [&](const char* name, auto& member) {
    if (doc.contains(name)) member = doc.at(name).template get<std::decay_t<decltype(member)>>();
  };
  set_field("seed", config.seed);
  set_field("records", config.n_records);
  set_field("pathologies", config.n_pathologies);
  set_field("agents", config.n_agents);
  set_field("occupations", config.n_occupations);
  set_field("sectors", config.n_sectors);
  set_field("skew", config.skew);
  auto set_date = [&](const char* name, Date& member) {
    if (!doc.contains(name)) return;
    const auto parsed = Date::parse(doc.at(name).get<std::string>());
    if (!parsed) throw std::invalid_argument(std::string("bad date in config field ") + name);
    member = *parsed;
  };
  set_date("date_start", config.date_start);
  set_date("date_end", config.date_end);
  if (doc.contains("agent_count_probs")) {
    const auto& probs = doc.at("agent_count_probs");
    if (!probs.is_array() || probs.size() != 5) {
      throw std::invalid_argument("agent_count_probs must be an array of 5 numbers");
    }
    for (std::size_t i = 0; i < 5; ++i) config.agent_count_probs[i] = probs[i].get<double>();
  }
  if (doc.contains("plants")) {
    for (const auto& entry : doc.at("plants")) {
      PlantSpec plant;
      plant.pathology = entry.at("pathology").get<std::string>();
      plant.agents = entry.at("agents").get<std::vector<std::string>>();
      plant.occupation = entry.at("occupation").get<std::string>();
      plant.sector = entry.at("sector").get<std::string>();
      const auto start = Date::parse(entry.at("start_date").get<std::string>());
      if (!start) throw std::invalid_argument("bad plant start_date");
      plant.start_date = *start;
      if (entry.contains("count")) plant.count = entry.at("count").get<std::uint32_t>();
      if (entry.contains("every_days")) {
        plant.every_days = entry.at("every_days").get<std::int32_t>();
      }
      config.plants.push_back(std::move(plant));
    }
  }
  return config;
}

}  // namespace exposome
