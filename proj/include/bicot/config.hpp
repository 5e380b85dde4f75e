#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "bicot/eval.hpp"
#include "bicot/reward.hpp"
#include "bicot/toy_lab.hpp"

namespace bicot {

using KeyValueMap = std::map<std::string, std::string>;

// "key = value" lines; '#' starts a comment. Throws IoError when the file
// cannot be read, ValidationError on a malformed line.
KeyValueMap load_key_value_file(const std::string& path);
KeyValueMap parse_key_value(std::string_view text);

// Each overload applies the keys it recognizes and records them in
// `consumed`; unknown-key rejection is the caller's job so one file can
// feed several configs.
void apply_config(const KeyValueMap& kv, RewardConfig& cfg,
                  std::set<std::string>& consumed);
void apply_config(const KeyValueMap& kv, TrainConfig& cfg,
                  std::set<std::string>& consumed);
void apply_config(const KeyValueMap& kv, EvalConfig& cfg,
                  std::set<std::string>& consumed);

std::string canonical_string(const RewardConfig& cfg);
std::string canonical_string(const TrainConfig& cfg);
std::string canonical_string(const EvalConfig& cfg);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

template <typename Config>
std::string config_hash(const Config& cfg) {
  return hex64(fnv1a64(canonical_string(cfg)));
}

}  // namespace bicot
