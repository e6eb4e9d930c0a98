#pragma once

#include "rpg/game_model.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpg {

/// Plain-text `key = value` configuration. Blank lines and lines starting with '#' are
/// ignored; later keys override earlier ones.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> find(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  std::string to_string() const;

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  std::map<std::string, Entry> entries_;
};

/// Builds a game over `data` from keys rho_l, rho_d, W, bias_eps and the optional box overrides
/// learner_sigma_lower/upper, attacker_mean_lower/upper, attacker_sigma_lower/upper.
GameSpec game_spec_from_config(const Config& cfg, Dataset data);

/// Inverse of game_spec_from_config for games built on uniform per-sample boxes.
Config game_config(const GameSpec& game);

}  // namespace rpg
