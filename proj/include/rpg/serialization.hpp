#pragma once

#include "rpg/game_model.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rpg {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Strict double parser (whole token must be consumed).
bool parse_double(std::string_view token, double& out);

std::string join_doubles(std::span<const double> values, char sep = ',');
std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Parameter file: a `# rpg-params k=<k> n=<n>` header followed by one CSV line holding the
/// flattened vector. n = 0 marks a learner-only file (a bare classifier).
struct ParamsFile {
  Vec theta;
  GameLayout layout;

  LearnerParams learner() const;
};

std::string params_csv(const Vec& theta, const GameLayout& layout);
ParamsFile parse_params_csv(std::string_view text);
void save_params(const std::string& path, const Vec& theta, const GameLayout& layout);
void save_learner(const std::string& path, const LearnerParams& learner);
ParamsFile load_params(const std::string& path);

}  // namespace rpg
