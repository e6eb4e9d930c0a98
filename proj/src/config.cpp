#include "rpg/config.hpp"

#include "rpg/errors.hpp"
#include "rpg/serialization.hpp"

#include <cmath>

namespace rpg {

Config Config::parse(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("empty key", line_no);
    cfg.entries_[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
  }
  return cfg;
}

Config Config::load(const std::string& path) { return parse(read_file(path)); }

std::optional<std::string> Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  double v = 0.0;
  if (!parse_double(it->second.value, v)) {
    throw ParseError("'" + key + "' is not a number: " + it->second.value, it->second.line);
  }
  return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  double v = 0.0;
  if (!parse_double(it->second.value, v) || v != std::floor(v)) {
    throw ParseError("'" + key + "' is not an integer: " + it->second.value, it->second.line);
  }
  return static_cast<long long>(v);
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  for (std::string_view tok : split(it->second.value, ',')) {
    double v = 0.0;
    if (!parse_double(tok, v)) {
      throw ParseError("'" + key + "' holds a non-numeric entry: " + std::string(tok),
                       it->second.line);
    }
    out.push_back(v);
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0};
}

std::string Config::to_string() const {
  std::string out;
  for (const auto& [key, entry] : entries_) out += key + " = " + entry.value + "\n";
  return out;
}

GameSpec game_spec_from_config(const Config& cfg, Dataset data) {
  const double W = cfg.get_double("W", 0.1);
  const Index k = data.k();
  const Index n = data.n();
  auto [lbox, dbox] = default_boxes(k, n, W);
  const Index m = k + 1;
  lbox.lower.tail(m).setConstant(cfg.get_double("learner_sigma_lower", bounds::learner_sigma_lower));
  lbox.upper.tail(m).setConstant(cfg.get_double("learner_sigma_upper", bounds::learner_sigma_upper));
  const double mlo = cfg.get_double("attacker_mean_lower", bounds::attacker_mean_lower);
  const double mhi = cfg.get_double("attacker_mean_upper", bounds::attacker_mean_upper);
  const double slo = cfg.get_double("attacker_sigma_lower", bounds::attacker_sigma_lower);
  const double shi = cfg.get_double("attacker_sigma_upper", bounds::attacker_sigma_upper);
  for (Index i = 0; i < n; ++i) set_sample_box(dbox, k, i, mlo, mhi, slo, shi);
  return GameSpec(std::move(data), cfg.get_double("rho_l", 1.0), cfg.get_double("rho_d", 1.0),
                  std::move(lbox), std::move(dbox), cfg.get_double("bias_eps", 0.0));
}

Config game_config(const GameSpec& game) {
  const GameLayout lay = game.layout();
  const Index m = lay.k + 1;
  Config cfg;
  cfg.set("rho_l", format_double(game.rho_l));
  cfg.set("rho_d", format_double(game.rho_d));
  cfg.set("W", format_double(game.learner_box.upper(0)));
  cfg.set("bias_eps", format_double(game.bias_eps));
  cfg.set("learner_sigma_lower", format_double(game.learner_box.lower(m)));
  cfg.set("learner_sigma_upper", format_double(game.learner_box.upper(m)));
  cfg.set("attacker_mean_lower", format_double(game.attacker_box.lower(0)));
  cfg.set("attacker_mean_upper", format_double(game.attacker_box.upper(0)));
  cfg.set("attacker_sigma_lower", format_double(game.attacker_box.lower(lay.k)));
  cfg.set("attacker_sigma_upper", format_double(game.attacker_box.upper(lay.k)));
  return cfg;
}

}  // namespace rpg
