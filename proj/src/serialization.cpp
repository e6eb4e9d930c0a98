#include "rpg/serialization.hpp"

#include "rpg/errors.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rpg {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

std::string join_doubles(std::span<const double> values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(sep);
    out += format_double(values[i]);
  }
  return out;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LearnerParams ParamsFile::learner() const {
  return unflatten_learner(theta.head(layout.learner_dim()), layout.k);
}

std::string params_csv(const Vec& theta, const GameLayout& layout) {
  if (theta.size() != layout.dim()) throw ShapeError("parameter vector does not match layout");
  std::string out = "# rpg-params k=" + std::to_string(layout.k) + " n=" + std::to_string(layout.n) + "\n";
  out += join_doubles(std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())));
  out += "\n";
  return out;
}

ParamsFile parse_params_csv(std::string_view text) {
  std::size_t line_no = 0;
  bool have_header = false;
  GameLayout layout;
  std::vector<double> values;
  bool have_values = false;
  for (std::string_view rest = text; !rest.empty();) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      long long k = -1, n = -1;
      if (std::sscanf(std::string(line).c_str(), "# rpg-params k=%lld n=%lld", &k, &n) == 2 &&
          k >= 1 && n >= 0) {
        layout = {static_cast<Index>(k), static_cast<Index>(n)};
        have_header = true;
      }
      continue;
    }
    if (have_values) throw ParseError("parameter file holds more than one data line", line_no);
    for (std::string_view tok : split(line, ',')) {
      double v = 0.0;
      if (!parse_double(tok, v)) throw ParseError("bad number '" + std::string(tok) + "'", line_no);
      values.push_back(v);
    }
    have_values = true;
  }
  if (!have_header) throw ParseError("missing '# rpg-params k=.. n=..' header", 1);
  if (!have_values) throw ParseError("missing parameter line", line_no);
  if (static_cast<Index>(values.size()) != layout.dim()) {
    throw ParseError("expected " + std::to_string(layout.dim()) + " values, found " +
                         std::to_string(values.size()),
                     line_no);
  }
  ParamsFile out;
  out.layout = layout;
  out.theta = Eigen::Map<const Vec>(values.data(), static_cast<Index>(values.size()));
  return out;
}

void save_params(const std::string& path, const Vec& theta, const GameLayout& layout) {
  write_file_atomic(path, params_csv(theta, layout));
}

void save_learner(const std::string& path, const LearnerParams& learner) {
  save_params(path, flatten_learner(learner), GameLayout{learner.k(), 0});
}

ParamsFile load_params(const std::string& path) { return parse_params_csv(read_file(path)); }

}  // namespace rpg
