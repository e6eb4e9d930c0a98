#include "rpg/data_io.hpp"

#include "rpg/errors.hpp"
#include "rpg/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <random>
#include <sstream>

namespace rpg {

namespace {

// Calls fn(line, line_no) for every non-blank, non-comment line.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0, line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    fn(line, line_no);
  }
}

double parse_label(std::string_view token, std::size_t line_no) {
  double y = 0.0;
  if (!parse_double(token, y)) throw ParseError("bad label '" + std::string(token) + "'", line_no);
  if (y != 1.0 && y != -1.0)
    throw ParseError("label must be -1 or +1, got '" + std::string(trim(token)) + "'", line_no);
  return y;
}

Dataset from_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& labels,
                  Index k, std::optional<FeatureKind> kind) {
  if (rows.empty()) throw ParseError("no samples", 0);
  Mat x = Mat::Zero(static_cast<Index>(rows.size()), k);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < k; ++j) x(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  Vec y = Eigen::Map<const Vec>(labels.data(), static_cast<Index>(labels.size()));
  const FeatureKind fk = kind ? *kind : infer_feature_kind(x);
  return Dataset(std::move(x), std::move(y), fk);
}

std::string label_text(double y) { return y > 0 ? "+1" : "-1"; }

}  // namespace

FeatureKind infer_feature_kind(const Mat& x) {
  const bool binary = (x.array() == 0.0 || x.array() == 1.0).all();
  if (binary) return FeatureKind::binary;
  if (x.size() > 0 && x.minCoeff() >= 0.0 && x.maxCoeff() <= 1.0)
    return FeatureKind::continuous_unit_interval;
  return FeatureKind::unbounded;
}

Dataset parse_dense_csv(std::string_view text, std::optional<FeatureKind> kind) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::size_t width = 0;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto cells = split(line, ',');
    if (cells.size() < 2) throw ParseError("expected a label and at least one feature", line_no);
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw ParseError("expected " + std::to_string(width) + " columns, got " +
                           std::to_string(cells.size()),
                       line_no);
    labels.push_back(parse_label(cells[0], line_no));
    std::vector<double> row(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c)
      if (!parse_double(cells[c], row[c - 1]) || !std::isfinite(row[c - 1]))
        throw ParseError("bad value '" + std::string(trim(cells[c])) + "'", line_no);
    rows.push_back(std::move(row));
  });
  return from_rows(rows, labels, static_cast<Index>(width == 0 ? 0 : width - 1), kind);
}

Dataset load_dense_csv(const std::string& path, std::optional<FeatureKind> kind) {
  return parse_dense_csv(read_file(path), kind);
}

std::string dense_csv(const Dataset& data) {
  std::ostringstream out;
  for (Index i = 0; i < data.n(); ++i) {
    out << label_text(data.y(i));
    for (Index j = 0; j < data.k(); ++j) out << ',' << format_double(data.features()(i, j));
    out << '\n';
  }
  return out.str();
}

void save_dense_csv(const std::string& path, const Dataset& data) {
  write_file_atomic(path, dense_csv(data));
}

Dataset parse_sparse(std::string_view text, std::optional<Index> k, std::optional<FeatureKind> kind) {
  // Header `# k=<k>` (only honoured without an override).
  std::optional<Index> header_k;
  {
    const std::string_view first = trim(text.substr(0, text.find('\n')));
    constexpr std::string_view tag = "# k=";
    if (first.substr(0, tag.size()) == tag) {
      Index v = 0;
      const std::string_view num = first.substr(tag.size());
      const auto res = std::from_chars(num.data(), num.data() + num.size(), v);
      if (res.ec != std::errc() || res.ptr != num.data() + num.size() || v < 1)
        throw ParseError("bad k header", 1);
      header_k = v;
    }
  }
  const std::optional<Index> limit = k ? k : header_k;
  if (limit && *limit < 1) throw DomainError("k must be >= 1");

  std::vector<std::vector<std::pair<Index, double>>> entries;
  std::vector<double> labels;
  Index max_index = 0;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    std::vector<std::string_view> tokens;
    for (std::string_view tok : split(line, ' ')) {
      // Tabs are accepted as separators as well.
      for (std::string_view t : split(tok, '\t'))
        if (!t.empty()) tokens.push_back(t);
    }
    labels.push_back(parse_label(tokens.front(), line_no));
    std::vector<std::pair<Index, double>> row;
    Index prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::size_t colon = tokens[t].find(':');
      if (colon == std::string_view::npos)
        throw ParseError("expected index:value, got '" + std::string(tokens[t]) + "'", line_no);
      const std::string_view idx_text = tokens[t].substr(0, colon);
      Index idx = 0;
      const auto res = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
      if (res.ec != std::errc() || res.ptr != idx_text.data() + idx_text.size() || idx < 1)
        throw ParseError("bad index '" + std::string(idx_text) + "'", line_no);
      if (idx <= prev) throw ParseError("indices must increase", line_no);
      if (limit && idx > *limit)
        throw ParseError("index " + std::to_string(idx) + " exceeds k = " + std::to_string(*limit),
                         line_no);
      double v = 0.0;
      if (!parse_double(tokens[t].substr(colon + 1), v) || !std::isfinite(v))
        throw ParseError("bad value in '" + std::string(tokens[t]) + "'", line_no);
      prev = idx;
      max_index = std::max(max_index, idx);
      row.emplace_back(idx - 1, v);
    }
    entries.push_back(std::move(row));
  });
  if (entries.empty()) throw ParseError("no samples", 0);
  const Index dim = limit ? *limit : max_index;
  if (dim < 1) throw ParseError("cannot infer k from a file without entries", 0);

  Mat x = Mat::Zero(static_cast<Index>(entries.size()), dim);
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (const auto& [j, v] : entries[i]) x(static_cast<Index>(i), j) = v;
  Vec y = Eigen::Map<const Vec>(labels.data(), static_cast<Index>(labels.size()));
  const FeatureKind fk = kind ? *kind : infer_feature_kind(x);
  return Dataset(std::move(x), std::move(y), fk);
}

Dataset load_sparse(const std::string& path, std::optional<Index> k, std::optional<FeatureKind> kind) {
  return parse_sparse(read_file(path), k, kind);
}

std::string sparse_text(const Dataset& data) {
  std::ostringstream out;
  out << "# k=" << data.k() << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    out << label_text(data.y(i));
    for (Index j = 0; j < data.k(); ++j) {
      const double v = data.features()(i, j);
      if (v != 0.0) out << ' ' << j + 1 << ':' << format_double(v);
    }
    out << '\n';
  }
  return out.str();
}

void save_sparse(const std::string& path, const Dataset& data) {
  write_file_atomic(path, sparse_text(data));
}

bool looks_sparse(std::string_view text) {
  // Dense CSV never contains ':'; a sparse file may start with label-only rows.
  return text.find(':') != std::string_view::npos || trim(text).substr(0, 4) == "# k=";
}

Dataset parse_dataset(std::string_view text, std::optional<Index> k) {
  if (looks_sparse(text)) return parse_sparse(text, k);
  return parse_dense_csv(text);
}

Dataset load_dataset(const std::string& path, std::optional<Index> k) {
  return parse_dataset(read_file(path), k);
}

Dataset Scaling::apply(const Dataset& data) const {
  if (data.k() != min.size()) throw ShapeError("scaling fitted on a different feature count");
  Mat x = data.features();
  for (Index j = 0; j < x.cols(); ++j) {
    if (range(j) > 0.0)
      x.col(j) = ((x.col(j).array() - min(j)) / range(j)).cwiseMax(0.0).cwiseMin(1.0);
    else
      x.col(j).setZero();
  }
  return Dataset(std::move(x), data.labels(), FeatureKind::continuous_unit_interval);
}

Scaling fit_unit_interval(const Dataset& data) {
  const Vec lo = data.features().colwise().minCoeff().transpose();
  const Vec hi = data.features().colwise().maxCoeff().transpose();
  return {lo, hi - lo};
}

Normalized normalize_unit_interval(const Dataset& data) {
  Scaling s = fit_unit_interval(data);
  Dataset scaled = s.apply(data);
  return {std::move(scaled), std::move(s)};
}

Dataset synth_2d(Index n_per_class, double separation, std::uint64_t seed) {
  if (n_per_class < 1) throw DomainError("n_per_class must be >= 1");
  if (!std::isfinite(separation)) throw DomainError("separation must be finite");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 0.08);
  Mat x(2 * n_per_class, 2);
  Vec y(2 * n_per_class);
  for (Index i = 0; i < 2 * n_per_class; ++i) {
    const bool malicious = i >= n_per_class;
    const double c = malicious ? 0.3 + separation : 0.3;
    y(i) = malicious ? 1.0 : -1.0;
    for (Index j = 0; j < 2; ++j) x(i, j) = std::clamp(c + z(rng), 0.0, 1.0);
  }
  return Dataset(std::move(x), std::move(y), FeatureKind::continuous_unit_interval);
}

Split split_dataset(const Dataset& data, const SplitSpec& spec) {
  if (spec.train_n < 1) throw DomainError("train_n must be >= 1");
  if (spec.val_n < 0 || spec.test_n < 0) throw DomainError("split sizes must be >= 0");
  if (spec.train_n + spec.val_n + spec.test_n > data.n())
    throw DomainError("split sizes exceed the dataset size " + std::to_string(data.n()));
  std::vector<Index> order(static_cast<std::size_t>(data.n()));
  std::iota(order.begin(), order.end(), Index{0});
  if (!spec.chronological) {
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  auto take = [&](Index from, Index count) {
    return std::vector<Index>(order.begin() + from, order.begin() + from + count);
  };
  Split out{data.subset(take(0, spec.train_n)), std::nullopt, std::nullopt};
  if (spec.val_n > 0) out.val = data.subset(take(spec.train_n, spec.val_n));
  if (spec.test_n > 0) out.test = data.subset(take(spec.train_n + spec.val_n, spec.test_n));
  return out;
}

}  // namespace rpg
