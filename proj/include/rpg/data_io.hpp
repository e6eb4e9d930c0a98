#pragma once

#include "rpg/game_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpg {

/// All values 0/1 -> binary, all in [0, 1] -> continuous_unit_interval, otherwise unbounded.
FeatureKind infer_feature_kind(const Mat& x);

/// Dense CSV: `label,f_1,...,f_k` per line with label -1 or +1. Blank lines and lines starting
/// with '#' are skipped. The feature kind is inferred unless given.
Dataset parse_dense_csv(std::string_view text, std::optional<FeatureKind> kind = std::nullopt);
Dataset load_dense_csv(const std::string& path, std::optional<FeatureKind> kind = std::nullopt);
std::string dense_csv(const Dataset& data);
void save_dense_csv(const std::string& path, const Dataset& data);

/// Sparse format: `label i:v i:v ...` with 1-based increasing indices; absent entries are 0.
/// k is the override if given, else a `# k=<k>` header line, else the largest index seen.
Dataset parse_sparse(std::string_view text, std::optional<Index> k = std::nullopt,
                     std::optional<FeatureKind> kind = std::nullopt);
Dataset load_sparse(const std::string& path, std::optional<Index> k = std::nullopt,
                    std::optional<FeatureKind> kind = std::nullopt);
/// Writes the `# k=<k>` header and the nonzero entries.
std::string sparse_text(const Dataset& data);
void save_sparse(const std::string& path, const Dataset& data);

/// Sparse when the text contains ':' or starts with the `# k=` header, dense CSV otherwise.
bool looks_sparse(std::string_view text);
Dataset parse_dataset(std::string_view text, std::optional<Index> k = std::nullopt);
Dataset load_dataset(const std::string& path, std::optional<Index> k = std::nullopt);

/// Per-feature min-max scaling: x' = (x - min) / range, range = 0 maps to 0.
struct Scaling {
  Vec min;
  Vec range;

  /// Applies the scaling and clamps into [0, 1] (test data may exceed the fitted range).
  Dataset apply(const Dataset& data) const;
};

Scaling fit_unit_interval(const Dataset& data);

struct Normalized {
  Dataset data;
  Scaling scaling;
};

Normalized normalize_unit_interval(const Dataset& data);

/// Two isotropic Gaussian blobs with standard deviation 0.08: legitimate (-1) around (0.3, 0.3)
/// and malicious (+1) around (0.3 + separation, 0.3 + separation), clamped to [0, 1]^2. The
/// first n_per_class rows are legitimate.
Dataset synth_2d(Index n_per_class, double separation, std::uint64_t seed);

struct SplitSpec {
  Index train_n = 0;
  Index val_n = 0;
  Index test_n = 0;
  std::uint64_t seed = 0;
  // Take rows in file order instead of a seeded permutation.
  bool chronological = false;
};

struct Split {
  Dataset train;
  std::optional<Dataset> val;
  std::optional<Dataset> test;
};

/// Disjoint train/validation/test subsets; parts of size 0 are left empty (train_n must be > 0).
Split split_dataset(const Dataset& data, const SplitSpec& spec);

}  // namespace rpg
