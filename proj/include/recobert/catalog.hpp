#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace recobert {

struct CatalogItem {
  std::string id;
  std::string title;
  std::string description;

  bool operator==(const CatalogItem&) const = default;
};

/// Immutable, validated, ordered set of items. Construction NFKC-normalizes
/// and trims text, then rejects duplicate ids and empty fields.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<CatalogItem> items);

  const std::vector<CatalogItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const CatalogItem& operator[](std::size_t i) const { return items_[i]; }

  std::optional<std::size_t> find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id).has_value(); }
  /// Throws UnknownId.
  const CatalogItem& get(std::string_view id) const;

  /// Subset in this catalog's order, keeping only the given ids.
  Catalog subset(const std::set<std::string>& ids) const;

 private:
  std::vector<CatalogItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class CatalogFormat { jsonl, csv };

/// jsonl: one {"id","title","description"} object per line. csv: header row
/// with id,title,description columns.
Catalog load_catalog(const std::filesystem::path& path, CatalogFormat format);
void save_catalog_jsonl(const Catalog& catalog, const std::filesystem::path& path);

/// Column names for the wine review CSV. An empty `id` or `year` alias, or
/// one missing from the header, selects the fallback (row index; year parsed
/// from the `source_title` column).
struct WineCsvColumns {
  std::string id = "id";
  std::string winery = "winery";
  std::string year = "";
  std::string source_title = "title";
  std::string name = "designation";
  std::string variety = "variety";
  std::string description = "description";
};

struct WineImport {
  Catalog catalog;
  std::size_t rows = 0;
  std::size_t dropped_empty_description = 0;
  std::size_t unreadable_rows = 0;
};

WineImport import_wine_csv(const std::filesystem::path& path, const WineCsvColumns& columns = {});
WineImport import_wine_csv_text(std::string_view csv, const WineCsvColumns& columns = {});

/// Title composed from winery, year, name, variety; empty parts skipped.
std::string compose_wine_title(std::string_view winery, std::string_view year, std::string_view name,
                               std::string_view variety);

/// First standalone 4-digit year in [1900, 2099], or empty.
std::string extract_year(std::string_view title);

struct AnnotationSet {
  std::map<std::string, std::set<std::string>> entries;
  std::vector<std::string> warnings;

  std::size_t pair_count() const;
  /// All seeds and positives.
  std::set<std::string> item_ids() const;
};

AnnotationSet load_annotations(const std::filesystem::path& path, const Catalog& catalog);
AnnotationSet parse_annotations(std::string_view jsonl, const Catalog& catalog);
void save_annotations_jsonl(const AnnotationSet& annotations, const std::filesystem::path& path);

/// Deterministic item-level split: returns (train, validation).
std::pair<Catalog, Catalog> split_train_val(const Catalog& catalog, double val_fraction, std::uint64_t seed);

/// RFC 4180 parsing; a row with an unterminated quote is returned as a single
/// field so the caller sees a column-count mismatch.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace recobert
