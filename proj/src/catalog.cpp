#include "recobert/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "recobert/error.hpp"
#include "recobert/io.hpp"
#include "recobert/random.hpp"
#include "recobert/text.hpp"

namespace recobert {

using json = nlohmann::ordered_json;

Catalog::Catalog(std::vector<CatalogItem> items) : items_(std::move(items)) {
  index_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& item = items_[i];
    item.id = text::trim(item.id);
    item.title = text::trim(text::nfkc(item.title));
    item.description = text::trim(text::nfkc(item.description));
    if (item.id.empty()) throw Error(ErrorKind::MissingField, "record " + std::to_string(i + 1) + ": id");
    if (item.title.empty()) throw Error(ErrorKind::EmptyText, item.id + ": title");
    if (item.description.empty()) throw Error(ErrorKind::EmptyText, item.id + ": description");
    if (!index_.emplace(item.id, i).second) throw Error(ErrorKind::DuplicateId, item.id);
  }
}

std::optional<std::size_t> Catalog::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const CatalogItem& Catalog::get(std::string_view id) const {
  auto pos = find(id);
  if (!pos) throw Error(ErrorKind::UnknownId, std::string(id));
  return items_[*pos];
}

Catalog Catalog::subset(const std::set<std::string>& ids) const {
  std::vector<CatalogItem> out;
  for (const auto& item : items_)
    if (ids.contains(item.id)) out.push_back(item);
  return Catalog(std::move(out));
}

namespace {

std::string field_or_throw(const json& record, const char* key, std::size_t record_no) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string())
    throw Error(ErrorKind::MissingField, "record " + std::to_string(record_no) + ": " + key);
  return it->get<std::string>();
}

template <typename Fn>
void for_each_jsonl(std::string_view text, Fn&& fn) {
  std::size_t record_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = text::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    ++record_no;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::MissingField, "record " + std::to_string(record_no) + ": invalid JSON");
    }
    fn(record, record_no);
  }
}

std::optional<std::size_t> column_index(const std::vector<std::string>& header, const std::string& name) {
  if (name.empty()) return std::nullopt;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (text::trim(header[i]) == name) return i;
  return std::nullopt;
}

std::size_t require_column(const std::vector<std::string>& header, const std::string& name) {
  auto idx = column_index(header, name);
  if (!idx) throw Error(ErrorKind::MissingColumn, name.empty() ? "<unnamed>" : name);
  return *idx;
}

}  // namespace

Catalog load_catalog(const std::filesystem::path& path, CatalogFormat format) {
  const std::string data = read_file(path);
  std::vector<CatalogItem> items;
  if (format == CatalogFormat::jsonl) {
    for_each_jsonl(data, [&](const json& record, std::size_t record_no) {
      items.push_back({field_or_throw(record, "id", record_no), field_or_throw(record, "title", record_no),
                       field_or_throw(record, "description", record_no)});
    });
  } else {
    auto rows = parse_csv(data);
    if (rows.empty()) throw Error(ErrorKind::MissingColumn, "header row");
    const auto& header = rows.front();
    const std::size_t id = require_column(header, "id");
    const std::size_t title = require_column(header, "title");
    const std::size_t desc = require_column(header, "description");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      const std::size_t need = std::max({id, title, desc});
      if (row.size() <= need)
        throw Error(ErrorKind::MissingField, "record " + std::to_string(r) + ": short row");
      items.push_back({row[id], row[title], row[desc]});
    }
  }
  return Catalog(std::move(items));
}

void save_catalog_jsonl(const Catalog& catalog, const std::filesystem::path& path) {
  std::string out;
  for (const auto& item : catalog.items()) {
    json record = {{"id", item.id}, {"title", item.title}, {"description", item.description}};
    out += record.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t row_start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        field_started = false;
        row_start = i + 1;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    rows.push_back({std::string(text.substr(row_start))});
  } else if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string extract_year(std::string_view title) {
  for (std::size_t i = 0; i + 4 <= title.size(); ++i) {
    const bool left_ok = i == 0 || !std::isdigit(static_cast<unsigned char>(title[i - 1]));
    const bool right_ok = i + 4 == title.size() || !std::isdigit(static_cast<unsigned char>(title[i + 4]));
    if (!left_ok || !right_ok) continue;
    if (!std::all_of(title.begin() + i, title.begin() + i + 4, [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      continue;
    const int year = std::stoi(std::string(title.substr(i, 4)));
    if (year >= 1900 && year <= 2099) return std::string(title.substr(i, 4));
  }
  return {};
}

std::string compose_wine_title(std::string_view winery, std::string_view year, std::string_view name,
                               std::string_view variety) {
  std::vector<std::string> parts;
  for (std::string_view part : {winery, year, name, variety}) {
    // collapse inner runs of whitespace so the joined title never has double spaces
    auto words = std::istringstream(text::nfkc(part));
    std::string word;
    while (words >> word) parts.push_back(word);
  }
  return text::join(parts, " ");
}

WineImport import_wine_csv_text(std::string_view csv, const WineCsvColumns& columns) {
  auto rows = parse_csv(csv);
  if (rows.empty()) throw Error(ErrorKind::MissingColumn, "header row");
  const auto& header = rows.front();

  const auto id_col = column_index(header, columns.id);
  const auto year_col = column_index(header, columns.year);
  const std::size_t winery_col = require_column(header, columns.winery);
  const std::size_t name_col = require_column(header, columns.name);
  const std::size_t variety_col = require_column(header, columns.variety);
  const std::size_t desc_col = require_column(header, columns.description);
  std::optional<std::size_t> source_title_col;
  if (!year_col) source_title_col = require_column(header, columns.source_title);

  WineImport result;
  std::vector<CatalogItem> items;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++result.rows;
    if (row.size() != header.size()) {
      ++result.unreadable_rows;
      continue;
    }
    const std::string description = text::trim(row[desc_col]);
    if (description.empty()) {
      ++result.dropped_empty_description;
      continue;
    }
    const std::string year = year_col ? text::trim(row[*year_col]) : extract_year(row[*source_title_col]);
    CatalogItem item;
    item.id = id_col ? row[*id_col] : std::to_string(r - 1);
    item.title = compose_wine_title(row[winery_col], year, row[name_col], row[variety_col]);
    item.description = description;
    if (item.title.empty()) {
      ++result.unreadable_rows;
      continue;
    }
    items.push_back(std::move(item));
  }
  result.catalog = Catalog(std::move(items));
  return result;
}

WineImport import_wine_csv(const std::filesystem::path& path, const WineCsvColumns& columns) {
  return import_wine_csv_text(read_file(path), columns);
}

std::size_t AnnotationSet::pair_count() const {
  std::size_t n = 0;
  for (const auto& [seed, positives] : entries) n += positives.size();
  return n;
}

std::set<std::string> AnnotationSet::item_ids() const {
  std::set<std::string> ids;
  for (const auto& [seed, positives] : entries) {
    ids.insert(seed);
    ids.insert(positives.begin(), positives.end());
  }
  return ids;
}

AnnotationSet parse_annotations(std::string_view jsonl, const Catalog& catalog) {
  AnnotationSet result;
  for_each_jsonl(jsonl, [&](const json& record, std::size_t record_no) {
    const std::string where = ", record " + std::to_string(record_no);
    const std::string seed = field_or_throw(record, "seed_id", record_no);
    auto it = record.find("positive_ids");
    if (it == record.end() || !it->is_array())
      throw Error(ErrorKind::MissingField, "record " + std::to_string(record_no) + ": positive_ids");
    if (!catalog.contains(seed)) throw Error(ErrorKind::UnknownId, seed + where);
    auto& positives = result.entries[seed];
    for (const auto& value : *it) {
      if (!value.is_string())
        throw Error(ErrorKind::MissingField, "record " + std::to_string(record_no) + ": positive_ids element");
      const std::string id = value.get<std::string>();
      if (!catalog.contains(id)) throw Error(ErrorKind::UnknownId, id + where);
      if (id == seed) {
        result.warnings.push_back("seed " + seed + " lists itself as positive" + where + "; removed");
        continue;
      }
      positives.insert(id);
    }
  });
  for (auto it = result.entries.begin(); it != result.entries.end();) {
    if (it->second.empty()) {
      result.warnings.push_back("seed " + it->first + " has no positives; dropped");
      it = result.entries.erase(it);
    } else {
      ++it;
    }
  }
  return result;
}

AnnotationSet load_annotations(const std::filesystem::path& path, const Catalog& catalog) {
  return parse_annotations(read_file(path), catalog);
}

void save_annotations_jsonl(const AnnotationSet& annotations, const std::filesystem::path& path) {
  std::string out;
  for (const auto& [seed, positives] : annotations.entries) {
    json record = {{"seed_id", seed}, {"positive_ids", std::vector<std::string>(positives.begin(), positives.end())}};
    out += record.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::pair<Catalog, Catalog> split_train_val(const Catalog& catalog, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw Error(ErrorKind::DegenerateSplit, "val_fraction must lie in (0,1)");
  const std::size_t c = catalog.size();
  const auto n_val = static_cast<std::size_t>(std::ceil(val_fraction * static_cast<double>(c)));
  if (c < 2 || n_val < 1 || n_val >= c)
    throw Error(ErrorKind::DegenerateSplit,
                std::to_string(c) + " items, " + std::to_string(n_val) + " for validation");

  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = c - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  std::vector<bool> is_val(c, false);
  for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;
  std::vector<CatalogItem> train, val;
  for (std::size_t i = 0; i < c; ++i) (is_val[i] ? val : train).push_back(catalog[i]);
  return {Catalog(std::move(train)), Catalog(std::move(val))};
}

}  // namespace recobert
