#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "postview/text.hpp"
#include "postview/value.hpp"

namespace postview {

class CatalogError : public Error {
public:
    using Error::Error;
};

struct Column {
    std::string name;
    ValueType type = ValueType::Text;

    friend bool operator==(const Column&, const Column&) = default;
};

using Row = std::vector<Value>;

struct Schema {
    std::vector<Column> columns;
    std::vector<std::string> key;

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (text::iequals(columns[i].name, name)) return i;
        return std::nullopt;
    }

    std::vector<std::size_t> key_indexes() const {
        std::vector<std::size_t> out;
        for (const auto& k : key) out.push_back(*index_of(k));
        return out;
    }

    void validate() const {
        if (columns.empty()) throw CatalogError("schema has no columns");
        std::set<std::string> seen;
        for (const auto& c : columns) {
            if (c.name.empty()) throw CatalogError("empty column name");
            if (!seen.insert(text::to_lower(c.name)).second)
                throw CatalogError("duplicate column name '" + c.name + "'");
        }
        if (key.empty()) throw CatalogError("schema key is empty");
        for (const auto& k : key)
            if (!index_of(k)) throw CatalogError("key column '" + k + "' missing from columns");
    }

    friend bool operator==(const Schema&, const Schema&) = default;
};

struct SourceTable {
    std::string name;
    Schema schema;
    std::vector<Row> rows;

    std::vector<Value> key_of(const Row& row) const {
        std::vector<Value> key;
        for (auto i : schema.key_indexes()) key.push_back(row[i]);
        return key;
    }

    /// Checks arity, cell types, and key uniqueness.
    void validate() const {
        schema.validate();
        std::set<std::vector<Value>> keys;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Row& row = rows[r];
            if (row.size() != schema.columns.size())
                throw CatalogError(name + ": row " + std::to_string(r + 1) + " has " +
                                   std::to_string(row.size()) + " cells, expected " +
                                   std::to_string(schema.columns.size()));
            for (std::size_t c = 0; c < row.size(); ++c)
                if (!row[c].is_null() && row[c].type() != schema.columns[c].type)
                    throw CatalogError(name + ": row " + std::to_string(r + 1) + " column '" +
                                       schema.columns[c].name + "' has type " +
                                       type_name(row[c].type()));
            auto key = key_of(row);
            for (const auto& k : key)
                if (k.is_null())
                    throw CatalogError(name + ": null key at row " + std::to_string(r + 1));
            if (!keys.insert(key).second) {
                std::string shown;
                for (const auto& k : key) shown += (shown.empty() ? "" : ",") + k.to_string();
                throw CatalogError(name + ": duplicate key " + shown);
            }
        }
    }
};

struct TupleId {
    std::string view;
    std::vector<Value> key;

    friend bool operator==(const TupleId&, const TupleId&) = default;
    friend bool operator<(const TupleId& a, const TupleId& b) {
        if (a.view != b.view) return a.view < b.view;
        return a.key < b.key;
    }

    /// daily_chat_log('e152')
    std::string to_string() const {
        std::string out = view + "(";
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (i) out += ", ";
            if (key[i].type() == ValueType::Text || key[i].type() == ValueType::Date)
                out += "'" + key[i].to_string() + "'";
            else
                out += key[i].to_string();
        }
        return out + ")";
    }
};

struct CellKey {
    std::vector<Value> row_key;
    std::string column;

    friend bool operator<(const CellKey& a, const CellKey& b) {
        if (a.row_key != b.row_key) return a.row_key < b.row_key;
        return a.column < b.column;
    }
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct View {
    std::string name;
    std::string description;
    SourceTable table;
    std::map<CellKey, std::string> cell_links;
};

/// Append-only registry of views. The only data access layer.
class Catalog {
public:
    void register_view(View view) {
        if (view.name.empty()) throw CatalogError("view name is empty");
        if (text::trim(view.description).empty())
            throw CatalogError("view '" + view.name + "' has an empty description");
        const std::string id = text::to_lower(view.name);
        if (views_.count(id)) throw CatalogError("duplicate view name '" + view.name + "'");
        view.table.name = view.name;
        view.table.validate();
        Entry entry;
        for (std::size_t r = 0; r < view.table.rows.size(); ++r)
            entry.by_key.emplace(view.table.key_of(view.table.rows[r]), r);
        for (const auto& [cell, uri] : view.cell_links) {
            if (!entry.by_key.count(cell.row_key))
                throw CatalogError("cell link references a missing row in '" + view.name + "'");
            if (!view.table.schema.index_of(cell.column))
                throw CatalogError("cell link references missing column '" + cell.column + "'");
        }
        entry.view = std::make_shared<const View>(std::move(view));
        order_.push_back(id);
        views_.emplace(id, std::move(entry));
    }

    void register_view(std::string name, std::string description, SourceTable table,
                       std::map<CellKey, std::string> cell_links = {}) {
        register_view(View{std::move(name), std::move(description), std::move(table), std::move(cell_links)});
    }

    const View* find(std::string_view name) const {
        auto it = views_.find(text::to_lower(name));
        return it == views_.end() ? nullptr : it->second.view.get();
    }

    const View& get(std::string_view name) const {
        if (auto* v = find(name)) return *v;
        throw CatalogError("unknown view '" + std::string(name) + "'");
    }

    /// Registration order.
    std::vector<const View*> views() const {
        std::vector<const View*> out;
        for (const auto& id : order_) out.push_back(views_.at(id).view.get());
        return out;
    }

    std::size_t size() const { return order_.size(); }

    std::vector<std::string> primary_key_columns(std::string_view view_name) const {
        return get(view_name).table.schema.key;
    }

    const Row& resolve(const TupleId& id) const {
        auto it = views_.find(text::to_lower(id.view));
        if (it == views_.end()) throw CatalogError("unknown view '" + id.view + "'");
        const auto& table = it->second.view->table;
        if (id.key.size() != table.schema.key.size())
            throw CatalogError("key arity mismatch for " + id.to_string() + ": expected " +
                               std::to_string(table.schema.key.size()));
        auto row = it->second.by_key.find(id.key);
        if (row == it->second.by_key.end()) throw CatalogError("dangling tuple id " + id.to_string());
        return table.rows[row->second];
    }

    TupleId tuple_id(const View& view, const Row& row) const {
        return TupleId{view.name, view.table.key_of(row)};
    }

private:
    struct Entry {
        std::shared_ptr<const View> view;
        std::map<std::vector<Value>, std::size_t> by_key;
    };
    std::map<std::string, Entry> views_;
    std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// CSV (RFC 4180) and schema sidecars

/// Parses RFC-4180 CSV. Quoted fields may contain commas, quotes ("") and
/// newlines. A record's fields carry a flag telling whether they were quoted
/// so that a quoted empty string stays Text rather than Null.
struct CsvField {
    std::string text;
    bool quoted = false;
};

inline std::vector<std::vector<CsvField>> parse_csv(std::string_view data) {
    std::vector<std::vector<CsvField>> records;
    std::vector<CsvField> record;
    CsvField field;
    std::size_t i = 0, line = 1;
    bool field_started = false;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field = {};
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };
    while (i < data.size()) {
        char c = data[i];
        if (c == '"' && !field_started) {
            field.quoted = true;
            field_started = true;
            ++i;
            while (true) {
                if (i >= data.size())
                    throw CatalogError("malformed CSV: unterminated quoted field at line " + std::to_string(line));
                if (data[i] == '"') {
                    if (i + 1 < data.size() && data[i + 1] == '"') {
                        field.text.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (data[i] == '\n') ++line;
                field.text.push_back(data[i++]);
            }
            if (i < data.size() && data[i] != ',' && data[i] != '\n' && data[i] != '\r')
                throw CatalogError("malformed CSV: characters after closing quote at line " + std::to_string(line));
            continue;
        }
        if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ++i;
            ++i;
            ++line;
        } else {
            if (c == '"') throw CatalogError("malformed CSV: stray quote at line " + std::to_string(line));
            field.text.push_back(c);
            field_started = true;
            ++i;
        }
    }
    if (field_started || !record.empty()) end_record();
    return records;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CatalogError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct SchemaSidecar {
    Schema schema;
    std::string description;
};

inline SchemaSidecar parse_sidecar(const nlohmann::json& j) {
    SchemaSidecar out;
    if (!j.is_object() || !j.contains("columns") || !j["columns"].is_array())
        throw CatalogError("schema sidecar needs a 'columns' array");
    for (const auto& c : j["columns"]) {
        const std::string name = c.at("name").get<std::string>();
        auto type = parse_type_name(c.at("type").get<std::string>());
        if (!type) throw CatalogError("unknown column type '" + c.at("type").get<std::string>() + "' for " + name);
        out.schema.columns.push_back({name, *type});
    }
    if (j.contains("key"))
        for (const auto& k : j["key"]) out.schema.key.push_back(k.get<std::string>());
    if (j.contains("description")) out.description = j["description"].get<std::string>();
    out.schema.validate();
    return out;
}

inline SourceTable table_from_csv(std::string name, std::string_view csv, const Schema& schema) {
    auto records = parse_csv(csv);
    if (records.empty()) throw CatalogError(name + ": CSV has no header row");
    const auto& header = records.front();
    std::vector<std::size_t> source_of(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        bool found = false;
        for (std::size_t h = 0; h < header.size(); ++h)
            if (text::iequals(text::trim(header[h].text), schema.columns[c].name)) {
                source_of[c] = h;
                found = true;
            }
        if (!found) throw CatalogError(name + ": column '" + schema.columns[c].name + "' missing from CSV header");
    }
    SourceTable table{std::move(name), schema, {}};
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() == 1 && rec[0].text.empty() && !rec[0].quoted) continue;  // blank line
        if (rec.size() != header.size())
            throw CatalogError("malformed CSV: row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                               " fields, header has " + std::to_string(header.size()));
        Row row;
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            const CsvField& f = rec[source_of[c]];
            const ValueType type = schema.columns[c].type;
            if (type == ValueType::Text && f.quoted) {
                row.emplace_back(f.text);
                continue;
            }
            auto v = coerce(f.text, type);
            if (!v)
                throw CatalogError(table.name + ": cannot coerce '" + f.text + "' to " + type_name(type) +
                                   " at (row " + std::to_string(r) + ", column " + schema.columns[c].name + ")");
            row.push_back(std::move(*v));
        }
        table.rows.push_back(std::move(row));
    }
    table.validate();
    return table;
}

/// Loads a CSV file against its JSON schema sidecar.
inline SourceTable load_table(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_path) {
    auto sidecar = parse_sidecar(nlohmann::json::parse(read_file(sidecar_path)));
    return table_from_csv(csv_path.stem().string(), read_file(csv_path), sidecar.schema);
}

/// Manifest layout:
/// { "views": [ {"name", "csv", "schema", "description"?, "cell_links"?} ], "documents"? }
/// Paths are relative to the manifest. `cell_links` is a JSON array of
/// {"key": [...], "column": ..., "uri": ...}.
struct Manifest {
    Catalog catalog;
    std::optional<std::filesystem::path> documents;
};

inline Manifest load_manifest(const std::filesystem::path& manifest_path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw CatalogError("invalid manifest " + manifest_path.string() + ": " + e.what());
    }
    const auto base = manifest_path.parent_path();
    Manifest out;
    try {
        for (const auto& entry : j.at("views")) {
            const std::string name = entry.at("name").get<std::string>();
            auto sidecar = parse_sidecar(nlohmann::json::parse(read_file(base / entry.at("schema").get<std::string>())));
            auto table = table_from_csv(name, read_file(base / entry.at("csv").get<std::string>()), sidecar.schema);
            std::string description =
                entry.contains("description") ? entry["description"].get<std::string>() : sidecar.description;
            std::map<CellKey, std::string> links;
            if (entry.contains("cell_links")) {
                auto lj = nlohmann::json::parse(read_file(base / entry["cell_links"].get<std::string>()));
                for (const auto& l : lj) {
                    CellKey key;
                    std::size_t k = 0;
                    for (const auto& part : l.at("key")) {
                        const auto& kc = *table.schema.index_of(table.schema.key.at(k++));
                        auto v = coerce(part.is_string() ? part.get<std::string>() : part.dump(),
                                        table.schema.columns[kc].type);
                        if (!v) throw CatalogError("bad cell link key in " + name);
                        key.row_key.push_back(*v);
                    }
                    key.column = l.at("column").get<std::string>();
                    links.emplace(std::move(key), l.at("uri").get<std::string>());
                }
            }
            out.catalog.register_view(name, std::move(description), std::move(table), std::move(links));
        }
        if (j.contains("documents")) out.documents = base / j["documents"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw CatalogError("invalid manifest " + manifest_path.string() + ": " + e.what());
    }
    return out;
}

}  // namespace postview
