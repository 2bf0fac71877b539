#pragma once

#include "postview/catalog.hpp"
#include "postview/engine.hpp"
#include "postview/json_io.hpp"
#include "postview/nl2sql.hpp"
#include "postview/pipeline.hpp"
#include "postview/provgen.hpp"
#include "postview/rbe.hpp"
#include "postview/rewriter.hpp"
#include "postview/router.hpp"
#include "postview/sql_parser.hpp"
#include "postview/sql_printer.hpp"
#include "postview/verbalize.hpp"

namespace postview {

/// A loaded catalog with its retrieval index.
struct Session {
    Catalog catalog;
    Index index;
};

/// Loads the manifest's views and documents. Without a documents file the
/// index is built from the view rows.
inline Session load_session(const std::filesystem::path& manifest_path) {
    Manifest m = load_manifest(manifest_path);
    std::vector<Document> docs =
        m.documents ? load_documents(*m.documents) : documents_from_catalog(m.catalog);
    return {std::move(m.catalog), build_index(std::move(docs))};
}

}  // namespace postview
