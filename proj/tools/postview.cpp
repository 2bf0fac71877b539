// postview: command-line front end over a loaded catalog.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "postview/bench/runner.hpp"
#include "postview/postview.hpp"

namespace fs = std::filesystem;
using namespace postview;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AskFlags {
    std::string catalog;
    std::string index;
    bool provenance = false;
    bool trace = false;
    std::string translator = "template";
    std::string translator_url;
    double translator_timeout_s = 30.0;
    double route_threshold = kDefaultRouteThreshold;
    double close_enough_threshold = 0.8;
    int repair_distance = 2;
    std::size_t rbe_k = 4;
    double rbe_k1 = 1.2;
    double rbe_b = 0.75;
    std::size_t context_budget = kDefaultContextBudget;
};

void add_pipeline_flags(CLI::App* cmd, AskFlags& f) {
    cmd->add_option("--translator", f.translator, "template or remote")->check(CLI::IsMember({"template", "remote"}));
    cmd->add_option("--translator-url", f.translator_url, "remote translator endpoint");
    cmd->add_option("--translator-timeout-s", f.translator_timeout_s, "remote translator timeout in seconds");
    cmd->add_option("--route-threshold", f.route_threshold, "minimum view match confidence");
    cmd->add_option("--close-enough-threshold", f.close_enough_threshold, "CLOSE_ENOUGH similarity threshold");
    cmd->add_option("--repair-distance", f.repair_distance, "maximum edit distance for identifier repair");
    cmd->add_option("--rbe-k", f.rbe_k, "documents retrieved");
    cmd->add_option("--rbe-k1", f.rbe_k1, "BM25 k1");
    cmd->add_option("--rbe-b", f.rbe_b, "BM25 b");
    cmd->add_option("--context-budget", f.context_budget, "character budget for answers");
    cmd->add_flag("--trace", f.trace, "log route decisions as JSON lines on stderr");
}

PipelineConfig pipeline_config(const AskFlags& f) {
    PipelineConfig c;
    c.route_threshold = f.route_threshold;
    c.translator = f.translator == "remote" ? Translation::Translator::Remote : Translation::Translator::Template;
    c.remote.url = f.translator_url;
    c.remote.timeout_s = f.translator_timeout_s;
    c.relax.similarity_threshold = f.close_enough_threshold;
    c.relax.max_repair_distance = f.repair_distance;
    c.rbe = {f.rbe_k, f.rbe_k1, f.rbe_b};
    c.context_budget_chars = f.context_budget;
    c.provenance = f.provenance;
    if (c.translator == Translation::Translator::Remote && c.remote.url.empty())
        throw UsageError("--translator remote needs --translator-url");
    return c;
}

Session open_session(const std::string& manifest, const std::string& index_path) {
    if (manifest.empty()) throw UsageError("no catalog loaded; pass --catalog <manifest.json>");
    Session s = load_session(manifest);
    if (!index_path.empty()) s.index = Index::load(index_path);
    return s;
}

void trace_route(const Answer& a) {
    json j = to_json(a.route);
    j["question"] = a.question;
    std::cerr << j.dump() << "\n";
}

std::string table_text(const AnnotatedTable& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "\t" : "") + t.columns[c].name;
    out += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.values.size(); ++c) out += (c ? "\t" : "") + r.values[c].to_string();
        out += "\n";
    }
    return out;
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CatalogError("cannot write " + path.string());
    out << data;
}

/// CSV + sidecar + manifest + documents for every view of a generated timeline.
void export_catalog(const bench::TimelineData& data, const fs::path& dir) {
    fs::create_directories(dir);
    json manifest = {{"views", json::array()}, {"documents", "documents.jsonl"}};
    auto dump_view = [&](const View& v) {
        std::string csv;
        const auto& cols = v.table.schema.columns;
        for (std::size_t c = 0; c < cols.size(); ++c) csv += (c ? "," : "") + csv_cell(cols[c].name);
        csv += "\n";
        for (const auto& row : v.table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                std::string cell = row[c].is_null() ? "" : row[c].to_string();
                if (row[c].type() == ValueType::Float) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.2f", row[c].as_float());
                    cell = buf;
                }
                csv += (c ? "," : "") + csv_cell(cell);
            }
            csv += "\n";
        }
        write_file(dir / (v.name + ".csv"), csv);
        json schema = {{"columns", json::array()}, {"key", v.table.schema.key}, {"description", v.description}};
        for (const auto& c : cols) schema["columns"].push_back({{"name", c.name}, {"type", type_name(c.type)}});
        write_file(dir / (v.name + ".schema.json"), schema.dump(2) + "\n");
        manifest["views"].push_back({{"name", v.name}, {"csv", v.name + ".csv"}, {"schema", v.name + ".schema.json"}});
    };
    for (const View* v : data.views.views()) dump_view(*v);
    for (const View* v : data.flat.views()) dump_view(*v);
    std::string docs;
    for (const auto& d : data.documents) docs += json{{"doc_id", d.doc_id}, {"text", d.text}}.dump() + "\n";
    write_file(dir / "documents.jsonl", docs);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_load(const std::string& manifest, const std::string& save_index, bool as_json) {
    Session s = open_session(manifest, "");
    if (!save_index.empty()) s.index.save(save_index);
    json views = json::array();
    for (const View* v : s.catalog.views())
        views.push_back({{"name", v->name}, {"rows", v->table.rows.size()}, {"description", v->description}});
    if (as_json) {
        std::cout << json{{"views", views}, {"documents", s.index.size()}}.dump(2) << "\n";
    } else {
        for (const auto& v : views)
            std::cout << v["name"].get<std::string>() << "\t" << v["rows"].get<std::size_t>() << " rows\t"
                      << v["description"].get<std::string>() << "\n";
        std::cout << s.index.size() << " documents indexed\n";
    }
    return kOk;
}

enum class AskMode { Ask, Explain, Provenance };

void print_answer(const Answer& a, const Session& s, AskMode mode, bool as_json) {
    if (as_json) {
        std::cout << to_json(a).dump(2) << "\n";
        return;
    }
    if (mode == AskMode::Explain || (mode == AskMode::Ask && a.provenance)) {
        std::cout << explain(a, s.catalog, &s.index);
    } else if (mode == AskMode::Provenance) {
        if (!a.provenance) {
            std::cout << "No provenance: answered by retrieval (" << a.route.reason << ")\n";
            return;
        }
        for (const auto& q : a.provenance->queries) std::cout << q.label << ": " << sql::print(q.query) << "\n";
        std::cout << prov_listing(a.provenance->tuples) << "\n";
        std::cout << "reconciliation: " << a.provenance->reconciliation.verdict() << "\n";
    } else {
        std::cout << a.text << "\n";
    }
}

int cmd_ask(const std::string& question, AskFlags flags, AskMode mode, bool as_json) {
    if (mode != AskMode::Ask) flags.provenance = true;
    const PipelineConfig config = pipeline_config(flags);
    Session s = open_session(flags.catalog, flags.index);
    const Answer a = ask(question, s.catalog, s.index, config);
    if (flags.trace) trace_route(a);
    print_answer(a, s, mode, as_json);
    return kOk;
}

int cmd_sql(const std::string& text, const std::string& manifest, bool do_relax, bool provenance,
            double threshold, bool as_json) {
    Session s = open_session(manifest, "");
    sql::QueryAst q = clean(sql::parse(text), s.catalog).ast;
    if (do_relax) q = relax(q, s.catalog, RelaxConfig{threshold, 2}).ast;
    const EvalOptions opts{threshold};
    const AnnotatedTable t = eval(q, s.catalog, opts);
    std::optional<ProvenanceBundle> bundle;
    if (provenance) bundle = pipeline_detail::provenance_for(q, t, s.catalog, opts);
    if (as_json) {
        json j = {{"sql", sql::print(q)}, {"result", to_json(t)}};
        j["provenance"] = bundle ? to_json(*bundle) : json(nullptr);
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    if (do_relax) std::cout << "-- " << sql::print(q) << "\n";
    std::cout << table_text(t);
    for (const auto& w : t.warnings) std::cerr << "warning: " << w << "\n";
    if (bundle) {
        for (const auto& pq : bundle->queries) std::cout << pq.label << ": " << sql::print(pq.query) << "\n";
        std::cout << prov_listing(bundle->tuples) << "\n";
    }
    return kOk;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

int cmd_bench(const std::string& sizes, const std::string& seeds, double scale, const std::string& engines,
              const std::string& out_path, const std::string& qa_out, bool as_json) {
    bench::BenchConfig base;
    base.scale = scale;
    base.sizes.clear();
    for (const auto& s : split_list(sizes)) {
        auto sc = bench::parse_size_class(s);
        if (!sc) throw UsageError("unknown size class '" + s + "'");
        base.sizes.push_back(*sc);
    }
    base.engines.clear();
    for (const auto& e : split_list(engines)) {
        auto ek = bench::parse_engine(e);
        if (!ek) throw UsageError("unknown engine '" + e + "'");
        base.engines.push_back(*ek);
    }
    std::vector<std::uint64_t> seed_list;
    for (const auto& s : split_list(seeds)) {
        try {
            seed_list.push_back(std::stoull(s));
        } catch (const std::exception&) {
            throw UsageError("bad seed '" + s + "'");
        }
    }
    if (base.sizes.empty() || base.engines.empty() || seed_list.empty()) throw UsageError("empty bench grid");

    std::string tsv;
    json reports = json::array();
    std::ofstream qa;
    if (!qa_out.empty()) {
        qa.open(qa_out);
        if (!qa) throw CatalogError("cannot write " + qa_out);
    }
    for (std::uint64_t seed : seed_list) {
        bench::BenchConfig config = base;
        config.seed = seed;
        const bench::Report r = bench::run_benchmark(config);
        std::string part = bench::report_tsv(r);
        if (!tsv.empty()) part = part.substr(part.find('\n') + 1);
        else tsv = "seed\t";
        // prefix each data line with the seed
        std::stringstream lines(part);
        std::string line;
        bool header = tsv == "seed\t";
        while (std::getline(lines, line)) {
            tsv += header ? line + "\n" : std::to_string(seed) + "\t" + line + "\n";
            header = false;
        }
        if (qa) {
            std::set<std::string> seen;
            for (const auto& res : r.results) {
                const std::string key = std::string(bench::to_string(res.size)) + res.item.question;
                if (!seen.insert(key).second) continue;
                json j = bench::to_json(res.item);
                j["size"] = bench::to_string(res.size);
                j["seed"] = seed;
                qa << j.dump() << "\n";
            }
        }
        if (as_json) {
            json cells = json::array();
            for (const auto& [k, c] : r.cells)
                cells.push_back({{"size", bench::to_string(k.first)}, {"engine", bench::to_string(k.second)},
                                 {"mean_grade", c.mean}, {"questions", c.questions}, {"failures", c.failures},
                                 {"runtime_ms", c.runtime_ms}});
            reports.push_back({{"seed", seed}, {"scale", scale}, {"cells", cells}});
        } else {
            std::cout << bench::report_table(r) << "\n";
        }
    }
    if (!out_path.empty()) write_file(out_path, tsv);
    if (as_json) std::cout << json{{"reports", reports}}.dump(2) << "\n";
    return kOk;
}

int cmd_gen(const std::string& size, std::uint64_t seed, double scale, const std::string& out,
            const std::string& catalog_dir, const std::string& qa_out, bool as_json) {
    auto sc = bench::parse_size_class(size);
    if (!sc) throw UsageError("unknown size class '" + size + "'");
    const bench::Timeline t = bench::generate_timeline(*sc, seed, scale);
    const std::string data = bench::serialize(t);
    if (out.empty() && catalog_dir.empty() && qa_out.empty()) std::cout << data;
    if (!out.empty()) write_file(out, data);
    if (!catalog_dir.empty()) export_catalog(bench::build_views(t), catalog_dir);
    if (!qa_out.empty()) {
        std::string lines;
        for (const auto& q : bench::generate_qa(t, seed)) lines += bench::to_json(q).dump() + "\n";
        write_file(qa_out, lines);
    }
    if (as_json && !(out.empty() && catalog_dir.empty() && qa_out.empty()))
        std::cout << json{{"episodes", t.episodes.size()}, {"bytes", data.size()}}.dump() << "\n";
    else if (!out.empty() || !catalog_dir.empty() || !qa_out.empty())
        std::cerr << t.episodes.size() << " episodes, " << data.size() << " bytes\n";
    return kOk;
}

int cmd_repl(AskFlags flags, bool as_json) {
    std::optional<Session> session;
    if (!flags.catalog.empty()) session = open_session(flags.catalog, flags.index);
    const PipelineConfig config = pipeline_config(flags);
    std::string line;
    const bool tty = isatty(fileno(stdin));
    auto prompt = [&] {
        if (tty) std::cout << "postview> " << std::flush;
    };
    prompt();
    while (std::getline(std::cin, line)) {
        const auto sp = line.find(' ');
        const std::string cmd = line.substr(0, sp);
        const std::string arg = sp == std::string::npos ? "" : line.substr(sp + 1);
        try {
            if (cmd.empty()) {
            } else if (cmd == "quit" || cmd == "exit") {
                break;
            } else if (cmd == "help") {
                std::cout << "load <manifest> | ask <question> | explain <question> | provenance <question> | "
                             "sql <query> | views | quit\n";
            } else if (cmd == "load") {
                session = open_session(arg, "");
                std::cout << "loaded " << session->catalog.views().size() << " views\n";
            } else if (!session) {
                std::cerr << "no catalog loaded; use: load <manifest>\n";
            } else if (cmd == "views") {
                for (const View* v : session->catalog.views()) std::cout << v->name << "\t" << v->description << "\n";
            } else if (cmd == "ask" || cmd == "explain" || cmd == "provenance") {
                PipelineConfig c = config;
                const AskMode mode = cmd == "ask" ? AskMode::Ask : cmd == "explain" ? AskMode::Explain : AskMode::Provenance;
                if (mode != AskMode::Ask) c.provenance = true;
                const Answer a = ask(arg, session->catalog, session->index, c);
                if (flags.trace) trace_route(a);
                print_answer(a, *session, mode, as_json);
            } else if (cmd == "sql") {
                const AnnotatedTable t = eval(clean(sql::parse(arg), session->catalog).ast, session->catalog);
                std::cout << (as_json ? to_json(t).dump(2) + "\n" : table_text(t));
            } else {
                std::cerr << "unknown command '" << cmd << "'; try help\n";
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
        }
        prompt();
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"postview: question answering over views with provenance"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "JSON output")->configurable(false);

    std::string load_manifest_path, save_index;
    auto* load = app.add_subcommand("load", "load a catalog manifest and summarize it");
    load->add_option("manifest", load_manifest_path, "catalog manifest")->required();
    load->add_option("--save-index", save_index, "write the retrieval index to a JSON file");

    AskFlags ask_flags;
    std::string question;
    auto* ask_cmd = app.add_subcommand("ask", "answer a question");
    auto* explain_cmd = app.add_subcommand("explain", "answer a question and narrate how");
    auto* prov_cmd = app.add_subcommand("provenance", "provenance queries and tuples for a question's answer");
    for (auto* c : {ask_cmd, explain_cmd, prov_cmd}) {
        c->add_option("question", question, "natural-language question")->required();
        c->add_option("--catalog", ask_flags.catalog, "catalog manifest")->required();
        c->add_option("--index", ask_flags.index, "saved retrieval index");
        add_pipeline_flags(c, ask_flags);
        c->add_flag("--json", as_json, "JSON output");
    }
    ask_cmd->add_flag("--provenance", ask_flags.provenance, "compute provenance and print the transcript");

    std::string sql_text, sql_catalog;
    bool sql_relax = false, sql_prov = false;
    double sql_threshold = 0.8;
    auto* sql_cmd = app.add_subcommand("sql", "run a query against the catalog");
    sql_cmd->add_option("query", sql_text, "SQL query")->required();
    sql_cmd->add_option("--catalog", sql_catalog, "catalog manifest")->required();
    sql_cmd->add_flag("--relax", sql_relax, "relax text predicates first");
    sql_cmd->add_flag("--provenance", sql_prov, "also generate and run provenance queries");
    sql_cmd->add_option("--close-enough-threshold", sql_threshold, "CLOSE_ENOUGH similarity threshold");
    sql_cmd->add_flag("--json", as_json, "JSON output");

    std::string sizes = "S,M,L", seeds = "7", engines = "vbe,rbe,sqlbase,noviews", bench_out, bench_qa;
    double bench_scale = 0.1;
    auto* bench_cmd = app.add_subcommand("bench", "run the benchmark grid");
    bench_cmd->add_option("--sizes", sizes, "comma-separated size classes");
    bench_cmd->add_option("--seed", seeds, "seed, or comma-separated seeds");
    bench_cmd->add_option("--scale", bench_scale, "size scale factor");
    bench_cmd->add_option("--engines", engines, "comma-separated engines: vbe,rbe,sqlbase,noviews");
    bench_cmd->add_option("--out", bench_out, "TSV report path");
    bench_cmd->add_option("--qa-out", bench_qa, "write the QA sets as JSON lines");
    bench_cmd->add_flag("--json", as_json, "JSON output");

    std::string gen_size = "S", gen_out, gen_catalog, gen_qa;
    std::uint64_t gen_seed = 7;
    double gen_scale = 1.0;
    auto* gen_cmd = app.add_subcommand("gen-timeline", "generate a synthetic timeline");
    gen_cmd->add_option("--size", gen_size, "S, M or L");
    gen_cmd->add_option("--seed", gen_seed, "seed");
    gen_cmd->add_option("--scale", gen_scale, "size scale factor");
    gen_cmd->add_option("--out", gen_out, "timeline JSON lines path (stdout if nothing else is written)");
    gen_cmd->add_option("--catalog-dir", gen_catalog, "also export views as a loadable catalog");
    gen_cmd->add_option("--qa-out", gen_qa, "also write the QA set as JSON lines");
    gen_cmd->add_flag("--json", as_json, "JSON output");

    AskFlags repl_flags;
    auto* repl_cmd = app.add_subcommand("repl", "interactive session");
    repl_cmd->add_option("--catalog", repl_flags.catalog, "catalog manifest");
    repl_cmd->add_option("--index", repl_flags.index, "saved retrieval index");
    add_pipeline_flags(repl_cmd, repl_flags);
    repl_cmd->add_flag("--json", as_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*load) return cmd_load(load_manifest_path, save_index, as_json);
        if (*ask_cmd) return cmd_ask(question, ask_flags, AskMode::Ask, as_json);
        if (*explain_cmd) return cmd_ask(question, ask_flags, AskMode::Explain, as_json);
        if (*prov_cmd) return cmd_ask(question, ask_flags, AskMode::Provenance, as_json);
        if (*sql_cmd) return cmd_sql(sql_text, sql_catalog, sql_relax, sql_prov, sql_threshold, as_json);
        if (*bench_cmd) return cmd_bench(sizes, seeds, bench_scale, engines, bench_out, bench_qa, as_json);
        if (*gen_cmd) return cmd_gen(gen_size, gen_seed, gen_scale, gen_out, gen_catalog, gen_qa, as_json);
        if (*repl_cmd) return cmd_repl(repl_flags, as_json);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const sql::SqlError& e) {
        std::cerr << "sql error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kUsage;
}
