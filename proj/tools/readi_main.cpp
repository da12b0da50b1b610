// readi: reasoning-path grounding and editing over knowledge graphs and
// tables. Subcommands: kgqa, tableqa, instantiate, bind, report.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "readi/edit_loop.hpp"
#include "readi/eval.hpp"
#include "readi/gateway.hpp"
#include "readi/kg_store.hpp"
#include "readi/path_model.hpp"
#include "readi/relation_index.hpp"
#include "readi/table_env.hpp"
#include "readi/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

struct GraphOptions {
    std::string triples_path;
    std::string names_path;
    std::string compound_path;
};

struct InstantiatorOptions {
    std::size_t bind_k = 5;
    std::size_t queue_threshold = 1000;
    std::size_t candidate_k = 35;
    std::size_t sample_k = 3;
};

void add_graph_options(CLI::App* cmd, GraphOptions& opts, bool names_required) {
    cmd->add_option("--graph", opts.triples_path, "triples.tsv path")->required();
    auto* names = cmd->add_option("--names", opts.names_path, "names.tsv path");
    if (names_required) {
        names->required();
    }
    cmd->add_option("--compound", opts.compound_path,
                    "compound.txt path (default: unnamed ids are compound)");
}

void add_instantiator_options(CLI::App* cmd, InstantiatorOptions& opts) {
    cmd->add_option("--bind-k", opts.bind_k, "candidate relations per NL relation")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
    cmd->add_option("--queue-threshold", opts.queue_threshold, "BFS frontier cap")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
    cmd->add_option("--candidate-k", opts.candidate_k, "feedback candidate relations")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
    cmd->add_option("--sample-k", opts.sample_k, "feedback instances per relation")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));
}

readi::InstantiatorConfig to_config(const InstantiatorOptions& opts) {
    return readi::InstantiatorConfig{opts.bind_k, opts.queue_threshold, opts.candidate_k,
                                     opts.sample_k};
}

// Names-file rows keyed by a relation id act as lexical aliases for that
// relation, enriching its index document.
std::map<std::string, std::string> relation_aliases(const readi::KnowledgeGraph& graph) {
    std::map<std::string, std::string> aliases;
    std::set<std::string> vocabulary = graph.relation_vocabulary();
    for (const auto& [id, name] : graph.names()) {
        if (vocabulary.count(id)) {
            aliases[id] = name;
        }
    }
    return aliases;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << contents;
}

int run_kgqa(const GraphOptions& graph_opts, const InstantiatorOptions& inst_opts,
             const std::string& dataset_path, const std::string& backend_spec,
             std::size_t max_edit, double temperature, const std::string& out_dir,
             std::size_t gen_shots, std::size_t edit_shots, std::size_t reason_shots,
             std::size_t parallel, const std::string& csv_path) {
    readi::KnowledgeGraph graph = readi::load_graph(
        graph_opts.triples_path, graph_opts.names_path, graph_opts.compound_path);
    readi::RelationIndex index =
        readi::RelationIndex::build(graph.relation_vocabulary(), relation_aliases(graph));
    std::vector<readi::GoldRecord> dataset = readi::load_dataset(dataset_path);
    std::unique_ptr<readi::LlmBackend> backend = readi::make_backend(backend_spec);

    readi::SessionConfig config;
    config.max_edit_time = max_edit;
    config.instantiator = to_config(inst_opts);
    config.temperature = temperature;
    config.generate_role.shot_count = gen_shots;
    config.edit_role.shot_count = edit_shots;
    config.reason_role.shot_count = reason_shots;

    if (parallel > 1 && dynamic_cast<readi::Transcript*>(backend.get()) != nullptr) {
        std::cerr << "note: scripted backend replays in order; running sequentially\n";
        parallel = 1;
    }

    std::vector<readi::SessionTrace> traces(dataset.size());
    if (parallel <= 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const readi::GoldRecord& record = dataset[i];
            traces[i] = readi::run_session(record.question, record.topic_entities, graph,
                                           index, *backend, config, record.id);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < parallel; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= dataset.size()) {
                        break;
                    }
                    const readi::GoldRecord& record = dataset[i];
                    traces[i] = readi::run_session(record.question, record.topic_entities,
                                                   graph, index, *backend, config,
                                                   record.id);
                }
            });
        }
        for (std::thread& worker : workers) {
            worker.join();
        }
    }

    fs::create_directories(out_dir);
    readi::write_trace_jsonl((fs::path(out_dir) / "traces.jsonl").string(), traces);
    readi::MetricsReport report = readi::build_report(traces, dataset, graph);
    write_file((fs::path(out_dir) / "report.json").string(),
               readi::report_to_json(report) + "\n");
    if (!csv_path.empty()) {
        write_file(csv_path, readi::per_question_csv(traces, dataset, graph));
    }
    std::cout << readi::report_to_json(report) << "\n";
    return 0;
}

int run_tableqa(const std::string& tables_dir, const std::string& dataset_path,
                const std::string& backend_spec, std::size_t max_edit, double temperature,
                const std::string& out_dir, std::size_t gen_shots, std::size_t edit_shots,
                std::size_t reason_shots, std::optional<std::uint64_t> seed) {
    std::vector<readi::GoldRecord> dataset = readi::load_dataset(dataset_path);
    std::unique_ptr<readi::LlmBackend> backend = readi::make_backend(backend_spec);

    readi::SessionConfig config = readi::default_table_session_config();
    config.max_edit_time = max_edit;
    config.temperature = temperature;
    config.generate_role.shot_count = gen_shots;
    config.edit_role.shot_count = edit_shots;
    config.reason_role.shot_count = reason_shots;
    config.seed = seed;

    std::map<std::string, readi::Table> tables;
    std::vector<readi::TableSessionTrace> traces;
    traces.reserve(dataset.size());
    for (const readi::GoldRecord& record : dataset) {
        auto it = tables.find(record.table_id);
        if (it == tables.end()) {
            std::string path = (fs::path(tables_dir) / (record.table_id + ".json")).string();
            it = tables.emplace(record.table_id, readi::load_table(path)).first;
        }
        traces.push_back(
            readi::run_table_session(record.question, it->second, *backend, config, record.id));
    }

    fs::create_directories(out_dir);
    readi::write_table_trace_jsonl((fs::path(out_dir) / "traces.jsonl").string(), traces);
    readi::MetricsReport report = readi::build_table_report(traces, dataset);
    write_file((fs::path(out_dir) / "report.json").string(),
               readi::report_to_json(report) + "\n");
    std::cout << readi::report_to_json(report) << "\n";
    return 0;
}

int run_instantiate(const GraphOptions& graph_opts, const InstantiatorOptions& inst_opts,
                    const std::string& path_json) {
    readi::KnowledgeGraph graph = readi::load_graph(
        graph_opts.triples_path, graph_opts.names_path, graph_opts.compound_path);
    readi::RelationIndex index =
        readi::RelationIndex::build(graph.relation_vocabulary(), relation_aliases(graph));

    std::ifstream in(path_json, std::ios::binary);
    if (!in) {
        throw readi::LoadError("cannot open path file: " + path_json);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    readi::ReasoningPath path = readi::path_from_json(buf.str());

    auto outcomes = readi::instantiate_path(path, graph, index, to_config(inst_opts));
    std::cout << readi::outcomes_to_json(outcomes, graph) << "\n";
    return 0;
}

int run_bind(const GraphOptions& graph_opts, const std::string& relation, std::size_t k) {
    readi::KnowledgeGraph graph = readi::load_graph(
        graph_opts.triples_path, graph_opts.names_path, graph_opts.compound_path);
    readi::RelationIndex index =
        readi::RelationIndex::build(graph.relation_vocabulary(), relation_aliases(graph));
    readi::BoundRelation bound = index.bind_relation(relation, k);
    for (std::size_t i = 0; i < bound.candidates.size(); ++i) {
        std::cout << (i + 1) << ". " << bound.candidates[i].first << "\t"
                  << bound.candidates[i].second << "\n";
    }
    if (bound.candidates.empty()) {
        std::cout << "(no candidates with a positive score)\n";
    }
    return 0;
}

int run_report(const GraphOptions& graph_opts, const std::string& traces_path,
               const std::string& dataset_path, const std::string& mode,
               const std::string& out_path, const std::string& csv_path) {
    std::vector<readi::GoldRecord> dataset = readi::load_dataset(dataset_path);
    readi::MetricsReport report;
    std::string csv;
    if (mode == "table") {
        auto traces = readi::read_table_trace_jsonl(traces_path);
        report = readi::build_table_report(traces, dataset);
    } else {
        readi::KnowledgeGraph graph = readi::load_graph(
            graph_opts.triples_path, graph_opts.names_path, graph_opts.compound_path);
        auto traces = readi::read_trace_jsonl(traces_path);
        report = readi::build_report(traces, dataset, graph);
        if (!csv_path.empty()) {
            csv = readi::per_question_csv(traces, dataset, graph);
        }
    }
    std::string rendered = readi::report_to_json(report) + "\n";
    if (!out_path.empty()) {
        write_file(out_path, rendered);
    }
    if (!csv_path.empty() && !csv.empty()) {
        write_file(csv_path, csv);
    }
    std::cout << rendered;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reasoning-path grounding and editing engine"};
    app.require_subcommand(1);

    GraphOptions graph_opts;
    InstantiatorOptions inst_opts;
    std::string dataset_path;
    std::string backend_spec;
    std::string out_dir = "runs";
    std::string tables_dir;
    std::string path_json;
    std::string relation;
    std::string traces_path;
    std::string report_mode = "kg";
    std::string report_out;
    std::string csv_path;
    std::size_t max_edit = 4;
    double temperature = 0.3;
    std::size_t k = 5;
    std::size_t parallel = 1;
    std::size_t gen_shots = 6;
    std::size_t edit_shots = 5;
    std::size_t reason_shots = 5;
    std::optional<std::uint64_t> seed;

    app.set_config("--config", "",
                   "key=value config file with one [subcommand] section; flags win");

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--max-edit", max_edit, "maximum edit calls per question");
        cmd->add_option("--temperature", temperature, "sampling temperature");
        cmd->add_option("--backend", backend_spec, "scripted:FILE or http:URL")->required();
        cmd->add_option("--dataset", dataset_path, "dataset JSONL")->required();
        cmd->add_option("--out", out_dir, "output directory for traces and report");
    };

    CLI::App* kgqa = app.add_subcommand("kgqa", "run KGQA sessions over a dataset");
    add_graph_options(kgqa, graph_opts, /*names_required=*/true);
    add_instantiator_options(kgqa, inst_opts);
    add_common(kgqa);
    kgqa->add_option("--gen-shots", gen_shots, "generation demonstrations");
    kgqa->add_option("--edit-shots", edit_shots, "editing demonstrations");
    kgqa->add_option("--reason-shots", reason_shots, "reasoning demonstrations");
    kgqa->add_option("--parallel", parallel, "worker threads (http backend only)");
    kgqa->add_option("--csv", csv_path, "per-question CSV output path");

    CLI::App* tableqa = app.add_subcommand("tableqa", "run TableQA sessions over a dataset");
    tableqa->add_option("--tables", tables_dir, "directory of <table_id>.json files")
        ->required();
    add_common(tableqa);
    std::size_t table_gen_shots = 7;
    std::size_t table_edit_shots = 2;
    std::size_t table_reason_shots = 7;
    tableqa->add_option("--gen-shots", table_gen_shots, "generation demonstrations");
    tableqa->add_option("--edit-shots", table_edit_shots, "editing demonstrations");
    tableqa->add_option("--reason-shots", table_reason_shots, "reasoning demonstrations");
    tableqa->add_option("--seed", seed, "feedback row sampling seed");

    CLI::App* instantiate = app.add_subcommand("instantiate", "ground one path.json");
    add_graph_options(instantiate, graph_opts, /*names_required=*/true);
    add_instantiator_options(instantiate, inst_opts);
    instantiate->add_option("--path", path_json, "path.json file")->required();

    CLI::App* bind = app.add_subcommand("bind", "print top-k candidates for one NL relation");
    add_graph_options(bind, graph_opts, /*names_required=*/false);
    bind->add_option("--relation", relation, "natural-language relation")->required();
    bind->add_option("--k", k, "candidate count")->check(CLI::Range(std::size_t{1}, std::size_t{1000000000}));

    CLI::App* report = app.add_subcommand("report", "recompute metrics from traces");
    add_graph_options(report, graph_opts, /*names_required=*/false);
    report->add_option("--traces", traces_path, "traces.jsonl")->required();
    report->add_option("--dataset", dataset_path, "dataset JSONL")->required();
    report->add_option("--mode", report_mode, "kg or table")
        ->check(CLI::IsMember({"kg", "table"}));
    report->add_option("--out", report_out, "write report.json here as well");
    report->add_option("--csv", csv_path, "per-question CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (kgqa->parsed()) {
            return run_kgqa(graph_opts, inst_opts, dataset_path, backend_spec, max_edit,
                            temperature, out_dir, gen_shots, edit_shots, reason_shots,
                            parallel, csv_path);
        }
        if (tableqa->parsed()) {
            return run_tableqa(tables_dir, dataset_path, backend_spec, max_edit, temperature,
                               out_dir, table_gen_shots, table_edit_shots,
                               table_reason_shots, seed);
        }
        if (instantiate->parsed()) {
            return run_instantiate(graph_opts, inst_opts, path_json);
        }
        if (bind->parsed()) {
            return run_bind(graph_opts, relation, k);
        }
        if (report->parsed()) {
            return run_report(graph_opts, traces_path, dataset_path, report_mode, report_out,
                              csv_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
