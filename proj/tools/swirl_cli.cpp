// swirl: embed word pairs, project difference vectors, classify, sweep.
//
// Exit codes: 0 success, 1 usage, 2 I/O or network failure, 3 bad data,
// configuration or numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <set>

#include "swirl/swirl.hpp"

namespace fs = std::filesystem;
using namespace swirl;

namespace {

std::vector<std::string> g_command_line;

void note(const std::string& msg) { std::cerr << "swirl: " << msg << "\n"; }

RunManifest start_manifest(std::string model) {
    RunManifest m;
    m.command_line = g_command_line;
    m.model = std::move(model);
    return m;
}

// ---- embed ------------------------------------------------------------

struct EmbedOptions {
    std::string model;
    std::string vectors_path;
    std::string cache_dir;
    std::string pairs_dir;
    std::string out;
    std::string api_base = "https://api.openai.com";
    std::uint64_t seed = 42;
    std::size_t bins = 50;
    std::size_t batch_size = 1000;
};

EmbeddingStore load_local_vectors(const EmbedOptions& o, EmbeddingSource src, const std::unordered_set<std::string>& vocab) {
    if (o.vectors_path.empty()) throw ConfigError("--vectors-path is required for model " + o.model);
    const fs::path p(o.vectors_path);
    if (src == EmbeddingSource::word2vec && p.extension() == ".bin") return load_word2vec_binary(p, src, &vocab);
    return load_vectors_text(p, src, &vocab);
}

int cmd_embed(const EmbedOptions& o) {
    const EmbeddingSource src = parse_embedding_source(o.model);
    const fs::path pairs_dir(o.pairs_dir), out(o.out);
    PairDataset ant = load_stuttgart_all(pairs_dir, Relation::antonym);
    PairDataset syn = load_stuttgart_all(pairs_dir, Relation::synonym);

    std::set<std::string> vocab_sorted;
    for (const auto* d : {&ant, &syn})
        for (const auto& p : d->pairs) {
            vocab_sorted.insert(p.word1);
            vocab_sorted.insert(p.word2);
        }
    std::unordered_set<std::string> vocab(vocab_sorted.begin(), vocab_sorted.end());

    RunManifest man = start_manifest(o.model);
    EmbeddingStore store;
    if (src == EmbeddingSource::api_small || src == EmbeddingSource::api_large) {
        if (o.cache_dir.empty()) throw ConfigError("--cache-dir is required for model " + o.model);
        EmbedCache cache(o.cache_dir);
        std::optional<std::string> key;
        if (const char* k = std::getenv(kApiKeyEnv); k && *k) key = k;
        EmbedTransport transport;
        if (key) transport = make_http_transport(o.api_base, *key);
        EmbedRequest req{{vocab_sorted.begin(), vocab_sorted.end()}, o.model, o.batch_size};
        store = embed_words(req, cache, key, transport);
        man.params["cache_dir"] = o.cache_dir;
    } else {
        store = load_local_vectors(o, src, vocab);
        man.add_input(o.vectors_path);
    }
    for (Pos pos : kAllPos)
        for (Relation r : {Relation::antonym, Relation::synonym})
            for (Split s : {Split::train, Split::val, Split::test}) man.add_input(pairs_dir / stuttgart_filename(pos, r, s));

    const CoverageReport cov = coverage(store, {ant, syn});
    const PairDataset real = covered_real_pairs(ant, syn, store);
    bool has_ant = false, has_syn = false;
    for (const auto& p : real.pairs) (p.label == Label::antonym ? has_ant : has_syn) = true;
    if (!has_ant || !has_syn) throw DataError("no antonym or no synonym pair has both words covered by " + o.model);
    const auto controls = shuffled_controls(real, derive_seed(o.seed, "controls"));

    std::vector<PairDataset> all{real};
    all.insert(all.end(), controls.begin(), controls.end());
    std::vector<std::string> used;
    for (const auto& w : store.words())
        if (vocab.count(w)) used.push_back(w);

    std::map<Label, std::vector<double>> cosines;
    for (const auto& d : all)
        for (const auto& p : d.pairs)
            cosines[p.label].push_back(cosine_similarity(store.lookup(p.word1), store.lookup(p.word2)));
    const HistogramSpec hist = cosine_histogram(cosines, o.bins);

    fs::create_directories(out);
    io::write_file_atomic(out / "coverage.tsv", coverage_to_tsv(cov, o.model));
    write_pairs_tsv(out / "pairs.tsv", all);
    write_vectors_text(out / "vectors.txt", restrict_store(store, used));
    io::write_file_atomic(out / "cosine_hist.tsv", histogram_to_tsv(hist));
    write_histogram_svg(out / "cosine_hist.svg", hist);

    man.seeds["controls"] = o.seed;
    man.params["bins"] = o.bins;
    for (const char* f : {"coverage.tsv", "pairs.tsv", "vectors.txt", "cosine_hist.tsv", "cosine_hist.svg"})
        man.add_output(out, f);
    man.write(out / "manifest.json");
    std::cout << "covered words " << cov.covered_words << "/" << cov.total_words << ", pairs kept " << real.size()
              << "\n";
    return 0;
}

// ---- shared input for project / classify ---------------------------------

struct EmbeddedRun {
    std::vector<PairDataset> datasets;  // by label, label order
    EmbeddingStore store;
    std::string model;
};

EmbeddedRun load_embedded(const fs::path& dir) {
    EmbeddedRun r;
    r.datasets = read_pairs_tsv(dir / "pairs.tsv");
    EmbeddingSource src = EmbeddingSource::glove;
    if (fs::exists(dir / "manifest.json")) {
        auto j = nlohmann::json::parse(io::read_file(dir / "manifest.json"), nullptr, false);
        if (!j.is_discarded() && j.contains("model") && j["model"].is_string()) {
            r.model = j["model"].get<std::string>();
            try {
                src = parse_embedding_source(r.model);
            } catch (const ParseError&) {
            }
        }
    }
    r.store = load_vectors_text(dir / "vectors.txt", src);
    return r;
}

PairDataset real_pairs(const EmbeddedRun& r) {
    std::vector<PairDataset> parts;
    for (const auto& d : r.datasets)
        if (!d.empty() && !is_shuffled(d.pairs.front().label)) parts.push_back(d);
    return merge(parts, "real");
}

// ---- project ------------------------------------------------------------

struct ProjectOptions {
    std::string in, out;
    std::string method = "umap";
    std::string metric = "euclidean";
    std::string construction = "diff";
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    std::size_t n_epochs = 0;
    double perplexity = 30;
    std::size_t n_iter = 1000;
    bool include_shuffled = true;
    std::uint64_t seed = 42;
};

int cmd_project(const ProjectOptions& o) {
    const fs::path in(o.in), out(o.out);
    EmbeddedRun run = load_embedded(in);
    std::vector<PairDataset> parts;
    for (const auto& d : run.datasets)
        if (!d.empty() && (o.include_shuffled || !is_shuffled(d.pairs.front().label))) parts.push_back(d);
    const LabeledCloud cloud = make_cloud(parts, run.store, parse_construction(o.construction));

    RunManifest man = start_manifest(run.model);
    Projection proj;
    switch (parse_method(o.method)) {
        case Method::umap: {
            UmapParams p;
            p.n_neighbors = o.n_neighbors;
            p.min_dist = o.min_dist;
            p.metric = parse_metric(o.metric);
            p.n_epochs = o.n_epochs;
            p.seed = o.seed;
            proj = umap(cloud, p);
            break;
        }
        case Method::tsne: proj = tsne(cloud, o.perplexity, o.seed, o.n_iter); break;
        case Method::pca: proj = pca(cloud); break;
    }
    fs::create_directories(out);
    write_projection_tsv(out / "projection.tsv", proj);
    write_scatter_svg(out / "scatter.svg", proj);

    man.add_input(in / "pairs.tsv");
    man.add_input(in / "vectors.txt");
    man.seeds["projection"] = o.seed;
    for (const auto& [k, v] : proj.params) man.params[k] = v;
    man.params["method"] = o.method;
    man.params["construction"] = o.construction;
    man.params["include_shuffled"] = o.include_shuffled;
    for (const char* f : {"projection.tsv", "scatter.svg"}) man.add_output(out, f);
    man.write(out / "manifest.json");
    std::cout << proj.params_digest << ": " << proj.rows() << " points\n";
    return 0;
}

// ---- classify -----------------------------------------------------------

struct ClassifyOptions {
    std::string in, out;
    std::string split = "stuttgart";
    double test_fraction = 0.2;
    std::string classifier = "kmeans";
    bool use_umap = true;
    std::size_t k = 10;
    std::size_t affinity_neighbors = 15;
    std::size_t n_neighbors = 15;
    double min_dist = 0.1;
    std::string metric = "euclidean";
    std::uint64_t seed = 42;
    std::size_t repeats = 1;
};

std::string predictions_tsv(const CellRun& run) {
    std::string out = "word1\tword2\tpos\tgold\tpredicted\n";
    for (std::size_t i = 0; i < run.test_pairs.size(); ++i) {
        const auto& p = run.test_pairs[i];
        out += p.word1 + '\t' + p.word2 + '\t' + std::string(to_string(p.pos)) + '\t' +
               std::string(to_string(p.label)) + '\t' + std::string(to_string(run.predicted[i])) + '\n';
    }
    return out;
}

int cmd_classify(const ClassifyOptions& o) {
    if (o.repeats == 0) throw ParameterError("--repeats must be positive");
    const fs::path in(o.in), out(o.out);
    EmbeddedRun run = load_embedded(in);
    const PairDataset real = real_pairs(run);
    const SplitMode mode = parse_split_mode(o.split);

    CellConfig cfg;
    cfg.use_umap = o.use_umap;
    cfg.classifier = parse_classifier(o.classifier);
    cfg.k = o.k;
    cfg.affinity_neighbors = o.affinity_neighbors;
    cfg.umap.n_neighbors = o.n_neighbors;
    cfg.umap.min_dist = o.min_dist;
    cfg.umap.metric = parse_metric(o.metric);

    RunManifest man = start_manifest(run.model);
    fs::create_directories(out);
    std::string summary = "seed\taccuracy\tmacro_f1\n";
    std::vector<double> acc, f1;
    for (std::size_t r = 0; r < o.repeats; ++r) {
        cfg.seed = o.seed + r;
        const SplitSpec split = make_split(real, mode, o.test_fraction, cfg.seed);
        const CellRun cell = run_table_cell_detailed(run.store, real, split, cfg);
        const std::string tag = "seed" + std::to_string(cfg.seed);
        io::write_file_atomic(out / ("report_" + tag + ".tsv"), report_to_tsv(cell.report));
        io::write_file_atomic(out / ("predictions_" + tag + ".tsv"), predictions_tsv(cell));
        man.add_output(out, "report_" + tag + ".tsv");
        man.add_output(out, "predictions_" + tag + ".tsv");
        man.seeds[tag] = cfg.seed;
        summary += std::to_string(cfg.seed) + '\t' + io::format_double(cell.report.accuracy, 6) + '\t' +
                   io::format_double(cell.report.macro_f1, 6) + '\n';
        acc.push_back(cell.report.accuracy);
        f1.push_back(cell.report.macro_f1);
        std::cout << cfg.digest() << " split=" << o.split << ": accuracy " << io::format_double(cell.report.accuracy, 4)
                  << ", macro-F1 " << io::format_double(cell.report.macro_f1, 4) << "\n";
    }
    const Aggregate a = aggregate(acc), b = aggregate(f1);
    summary += "mean\t" + io::format_double(a.mean, 6) + '\t' + io::format_double(b.mean, 6) + '\n';
    summary += "std\t" + io::format_double(a.std, 6) + '\t' + io::format_double(b.std, 6) + '\n';
    io::write_file_atomic(out / "summary.tsv", summary);
    man.add_output(out, "summary.tsv");
    man.add_input(in / "pairs.tsv");
    man.add_input(in / "vectors.txt");
    man.params["config"] = cfg.digest();
    man.params["split"] = o.split;
    if (mode == SplitMode::lexical) man.params["test_fraction"] = o.test_fraction;
    man.write(out / "manifest.json");
    return 0;
}

// ---- ablate -------------------------------------------------------------

template <class T>
T json_or(const nlohmann::json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

int cmd_ablate(const std::string& config_path, const std::string& out_dir) {
    const fs::path cfg_path(config_path), out(out_dir);
    nlohmann::json cfg;
    try {
        cfg = nlohmann::json::parse(io::read_file(cfg_path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(cfg_path.string() + ": " + e.what());
    }
    const fs::path base = cfg_path.parent_path();
    if (!cfg.contains("models") || !cfg["models"].is_array() || cfg["models"].empty())
        throw ConfigError(cfg_path.string() + ": \"models\" must be a non-empty array");

    RunManifest man = start_manifest("");
    man.add_input(cfg_path);
    man.params = cfg;
    fs::create_directories(out);

    struct Model {
        std::string name;
        EmbeddingSource source;
        EmbeddedRun run;
    };
    std::vector<Model> models;
    try {
        for (const auto& m : cfg["models"]) {
            fs::path dir = m.at("dir").get<std::string>();
            if (dir.is_relative()) dir = base / dir;
            Model md{m.at("name").get<std::string>(), EmbeddingSource::glove, load_embedded(dir)};
            md.source = parse_embedding_source(md.name);
            man.add_input(dir / "pairs.tsv");
            man.add_input(dir / "vectors.txt");
            models.push_back(std::move(md));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(cfg_path.string() + ": " + e.what());
    }

    try {
        // Hyperparameter grid figure per model.
        if (cfg.contains("umap_grid")) {
            const auto& g = cfg["umap_grid"];
            const auto nns = json_or<std::vector<std::size_t>>(g, "n_neighbors", {15, 30, 50, 100});
            const auto mds = json_or<std::vector<double>>(g, "min_dist", {0.01, 0.1, 0.25});
            const bool shuffled = json_or<bool>(g, "include_shuffled", true);
            UmapParams p;
            p.metric = parse_metric(json_or<std::string>(g, "metric", "euclidean"));
            p.seed = json_or<std::uint64_t>(g, "seed", 42);
            p.n_epochs = json_or<std::size_t>(g, "n_epochs", 0);
            for (const auto& md : models) {
                std::vector<PairDataset> parts;
                for (const auto& d : md.run.datasets)
                    if (!d.empty() && (shuffled || !is_shuffled(d.pairs.front().label))) parts.push_back(d);
                const LabeledCloud cloud = difference_cloud(parts, md.run.store);
                std::vector<Projection> projs;
                for (std::size_t nn : nns)
                    for (double mdist : mds) {
                        p.n_neighbors = nn;
                        p.min_dist = mdist;
                        note(md.name + ": umap n_neighbors=" + std::to_string(nn) + " min_dist=" + io::format_double(mdist, 6));
                        projs.push_back(umap(cloud, p));
                    }
                const std::string file = "grid_" + md.name + ".svg";
                write_grid_svg(out / file, projs, nns.size(), mds.size());
                man.add_output(out, file);
            }
        }

        // Results tables.
        if (cfg.contains("tables")) {
            const auto& t = cfg["tables"];
            SweepConfig sweep;
            sweep.seeds = json_or<std::vector<std::uint64_t>>(t, "seeds", {1, 2, 3});
            sweep.test_fraction = json_or<double>(t, "test_fraction", 0.2);
            sweep.base.k = json_or<std::size_t>(t, "k", 10);
            sweep.base.affinity_neighbors = json_or<std::size_t>(t, "affinity_neighbors", 15);
            sweep.base.umap.n_neighbors = json_or<std::size_t>(t, "n_neighbors", 15);
            sweep.base.umap.min_dist = json_or<double>(t, "min_dist", 0.1);
            sweep.base.umap.metric = parse_metric(json_or<std::string>(t, "metric", "euclidean"));
            sweep.base.umap.n_epochs = json_or<std::size_t>(t, "n_epochs", 0);
            if (t.contains("classifiers")) {
                std::vector<Classifier> keep;
                for (const auto& c : t["classifiers"]) keep.push_back(parse_classifier(c.get<std::string>()));
                std::vector<TableColumn> cols;
                for (const auto& c : table_columns())
                    if (std::find(keep.begin(), keep.end(), c.classifier) != keep.end()) cols.push_back(c);
                sweep.columns = cols;
            }
            for (const auto& s : json_or<std::vector<std::string>>(t, "splits", {"lexical", "stuttgart"})) {
                sweep.split = parse_split_mode(s);
                const TableLayout layout = sweep.split == SplitMode::lexical ? TableLayout::table3 : TableLayout::table4;
                const std::string stem = layout == TableLayout::table3 ? "table3" : "table4";
                TableGrid grid;
                std::string cells = "model\tsplit\tcolumn\tclassifier\tseed\taccuracy\tmacro_f1\n";
                for (const auto& md : models) {
                    const PairDataset real = real_pairs(md.run);
                    SweepResult res = sweep_model(md.run.store, real, sweep, [&](std::uint64_t seed, const TableColumn& c, const EvalReport& r) {
                        note(md.name + " " + s + " " + (c.use_umap ? "umap " : "raw ") + std::string(to_string(c.classifier)) +
                             " seed " + std::to_string(seed) + ": " + io::format_double(r.accuracy, 4));
                        cells += md.name + '\t' + s + '\t' + (c.use_umap ? "UMAP" : "Non-UMAP") + '\t' +
                                 std::string(display_name(c.classifier)) + '\t' + std::to_string(seed) + '\t' +
                                 io::format_double(r.accuracy, 6) + '\t' + io::format_double(r.macro_f1, 6) + '\n';
                    });
                    grid[md.source] = mean_cells(res.accuracy);
                }
                const RenderedTable rendered = emit_tables(grid, layout);
                io::write_file_atomic(out / (stem + ".csv"), rendered.csv);
                io::write_file_atomic(out / (stem + ".txt"), rendered.text);
                io::write_file_atomic(out / (stem + "_cells.tsv"), cells);
                for (const std::string ext : {".csv", ".txt", "_cells.tsv"}) man.add_output(out, stem + ext);
                std::cout << rendered.text << "\n";
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(cfg_path.string() + ": " + e.what());
    }
    man.write(out / "manifest.json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    g_command_line.assign(argv, argv + argc);
    CLI::App app{"Antonym/synonym difference-vector analysis"};
    app.require_subcommand(1);

    EmbedOptions eo;
    auto* embed = app.add_subcommand("embed", "Load vectors for the pair datasets and write the filtered run inputs");
    embed->add_option("--model", eo.model, "word2vec | glove | bert-table | text-embedding-3-small | text-embedding-3-large")
        ->required()
        ->check(CLI::IsMember({"word2vec", "glove", "bert-table", "text-embedding-3-small", "text-embedding-3-large"}));
    embed->add_option("--vectors-path", eo.vectors_path, "Vector file for local models (.bin = word2vec binary)");
    embed->add_option("--cache-dir", eo.cache_dir, "Embedding cache directory for API models");
    embed->add_option("--api-base", eo.api_base, "Embedding API base URL");
    embed->add_option("--batch-size", eo.batch_size, "Words per API request");
    embed->add_option("--pairs-dir", eo.pairs_dir, "Directory with <pos>-<relation>.<split> files")->required();
    embed->add_option("--out", eo.out, "Output directory")->required();
    embed->add_option("--seed", eo.seed, "Seed for the shuffled controls");
    embed->add_option("--bins", eo.bins, "Cosine histogram bins");

    ProjectOptions po;
    auto* project = app.add_subcommand("project", "Project difference (or concatenation) vectors to 2-D");
    project->add_option("--in", po.in, "Output directory of `embed`")->required();
    project->add_option("--out", po.out, "Output directory")->required();
    project->add_option("--method", po.method, "umap | tsne | pca")->check(CLI::IsMember({"umap", "tsne", "pca"}));
    project->add_option("--metric", po.metric, "euclidean | cosine (UMAP)")->check(CLI::IsMember({"euclidean", "cosine"}));
    project->add_option("--n-neighbors", po.n_neighbors);
    project->add_option("--min-dist", po.min_dist);
    project->add_option("--n-epochs", po.n_epochs, "0 = automatic");
    project->add_option("--perplexity", po.perplexity, "t-SNE perplexity");
    project->add_option("--n-iter", po.n_iter, "t-SNE iterations");
    project->add_option("--construction", po.construction, "diff | concat")->check(CLI::IsMember({"diff", "concat"}));
    project->add_option("--include-shuffled", po.include_shuffled, "Keep the shuffled controls (true/false)");
    project->add_option("--seed", po.seed);

    ClassifyOptions co;
    auto* classify = app.add_subcommand("classify", "Run one results-table cell");
    classify->add_option("--in", co.in, "Output directory of `embed`")->required();
    classify->add_option("--out", co.out, "Output directory")->required();
    classify->add_option("--split", co.split, "stuttgart | lexical")->check(CLI::IsMember({"stuttgart", "lexical"}));
    classify->add_option("--test-fraction", co.test_fraction, "Test share for the lexical split");
    classify->add_option("--classifier", co.classifier, "lr | nn | kmeans | spectral")
        ->check(CLI::IsMember({"lr", "nn", "kmeans", "spectral"}));
    classify->add_option("--use-umap", co.use_umap, "Project with UMAP first (true/false)");
    classify->add_option("--k", co.k, "Cluster count for kmeans/spectral");
    classify->add_option("--affinity-neighbors", co.affinity_neighbors, "kNN affinity size for spectral");
    classify->add_option("--n-neighbors", co.n_neighbors);
    classify->add_option("--min-dist", co.min_dist);
    classify->add_option("--metric", co.metric)->check(CLI::IsMember({"euclidean", "cosine"}));
    classify->add_option("--seed", co.seed);
    classify->add_option("--repeats", co.repeats, "Seeds seed, seed+1, ...");

    std::string grid_config, ablate_out;
    auto* ablate = app.add_subcommand("ablate", "UMAP hyperparameter grid figures and full results tables");
    ablate->add_option("--grid-config", grid_config, "JSON sweep description")->required();
    ablate->add_option("--out", ablate_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*embed) return cmd_embed(eo);
        if (*project) return cmd_project(po);
        if (*classify) return cmd_classify(co);
        if (*ablate) return cmd_ablate(grid_config, ablate_out);
    } catch (const IoError& e) {
        note(e.what());
        return 2;
    } catch (const TransportError& e) {
        note(e.what());
        return 2;
    } catch (const fs::filesystem_error& e) {
        note(e.what());
        return 2;
    } catch (const std::exception& e) {
        note(e.what());
        return 3;
    }
    return 1;
}
