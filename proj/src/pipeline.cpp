#include "ksne/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ksne/engine.hpp"
#include "ksne/featurize.hpp"
#include "ksne/kernels.hpp"
#include "ksne/matrix_io.hpp"
#include "ksne/parallel.hpp"
#include "ksne/random.hpp"
#include "ksne/svg.hpp"

namespace fs = std::filesystem;

namespace ksne {

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.kind(), e.what());
    } catch (const std::bad_alloc&) {
        throw StageError(stage, ErrorKind::io, "out of memory");
    } catch (const fs::filesystem_error& e) {
        throw StageError(stage, ErrorKind::io, e.what());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorKind::io, "cannot read " + path.string());
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorKind::io, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        fail(ErrorKind::io, "failed writing " + path.string());
    }
}

std::string hex64(std::uint64_t v) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016" PRIx64, v);
    return buffer;
}

std::string iteration_stem(std::size_t iteration) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "iter_%05zu", iteration);
    return buffer;
}

std::string detect_format(const RunConfig& config, std::string_view text) {
    if (config.format != "auto") {
        return config.format;
    }
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '>') {
        return "fasta";
    }
    const auto eol = text.find('\n');
    std::string_view header = text.substr(0, eol);
    if (!header.empty() && header.back() == '\r') {
        header.remove_suffix(1);
    }
    return header == "id,sequence,label" ? "csv" : "points";
}

void write_embedding_csv(const fs::path& path, const std::vector<std::string>& ids, const Matrix& coords,
                         const std::vector<std::string>* labels) {
    std::ostringstream out;
    out << (labels ? "id,x,y,label\n" : "id,x,y\n");
    for (std::size_t i = 0; i < coords.rows(); ++i) {
        out << ids[i] << ',' << format_real(coords(i, 0)) << ',' << format_real(coords(i, 1));
        if (labels) {
            out << ',' << (*labels)[i];
        }
        out << '\n';
    }
    write_file(path, out.str());
}

struct Affinities {
    JointDistribution p;
    Matrix similarity;  // kernel K, or P itself for the Gaussian kernel
    double sigma = 0.0;
    fs::path cache_file;
    bool cache_hit = false;
};

Affinities compute_affinities(const RunConfig& config, const LoadedDataset& data) {
    const Matrix& x = data.points.points;
    Affinities out;
    std::ostringstream key;
    key << hex64(data.source_hash) << '|' << config.format << '|' << config.kmer_k << '|' << data.alphabet << '|'
        << to_string(config.kernel) << '|';
    switch (config.kernel) {
    case KernelKind::gaussian:
        key << format_real(config.perplexity);
        break;
    case KernelKind::isolation:
        key << config.psi << '|' << config.trees << '|' << config.seed;
        break;
    case KernelKind::laplacian:
        out.sigma = config.sigma ? *config.sigma : default_laplacian_sigma(x);
        key << format_real(out.sigma);
        break;
    case KernelKind::approximate:
        key << config.approx_m << '|' << config.approx_normalize;
        break;
    }

    const fs::path cache_dir = config.cache_dir.empty() ? fs::path(config.out) / "cache" : fs::path(config.cache_dir);
    fs::create_directories(cache_dir);
    out.cache_file = cache_dir / (std::string(to_string(config.kernel)) + "-" + hex64(fnv1a(key.str())) + ".bin");

    if (fs::exists(out.cache_file)) {
        Matrix cached = load_square_binary(out.cache_file);
        if (cached.rows() == x.rows()) {
            out.similarity = std::move(cached);
            out.cache_hit = true;
        }
    }
    if (!out.cache_hit) {
        switch (config.kernel) {
        case KernelKind::gaussian:
            out.similarity = gaussian_joint(x, config.perplexity).values;
            break;
        case KernelKind::isolation:
            out.similarity = isolation_kernel(x, config.psi, config.trees, config.seed).values;
            break;
        case KernelKind::laplacian:
            out.similarity = laplacian_kernel(x, out.sigma).values;
            break;
        case KernelKind::approximate:
            if (!data.records) {
                fail(ErrorKind::argument, "the approximate kernel needs sequence input (fasta or csv)");
            }
            out.similarity = approximate_kernel(*data.records, config.kmer_k, config.approx_m,
                                                config.approx_normalize,
                                                data.alphabet.empty() ? std::nullopt
                                                                      : std::optional<Alphabet>(Alphabet(data.alphabet)))
                                 .values;
            break;
        }
        publish_square_binary(out.cache_file, out.similarity);
    }

    if (config.kernel == KernelKind::gaussian) {
        out.p.values = out.similarity;
        validate_joint(out.p);
    } else {
        out.p = kernel_to_joint({out.similarity, config.kernel}, config.joint_mode);
    }
    return out;
}

nlohmann::json config_json(const RunConfig& config) {
    nlohmann::json object = nlohmann::json::object();
    for (const auto& [key, value] : config.entries()) {
        object[key] = value;
    }
    return object;
}

void summarize(EmbedResult& result) {
    if (result.series.empty()) {
        return;
    }
    result.final_auc = result.series.back().auc_rnx;
    result.best_auc = result.series.front().auc_rnx;
    result.best_iteration = result.series.front().iteration;
    for (const auto& point : result.series) {
        if (point.auc_rnx > result.best_auc) {
            result.best_auc = point.auc_rnx;
            result.best_iteration = point.iteration;
        }
    }
    result.iterations_to_95 = iterations_to_fraction(result.series, 0.95);
}

EmbedResult run_embed(const RunConfig& config, nlohmann::json& manifest) {
    const fs::path run_dir = config.out;
    EmbedResult result;
    result.run_dir = run_dir;

    const LoadedDataset data = load_dataset(config);
    const std::size_t n = data.points.points.rows();
    manifest["resolved"]["n"] = n;
    manifest["resolved"]["dimension"] = data.points.points.cols();
    manifest["resolved"]["alphabet"] = data.alphabet;
    manifest["resolved"]["source_hash"] = hex64(data.source_hash);

    in_stage("eval", [&] {
        require(config.kmax >= 1 && n >= config.kmax + 2,
                "kmax=" + std::to_string(config.kmax) + " needs at least " + std::to_string(config.kmax + 2) +
                    " points, dataset has " + std::to_string(n));
    });

    const Affinities affinities = in_stage("kernels", [&] { return compute_affinities(config, data); });
    manifest["resolved"]["kernel_cache"] = affinities.cache_file.string();
    manifest["resolved"]["kernel_cache_hit"] = affinities.cache_hit;
    manifest["resolved"]["kernel_seed"] = config.seed;
    if (config.kernel == KernelKind::laplacian) {
        manifest["resolved"]["sigma"] = affinities.sigma;
    }

    result.init_seed = cell_seed(config.seed, config.kernel, config.init);
    manifest["resolved"]["init_seed"] = result.init_seed;
    const InitialEmbedding init = in_stage("init", [&] {
        return make_initial_embedding(config.init, data.points.points, result.init_seed, config.ensemble_mode,
                                      config.init_std);
    });
    result.ica_converged = init.ica_converged;
    if (init.ica_used) {
        manifest["ica"] = {{"converged", init.ica_converged}, {"iterations", init.ica_iterations}};
        if (!init.ica_converged) {
            manifest["warnings"].push_back("FastICA did not converge within " + std::to_string(init.ica_iterations) +
                                           " iterations; using the last iterate");
        }
    }
    in_stage("report", [&] {
        write_embedding_csv(run_dir / "init.csv", data.points.ids, init.embedding.coords, nullptr);
    });

    const NeighborTable hd_table = in_stage("eval", [&] {
        return config.hd_space == HdSpace::features ? knn_table(data.points.points, config.kmax)
                                                    : knn_table_from_similarity(affinities.similarity, config.kmax);
    });

    in_stage("report", [&] {
        fs::create_directories(run_dir / "checkpoints");
        fs::create_directories(run_dir / "quality");
    });

    // The optimizer hands checkpoints to an evaluation thread through a
    // bounded queue; the optimizer blocks when evaluation falls behind.
    CheckpointQueue queue(4);
    std::exception_ptr consumer_error;
    std::atomic<bool> consumer_failed{false};
    std::thread consumer([&] {
        ThreadScope scope(1);
        try {
            while (auto checkpoint = queue.pop()) {
                const std::string stem = iteration_stem(checkpoint->iteration);
                in_stage("report", [&] {
                    write_embedding_csv(run_dir / "checkpoints" / (stem + ".csv"), data.points.ids,
                                        checkpoint->embedding.coords, &data.points.labels);
                });
                const QualityCurve curve = in_stage("eval", [&] {
                    return quality_curve(hd_table, knn_table(checkpoint->embedding.coords, config.kmax), config.kmax);
                });
                in_stage("report", [&] {
                    std::ostringstream text;
                    write_quality_csv(text, curve);
                    write_file(run_dir / "quality" / (stem + ".csv"), text.str());
                });
                result.series.push_back({checkpoint->iteration, curve.auc_rnx, checkpoint->kl});
            }
        } catch (...) {
            consumer_error = std::current_exception();
            consumer_failed = true;
            queue.close();
        }
    });

    Embedding final_embedding;
    std::exception_ptr optimizer_error;
    try {
        in_stage("optimize", [&] {
            const Trajectory trajectory = run_tsne(affinities.p, init.embedding, config.optimizer, [&](const Checkpoint& c) {
                if (consumer_failed) {
                    fail(ErrorKind::io, "checkpoint evaluation failed");
                }
                queue.push(c);
            });
            final_embedding = trajectory.checkpoints.back().embedding;
        });
    } catch (...) {
        optimizer_error = std::current_exception();
    }
    queue.close();
    consumer.join();
    if (consumer_error) {
        std::rethrow_exception(consumer_error);
    }
    if (optimizer_error) {
        std::rethrow_exception(optimizer_error);
    }

    summarize(result);
    in_stage("report", [&] {
        std::ostringstream auc;
        auc << "iteration,auc_rnx\n";
        for (const auto& point : result.series) {
            auc << point.iteration << ',' << format_real(point.auc_rnx) << '\n';
            manifest["checkpoints"].push_back(
                {{"iteration", point.iteration}, {"kl", point.kl}, {"auc_rnx", point.auc_rnx}});
        }
        write_file(run_dir / "auc.csv", auc.str());
        write_file(run_dir / "embedding.svg",
                   render_scatter_svg(final_embedding.coords, data.points.labels,
                                      std::string(to_string(config.kernel)) + " kernel, " + to_string(config.init) +
                                          " init, iteration " + std::to_string(result.series.back().iteration)));
        manifest["summary"] = {{"final_auc_rnx", result.final_auc},
                               {"best_auc_rnx", result.best_auc},
                               {"best_iteration", result.best_iteration},
                               {"iterations_to_95", result.iterations_to_95}};
    });
    return result;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::degenerate:
    case ErrorKind::divergence:
        return 3;
    default:
        return 2;
    }
}

LoadedDataset load_dataset(const RunConfig& config) {
    LoadedDataset data;
    std::string format;
    std::string text;
    in_stage("ingest", [&] {
        if (config.circle_n > 0) {
            const double noise = config.circle_noise ? *config.circle_noise : 0.05 * config.circle_radius;
            data.points = generate_circle(config.circle_n, config.circle_radius, noise, config.seed);
            data.source_hash = fnv1a("circle|" + std::to_string(config.circle_n) + "|" +
                                     format_real(config.circle_radius) + "|" + format_real(noise) + "|" +
                                     std::to_string(config.seed));
            format = "points";
            return;
        }
        require(!config.data.empty(), "no dataset given (set data or circle-n)");
        if (!fs::exists(config.data)) {
            fail(ErrorKind::io, "dataset file not found: " + config.data);
        }
        text = read_file(config.data);
        data.source_hash = fnv1a(text);
        format = detect_format(config, text);
        if (format == "fasta") {
            data.records = parse_fasta(text);
        } else if (format == "csv") {
            data.records = parse_labeled_csv(text);
        } else {
            data.points = parse_point_csv(text);
        }
        if (data.records && data.records->empty()) {
            fail(ErrorKind::format, "dataset contains no records");
        }
    });

    if (data.records) {
        in_stage("featurize", [&] {
            const std::optional<Alphabet> alphabet =
                config.alphabet.empty() ? std::nullopt : std::optional<Alphabet>(Alphabet(config.alphabet));
            FeatureMatrix features = build_feature_matrix(*data.records, config.kmer_k, alphabet);
            data.alphabet = features.alphabet.symbols();
            data.points.points = std::move(features.values);
            for (const auto& record : *data.records) {
                data.points.ids.push_back(record.id);
                data.points.labels.push_back(record.label);
            }
        });
    }
    return data;
}

std::uint64_t cell_seed(std::uint64_t base, KernelKind kernel, InitKind init) {
    return base + fnv1a(std::string(to_string(kernel)) + "/" + to_string(init));
}

std::size_t iterations_to_fraction(const std::vector<AucPoint>& series, double fraction) {
    if (series.empty()) {
        return 0;
    }
    const double final_auc = series.back().auc_rnx;
    const double threshold = final_auc - (1.0 - fraction) * std::fabs(final_auc);
    for (const auto& point : series) {
        if (point.auc_rnx >= threshold) {
            return point.iteration;
        }
    }
    return series.back().iteration;
}

EmbedResult cmd_embed(const RunConfig& config) {
    const fs::path run_dir = config.out;
    in_stage("report", [&] {
        fs::create_directories(run_dir);
        fs::remove(run_dir / "FAILED");
    });

    nlohmann::json manifest;
    manifest["tool"] = "ksne";
    manifest["version"] = "0.1.0";
    manifest["config"] = config_json(config);
    manifest["kernel"] = to_string(config.kernel);
    manifest["init"] = to_string(config.init);
    manifest["warnings"] = nlohmann::json::array();
    manifest["checkpoints"] = nlohmann::json::array();
    if (config.optimizer.adaptive_gains) {
        manifest["warnings"].push_back("adaptive gains enabled");
    }

    ThreadScope threads(config.jobs);
    try {
        EmbedResult result = run_embed(config, manifest);
        manifest["status"] = "ok";
        write_file(run_dir / "manifest.json", manifest.dump(2) + "\n");
        return result;
    } catch (const StageError& e) {
        manifest["status"] = "failed";
        manifest["failure"] = {{"stage", e.stage()}, {"kind", to_string(e.kind())}, {"message", e.detail()}};
        try {
            write_file(run_dir / "FAILED", e.stage() + ": " + e.detail() + "\n");
            write_file(run_dir / "manifest.json", manifest.dump(2) + "\n");
        } catch (...) {
        }
        throw;
    }
}

void assign_recommendations(SweepReport& report) {
    const SweepRow* best = nullptr;
    double worst = 0.0;
    bool any = false;
    for (const auto& row : report.rows) {
        if (!row.ok) {
            continue;
        }
        if (!best || row.final_auc > best->final_auc) {
            best = &row;
        }
        worst = any ? std::min(worst, row.final_auc) : row.final_auc;
        any = true;
    }
    for (auto& row : report.rows) {
        if (!row.ok) {
            row.recommendation = "FAILED(" + row.failed_stage + ")";
        } else if (&row == best) {
            row.recommendation = "recommended";
        } else if (row.final_auc <= worst + not_recommended_margin) {
            row.recommendation = "not recommended";
        } else {
            row.recommendation = "-";
        }
    }
}

SweepReport cmd_sweep(const RunConfig& config, const std::vector<KernelKind>& kernels,
                      const std::vector<InitKind>& inits) {
    require(!kernels.empty() && !inits.empty(), "sweep needs at least one kernel and one init");
    const fs::path out = config.out;
    fs::create_directories(out);

    SweepReport report;
    for (auto kernel : kernels) {
        for (auto init : inits) {
            SweepRow row;
            row.kernel = kernel;
            row.init = init;
            report.rows.push_back(row);
        }
    }

    auto run_cell = [&](SweepRow& row, int jobs) {
        RunConfig cell = config;
        cell.jobs = jobs;
        cell.kernel = row.kernel;
        cell.init = row.init;
        cell.out = (out / (std::string(to_string(row.kernel)) + "-" + to_string(row.init))).string();
        if (cell.cache_dir.empty()) {
            cell.cache_dir = (out / "cache").string();
        }
        try {
            const EmbedResult result = cmd_embed(cell);
            row.ok = true;
            row.final_auc = result.final_auc;
            row.best_auc = result.best_auc;
            row.best_iteration = result.best_iteration;
            row.iterations_to_95 = result.iterations_to_95;
        } catch (const StageError& e) {
            row.failed_stage = e.stage();
            row.message = e.detail();
        } catch (const std::exception& e) {
            row.failed_stage = "internal";
            row.message = e.what();
        }
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.jobs, 1)), report.rows.size());
    if (workers <= 1) {
        for (auto& row : report.rows) {
            run_cell(row, config.jobs);
        }
    } else {
        // Cells run concurrently, each optimizer single-threaded.
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < report.rows.size(); i = next++) {
                    run_cell(report.rows[i], 1);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    assign_recommendations(report);
    std::ostringstream csv;
    write_sweep_csv(csv, report);
    write_file(out / "sweep.csv", csv.str());
    write_file(out / "sweep.txt", render_sweep_table(report));
    return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    out << "kernel,init,status,final_auc_rnx,best_auc_rnx,best_iteration,iterations_to_95,recommendation\n";
    for (const auto& row : report.rows) {
        out << to_string(row.kernel) << ',' << to_string(row.init) << ',';
        if (row.ok) {
            out << "ok," << format_real(row.final_auc) << ',' << format_real(row.best_auc) << ','
                << row.best_iteration << ',' << row.iterations_to_95 << ',' << row.recommendation << '\n';
        } else {
            out << "FAILED(" << row.failed_stage << "),,,,," << row.recommendation << '\n';
        }
    }
}

std::string render_sweep_table(const SweepReport& report) {
    std::vector<const SweepRow*> ranked;
    for (const auto& row : report.rows) {
        ranked.push_back(&row);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const SweepRow* a, const SweepRow* b) {
        if (a->ok != b->ok) {
            return a->ok;
        }
        return a->ok && a->final_auc > b->final_auc;
    });

    std::ostringstream text;
    char line[256];
    std::snprintf(line, sizeof(line), "%-4s %-12s %-9s %-12s %-12s %-10s %-10s %s\n", "rank", "kernel", "init",
                  "final_auc", "best_auc", "best_iter", "iters_95", "recommendation");
    text << line;
    std::size_t rank = 1;
    for (const SweepRow* row : ranked) {
        if (row->ok) {
            std::snprintf(line, sizeof(line), "%-4zu %-12s %-9s %-12.6f %-12.6f %-10zu %-10zu %s\n", rank,
                          to_string(row->kernel), to_string(row->init), row->final_auc, row->best_auc,
                          row->best_iteration, row->iterations_to_95, row->recommendation.c_str());
        } else {
            std::snprintf(line, sizeof(line), "%-4s %-12s %-9s %-12s %-12s %-10s %-10s %s\n", "-",
                          to_string(row->kernel), to_string(row->init), "-", "-", "-", "-",
                          row->recommendation.c_str());
        }
        text << line;
        ++rank;
    }
    std::snprintf(line, sizeof(line),
                  "\nrecommended: highest final AUC_RNX. not recommended: final AUC_RNX within %.2f of the worst "
                  "successful cell.\n",
                  not_recommended_margin);
    text << line;
    return text.str();
}

PointDataset read_embedding_csv(const fs::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) {
        fail(ErrorKind::format, path.string() + " is empty");
    }
    if (!header.empty() && header.back() == '\r') {
        header.pop_back();
    }
    const bool labelled = header == "id,x,y,label";
    if (!labelled && header != "id,x,y") {
        fail(ErrorKind::format, path.string() + ": expected header 'id,x,y' or 'id,x,y,label'");
    }
    if (labelled) {
        return parse_point_csv(text);
    }
    std::string converted = "id,x,y,label\n";
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            converted += line + ",\n";
        }
    }
    return parse_point_csv(converted);
}

std::vector<fs::path> cmd_plot(const fs::path& run_dir, const std::vector<std::size_t>& iterations) {
    return in_stage("plot", [&] {
        const fs::path checkpoints = run_dir / "checkpoints";
        std::vector<std::size_t> available;
        if (fs::is_directory(checkpoints)) {
            for (const auto& entry : fs::directory_iterator(checkpoints)) {
                const std::string name = entry.path().filename().string();
                std::size_t iteration = 0;
                if (std::sscanf(name.c_str(), "iter_%zu.csv", &iteration) == 1) {
                    available.push_back(iteration);
                }
            }
        }
        if (available.empty()) {
            fail(ErrorKind::argument, "no checkpoints under " + run_dir.string());
        }
        std::sort(available.begin(), available.end());

        std::vector<std::size_t> wanted = iterations;
        if (wanted.empty()) {
            wanted.push_back(available.back());
        }
        const fs::path plots = run_dir / "plots";
        fs::create_directories(plots);
        std::vector<fs::path> written;
        for (std::size_t iteration : wanted) {
            const fs::path source = checkpoints / (iteration_stem(iteration) + ".csv");
            if (!fs::exists(source)) {
                fail(ErrorKind::argument, "no checkpoint for iteration " + std::to_string(iteration));
            }
            const PointDataset points = read_embedding_csv(source);
            const fs::path target = plots / (iteration_stem(iteration) + ".svg");
            write_file(target, render_scatter_svg(points.points, points.labels,
                                                  "iteration " + std::to_string(iteration)));
            written.push_back(target);
        }

        const fs::path auc_csv = run_dir / "auc.csv";
        if (fs::exists(auc_csv)) {
            std::istringstream in(read_file(auc_csv));
            std::string line;
            std::getline(in, line);
            std::vector<std::pair<std::size_t, double>> series;
            while (std::getline(in, line)) {
                std::size_t iteration = 0;
                double auc = 0.0;
                if (std::sscanf(line.c_str(), "%zu,%lf", &iteration, &auc) == 2) {
                    series.emplace_back(iteration, auc);
                }
            }
            if (!series.empty()) {
                const fs::path target = plots / "auc.svg";
                write_file(target, render_auc_svg(series, "AUC_RNX by iteration"));
                written.push_back(target);
            }
        }
        return written;
    });
}

IngestSummary cmd_ingest(const RunConfig& config, const fs::path& output) {
    LoadedDataset data;
    IngestSummary summary;
    std::vector<SequenceRecord> records;
    in_stage("ingest", [&] {
        if (config.circle_n == 0) {
            const std::string text = read_file(config.data);
            const std::string format = detect_format(config, text);
            if (format == "fasta") {
                records = parse_fasta(text);
            } else if (format == "csv") {
                records = parse_labeled_csv(text);
            } else {
                data.points = parse_point_csv(text);
            }
        } else {
            data = load_dataset(config);
        }
    });

    in_stage("report", [&] {
        std::ostringstream out;
        if (!records.empty()) {
            summary.count = records.size();
            summary.alphabet = infer_alphabet(records).symbols();
            summary.dimension = summary.alphabet.size();
            for (const auto& r : records) {
                ++summary.label_counts[r.label];
            }
            write_labeled_csv(out, records);
        } else {
            summary.count = data.points.points.rows();
            summary.dimension = data.points.points.cols();
            for (const auto& label : data.points.labels) {
                ++summary.label_counts[label];
            }
            write_point_csv(out, data.points);
        }
        if (!output.empty()) {
            if (output.has_parent_path()) {
                fs::create_directories(output.parent_path());
            }
            write_file(output, out.str());
        }
    });
    return summary;
}

void cmd_featurize(const RunConfig& config, const fs::path& output) {
    const LoadedDataset data = load_dataset(config);
    in_stage("report", [&] {
        if (output.has_parent_path()) {
            fs::create_directories(output.parent_path());
        }
        std::ofstream out(output, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorKind::io, "cannot write " + output.string());
        }
        write_point_csv(out, data.points);
    });
}

QualityCurve cmd_eval(const RunConfig& config, const fs::path& embedding, const fs::path& output) {
    ThreadScope threads(config.jobs);
    const LoadedDataset data = load_dataset(config);
    const PointDataset ld = in_stage("eval", [&] { return read_embedding_csv(embedding); });
    return in_stage("eval", [&] {
        require(ld.points.rows() == data.points.points.rows(),
                "embedding has " + std::to_string(ld.points.rows()) + " rows, dataset has " +
                    std::to_string(data.points.points.rows()));
        for (std::size_t i = 0; i < ld.ids.size(); ++i) {
            if (ld.ids[i] != data.points.ids[i]) {
                fail(ErrorKind::validation, "embedding row " + std::to_string(i) + " has id '" + ld.ids[i] +
                                                "', dataset has '" + data.points.ids[i] + "'");
            }
        }
        NeighborTable hd;
        if (config.hd_space == HdSpace::features) {
            hd = knn_table(data.points.points, config.kmax);
        } else {
            hd = knn_table_from_similarity(compute_affinities(config, data).similarity, config.kmax);
        }
        const QualityCurve curve = quality_curve(hd, knn_table(ld.points, config.kmax), config.kmax);
        if (!output.empty()) {
            std::ostringstream text;
            write_quality_csv(text, curve);
            write_file(output, text.str());
        }
        return curve;
    });
}

}  // namespace ksne
