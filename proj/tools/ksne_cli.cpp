// Command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ksne/ksne.h"

namespace {

constexpr int usage_exit = 2;

int report(ksne_status status) {
    if (status == KSNE_OK) {
        return 0;
    }
    const std::string stage = ksne_last_error_stage();
    std::fprintf(stderr, "ksne: %s error%s%s%s: %s\n", ksne_status_name(status), stage.empty() ? "" : " in stage '",
                 stage.c_str(), stage.empty() ? "" : "'", ksne_last_error());
    return ksne_exit_code(status);
}

struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App& app) {
        app.add_option("--config", config_file, "key=value file or run manifest; flags override it")
            ->check(CLI::ExistingFile);
        for (std::size_t i = 0; i < ksne_config_key_count(); ++i) {
            const std::string key = ksne_config_key_at(i);
            options[key] = app.add_option("--" + key, values[key]);
        }
    }

    ksne_status apply(ksne_config* config) const {
        if (!config_file.empty()) {
            if (ksne_status s = ksne_config_load(config, config_file.c_str()); s != KSNE_OK) {
                return s;
            }
        }
        for (const auto& [key, option] : options) {
            if (option->count() > 0) {
                if (ksne_status s = ksne_config_set(config, key.c_str(), values.at(key).c_str()); s != KSNE_OK) {
                    return s;
                }
            }
        }
        return KSNE_OK;
    }
};

struct ConfigHandle {
    ksne_config* ptr = ksne_config_new();
    ~ConfigHandle() { ksne_config_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ksne: t-SNE with pluggable kernels and initializations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ksne_version()));

    std::map<CLI::App*, ConfigFlags> flags;
    std::string output;
    std::string embedding;
    std::string run_dir;
    std::vector<std::size_t> iterations;
    std::string kernels = "gaussian,isolation,laplacian,approximate";
    std::string inits = "random,pca,ica,ensemble";

    auto* ingest = app.add_subcommand("ingest", "validate a dataset (or generate a circle) and write a normalized copy");
    auto* featurize = app.add_subcommand("featurize", "write the k-mer feature matrix as a point CSV");
    auto* embed = app.add_subcommand("embed", "run the full pipeline into --out");
    auto* sweep = app.add_subcommand("sweep", "run a kernel x init grid and rank the cells");
    auto* eval = app.add_subcommand("eval", "score an embedding CSV against the dataset");
    auto* plot = app.add_subcommand("plot", "render SVG plots for a finished run");

    for (auto* sub : {ingest, featurize, embed, sweep, eval}) {
        flags[sub].attach(*sub);
    }
    ingest->add_option("--output", output, "normalized copy (CSV); omitted: summary only");
    featurize->add_option("--output", output, "feature CSV")->required();
    sweep->add_option("--kernels", kernels, "comma-separated kernel names");
    sweep->add_option("--inits", inits, "comma-separated init names");
    eval->add_option("--embedding", embedding, "id,x,y[,label] CSV")->required();
    eval->add_option("--output", output, "quality CSV (k,R rows and auc_rnx)");
    plot->add_option("--run", run_dir, "run directory")->required();
    plot->add_option("--iteration", iterations, "checkpoint iteration(s); default the last");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage_exit;
    }

    ConfigHandle config;
    if (!config.ptr) {
        std::fprintf(stderr, "ksne: out of memory\n");
        return 3;
    }
    for (auto& [sub, sub_flags] : flags) {
        if (sub->parsed()) {
            if (ksne_status s = sub_flags.apply(config.ptr); s != KSNE_OK) {
                return report(s);
            }
        }
    }

    if (ingest->parsed()) {
        ksne_ingest_summary summary{};
        ksne_status s = ksne_cmd_ingest(config.ptr, output.empty() ? nullptr : output.c_str(), &summary);
        if (s == KSNE_OK) {
            std::printf("records %zu\ndimension %zu\nlabels %zu\n", summary.count, summary.dimension, summary.labels);
            if (summary.alphabet[0] != '\0') {
                std::printf("alphabet %s\n", summary.alphabet);
            }
        }
        return report(s);
    }
    if (featurize->parsed()) {
        return report(ksne_cmd_featurize(config.ptr, output.c_str()));
    }
    if (embed->parsed()) {
        ksne_embed_summary summary{};
        ksne_status s = ksne_cmd_embed(config.ptr, &summary);
        if (s == KSNE_OK) {
            std::printf("checkpoints %zu\nfinal_auc_rnx %.6f\nbest_auc_rnx %.6f (iteration %zu)\n"
                        "iterations_to_95 %zu\n",
                        summary.checkpoints, summary.final_auc_rnx, summary.best_auc_rnx, summary.best_iteration,
                        summary.iterations_to_95);
        }
        return report(s);
    }
    if (sweep->parsed()) {
        ksne_sweep_report* result = nullptr;
        ksne_status s = ksne_cmd_sweep(config.ptr, kernels.c_str(), inits.c_str(), &result);
        if (s == KSNE_OK) {
            std::fputs(ksne_sweep_report_table(result), stdout);
            ksne_sweep_report_free(result);
        }
        return report(s);
    }
    if (eval->parsed()) {
        double auc = 0.0;
        ksne_status s = ksne_cmd_eval(config.ptr, embedding.c_str(), output.empty() ? nullptr : output.c_str(), &auc);
        if (s == KSNE_OK) {
            std::printf("auc_rnx %.6f\n", auc);
        }
        return report(s);
    }
    std::size_t written = 0;
    ksne_status s = ksne_cmd_plot(run_dir.c_str(), iterations.data(), iterations.size(), &written);
    if (s == KSNE_OK) {
        std::printf("wrote %zu SVG file(s) to %s/plots\n", written, run_dir.c_str());
    }
    return report(s);
}
