#include "ksne/ksne.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "ksne/config.hpp"
#include "ksne/engine.hpp"
#include "ksne/error.hpp"
#include "ksne/eval.hpp"
#include "ksne/ingest.hpp"
#include "ksne/init.hpp"
#include "ksne/kernels.hpp"
#include "ksne/matrix_io.hpp"
#include "ksne/parallel.hpp"
#include "ksne/pipeline.hpp"

struct ksne_config {
    ksne::RunConfig value;
};

struct ksne_matrix {
    ksne::Matrix value;
};

struct ksne_trajectory {
    std::vector<std::size_t> iterations;
    std::vector<double> kl;
    std::vector<ksne_matrix> embeddings;
};

struct ksne_sweep_report {
    ksne::SweepReport value;
    std::string table;
    std::string csv;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_stage;

ksne_status status_for(ksne::ErrorKind kind) {
    using ksne::ErrorKind;
    switch (kind) {
    case ErrorKind::argument: return KSNE_ERR_ARGUMENT;
    case ErrorKind::parse: return KSNE_ERR_PARSE;
    case ErrorKind::format: return KSNE_ERR_FORMAT;
    case ErrorKind::validation: return KSNE_ERR_VALIDATION;
    case ErrorKind::featurization: return KSNE_ERR_FEATURIZATION;
    case ErrorKind::degenerate: return KSNE_ERR_DEGENERATE;
    case ErrorKind::unsupported: return KSNE_ERR_UNSUPPORTED;
    case ErrorKind::divergence: return KSNE_ERR_DIVERGENCE;
    case ErrorKind::io: return KSNE_ERR_IO;
    }
    return KSNE_ERR_INTERNAL;
}

template <typename Fn>
ksne_status guarded(Fn&& fn) {
    last_error.clear();
    last_stage.clear();
    try {
        fn();
        return KSNE_OK;
    } catch (const ksne::StageError& e) {
        last_error = e.detail();
        last_stage = e.stage();
        return status_for(e.kind());
    } catch (const ksne::Error& e) {
        last_error = e.what();
        return status_for(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return KSNE_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return KSNE_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return KSNE_ERR_INTERNAL;
    }
}

void require_handle(const void* handle, const char* what) {
    if (!handle) {
        ksne::fail(ksne::ErrorKind::argument, std::string(what) + " is NULL");
    }
}

ksne::OptimizerParams to_params(const ksne_optimizer_params& p) {
    ksne::OptimizerParams out;
    out.learning_rate = p.learning_rate;
    out.momentum_early = p.momentum_early;
    out.momentum_late = p.momentum_late;
    out.momentum_switch_iter = p.momentum_switch_iter;
    out.max_iters = p.max_iters;
    out.checkpoint_every = p.checkpoint_every;
    out.early_exaggeration_factor = p.early_exaggeration_factor;
    out.early_exaggeration_iters = p.early_exaggeration_iters;
    out.adaptive_gains = p.adaptive_gains != 0;
    return out;
}

template <typename Names, typename Parse>
auto parse_list(const char* text, Parse parse) {
    Names out;
    std::stringstream in(text ? text : "");
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(parse(item));
        }
    }
    return out;
}

}  // namespace

extern "C" {

const char* ksne_version(void) {
    return "0.1.0";
}

const char* ksne_status_name(ksne_status status) {
    switch (status) {
    case KSNE_OK: return "ok";
    case KSNE_ERR_ARGUMENT: return "argument";
    case KSNE_ERR_PARSE: return "parse";
    case KSNE_ERR_FORMAT: return "format";
    case KSNE_ERR_VALIDATION: return "validation";
    case KSNE_ERR_FEATURIZATION: return "featurization";
    case KSNE_ERR_DEGENERATE: return "degenerate";
    case KSNE_ERR_UNSUPPORTED: return "unsupported";
    case KSNE_ERR_DIVERGENCE: return "divergence";
    case KSNE_ERR_IO: return "io";
    case KSNE_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* ksne_last_error(void) {
    return last_error.c_str();
}

const char* ksne_last_error_stage(void) {
    return last_stage.c_str();
}

int ksne_exit_code(ksne_status status) {
    switch (status) {
    case KSNE_OK: return 0;
    case KSNE_ERR_DEGENERATE:
    case KSNE_ERR_DIVERGENCE:
    case KSNE_ERR_INTERNAL:
        return 3;
    default:
        return 2;
    }
}

void ksne_set_threads(int threads) {
    ksne::set_thread_count(threads);
}

ksne_config* ksne_config_new(void) {
    return new (std::nothrow) ksne_config();
}

void ksne_config_free(ksne_config* config) {
    delete config;
}

int ksne_config_is_key(const char* key) {
    return key && ksne::is_config_key(key) ? 1 : 0;
}

size_t ksne_config_key_count(void) {
    return ksne::config_keys().size();
}

const char* ksne_config_key_at(size_t index) {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (auto key : ksne::config_keys()) {
            out.emplace_back(key);
        }
        return out;
    }();
    return index < names.size() ? names[index].c_str() : nullptr;
}

ksne_status ksne_config_set(ksne_config* config, const char* key, const char* value) {
    return guarded([&] {
        require_handle(config, "config");
        require_handle(key, "key");
        config->value.set(key, value ? value : "");
    });
}

ksne_status ksne_config_load(ksne_config* config, const char* path) {
    return guarded([&] {
        require_handle(config, "config");
        require_handle(path, "path");
        ksne::load_config_file(config->value, path);
    });
}

ksne_status ksne_config_get(const ksne_config* config, const char* key, char* buffer, size_t capacity,
                            size_t* needed) {
    return guarded([&] {
        require_handle(config, "config");
        require_handle(key, "key");
        for (const auto& [name, value] : config->value.entries()) {
            if (name == key) {
                if (needed) {
                    *needed = value.size() + 1;
                }
                if (buffer && capacity > 0) {
                    const std::size_t count = std::min(value.size(), capacity - 1);
                    std::memcpy(buffer, value.data(), count);
                    buffer[count] = '\0';
                }
                return;
            }
        }
        ksne::fail(ksne::ErrorKind::argument, std::string("unknown config key '") + key + "'");
    });
}

ksne_matrix* ksne_matrix_new(size_t rows, size_t cols, const double* values) {
    try {
        auto* m = new ksne_matrix{ksne::Matrix(rows, cols)};
        if (values) {
            std::memcpy(m->value.data(), values, rows * cols * sizeof(double));
        }
        return m;
    } catch (...) {
        last_error = "out of memory";
        return nullptr;
    }
}

void ksne_matrix_free(ksne_matrix* matrix) {
    delete matrix;
}

size_t ksne_matrix_rows(const ksne_matrix* matrix) {
    return matrix ? matrix->value.rows() : 0;
}

size_t ksne_matrix_cols(const ksne_matrix* matrix) {
    return matrix ? matrix->value.cols() : 0;
}

const double* ksne_matrix_data(const ksne_matrix* matrix) {
    return matrix ? matrix->value.data() : nullptr;
}

ksne_status ksne_matrix_save(const ksne_matrix* matrix, const char* path) {
    return guarded([&] {
        require_handle(matrix, "matrix");
        require_handle(path, "path");
        ksne::publish_square_binary(path, matrix->value);
    });
}

ksne_status ksne_matrix_load(const char* path, ksne_matrix** out) {
    return guarded([&] {
        require_handle(path, "path");
        require_handle(out, "out");
        *out = new ksne_matrix{ksne::load_square_binary(path)};
    });
}

ksne_status ksne_generate_circle(size_t n, double radius, double noise_std, uint64_t seed, ksne_matrix** out_points) {
    return guarded([&] {
        require_handle(out_points, "out_points");
        *out_points = new ksne_matrix{ksne::generate_circle(n, radius, noise_std, seed).points};
    });
}

ksne_status ksne_joint_gaussian(const ksne_matrix* points, double perplexity, ksne_matrix** out_p) {
    return guarded([&] {
        require_handle(points, "points");
        require_handle(out_p, "out_p");
        *out_p = new ksne_matrix{ksne::gaussian_joint(points->value, perplexity).values};
    });
}

ksne_status ksne_kernel_laplacian(const ksne_matrix* points, double sigma, ksne_matrix** out_kernel) {
    return guarded([&] {
        require_handle(points, "points");
        require_handle(out_kernel, "out_kernel");
        const double width = sigma > 0.0 ? sigma : ksne::default_laplacian_sigma(points->value);
        *out_kernel = new ksne_matrix{ksne::laplacian_kernel(points->value, width).values};
    });
}

ksne_status ksne_kernel_isolation(const ksne_matrix* points, size_t psi, size_t trees, uint64_t seed,
                                  ksne_matrix** out_kernel) {
    return guarded([&] {
        require_handle(points, "points");
        require_handle(out_kernel, "out_kernel");
        *out_kernel = new ksne_matrix{ksne::isolation_kernel(points->value, psi, trees, seed).values};
    });
}

ksne_status ksne_kernel_to_joint(const ksne_matrix* kernel, const char* mode, ksne_matrix** out_p) {
    return guarded([&] {
        require_handle(kernel, "kernel");
        require_handle(out_p, "out_p");
        const auto joint_mode = ksne::parse_joint_mode(mode ? mode : "row-normalize");
        *out_p = new ksne_matrix{ksne::kernel_to_joint({kernel->value, ksne::KernelKind::laplacian}, joint_mode).values};
    });
}

ksne_status ksne_initialize(const ksne_matrix* points, const char* kind, uint64_t seed, ksne_matrix** out_embedding) {
    return guarded([&] {
        require_handle(points, "points");
        require_handle(kind, "kind");
        require_handle(out_embedding, "out_embedding");
        auto init = ksne::make_initial_embedding(ksne::parse_init_kind(kind), points->value, seed);
        *out_embedding = new ksne_matrix{std::move(init.embedding.coords)};
    });
}

void ksne_optimizer_params_default(ksne_optimizer_params* params) {
    if (!params) {
        return;
    }
    const ksne::OptimizerParams d;
    params->learning_rate = d.learning_rate;
    params->momentum_early = d.momentum_early;
    params->momentum_late = d.momentum_late;
    params->momentum_switch_iter = d.momentum_switch_iter;
    params->max_iters = d.max_iters;
    params->checkpoint_every = d.checkpoint_every;
    params->early_exaggeration_factor = d.early_exaggeration_factor;
    params->early_exaggeration_iters = d.early_exaggeration_iters;
    params->adaptive_gains = d.adaptive_gains ? 1 : 0;
}

ksne_status ksne_optimize(const ksne_matrix* p, const ksne_matrix* init, const ksne_optimizer_params* params,
                          ksne_trajectory** out) {
    return guarded([&] {
        require_handle(p, "p");
        require_handle(init, "init");
        require_handle(out, "out");
        ksne_optimizer_params defaults;
        ksne_optimizer_params_default(&defaults);
        const ksne::JointDistribution joint{p->value};
        ksne::validate_joint(joint);
        const ksne::Trajectory trajectory =
            ksne::run_tsne(joint, {init->value, ksne::Provenance::random}, to_params(params ? *params : defaults));
        auto* result = new ksne_trajectory();
        for (const auto& checkpoint : trajectory.checkpoints) {
            result->iterations.push_back(checkpoint.iteration);
            result->kl.push_back(checkpoint.kl);
            result->embeddings.push_back({checkpoint.embedding.coords});
        }
        *out = result;
    });
}

void ksne_trajectory_free(ksne_trajectory* trajectory) {
    delete trajectory;
}

size_t ksne_trajectory_size(const ksne_trajectory* trajectory) {
    return trajectory ? trajectory->iterations.size() : 0;
}

size_t ksne_trajectory_iteration(const ksne_trajectory* trajectory, size_t index) {
    return trajectory && index < trajectory->iterations.size() ? trajectory->iterations[index] : 0;
}

double ksne_trajectory_kl(const ksne_trajectory* trajectory, size_t index) {
    return trajectory && index < trajectory->kl.size() ? trajectory->kl[index] : 0.0;
}

const ksne_matrix* ksne_trajectory_embedding(const ksne_trajectory* trajectory, size_t index) {
    return trajectory && index < trajectory->embeddings.size() ? &trajectory->embeddings[index] : nullptr;
}

ksne_status ksne_quality_curve(const ksne_matrix* hd_points, const ksne_matrix* ld_points, size_t kmax,
                               double* r_values, double* auc_rnx) {
    return guarded([&] {
        require_handle(hd_points, "hd_points");
        require_handle(ld_points, "ld_points");
        const ksne::QualityCurve curve = ksne::quality_curve(hd_points->value, ld_points->value, kmax);
        if (r_values) {
            std::copy(curve.r_values.begin(), curve.r_values.end(), r_values);
        }
        if (auc_rnx) {
            *auc_rnx = curve.auc_rnx;
        }
    });
}

ksne_status ksne_cmd_embed(const ksne_config* config, ksne_embed_summary* summary) {
    return guarded([&] {
        require_handle(config, "config");
        const ksne::EmbedResult result = ksne::cmd_embed(config->value);
        if (summary) {
            summary->checkpoints = result.series.size();
            summary->final_auc_rnx = result.final_auc;
            summary->best_auc_rnx = result.best_auc;
            summary->best_iteration = result.best_iteration;
            summary->iterations_to_95 = result.iterations_to_95;
            summary->init_seed = result.init_seed;
            summary->ica_converged = result.ica_converged ? 1 : 0;
        }
    });
}

ksne_status ksne_cmd_sweep(const ksne_config* config, const char* kernels, const char* inits,
                           ksne_sweep_report** out) {
    return guarded([&] {
        require_handle(config, "config");
        require_handle(out, "out");
        const auto kernel_list = parse_list<std::vector<ksne::KernelKind>>(kernels, [](const std::string& s) {
            return ksne::parse_kernel_kind(s);
        });
        const auto init_list = parse_list<std::vector<ksne::InitKind>>(inits, [](const std::string& s) {
            return ksne::parse_init_kind(s);
        });
        auto* report = new ksne_sweep_report();
        try {
            report->value = ksne::cmd_sweep(config->value, kernel_list, init_list);
        } catch (...) {
            delete report;
            throw;
        }
        report->table = ksne::render_sweep_table(report->value);
        std::ostringstream csv;
        ksne::write_sweep_csv(csv, report->value);
        report->csv = csv.str();
        *out = report;
    });
}

void ksne_sweep_report_free(ksne_sweep_report* report) {
    delete report;
}

size_t ksne_sweep_report_rows(const ksne_sweep_report* report) {
    return report ? report->value.rows.size() : 0;
}

size_t ksne_sweep_report_failed(const ksne_sweep_report* report) {
    if (!report) {
        return 0;
    }
    std::size_t failed = 0;
    for (const auto& row : report->value.rows) {
        failed += row.ok ? 0 : 1;
    }
    return failed;
}

const char* ksne_sweep_report_table(const ksne_sweep_report* report) {
    return report ? report->table.c_str() : "";
}

const char* ksne_sweep_report_csv(const ksne_sweep_report* report) {
    return report ? report->csv.c_str() : "";
}

ksne_status ksne_cmd_plot(const char* run_dir, const size_t* iterations, size_t count, size_t* files_written) {
    return guarded([&] {
        require_handle(run_dir, "run_dir");
        std::vector<std::size_t> wanted;
        if (iterations) {
            wanted.assign(iterations, iterations + count);
        }
        const auto files = ksne::cmd_plot(run_dir, wanted);
        if (files_written) {
            *files_written = files.size();
        }
    });
}

ksne_status ksne_cmd_ingest(const ksne_config* config, const char* output_path, ksne_ingest_summary* summary) {
    return guarded([&] {
        require_handle(config, "config");
        const auto result = ksne::cmd_ingest(config->value, output_path ? output_path : "");
        if (summary) {
            summary->count = result.count;
            summary->dimension = result.dimension;
            summary->labels = result.label_counts.size();
            const std::size_t n = std::min<std::size_t>(result.alphabet.size(), sizeof(summary->alphabet) - 1);
            std::memcpy(summary->alphabet, result.alphabet.data(), n);
            summary->alphabet[n] = '\0';
        }
    });
}

ksne_status ksne_cmd_featurize(const ksne_config* config, const char* output_path) {
    return guarded([&] {
        require_handle(config, "config");
        require_handle(output_path, "output_path");
        ksne::cmd_featurize(config->value, output_path);
    });
}

ksne_status ksne_cmd_eval(const ksne_config* config, const char* embedding_path, const char* output_path,
                          double* auc_rnx) {
    return guarded([&] {
        require_handle(config, "config");
        require_handle(embedding_path, "embedding_path");
        const auto curve = ksne::cmd_eval(config->value, embedding_path, output_path ? output_path : "");
        if (auc_rnx) {
            *auc_rnx = curve.auc_rnx;
        }
    });
}

}  // extern "C"
