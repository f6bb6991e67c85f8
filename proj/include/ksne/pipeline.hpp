#ifndef KSNE_PIPELINE_HPP
#define KSNE_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ksne/config.hpp"
#include "ksne/error.hpp"
#include "ksne/eval.hpp"
#include "ksne/ingest.hpp"

namespace ksne {

/// An Error tagged with the pipeline stage that raised it
/// (ingest, featurize, kernels, init, optimize, eval, report, plot).
class StageError : public Error {
public:
    StageError(std::string stage, ErrorKind kind, const std::string& message)
        : Error(kind, stage + ": " + message), stage_(std::move(stage)), detail_(message) {}

    const std::string& stage() const { return stage_; }
    const std::string& detail() const { return detail_; }

private:
    std::string stage_;
    std::string detail_;
};

/// 2 for usage, configuration and input errors; 3 for numeric failures.
int exit_code_for(ErrorKind kind);

struct LoadedDataset {
    std::optional<std::vector<SequenceRecord>> records;
    PointDataset points;      ///< raw coordinates or k-mer spectra, row-aligned with ids/labels
    std::string alphabet;     ///< empty for point data
    std::uint64_t source_hash = 0;
};

/// Runs the ingest and featurize stages.
LoadedDataset load_dataset(const RunConfig& config);

/// Seed used by the initializer of one (kernel, init) cell: base + FNV-1a("kernel/init").
std::uint64_t cell_seed(std::uint64_t base, KernelKind kernel, InitKind init);

struct AucPoint {
    std::size_t iteration = 0;
    double auc_rnx = 0.0;
    double kl = 0.0;
};

/// First checkpoint whose AUC reaches final - 0.05 |final|.
std::size_t iterations_to_fraction(const std::vector<AucPoint>& series, double fraction = 0.95);

struct EmbedResult {
    std::filesystem::path run_dir;
    std::vector<AucPoint> series;
    double final_auc = 0.0;
    double best_auc = 0.0;
    std::size_t best_iteration = 0;
    std::size_t iterations_to_95 = 0;
    std::uint64_t init_seed = 0;
    bool ica_converged = true;
};

/**
 * Full pipeline into `config.out`: manifest.json, init.csv,
 * checkpoints/iter_NNNNN.csv, quality/iter_NNNNN.csv, auc.csv and
 * embedding.svg. On failure a FAILED marker naming the stage is written next
 * to whatever was produced and the StageError is rethrown.
 */
EmbedResult cmd_embed(const RunConfig& config);

struct SweepRow {
    KernelKind kernel = KernelKind::gaussian;
    InitKind init = InitKind::random;
    bool ok = false;
    std::string failed_stage;
    std::string message;
    double final_auc = 0.0;
    double best_auc = 0.0;
    std::size_t best_iteration = 0;
    std::size_t iterations_to_95 = 0;
    std::string recommendation;  ///< "recommended", "not recommended" or "-"
};

struct SweepReport {
    std::vector<SweepRow> rows;  ///< grid order: kernels outer, inits inner
};

/// Margin above the worst final AUC within which a cell is "not recommended".
inline constexpr double not_recommended_margin = 0.01;

/// One embed run per (kernel, init) cell under config.out/<kernel>-<init>,
/// sharing a kernel cache; writes sweep.csv and sweep.txt. Cell failures are
/// recorded as rows, not thrown.
SweepReport cmd_sweep(const RunConfig& config, const std::vector<KernelKind>& kernels,
                      const std::vector<InitKind>& inits);

void assign_recommendations(SweepReport& report);
void write_sweep_csv(std::ostream& out, const SweepReport& report);
std::string render_sweep_table(const SweepReport& report);

/// Scatter SVG per requested checkpoint (the last one when empty) plus the
/// AUC chart, written to <run_dir>/plots.
std::vector<std::filesystem::path> cmd_plot(const std::filesystem::path& run_dir,
                                            const std::vector<std::size_t>& iterations = {});

struct IngestSummary {
    std::size_t count = 0;
    std::size_t dimension = 0;
    std::string alphabet;
    std::map<std::string, std::size_t> label_counts;
};

/// Loads (or generates) the dataset, validates it and writes a normalized
/// copy: labeled CSV for sequences, point CSV otherwise.
IngestSummary cmd_ingest(const RunConfig& config, const std::filesystem::path& output);

/// Writes the feature matrix as a point CSV.
void cmd_featurize(const RunConfig& config, const std::filesystem::path& output);

/// Quality curve of an "id,x,y[,label]" embedding CSV against the configured dataset.
QualityCurve cmd_eval(const RunConfig& config, const std::filesystem::path& embedding,
                      const std::filesystem::path& output);

/// Reads "id,x,y[,label]" (labels default to "").
PointDataset read_embedding_csv(const std::filesystem::path& path);

}  // namespace ksne

#endif
