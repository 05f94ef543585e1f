#ifndef PPQKD_EXPERIMENT_H
#define PPQKD_EXPERIMENT_H

#include <string>
#include <vector>

#include "ppqkd/network.h"
#include "ppqkd/serialization.h"

namespace ppqkd {

/// Each non-empty axis overrides the corresponding base value. Cells are the
/// cartesian product in the axis order below, last axis varying fastest.
struct SweepAxes {
    std::vector<double> p_bitflip;
    std::vector<double> p_phaseflip;
    std::vector<double> p_both;
    std::vector<size_t> t;
    std::vector<EveKind> eve;
    std::vector<size_t> tag_length;

    bool empty() const;
};

enum class OutputFormat : uint8_t { Tabular, Structured, Both };

std::string_view format_name(OutputFormat f);
OutputFormat format_from_name(std::string_view name);

struct ExperimentConfig {
    RunConfig run;
    size_t repetitions = 1;
    NoiseModel noise;
    LegSet noise_legs = LegSet::Both;
    EveStrategy eve;
    /// Links Eve attacks; empty means every link.
    std::vector<size_t> eve_links;
    size_t leaves = 1;
    SweepAxes sweep;
    std::string output_dir = "results";
    OutputFormat format = OutputFormat::Both;
    unsigned threads = 1;

    /// Checks every sweep cell too. Throws ConfigError.
    void validate() const;
    ExperimentConfig without_sweep() const;
};

ExperimentConfig experiment_from_json(const json &j);
/// Output location and thread count are left out: they do not affect results.
json to_json(const ExperimentConfig &config);

struct CellParams {
    NoiseModel noise;
    size_t t = 1;
    EveKind eve = EveKind::Absent;
    size_t tag_length = 0;
};

std::vector<CellParams> sweep_cells(const ExperimentConfig &config);

/// The concrete session inputs for one repetition of one cell.
RunConfig cell_run_config(const ExperimentConfig &config, const CellParams &cell, size_t cell_index, size_t repetition);
Topology cell_topology(const ExperimentConfig &config, const CellParams &cell);

struct Rate {
    size_t hits = 0;
    size_t samples = 0;

    double value() const { return samples ? (double)hits / (double)samples : 0.0; }
    /// Binomial standard error sqrt(r (1 - r) / n).
    double std_error() const;
    void add(size_t h, size_t n) {
        hits += h;
        samples += n;
    }
};

struct CellStatistics {
    size_t index = 0;
    CellParams params;
    size_t runs = 0;
    size_t link_sessions = 0;
    /// Decoded message bits differing from Bob's m (V2: non-erased bits only).
    Rate qber;
    /// Qubits whose measured bit differs from sent bit xor Bob's operation.
    Rate qubit_error;
    /// Link sessions whose final key equals Bob's.
    Rate agreement;
    /// Link sessions aborted by the tag check.
    Rate detection;
    /// V2 erased blocks.
    Rate erasure;
    /// Decoded positions that are wrong, erased or tied.
    Rate block_error;
    Rate tag_mismatch;
    /// V3 tied columns.
    Rate tie;
    size_t no_pivot = 0;
};

struct RunStatistics {
    size_t repetitions = 0;
    std::vector<CellStatistics> cells;
};

/// Folds one finished session into a cell's counters.
void accumulate(CellStatistics &cell, const StarSessionResult &session, const RunConfig &config);

/// Runs repetitions x cells sessions. Cells may run on config.threads
/// workers; results depend only on the config.
RunStatistics run_experiment(const ExperimentConfig &config);

/// The session for cell 0, repetition 0, as a transcript that embeds the
/// experiment config so it can be replayed.
json first_session_transcript(const ExperimentConfig &config);

std::string results_csv(const RunStatistics &stats);
json results_summary(const RunStatistics &stats, const ExperimentConfig &config);

/// Writes results.csv and/or summary.json into `dir` (created if needed).
/// Throws std::runtime_error when a file cannot be written.
std::vector<std::string> emit_results(const RunStatistics &stats, const ExperimentConfig &config,
                                      const std::string &dir, OutputFormat format);

}  // namespace ppqkd

#endif
