#ifndef KSVM_EVAL_HPP
#define KSVM_EVAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "ksvm/trainer.hpp"
#include "ksvm/types.hpp"

namespace ksvm {

/// Outcome of attacking one evaluation sample. A failure (no converged
/// solve) counts as non-flipped and keeps the best iterate's numbers plus a
/// diagnostic note.
struct SampleRecord {
    Index index = -1;
    int label = 0;
    int predicted_before = 0;
    int predicted_after = 0;
    bool flipped = false;
    bool failed = false;
    double perturbation_norm = 0.0;
    double residual = 0.0;
    int iterations = 0;
    int restarts = 0;
    std::string note; // failure diagnostic, empty on success
};

struct FoolingReport {
    double rate = 0.0; // (#flipped) / (#samples)
    Index flipped_count = 0;
    Index failed_count = 0;
    double mean_norm = 0.0;       // mean ||r|| over non-failed samples
    double mean_iterations = 0.0; // over all samples
    std::vector<SampleRecord> records;
};

/// Attack every sample of eval_set and count prediction flips. Per-sample
/// failures are recorded, never thrown. Seeds for each attack come from
/// seed_set when given, otherwise from eval_set itself. jobs > 1 attacks
/// samples on a bounded worker pool; records are merged in input order, so
/// the result is identical to a serial run.
FoolingReport fooling_rate(const SvmModel& model, const Dataset& eval_set,
                           const AttackConfig& cfg, int jobs = 1,
                           const Dataset* seed_set = nullptr);

enum class SweepParameter { Epsilon, Gamma, PolyDegreeAndP };

const char* to_string(SweepParameter p);

/// One parameter study. Epsilon sweeps reuse a single trained model; Gamma
/// and PolyDegreeAndP sweeps retrain per setting (the retrain flag is forced
/// on for them).
struct SweepSpec {
    SweepParameter parameter = SweepParameter::Epsilon;
    std::vector<double> values;                            // Epsilon / Gamma settings
    std::vector<std::pair<double, double>> degree_p_grid;  // (degree, p) settings
    Dataset eval_set;
    bool retrain = false;

    void validate() const;
};

struct SweepRow {
    std::string setting;               // printable, e.g. "gamma=0.001"
    std::vector<double> setting_values; // raw numbers behind the label
    double fooling_rate = 0.0;
    double mean_norm = 0.0;
    double mean_iterations = 0.0;
    Index flipped = 0;
    Index failed = 0;
    Index total = 0;
    std::string error; // per-setting training/config failure, empty when ok
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<FoolingReport> reports; // parallel to rows; empty report on error
};

/// Run the sweep: per setting, train as the spec dictates (Gamma settings
/// build an rbf kernel, PolyDegreeAndP builds polynomial kernels sharing
/// base_kernel's offset, Epsilon keeps base_kernel and varies only the
/// attack margin), then measure the fooling rate over spec.eval_set with
/// seeds drawn from train_set. Per-setting failures land in the row's error
/// column; the sweep continues.
SweepResult run_sweep(const SweepSpec& spec, const KernelSpec& base_kernel,
                      const Dataset& train_set, const AttackConfig& cfg,
                      const TrainConfig& tcfg, int jobs = 1);

/// CSV row builders (header row first) shared by the CLI and tests.
std::vector<std::vector<std::string>> fooling_csv_rows(const FoolingReport& report);
std::vector<std::vector<std::string>> sweep_csv_rows(const SweepResult& result);

} // namespace ksvm

#endif
