#include "ksvm/eval.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "ksvm/attack.hpp"
#include "ksvm/io.hpp"

namespace ksvm {

const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Epsilon: return "epsilon";
        case SweepParameter::Gamma: return "gamma";
        case SweepParameter::PolyDegreeAndP: return "degree_p";
    }
    return "?";
}

void SweepSpec::validate() const {
    if (parameter == SweepParameter::PolyDegreeAndP) {
        if (degree_p_grid.empty())
            throw InvalidInput("sweep needs at least one (degree, p) setting");
    } else if (values.empty()) {
        throw InvalidInput("sweep needs at least one value");
    }
    if (eval_set.empty()) throw InvalidInput("sweep eval set is empty");
}

namespace {

/// Shorter than format_g17, for human-facing setting labels.
std::string fmt_setting(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

SampleRecord attack_one(const SvmModel& model, const Dataset& eval_set, Index i,
                        const AttackConfig& cfg, const Dataset& seeds) {
    const Sample& s = eval_set[i];
    SampleRecord rec;
    rec.index = i;
    rec.label = s.label;
    rec.predicted_before = predicted_label(model, s.features);
    rec.predicted_after = rec.predicted_before;
    try {
        const AttackResult res = attack_sample(model, s.features, cfg, seeds);
        rec.predicted_after = predicted_label(model, s.features + res.perturbation);
        rec.flipped = res.flipped;
        rec.perturbation_norm = res.perturbation_norm;
        rec.residual = res.residual_norm;
        rec.iterations = res.iterations;
        rec.restarts = res.restarts_used;
    } catch (const AttackFailure& e) {
        const AttackResult& best = e.best_result();
        rec.failed = true;
        rec.note = e.what();
        rec.perturbation_norm = best.perturbation_norm;
        rec.residual = best.residual_norm;
        rec.iterations = best.iterations;
        rec.restarts = best.restarts_used;
        if (best.perturbation.size() == s.features.size())
            rec.predicted_after = predicted_label(model, s.features + best.perturbation);
    } catch (const Error& e) {
        rec.failed = true;
        rec.note = e.what();
    }
    return rec;
}

} // namespace

FoolingReport fooling_rate(const SvmModel& model, const Dataset& eval_set,
                           const AttackConfig& cfg, int jobs, const Dataset* seed_set) {
    if (eval_set.empty()) throw InvalidInput("eval set is empty");
    if (eval_set.dimension() != model.dimension())
        throw DimensionError("eval set dimension " + std::to_string(eval_set.dimension()) +
                             " does not match model dimension " +
                             std::to_string(model.dimension()));
    cfg.validate();
    const Dataset& seeds = seed_set != nullptr ? *seed_set : eval_set;

    const Index m = eval_set.size();
    std::vector<SampleRecord> records(static_cast<size_t>(m));
    const int workers = std::min<Index>(std::max(jobs, 1), m);
    if (workers <= 1) {
        for (Index i = 0; i < m; ++i) records[static_cast<size_t>(i)] = attack_one(model, eval_set, i, cfg, seeds);
    } else {
        std::atomic<Index> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto work = [&] {
            for (;;) {
                const Index i = next.fetch_add(1);
                if (i >= m) return;
                try {
                    records[static_cast<size_t>(i)] = attack_one(model, eval_set, i, cfg, seeds);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    FoolingReport report;
    double norm_sum = 0.0;
    double iter_sum = 0.0;
    for (const auto& rec : records) {
        if (rec.flipped) ++report.flipped_count;
        if (rec.failed) ++report.failed_count;
        else norm_sum += rec.perturbation_norm;
        iter_sum += rec.iterations;
    }
    const Index ok = m - report.failed_count;
    report.rate = static_cast<double>(report.flipped_count) / static_cast<double>(m);
    report.mean_norm = ok > 0 ? norm_sum / static_cast<double>(ok) : 0.0;
    report.mean_iterations = iter_sum / static_cast<double>(m);
    report.records = std::move(records);
    return report;
}

SweepResult run_sweep(const SweepSpec& spec, const KernelSpec& base_kernel,
                      const Dataset& train_set, const AttackConfig& cfg,
                      const TrainConfig& tcfg, int jobs) {
    spec.validate();
    base_kernel.validate();
    cfg.validate();
    tcfg.validate();

    // settings as (label, raw values)
    struct Setting {
        std::string label;
        std::vector<double> raw;
    };
    std::vector<Setting> settings;
    if (spec.parameter == SweepParameter::PolyDegreeAndP) {
        for (const auto& [degree, p] : spec.degree_p_grid)
            settings.push_back({"degree=" + fmt_setting(degree) + ",p=" + fmt_setting(p),
                                {degree, p}});
    } else {
        for (double v : spec.values)
            settings.push_back({std::string(to_string(spec.parameter)) + "=" + fmt_setting(v),
                                {v}});
    }

    // Epsilon keeps one model for every setting; kernel-parameter sweeps
    // retrain per setting regardless of spec.retrain.
    SvmModel shared_model;
    bool shared_ready = false;
    std::string shared_error;
    if (spec.parameter == SweepParameter::Epsilon) {
        try {
            shared_model = train(train_set, base_kernel, tcfg);
            shared_ready = true;
        } catch (const Error& e) {
            shared_error = e.what();
        }
    }

    SweepResult result;
    for (const auto& setting : settings) {
        SweepRow row;
        row.setting = setting.label;
        row.setting_values = setting.raw;
        row.total = spec.eval_set.size();
        FoolingReport report;
        try {
            AttackConfig attack_cfg = cfg;
            SvmModel local_model;
            const SvmModel* model = nullptr;
            switch (spec.parameter) {
                case SweepParameter::Epsilon:
                    if (!shared_ready) throw InvalidInput("training failed: " + shared_error);
                    attack_cfg.epsilon = setting.raw[0];
                    model = &shared_model;
                    break;
                case SweepParameter::Gamma:
                    local_model = train(train_set, KernelSpec::rbf(setting.raw[0]), tcfg);
                    model = &local_model;
                    break;
                case SweepParameter::PolyDegreeAndP:
                    local_model = train(
                        train_set,
                        KernelSpec::polynomial(setting.raw[1], base_kernel.offset_a,
                                               setting.raw[0]),
                        tcfg);
                    model = &local_model;
                    break;
            }
            report = fooling_rate(*model, spec.eval_set, attack_cfg, jobs, &train_set);
            row.fooling_rate = report.rate;
            row.mean_norm = report.mean_norm;
            row.mean_iterations = report.mean_iterations;
            row.flipped = report.flipped_count;
            row.failed = report.failed_count;
        } catch (const Error& e) {
            row.error = e.what();
        }
        result.rows.push_back(std::move(row));
        result.reports.push_back(std::move(report));
    }
    return result;
}

std::vector<std::vector<std::string>> fooling_csv_rows(const FoolingReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"index", "label", "predicted_before", "predicted_after", "flipped",
                    "failed", "perturbation_norm", "residual", "iterations", "restarts",
                    "note"});
    for (const auto& rec : report.records)
        rows.push_back({std::to_string(rec.index), std::to_string(rec.label),
                        std::to_string(rec.predicted_before),
                        std::to_string(rec.predicted_after), rec.flipped ? "1" : "0",
                        rec.failed ? "1" : "0", format_g17(rec.perturbation_norm),
                        format_g17(rec.residual), std::to_string(rec.iterations),
                        std::to_string(rec.restarts), rec.note});
    return rows;
}

std::vector<std::vector<std::string>> sweep_csv_rows(const SweepResult& result) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"setting", "fooling_rate", "mean_perturbation_norm", "mean_iterations",
                    "flipped", "failed", "total", "error"});
    for (const auto& row : result.rows)
        rows.push_back({row.setting, format_g17(row.fooling_rate), format_g17(row.mean_norm),
                        format_g17(row.mean_iterations), std::to_string(row.flipped),
                        std::to_string(row.failed), std::to_string(row.total), row.error});
    return rows;
}

} // namespace ksvm
