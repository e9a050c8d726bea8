// Command-line front end: train / attack / eval / sweep / render.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error (unknown flag, bad
// value), 3 missing or unreadable file, 4 dimension mismatch.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ksvm/attack.hpp"
#include "ksvm/eval.hpp"
#include "ksvm/io.hpp"
#include "ksvm/kkt.hpp"
#include "ksvm/trainer.hpp"
#include "ksvm/types.hpp"

using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// JSON serialization with pinned number formatting: every finite double is
// printed with 17 significant digits so outputs are byte-identical across
// runs and exactly re-parseable.

void dump_json(const json& j, std::string& out, int depth) {
    const std::string pad(static_cast<size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            size_t k = 0;
            for (auto it = j.begin(); it != j.end(); ++it, ++k) {
                out += pad_in + json(it.key()).dump() + ": ";
                dump_json(it.value(), out, depth + 1);
                if (k + 1 < j.size()) out += ',';
                out += '\n';
            }
            out += pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (size_t k = 0; k < j.size(); ++k) {
                out += pad_in;
                dump_json(j[k], out, depth + 1);
                if (k + 1 < j.size()) out += ',';
                out += '\n';
            }
            out += pad + "]";
            return;
        }
        case json::value_t::number_float:
            out += ksvm::format_g17(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

std::string dump_json(const json& j) {
    std::string out;
    dump_json(j, out, 0);
    out += '\n';
    return out;
}

// ---------------------------------------------------------------------------
// shared flag bundles

struct DataFlags {
    std::string libsvm;
    std::string idx_images;
    std::string idx_labels;
    std::string cifar;
    int pos = 0;
    int neg = 1;
    bool no_scale = false;
    long long dimension = 0;
};

void add_data_flags(CLI::App* cmd, DataFlags& f, const std::string& what) {
    cmd->add_option("--data", f.libsvm, "libsvm-format text file (" + what + ")");
    cmd->add_option("--idx-images", f.idx_images, "IDX image file (" + what + ")");
    cmd->add_option("--idx-labels", f.idx_labels, "IDX label file matching --idx-images");
    cmd->add_option("--cifar", f.cifar, "CIFAR-10 binary batch file (" + what + ")");
    cmd->add_option("--pos", f.pos, "class id mapped to label +1 (IDX/CIFAR)");
    cmd->add_option("--neg", f.neg, "class id mapped to label -1 (IDX/CIFAR)");
    cmd->add_flag("--no-scale", f.no_scale, "keep raw 0-255 pixel values (IDX/CIFAR)");
    cmd->add_option("--dimension", f.dimension,
                    "declared feature dimension for libsvm data (default: largest index)");
}

bool has_data_source(const DataFlags& f) {
    return !f.libsvm.empty() || !f.idx_images.empty() || !f.cifar.empty();
}

ksvm::Dataset load_data(const DataFlags& f) {
    const int sources = int(!f.libsvm.empty()) + int(!f.idx_images.empty() || !f.idx_labels.empty()) +
                        int(!f.cifar.empty());
    if (sources != 1)
        throw ksvm::InvalidInput(
            "specify exactly one data source: --data, --idx-images/--idx-labels, or --cifar");
    if (!f.libsvm.empty())
        return ksvm::read_libsvm_data(ksvm::read_file(f.libsvm),
                                      static_cast<ksvm::Index>(f.dimension));
    if (!f.idx_images.empty() || !f.idx_labels.empty()) {
        if (f.idx_images.empty() || f.idx_labels.empty())
            throw ksvm::InvalidInput("--idx-images and --idx-labels must be given together");
        return ksvm::read_idx(ksvm::read_file(f.idx_images), ksvm::read_file(f.idx_labels),
                              f.pos, f.neg, !f.no_scale);
    }
    return ksvm::read_cifar_bin(ksvm::read_file(f.cifar), f.pos, f.neg, !f.no_scale);
}

std::string data_source_name(const DataFlags& f) {
    if (!f.libsvm.empty()) return f.libsvm;
    if (!f.idx_images.empty()) return f.idx_images + "+" + f.idx_labels;
    return f.cifar;
}

struct AttackFlags {
    ksvm::AttackConfig cfg;
    bool calibrate = false;
};

void add_attack_flags(CLI::App* cmd, AttackFlags& f) {
    cmd->add_option("--epsilon", f.cfg.epsilon, "margin pushed past the boundary")
        ->capture_default_str();
    cmd->add_option("--tol", f.cfg.residual_tol, "residual inf-norm convergence tolerance")
        ->capture_default_str();
    cmd->add_option("--max-iterations", f.cfg.max_iterations, "solver iteration budget")
        ->capture_default_str();
    cmd->add_option("--max-restarts", f.cfg.max_restarts, "extra starts after the first")
        ->capture_default_str();
    cmd->add_option("--mu-init", f.cfg.mu_init, "initial multiplier variable")
        ->capture_default_str();
    cmd->add_option("--step-scale", f.cfg.step_init_scale, "shrink factor for the first seed")
        ->capture_default_str();
}

struct KernelFlags {
    std::string family = "linear";
    double gamma = 1.0;
    double p = 1.0;
    double a = 0.0;
    double degree = 3.0;
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& f) {
    cmd->add_option("--kernel", f.family, "linear | rbf | polynomial")
        ->check(CLI::IsMember({"linear", "rbf", "polynomial"}))
        ->capture_default_str();
    cmd->add_option("--gamma", f.gamma, "rbf width")->capture_default_str();
    cmd->add_option("--p", f.p, "polynomial inner-product scale")->capture_default_str();
    cmd->add_option("--a", f.a, "polynomial offset")->capture_default_str();
    cmd->add_option("--degree", f.degree, "polynomial degree")->capture_default_str();
}

ksvm::KernelSpec make_kernel(const KernelFlags& f) {
    if (f.family == "rbf") return ksvm::KernelSpec::rbf(f.gamma);
    if (f.family == "polynomial") return ksvm::KernelSpec::polynomial(f.p, f.a, f.degree);
    return ksvm::KernelSpec::linear();
}

struct TrainFlags {
    ksvm::TrainConfig cfg;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--c", f.cfg.c_penalty, "box penalty C")->capture_default_str();
    cmd->add_option("--kkt-tol", f.cfg.kkt_tol, "dual optimality gap at which training stops")
        ->capture_default_str();
    cmd->add_option("--max-passes", f.cfg.max_passes, "pairwise update budget")
        ->capture_default_str();
}

// ---------------------------------------------------------------------------
// JSON fragments

json kernel_json(const ksvm::KernelSpec& k) {
    json j;
    switch (k.family) {
        case ksvm::KernelFamily::Linear:
            j["family"] = "linear";
            break;
        case ksvm::KernelFamily::Rbf:
            j["family"] = "rbf";
            j["gamma"] = k.gamma;
            break;
        case ksvm::KernelFamily::Polynomial:
            j["family"] = "polynomial";
            j["p"] = k.scale_p;
            j["a"] = k.offset_a;
            j["degree"] = k.degree;
            break;
    }
    return j;
}

json model_json(const ksvm::SvmModel& model, const std::string& path,
                const std::string& hash) {
    json j;
    j["path"] = path;
    j["hash"] = hash;
    j["kernel"] = kernel_json(model.kernel);
    j["dimension"] = model.dimension();
    j["support_vectors"] = model.num_support_vectors();
    j["bias"] = model.bias;
    return j;
}

json attack_config_json(const ksvm::AttackConfig& cfg, bool calibrated) {
    json j;
    j["epsilon"] = cfg.epsilon;
    j["epsilon_calibrated"] = calibrated;
    j["residual_tol"] = cfg.residual_tol;
    j["max_iterations"] = cfg.max_iterations;
    j["max_restarts"] = cfg.max_restarts;
    j["mu_init"] = cfg.mu_init;
    j["step_init_scale"] = cfg.step_init_scale;
    return j;
}

json dataset_json(const ksvm::Dataset& data, const std::string& source) {
    json j;
    j["source"] = source;
    j["fingerprint"] = ksvm::dataset_fingerprint(data);
    j["size"] = data.size();
    j["dimension"] = data.dimension();
    return j;
}

json records_json(const std::vector<ksvm::SampleRecord>& records) {
    json arr = json::array();
    for (const auto& rec : records) {
        json r;
        r["index"] = rec.index;
        r["label"] = rec.label;
        r["predicted_before"] = rec.predicted_before;
        r["predicted_after"] = rec.predicted_after;
        r["flipped"] = rec.flipped;
        r["failed"] = rec.failed;
        r["perturbation_norm"] = rec.perturbation_norm;
        r["residual"] = rec.residual;
        r["iterations"] = rec.iterations;
        r["restarts"] = rec.restarts;
        r["note"] = rec.note;
        arr.push_back(std::move(r));
    }
    return arr;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        ksvm::write_file(out_path, text);
}

ksvm::SvmModel load_model(const std::string& path, std::string& hash_out) {
    const std::string bytes = ksvm::read_file(path);
    hash_out = ksvm::hex64(ksvm::fnv1a64(bytes.data(), bytes.size()));
    return ksvm::parse_model(bytes);
}

int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// ---------------------------------------------------------------------------
// commands

struct TrainCmd {
    DataFlags data;
    KernelFlags kernel;
    TrainFlags train;
    long long seed = 0;
    std::string out;

    int run() const {
        ksvm::TrainConfig cfg = train.cfg;
        cfg.seed = seed;
        const ksvm::Dataset dataset = load_data(data);
        const ksvm::KernelSpec spec = make_kernel(kernel);
        const ksvm::SvmModel model = ksvm::train(dataset, spec, cfg);
        const std::string text = ksvm::write_model(model);
        ksvm::write_file(out, text);

        json j;
        j["command"] = "train";
        j["seed"] = seed;
        json tc;
        tc["c_penalty"] = cfg.c_penalty;
        tc["kkt_tol"] = cfg.kkt_tol;
        tc["max_passes"] = cfg.max_passes;
        j["config"] = tc;
        j["kernel"] = kernel_json(spec);
        j["data"] = dataset_json(dataset, data_source_name(data));
        j["model"] = model_json(model, out, ksvm::hex64(ksvm::fnv1a64(text.data(), text.size())));
        std::cout << dump_json(j);
        return 0;
    }
};

struct AttackCmd {
    std::string model_path;
    std::string input_path;
    DataFlags data;
    long long index = 0;
    std::string seeds_path;
    AttackFlags attack;
    bool oracle_linear = false;
    std::string render_out;
    long long render_width = 0, render_height = 0, render_channels = 1;
    std::string render_mode = "minmax";
    long long seed = 0;
    std::string out;
    bool have_input_flag = false;

    int run() const {
        std::string model_hash;
        const ksvm::SvmModel model = load_model(model_path, model_hash);

        // the probe vector
        ksvm::Vector x_hat;
        std::string input_source;
        ksvm::Dataset dataset;
        bool have_dataset = false;
        if (have_input_flag) {
            x_hat = ksvm::parse_vector_line(ksvm::read_file(input_path), model.dimension());
            input_source = input_path;
        } else if (has_data_source(data)) {
            dataset = load_data(data);
            have_dataset = true;
            if (index < 0 || index >= dataset.size())
                throw ksvm::InvalidInput("--index " + std::to_string(index) +
                                         " is out of range for " + std::to_string(dataset.size()) +
                                         " samples");
            x_hat = dataset[static_cast<ksvm::Index>(index)].features;
            input_source = data_source_name(data) + "[" + std::to_string(index) + "]";
        } else {
            throw ksvm::InvalidInput("attack needs --input or a dataset source with --index");
        }

        // seeding set: --seeds wins, then the dataset the probe came from
        ksvm::Dataset seeds;
        if (!seeds_path.empty())
            seeds = ksvm::read_libsvm_data(ksvm::read_file(seeds_path), model.dimension());
        else if (have_dataset)
            seeds = dataset;

        ksvm::AttackConfig cfg = attack.cfg;
        const double dv = ksvm::decision_value(model, x_hat);
        const ksvm::Branch branch = ksvm::branch_for(dv);
        if (attack.calibrate) {
            if (seeds.empty())
                throw ksvm::InvalidInput("--calibrate needs a dataset (--seeds or --data)");
            cfg.epsilon = ksvm::calibrate_epsilon(model, seeds, branch);
        }

        json j;
        j["command"] = "attack";
        j["seed"] = seed;
        j["config"] = attack_config_json(cfg, attack.calibrate);
        j["model"] = model_json(model, model_path, model_hash);
        json in;
        in["source"] = input_source;
        in["decision_value"] = dv;
        in["predicted_label"] = ksvm::sign_pm(dv);
        in["branch"] = ksvm::to_string(branch);
        j["input"] = in;

        ksvm::AttackResult result;
        std::string error;
        try {
            result = ksvm::attack_sample(model, x_hat, cfg, seeds);
        } catch (const ksvm::AttackFailure& e) {
            result = e.best_result();
            error = e.what();
        }

        const double dv_after = ksvm::decision_value(model, x_hat + result.perturbation);
        json res;
        res["flipped"] = result.flipped;
        res["converged"] = error.empty();
        res["multiplier"] = result.multiplier;
        res["perturbation_norm"] = result.perturbation_norm;
        res["residual_norm"] = result.residual_norm;
        res["iterations"] = result.iterations;
        res["restarts_used"] = result.restarts_used;
        res["decision_value_after"] = dv_after;
        res["predicted_label_after"] = ksvm::sign_pm(dv_after);
        json pert = json::array();
        for (ksvm::Index i = 0; i < result.perturbation.size(); ++i)
            pert.push_back(result.perturbation[i]);
        res["perturbation"] = std::move(pert);
        j["result"] = std::move(res);

        if (oracle_linear) {
            const ksvm::Vector closed = ksvm::closed_form_linear(model, x_hat, cfg.epsilon);
            json oracle;
            oracle["gap_inf"] = (result.perturbation - closed).lpNorm<Eigen::Infinity>();
            oracle["closed_form_norm"] = closed.norm();
            j["oracle_linear"] = std::move(oracle);
        }
        if (!error.empty()) j["error"] = error;

        emit(dump_json(j), out);

        if (!render_out.empty()) {
            const ksvm::RenderMode mode =
                render_mode == "signed" ? ksvm::RenderMode::Signed : ksvm::RenderMode::MinMax;
            ksvm::write_file(render_out,
                             ksvm::render_image(result.perturbation,
                                                static_cast<int>(render_width),
                                                static_cast<int>(render_height),
                                                static_cast<int>(render_channels), mode));
        }
        if (!error.empty()) {
            std::cerr << "attack failed: " << error << "\n";
            return 1;
        }
        return 0;
    }
};

struct EvalCmd {
    std::string model_path;
    DataFlags data;
    std::string seeds_path;
    AttackFlags attack;
    int jobs = default_jobs();
    long long seed = 0;
    std::string out;
    std::string manifest;

    int run() const {
        std::string model_hash;
        const ksvm::SvmModel model = load_model(model_path, model_hash);
        const ksvm::Dataset eval_set = load_data(data);
        ksvm::Dataset seeds;
        const bool have_seeds = !seeds_path.empty();
        if (have_seeds)
            seeds = ksvm::read_libsvm_data(ksvm::read_file(seeds_path), model.dimension());

        ksvm::AttackConfig cfg = attack.cfg;
        if (attack.calibrate) {
            const ksvm::Dataset& cal = have_seeds ? seeds : eval_set;
            // calibrate against the branch most samples will take: use the
            // positive branch unless every sample is predicted negative
            ksvm::Index pos = 0;
            for (ksvm::Index i = 0; i < eval_set.size(); ++i)
                if (ksvm::predicted_label(model, eval_set[i].features) > 0) ++pos;
            const ksvm::Branch branch =
                pos > 0 ? ksvm::Branch::Positive : ksvm::Branch::Negative;
            cfg.epsilon = ksvm::calibrate_epsilon(model, cal, branch);
        }

        const ksvm::FoolingReport report =
            ksvm::fooling_rate(model, eval_set, cfg, jobs, have_seeds ? &seeds : nullptr);

        emit(ksvm::write_csv(ksvm::fooling_csv_rows(report)), out);

        if (!manifest.empty()) {
            json j;
            j["command"] = "eval";
            j["seed"] = seed;
            j["jobs"] = jobs;
            j["config"] = attack_config_json(cfg, attack.calibrate);
            j["model"] = model_json(model, model_path, model_hash);
            j["eval_set"] = dataset_json(eval_set, data_source_name(data));
            j["seed_set"] = have_seeds ? dataset_json(seeds, seeds_path) : json(nullptr);
            json agg;
            agg["fooling_rate"] = report.rate;
            agg["flipped"] = report.flipped_count;
            agg["failed"] = report.failed_count;
            agg["mean_perturbation_norm"] = report.mean_norm;
            agg["mean_iterations"] = report.mean_iterations;
            j["aggregate"] = std::move(agg);
            j["records"] = records_json(report.records);
            ksvm::write_file(manifest, dump_json(j));
        }
        return 0;
    }
};

struct SweepCmd {
    std::string param = "epsilon";
    std::vector<double> values;
    std::vector<std::string> grid;
    std::string train_path;
    std::string eval_path;
    long long dimension = 0;
    KernelFlags kernel;
    TrainFlags train;
    AttackFlags attack;
    int jobs = default_jobs();
    long long seed = 0;
    std::string out;
    std::string manifest;

    int run() const {
        ksvm::SweepSpec spec;
        if (param == "epsilon") spec.parameter = ksvm::SweepParameter::Epsilon;
        else if (param == "gamma") spec.parameter = ksvm::SweepParameter::Gamma;
        else spec.parameter = ksvm::SweepParameter::PolyDegreeAndP;
        spec.values = values;
        for (const auto& cell : grid) {
            const size_t colon = cell.find(':');
            if (colon == std::string::npos)
                throw ksvm::InvalidInput("--grid entries look like degree:p, got '" + cell + "'");
            spec.degree_p_grid.emplace_back(std::stod(cell.substr(0, colon)),
                                            std::stod(cell.substr(colon + 1)));
        }
        spec.retrain = spec.parameter != ksvm::SweepParameter::Epsilon;

        const ksvm::Dataset train_set = ksvm::read_libsvm_data(
            ksvm::read_file(train_path), static_cast<ksvm::Index>(dimension));
        if (eval_path.empty() || eval_path == train_path) {
            spec.eval_set = train_set;
        } else {
            spec.eval_set = ksvm::read_libsvm_data(ksvm::read_file(eval_path),
                                                   train_set.dimension());
        }

        ksvm::TrainConfig tcfg = train.cfg;
        tcfg.seed = seed;
        const ksvm::KernelSpec base = make_kernel(kernel);
        const ksvm::SweepResult result =
            ksvm::run_sweep(spec, base, train_set, attack.cfg, tcfg, jobs);

        emit(ksvm::write_csv(ksvm::sweep_csv_rows(result)), out);

        if (!manifest.empty()) {
            json j;
            j["command"] = "sweep";
            j["seed"] = seed;
            j["jobs"] = jobs;
            j["parameter"] = ksvm::to_string(spec.parameter);
            j["config"] = attack_config_json(attack.cfg, false);
            json tc;
            tc["c_penalty"] = tcfg.c_penalty;
            tc["kkt_tol"] = tcfg.kkt_tol;
            tc["max_passes"] = tcfg.max_passes;
            j["train_config"] = tc;
            j["base_kernel"] = kernel_json(base);
            j["train_set"] = dataset_json(train_set, train_path);
            j["eval_set"] = dataset_json(spec.eval_set,
                                         eval_path.empty() ? train_path : eval_path);
            json rows = json::array();
            for (size_t k = 0; k < result.rows.size(); ++k) {
                const auto& row = result.rows[k];
                json r;
                r["setting"] = row.setting;
                r["setting_values"] = row.setting_values;
                r["fooling_rate"] = row.fooling_rate;
                r["mean_perturbation_norm"] = row.mean_norm;
                r["mean_iterations"] = row.mean_iterations;
                r["flipped"] = row.flipped;
                r["failed"] = row.failed;
                r["total"] = row.total;
                r["error"] = row.error;
                r["records"] = records_json(result.reports[k].records);
                rows.push_back(std::move(r));
            }
            j["rows"] = std::move(rows);
            ksvm::write_file(manifest, dump_json(j));
        }
        return 0;
    }
};

struct RenderCmd {
    std::string input_path;
    long long width = 0, height = 0, channels = 1;
    std::string mode = "minmax";
    std::string out;

    int run() const {
        const ksvm::Vector v = ksvm::parse_vector_line(
            ksvm::read_file(input_path),
            static_cast<ksvm::Index>(width * height * channels));
        const ksvm::RenderMode m =
            mode == "signed" ? ksvm::RenderMode::Signed : ksvm::RenderMode::MinMax;
        ksvm::write_file(out, ksvm::render_image(v, static_cast<int>(width),
                                                 static_cast<int>(height),
                                                 static_cast<int>(channels), m));
        return 0;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimal-norm adversarial perturbations against binary kernel SVMs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML config file; flags override its values");

    TrainCmd train_cmd;
    AttackCmd attack_cmd;
    EvalCmd eval_cmd;
    SweepCmd sweep_cmd;
    RenderCmd render_cmd;

    // train
    CLI::App* t = app.add_subcommand("train", "Train a binary kernel SVM, write a model file");
    add_data_flags(t, train_cmd.data, "training set");
    add_kernel_flags(t, train_cmd.kernel);
    add_train_flags(t, train_cmd.train);
    t->add_option("--seed", train_cmd.seed, "run seed, echoed into outputs")
        ->capture_default_str();
    t->add_option("--out", train_cmd.out, "model file to write")->required();

    // attack
    CLI::App* a = app.add_subcommand("attack", "Compute the minimal perturbation for one sample");
    a->add_option("--model", attack_cmd.model_path, "model file")->required();
    CLI::Option* input_opt =
        a->add_option("--input", attack_cmd.input_path,
                      "probe vector file (libsvm sparse line or dense CSV row)");
    add_data_flags(a, attack_cmd.data, "probe source");
    a->add_option("--index", attack_cmd.index, "sample picked from the dataset")
        ->capture_default_str();
    a->add_option("--seeds", attack_cmd.seeds_path, "libsvm data file used for start points");
    add_attack_flags(a, attack_cmd.attack);
    a->add_flag("--calibrate", attack_cmd.attack.calibrate,
                "derive epsilon from the seed dataset instead of --epsilon");
    a->add_flag("--oracle-linear", attack_cmd.oracle_linear,
                "report the gap to the closed-form linear solution");
    a->add_option("--render-out", attack_cmd.render_out, "write the perturbation as PGM/PPM");
    a->add_option("--render-width", attack_cmd.render_width, "image width");
    a->add_option("--render-height", attack_cmd.render_height, "image height");
    a->add_option("--render-channels", attack_cmd.render_channels, "1 (PGM) or 3 (PPM)")
        ->capture_default_str();
    a->add_option("--render-mode", attack_cmd.render_mode, "minmax | signed")
        ->check(CLI::IsMember({"minmax", "signed"}))
        ->capture_default_str();
    a->add_option("--seed", attack_cmd.seed, "run seed, echoed into outputs")
        ->capture_default_str();
    a->add_option("--out", attack_cmd.out, "result JSON path (default: stdout)");

    // eval
    CLI::App* e = app.add_subcommand("eval", "Attack a whole dataset, report the fooling rate");
    e->add_option("--model", eval_cmd.model_path, "model file")->required();
    add_data_flags(e, eval_cmd.data, "evaluation set");
    e->add_option("--seeds", eval_cmd.seeds_path,
                  "libsvm data file used for start points (default: the eval set)");
    add_attack_flags(e, eval_cmd.attack);
    e->add_flag("--calibrate", eval_cmd.attack.calibrate,
                "derive epsilon from the seed dataset instead of --epsilon");
    e->add_option("--jobs", eval_cmd.jobs, "worker threads")
        ->envname("KKT_ATTACK_JOBS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    e->add_option("--seed", eval_cmd.seed, "run seed, echoed into outputs")
        ->capture_default_str();
    e->add_option("--out", eval_cmd.out, "per-sample CSV path (default: stdout)");
    e->add_option("--manifest", eval_cmd.manifest, "JSON manifest path");

    // sweep
    CLI::App* s = app.add_subcommand("sweep", "Fooling rate across a parameter range");
    s->add_option("--param", sweep_cmd.param, "epsilon | gamma | degree_p")
        ->check(CLI::IsMember({"epsilon", "gamma", "degree_p"}))
        ->capture_default_str();
    s->add_option("--values", sweep_cmd.values, "comma-separated settings (epsilon/gamma)")
        ->delimiter(',');
    s->add_option("--grid", sweep_cmd.grid, "comma-separated degree:p cells (degree_p)")
        ->delimiter(',');
    s->add_option("--train", sweep_cmd.train_path, "libsvm training data")->required();
    s->add_option("--eval", sweep_cmd.eval_path, "libsvm eval data (default: the training set)");
    s->add_option("--dimension", sweep_cmd.dimension,
                  "declared feature dimension for libsvm data");
    add_kernel_flags(s, sweep_cmd.kernel);
    add_train_flags(s, sweep_cmd.train);
    add_attack_flags(s, sweep_cmd.attack);
    s->add_option("--jobs", sweep_cmd.jobs, "worker threads")
        ->envname("KKT_ATTACK_JOBS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--seed", sweep_cmd.seed, "run seed, echoed into outputs")
        ->capture_default_str();
    s->add_option("--out", sweep_cmd.out, "sweep CSV path (default: stdout)");
    s->add_option("--manifest", sweep_cmd.manifest, "JSON manifest path");

    // render
    CLI::App* r = app.add_subcommand("render", "Render a vector file as PGM/PPM");
    r->add_option("--input", render_cmd.input_path, "vector file")->required();
    r->add_option("--width", render_cmd.width, "image width")->required();
    r->add_option("--height", render_cmd.height, "image height")->required();
    r->add_option("--channels", render_cmd.channels, "1 (PGM) or 3 (PPM)")
        ->capture_default_str();
    r->add_option("--mode", render_cmd.mode, "minmax | signed")
        ->check(CLI::IsMember({"minmax", "signed"}))
        ->capture_default_str();
    r->add_option("--out", render_cmd.out, "image file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& ex) {
        return app.exit(ex); // --help and friends
    } catch (const CLI::FileError& ex) {
        app.exit(ex);
        return 3;
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return 2;
    }

    attack_cmd.have_input_flag = input_opt->count() > 0;

    try {
        if (*t) return train_cmd.run();
        if (*a) return attack_cmd.run();
        if (*e) return eval_cmd.run();
        if (*s) return sweep_cmd.run();
        if (*r) return render_cmd.run();
    } catch (const ksvm::FileError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    } catch (const ksvm::DimensionError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 4;
    } catch (const ksvm::Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
