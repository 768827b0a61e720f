#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "blp/error.hpp"
#include "blp/eval.hpp"
#include "blp/pipeline.hpp"
#include "blp/predictor.hpp"
#include "blp/random.hpp"
#include "blp/synth.hpp"

namespace blp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Configuration error that maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Binds a flag to a variable; when the flag is absent the value comes from
/// the JSON config (same key), else the built-in default stays.
class Settings {
public:
    explicit Settings(CLI::App* app) : app_(app) {}

    template <typename T>
    CLI::Option* bind(const std::string& flag, const std::string& key, T& target, const std::string& help) {
        CLI::Option* opt = app_->add_option(flag, target, help);
        resolvers_.push_back([opt, key, &target](const json& cfg) {
            if (opt->count() == 0 && cfg.contains(key)) {
                try {
                    target = cfg.at(key).get<T>();
                } catch (const json::exception& e) {
                    throw ConfigError("config key '" + key + "': " + e.what());
                }
            }
        });
        return opt;
    }

    void add_config_option() { app_->add_option("--config", config_path_, "JSON config; flags override its keys"); }

    /// Loads the config file (if any) and fills unset flags from it.
    json resolve() const {
        json cfg = json::object();
        if (!config_path_.empty()) {
            std::ifstream in(config_path_);
            if (!in) {
                throw ConfigError("config: cannot read " + config_path_);
            }
            try {
                in >> cfg;
            } catch (const json::exception& e) {
                throw ConfigError("config: " + config_path_ + ": " + e.what());
            }
            if (!cfg.is_object()) {
                throw ConfigError("config: " + config_path_ + " must hold a JSON object");
            }
        }
        for (const auto& r : resolvers_) {
            r(cfg);
        }
        return cfg;
    }

private:
    CLI::App* app_;
    std::string config_path_;
    std::vector<std::function<void(const json&)>> resolvers_;
};

std::string default_output_root() {
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
        return root;
    }
    return "blp_out";
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) {
        throw ConfigError(field + ": " + why);
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

/// Timestamps live only in this sidecar so primary outputs stay byte-identical.
void append_run_log(const fs::path& output, const std::string& command) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ofstream log(output.string() + ".log", std::ios::app);
    if (log) {
        log << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << ' ' << command << '\n';
    }
}

std::vector<double> parse_grid(const std::string& text, const std::string& field) {
    if (text == "thumos") {
        return thumos_tiou_grid();
    }
    if (text == "activitynet") {
        return activitynet_tiou_grid();
    }
    if (text == "recall") {
        return recall_tiou_grid();
    }
    // first:step:last
    double first = 0.0;
    double step = 0.0;
    double last = 0.0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(text);
    if (!(in >> first >> c1 >> step >> c2 >> last) || c1 != ':' || c2 != ':') {
        throw ConfigError(field + ": expected thumos, activitynet, recall or first:step:last, got '" + text + "'");
    }
    try {
        return threshold_grid(first, step, last);
    } catch (const InvalidParameter& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

std::vector<double> parse_values(const std::string& text, const std::string& field) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            require(used == item.size(), field, "cannot parse '" + item + "'");
        } catch (const std::logic_error&) {
            throw ConfigError(field + ": cannot parse '" + item + "'");
        }
    }
    require(!values.empty(), field, "needs at least one value");
    return values;
}

fs::path split_dir(const std::string& data, const std::string& split) {
    const fs::path dir = fs::path(data) / split;
    if (!fs::exists(dir / "videos.jsonl")) {
        throw ConfigError("data: no dataset at " + dir.string() + " (missing videos.jsonl)");
    }
    return dir;
}

/// Proposals depend only on the top-level seed and the split name, so every
/// command and every model sees the same proposal set for a split.
struct ProposalSettings {
    double jitter_sigma = 0.1;
    int proposals_per_gt = 4;
    std::vector<int> window_scales{96, 192};

    void bind(Settings& s) {
        s.bind("--jitter-sigma", "jitter_sigma", jitter_sigma, "proposal jitter, relative to gt duration");
        s.bind("--proposals-per-gt", "proposals_per_gt", proposals_per_gt, "jittered proposals per annotation");
        s.bind("--window-scales", "window_scales", window_scales, "sliding window lengths");
    }

    std::vector<std::vector<TemporalSegment>> make(std::span<const SyntheticVideo> videos, std::uint64_t seed,
                                                   const std::string& split) const {
        ProposalConfig pc;
        pc.jitter_sigma = jitter_sigma;
        pc.proposals_per_gt = proposals_per_gt;
        pc.window_scales = window_scales;
        pc.seed = derive_seed(seed, "proposals:" + split);
        try {
            pc.validate();
        } catch (const InvalidParameter& e) {
            throw ConfigError(e.what());
        }
        std::vector<std::vector<TemporalSegment>> out;
        out.reserve(videos.size());
        for (const auto& v : videos) {
            out.push_back(generate_proposals(v, pc));
        }
        return out;
    }

    json to_json() const {
        return {{"jitter_sigma", jitter_sigma}, {"proposals_per_gt", proposals_per_gt}, {"window_scales", window_scales}};
    }
};

struct TrainSettings {
    std::string model = "in-out";
    int m = 32;
    double gamma = 2.0;
    double lambda = kLambdaThumos;
    double lr = 1e-2;
    double lr_decayed = 1e-3;
    int decay_epoch = 10;
    int epochs = 15;
    int batch_size = 64;

    void bind(Settings& s) {
        s.bind("--model", "model", model, "in-out, boundary or regression");
        s.bind("--m", "m", m, "units per search interval");
        s.bind("--gamma", "gamma", gamma, "search interval extension factor");
        s.bind("--lambda", "lambda", lambda, "localization trade-off weight");
        s.bind("--lr", "lr", lr, "learning rate before decay_epoch");
        s.bind("--lr-decayed", "lr_decayed", lr_decayed, "learning rate from decay_epoch on");
        s.bind("--decay-epoch", "decay_epoch", decay_epoch, "first epoch using lr_decayed");
        s.bind("--epochs", "epochs", epochs, "training epochs");
        s.bind("--batch-size", "batch_size", batch_size, "mini-batch size (0 = full batch)");
    }

    TrainConfig to_config(int num_classes, std::uint64_t seed) const {
        TrainConfig tc;
        try {
            tc.kind = parse_model_kind(model);
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
        require(m >= 2, "m", "must be >= 2");
        require(gamma >= 1.0, "gamma", "must be >= 1.0");
        require(lambda >= 0.0, "lambda", "must be >= 0");
        require(lr >= 0.0, "lr", "must be >= 0");
        require(lr_decayed >= 0.0, "lr_decayed", "must be >= 0");
        require(epochs >= 0, "epochs", "must be >= 0");
        require(batch_size >= 0, "batch_size", "must be >= 0");
        tc.m = m;
        tc.num_classes = num_classes;
        tc.gamma = gamma;
        tc.lambda_tradeoff = lambda;
        tc.lr = {lr, lr_decayed, decay_epoch};
        tc.epochs = epochs;
        tc.batch_size = batch_size;
        tc.seed = seed;
        return tc;
    }

    json to_json() const {
        return {{"model", model},           {"m", m},
                {"gamma", gamma},           {"lambda", lambda},
                {"lr", lr},                 {"lr_decayed", lr_decayed},
                {"decay_epoch", decay_epoch}, {"epochs", epochs},
                {"batch_size", batch_size}};
    }
};

struct NmsSettings {
    std::string mode = "soft-gaussian";
    double threshold = 0.5;
    double sigma = 0.5;
    double score_floor = 0.001;

    void bind(Settings& s) {
        s.bind("--nms", "nms", mode, "soft-gaussian, hard or none");
        s.bind("--nms-threshold", "nms_threshold", threshold, "hard-NMS tIoU threshold");
        s.bind("--nms-sigma", "nms_sigma", sigma, "soft-NMS Gaussian sigma");
        s.bind("--nms-score-floor", "nms_score_floor", score_floor, "soft-NMS minimum score");
    }

    void apply(DetectConfig& dc) const {
        dc.apply_nms = mode != "none";
        try {
            if (dc.apply_nms) {
                dc.nms.mode = parse_nms_mode(mode);
            }
            dc.nms.tiou_threshold = threshold;
            dc.nms.sigma = sigma;
            dc.nms.score_floor = score_floor;
            dc.nms.validate();
        } catch (const InvalidParameter& e) {
            throw ConfigError(std::string("nms: ") + e.what());
        }
    }
};

int infer_num_classes(std::span<const SyntheticVideo> videos) {
    int c = 0;
    for (const auto& v : videos) {
        for (const auto& a : v.annotations) {
            c = std::max(c, a.label.index);
        }
    }
    return c;
}

// generate -----------------------------------------------------------------

struct GenerateCommand {
    SynthConfig synth;
    std::uint64_t seed = 0;
    int train_videos = 300;
    int test_videos = 200;
    std::string out;

    void bind(Settings& s) {
        s.bind("--out", "out", out, "output dataset directory");
        s.bind("--seed", "seed", seed, "top-level seed");
        s.bind("--train-videos", "train_videos", train_videos, "videos in the train split");
        s.bind("--test-videos", "test_videos", test_videos, "videos in the test split");
        s.bind("--num-classes", "num_classes", synth.num_classes, "action classes C");
        s.bind("--min-length", "min_length", synth.min_length, "shortest video (samples)");
        s.bind("--max-length", "max_length", synth.max_length, "longest video (samples)");
        s.bind("--min-events", "min_events", synth.min_events, "fewest events per video");
        s.bind("--max-events", "max_events", synth.max_events, "most events per video");
        s.bind("--min-duration", "min_duration", synth.min_duration, "shortest event (samples)");
        s.bind("--max-duration", "max_duration", synth.max_duration, "longest event (samples)");
        s.bind("--min-gap", "min_gap", synth.min_gap, "samples between events");
        s.bind("--noise-sigma", "noise_sigma", synth.noise_sigma, "background noise standard deviation");
        s.bind("--amplitude", "amplitude", synth.amplitude, "event amplitude");
        s.bind("--base-frequency", "base_frequency", synth.base_frequency, "class-1 frequency, cycles/sample");
    }

    int execute(std::ostream& out_stream) {
        if (out.empty()) {
            out = (fs::path(default_output_root()) / "data").string();
        }
        require(train_videos >= 0, "train_videos", "must be >= 0");
        require(test_videos >= 0, "test_videos", "must be >= 0");
        try {
            synth.validate();
        } catch (const InvalidParameter& e) {
            throw ConfigError(e.what());
        }
        const std::uint64_t base = derive_seed(seed, "generate");
        json provenance = synth_config_to_json(synth);
        provenance.erase("num_videos");
        provenance.erase("id_prefix");
        provenance["seed"] = seed;
        provenance["train_videos"] = train_videos;
        provenance["test_videos"] = test_videos;

        for (const auto& [split, count] : {std::pair<std::string, int>{"train", train_videos}, {"test", test_videos}}) {
            SynthConfig sc = synth;
            sc.num_videos = count;
            sc.seed = derive_seed(base, split);
            sc.id_prefix = split;
            const auto videos = generate_dataset(sc);
            write_dataset(fs::path(out) / split, videos);
            out_stream << split << ": " << videos.size() << " videos -> " << (fs::path(out) / split).string() << '\n';
        }
        write_text(fs::path(out) / "config.json", provenance.dump(2) + "\n");
        append_run_log(fs::path(out) / "config.json", "generate");
        return kSuccess;
    }
};

// train --------------------------------------------------------------------

struct TrainCommand {
    std::string data;
    std::string split = "train";
    std::string out;
    std::string loss_trace;
    std::uint64_t seed = 0;
    TrainSettings train;
    ProposalSettings proposals;

    void bind(Settings& s) {
        s.bind("--data", "data", data, "dataset root (contains <split>/videos.jsonl); default <root>/data")->required(false);
        s.bind("--split", "train_split", split, "split to train on");
        s.bind("--out", "params", out, "output parameter file");
        s.bind("--loss-trace", "loss_trace", loss_trace, "loss trace CSV (default <out>.loss.csv)");
        s.bind("--seed", "seed", seed, "top-level seed");
        train.bind(s);
        proposals.bind(s);
    }

    int execute(std::ostream& out_stream) {
        if (data.empty()) {
            data = (fs::path(default_output_root()) / "data").string();
        }
        const auto dir = split_dir(data, split);
        if (out.empty()) {
            out = (fs::path(default_output_root()) / "params.json").string();
        }
        if (loss_trace.empty()) {
            loss_trace = out + ".loss.csv";
        }
        const auto videos = read_dataset(dir);
        require(!videos.empty(), "data", dir.string() + " holds no videos");
        const int num_classes = infer_num_classes(videos);
        require(num_classes >= 1, "data", "training split has no annotations");
        const TrainConfig config = train.to_config(num_classes, derive_seed(seed, "train"));

        const auto props = proposals.make(videos, seed, split);
        const auto samples = build_training_samples(videos, props, SampleConfig{config.m, config.gamma, 0.5});
        const auto result = blp::train(samples, config);

        fs::create_directories(fs::absolute(fs::path(out)).parent_path());
        save_params(out, result.params);
        std::ostringstream trace;
        trace << std::setprecision(17) << "epoch,loss\n";
        for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
            trace << e << ',' << result.loss_trace[e] << '\n';
        }
        write_text(loss_trace, trace.str());
        append_run_log(out, "train");
        out_stream << "trained " << train.model << " on " << samples.size() << " proposals -> " << out << '\n';
        return kSuccess;
    }
};

// detect -------------------------------------------------------------------

struct DetectCommand {
    std::string data;
    std::string split = "test";
    std::string params_path;
    std::string out;
    double gamma = 2.0;
    std::uint64_t seed = 0;
    int workers = 1;
    NmsSettings nms_settings;
    ProposalSettings proposals;

    void bind(Settings& s) {
        s.bind("--data", "data", data, "dataset root");
        s.bind("--split", "test_split", split, "split to run on");
        s.bind("--params", "params", params_path, "trained parameter file");
        s.bind("--out", "detections", out, "output detections JSONL");
        s.bind("--gamma", "gamma", gamma, "search interval extension factor");
        s.bind("--seed", "seed", seed, "top-level seed");
        s.bind("--workers", "workers", workers, "parallel videos");
        nms_settings.bind(s);
        proposals.bind(s);
    }

    int execute(std::ostream& out_stream) {
        if (data.empty()) {
            data = (fs::path(default_output_root()) / "data").string();
        }
        if (params_path.empty()) {
            params_path = (fs::path(default_output_root()) / "params.json").string();
        }
        require(fs::exists(params_path), "params", "no such file " + params_path);
        require(gamma >= 1.0, "gamma", "must be >= 1.0");
        require(workers >= 1, "workers", "must be >= 1");
        const auto dir = split_dir(data, split);
        if (out.empty()) {
            out = (fs::path(default_output_root()) / "detections.jsonl").string();
        }
        PredictorParams params;
        try {
            params = load_params(params_path);
        } catch (const ContractError& e) {
            throw ConfigError(std::string("params: ") + e.what());
        }
        DetectConfig dc;
        dc.kind = params.kind;
        dc.m = params.m;
        dc.gamma = gamma;
        nms_settings.apply(dc);

        const auto videos = read_dataset(dir);
        const auto props = proposals.make(videos, seed, split);
        const LinearDetectionModel model(std::move(params));
        const auto dets = detect_all(videos, props, model, dc, workers);

        std::size_t num_proposals = 0;
        for (const auto& p : props) {
            num_proposals += p.size();
        }
        fs::create_directories(fs::absolute(fs::path(out)).parent_path());
        write_detections(out, dets);
        append_run_log(out, "detect");
        out_stream << dets.size() << " detections from " << num_proposals << " proposals -> " << out << '\n';
        return kSuccess;
    }
};

// eval ---------------------------------------------------------------------

struct EvalCommand {
    std::string data;
    std::string split = "test";
    std::string detections;
    std::string out_json;
    std::string out_csv;
    std::string grid = "thumos";
    std::string recall_grid = "recall";
    int workers = 1;

    void bind(Settings& s) {
        s.bind("--data", "data", data, "dataset root");
        s.bind("--split", "test_split", split, "split holding the ground truth");
        s.bind("--detections", "detections", detections, "detections JSONL");
        s.bind("--out", "report", out_json, "report JSON (CSV goes next to it)");
        s.bind("--out-csv", "report_csv", out_csv, "report CSV");
        s.bind("--grid", "tiou_grid", grid, "thumos, activitynet or first:step:last");
        s.bind("--recall-grid", "recall_grid", recall_grid, "recall thresholds, same syntax");
        s.bind("--workers", "workers", workers, "parallel classes");
    }

    int execute(std::ostream& out_stream) {
        if (data.empty()) {
            data = (fs::path(default_output_root()) / "data").string();
        }
        if (detections.empty()) {
            detections = (fs::path(default_output_root()) / "detections.jsonl").string();
        }
        require(fs::exists(detections), "detections", "no such file " + detections);
        require(workers >= 1, "workers", "must be >= 1");
        const auto dir = split_dir(data, split);
        if (out_json.empty()) {
            out_json = (fs::path(default_output_root()) / "report.json").string();
        }
        if (out_csv.empty()) {
            out_csv = (fs::path(out_json).replace_extension(".csv")).string();
        }
        EvalConfig ec;
        ec.tiou_grid = parse_grid(grid, "tiou_grid");
        ec.recall_grid = parse_grid(recall_grid, "recall_grid");
        ec.workers = workers;

        const auto videos = read_dataset(dir);
        const auto gts = ground_truth_of(videos);
        const auto dets = read_detections(detections);
        const auto report = evaluate(dets, gts, ec);
        fs::create_directories(fs::absolute(fs::path(out_json)).parent_path());
        write_report(out_json, out_csv, report);
        append_run_log(out_json, "eval");
        out_stream << std::setprecision(4) << "average mAP " << report.average_map << ", AR "
                   << report.average_recall << " -> " << out_json << '\n';
        return kSuccess;
    }
};

// ablate -------------------------------------------------------------------

struct AblateCommand {
    std::string data;
    std::string train_split = "train";
    std::string test_split = "test";
    std::string sweep = "m";
    std::string values;
    std::string out;
    std::string grid = "thumos";
    std::string recall_grid = "recall";
    std::uint64_t seed = 0;
    int workers = 1;
    TrainSettings train;
    NmsSettings nms_settings;
    ProposalSettings proposals;

    void bind(Settings& s) {
        s.bind("--data", "data", data, "dataset root");
        s.bind("--train-split", "train_split", train_split, "split to train on");
        s.bind("--test-split", "test_split", test_split, "split to evaluate on");
        s.bind("--sweep", "sweep", sweep, "m or gamma");
        s.bind("--values", "values", values, "comma-separated sweep values");
        s.bind("--out", "sweep_csv", out, "output CSV");
        s.bind("--grid", "tiou_grid", grid, "mAP thresholds");
        s.bind("--recall-grid", "recall_grid", recall_grid, "recall thresholds");
        s.bind("--seed", "seed", seed, "top-level seed");
        s.bind("--workers", "workers", workers, "parallel videos / classes");
        train.bind(s);
        nms_settings.bind(s);
        proposals.bind(s);
    }

    int execute(std::ostream& out_stream) {
        if (data.empty()) {
            data = (fs::path(default_output_root()) / "data").string();
        }
        require(sweep == "m" || sweep == "gamma", "sweep", "must be m or gamma");
        require(workers >= 1, "workers", "must be >= 1");
        if (values.empty()) {
            values = sweep == "m" ? "16,32,48" : "1.0,1.6,1.8,2.0,2.4,3.0";
        }
        const auto sweep_values = parse_values(values, "values");
        for (double v : sweep_values) {
            if (sweep == "m") {
                require(v >= 2 && v == std::floor(v), "values", "M values must be integers >= 2");
            } else {
                require(v >= 1.0, "values", "gamma values must be >= 1.0");
            }
        }
        if (out.empty()) {
            out = (fs::path(default_output_root()) / ("ablate_" + sweep + ".csv")).string();
        }
        const auto train_videos = read_dataset(split_dir(data, train_split));
        const auto test_videos = read_dataset(split_dir(data, test_split));
        const auto train_props = proposals.make(train_videos, seed, train_split);
        const auto test_props = proposals.make(test_videos, seed, test_split);

        ExperimentSetup setup{train_videos, train_props, test_videos, test_props, {}, {}, {}};
        setup.train = train.to_config(infer_num_classes(train_videos), derive_seed(seed, "train"));
        nms_settings.apply(setup.detect);
        setup.eval.tiou_grid = parse_grid(grid, "tiou_grid");
        setup.eval.recall_grid = parse_grid(recall_grid, "recall_grid");
        setup.eval.workers = workers;

        const auto rows =
            ablation_sweep(setup, sweep == "m" ? SweepParameter::kUnits : SweepParameter::kGamma, sweep_values);
        fs::create_directories(fs::absolute(fs::path(out)).parent_path());
        write_text(out, sweep_to_csv(rows));
        append_run_log(out, "ablate");
        for (const auto& row : rows) {
            out_stream << std::setprecision(4) << row.setting << ": average mAP " << row.report.average_map
                       << ", AR " << row.report.average_recall << '\n';
        }
        return kSuccess;
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary likelihood pinpointing: synthetic data, training, detection and evaluation", "blp"};
    app.require_subcommand(1);

    GenerateCommand generate;
    TrainCommand train_cmd;
    DetectCommand detect_cmd;
    EvalCommand eval_cmd;
    AblateCommand ablate_cmd;

    auto* gen_app = app.add_subcommand("generate", "write a synthetic train/test dataset");
    Settings gen_settings(gen_app);
    gen_settings.add_config_option();
    generate.bind(gen_settings);

    auto* train_app = app.add_subcommand("train", "train a localization model and classifier");
    Settings train_settings(train_app);
    train_settings.add_config_option();
    train_cmd.bind(train_settings);

    auto* detect_app = app.add_subcommand("detect", "run the detection pipeline over a split");
    Settings detect_settings(detect_app);
    detect_settings.add_config_option();
    detect_cmd.bind(detect_settings);

    auto* eval_app = app.add_subcommand("eval", "score detections: per-class AP, mAP, recall, AR");
    Settings eval_settings(eval_app);
    eval_settings.add_config_option();
    eval_cmd.bind(eval_settings);

    auto* ablate_app = app.add_subcommand("ablate", "sweep M or gamma, retraining per setting");
    Settings ablate_settings(ablate_app);
    ablate_settings.add_config_option();
    ablate_cmd.bind(ablate_settings);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kSuccess;
        }
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (gen_app->parsed()) {
            gen_settings.resolve();
            return generate.execute(out);
        }
        if (train_app->parsed()) {
            train_settings.resolve();
            return train_cmd.execute(out);
        }
        if (detect_app->parsed()) {
            detect_settings.resolve();
            return detect_cmd.execute(out);
        }
        if (eval_app->parsed()) {
            eval_settings.resolve();
            return eval_cmd.execute(out);
        }
        if (ablate_app->parsed()) {
            ablate_settings.resolve();
            return ablate_cmd.execute(out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidParameter& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const TrainingError& e) {
        err << "training error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kConfigError;
}

}  // namespace blp::cli
