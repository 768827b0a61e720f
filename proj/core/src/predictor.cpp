#include "blp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "blp/error.hpp"
#include "blp/random.hpp"

namespace blp {

namespace {

using StridedRows = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;
using MutableStridedRows = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;

double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) noexcept {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<double> softmax(const Eigen::VectorXd& logits) {
    const double top = logits.maxCoeff();
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (Eigen::Index k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - top);
        sum += out[k];
    }
    for (double& v : out) {
        v /= sum;
    }
    return out;
}

struct UnitStats {
    std::array<double, kStatsPerUnit> values{};
};

UnitStats unit_stats(std::span<const float> x) {
    const auto n = static_cast<double>(x.size());
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (float v : x) {
        sum += v;
        lo = std::min(lo, static_cast<double>(v));
        hi = std::max(hi, static_cast<double>(v));
    }
    const double mean = sum / n;
    double var = 0.0;
    for (float v : x) {
        var += (v - mean) * (v - mean);
    }
    var /= n;

    double abs_diff = 0.0;
    int crossings = 0;
    for (std::size_t k = 1; k < x.size(); ++k) {
        abs_diff += std::abs(static_cast<double>(x[k]) - x[k - 1]);
        if (static_cast<double>(x[k]) * x[k - 1] < 0.0) {
            ++crossings;
        }
    }
    const double gaps = n - 1.0;
    UnitStats s;
    s.values = {mean, std::sqrt(var), lo, hi, gaps > 0 ? abs_diff / gaps : 0.0, gaps > 0 ? crossings / gaps : 0.0};
    return s;
}

StridedRows class_rows(const PredictorParams& params, int class_index) {
    const Eigen::Index cols = params.loc_weights.cols();
    return {params.loc_weights.data() + (class_index - 1) * cols, params.n * params.m, cols,
            Eigen::OuterStride<>(params.c * cols)};
}

MutableStridedRows class_rows(PredictorParams& params, int class_index) {
    const Eigen::Index cols = params.loc_weights.cols();
    return {params.loc_weights.data() + (class_index - 1) * cols, params.n * params.m, cols,
            Eigen::OuterStride<>(params.c * cols)};
}

void check_label(const PredictorParams& params, ClassLabel label) {
    if (label.index < 1 || label.index > params.c) {
        throw ContractError("class " + std::to_string(label.index) + " is not an action class of this model");
    }
}

void check_features(const UnitFeatures& feats, const PredictorParams& params) {
    if (feats.m != params.m || feats.f != params.f ||
        feats.values.size() != static_cast<std::size_t>(feats.m) * feats.f) {
        throw ContractError("feature shape " + std::to_string(feats.m) + "x" + std::to_string(feats.f) +
                            " does not match model " + std::to_string(params.m) + "x" + std::to_string(params.f));
    }
}

RowMatrix matrix_from_json(const nlohmann::json& values, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (!values.is_array() || values.size() != static_cast<std::size_t>(rows * cols)) {
        throw ContractError(std::string(name) + " must hold " + std::to_string(rows * cols) + " values");
    }
    RowMatrix m(rows, cols);
    for (Eigen::Index k = 0; k < rows * cols; ++k) {
        m.data()[k] = values[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

nlohmann::json matrix_to_json(const RowMatrix& m) {
    return nlohmann::json(std::vector<double>(m.data(), m.data() + m.size()));
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::kInOut:
            return "in-out";
        case ModelKind::kBoundary:
            return "boundary";
        case ModelKind::kRegression:
            return "regression";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "in-out") {
        return ModelKind::kInOut;
    }
    if (name == "boundary") {
        return ModelKind::kBoundary;
    }
    if (name == "regression") {
        return ModelKind::kRegression;
    }
    throw InvalidParameter("unknown model kind '" + name + "' (expected in-out, boundary or regression)");
}

int tracks_per_unit(ModelKind kind) noexcept { return kind == ModelKind::kBoundary ? 2 : 1; }

Eigen::VectorXd UnitFeatures::flattened_with_bias() const {
    Eigen::VectorXd x(values.size() + 1);
    std::copy(values.begin(), values.end(), x.data());
    x[static_cast<Eigen::Index>(values.size())] = 1.0;
    return x;
}

Eigen::VectorXd UnitFeatures::pooled_with_bias() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(f + 1);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < f; ++k) {
            x[k] += at(i, k);
        }
    }
    x.head(f) /= static_cast<double>(m);
    x[f] = 1.0;
    return x;
}

UnitFeatures extract_features(std::span<const float> signal, const UnitGrid& grid) {
    const auto& iv = grid.interval();
    if (iv.start() < 0.0 || iv.end() > static_cast<double>(signal.size())) {
        throw ContractError("grid extends beyond the signal; clamp the search interval first");
    }
    const int m = grid.m();
    std::vector<UnitStats> stats(m);
    for (int i = 0; i < m; ++i) {
        const auto lo = static_cast<std::ptrdiff_t>(std::ceil(grid.left_edge(i) - 0.5));
        const auto hi = std::min(static_cast<std::ptrdiff_t>(std::ceil(grid.right_edge(i) - 0.5)),
                                 static_cast<std::ptrdiff_t>(signal.size()));
        if (hi <= lo) {
            throw ContractError("unit " + std::to_string(i) + " of the grid holds no samples");
        }
        stats[i] = unit_stats(signal.subspan(lo, hi - lo));
    }

    UnitFeatures feats;
    feats.m = m;
    feats.values.assign(static_cast<std::size_t>(m) * kFeaturesPerUnit, 0.0);
    for (int i = 0; i < m; ++i) {
        double* row = feats.values.data() + static_cast<std::size_t>(i) * kFeaturesPerUnit;
        std::copy(stats[i].values.begin(), stats[i].values.end(), row);
        if (i > 0) {
            std::copy(stats[i - 1].values.begin(), stats[i - 1].values.end(), row + kStatsPerUnit);
        }
        if (i + 1 < m) {
            std::copy(stats[i + 1].values.begin(), stats[i + 1].values.end(), row + 2 * kStatsPerUnit);
        }
    }
    return feats;
}

PredictorParams PredictorParams::zeros(int m, int num_classes, ModelKind kind) {
    if (m < 2) {
        throw InvalidParameter("m must be >= 2");
    }
    if (num_classes < 1) {
        throw InvalidParameter("need at least one action class");
    }
    PredictorParams p;
    p.m = m;
    p.c = num_classes;
    p.n = tracks_per_unit(kind);
    p.kind = kind;
    const Eigen::Index in = static_cast<Eigen::Index>(m) * p.f + 1;
    p.loc_weights = RowMatrix::Zero(static_cast<Eigen::Index>(p.n) * m * num_classes, in);
    p.cls_weights = RowMatrix::Zero(num_classes + 1, p.f + 1);
    p.reg_weights = RowMatrix::Zero(2, in);
    return p;
}

PredictorParams PredictorParams::initialize(int m, int num_classes, ModelKind kind, std::uint64_t seed) {
    PredictorParams p = zeros(m, num_classes, kind);
    p.seed = seed;
    // Each head draws from its own stream so the classifier initialization
    // does not depend on the localization head's shape.
    auto fill = [](RowMatrix& w, std::uint64_t stream_seed) {
        std::mt19937_64 rng(stream_seed);
        std::uniform_real_distribution<double> dist(-0.01, 0.01);
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index k = 0; k + 1 < w.cols(); ++k) {
                w(r, k) = dist(rng);
            }
        }
    };
    fill(p.cls_weights, derive_seed(seed, "cls"));
    fill(p.loc_weights, derive_seed(seed, "loc"));
    fill(p.reg_weights, derive_seed(seed, "reg"));
    return p;
}

void PredictorParams::validate() const {
    const Eigen::Index in = static_cast<Eigen::Index>(m) * f + 1;
    if (m < 2 || c < 1 || f != kFeaturesPerUnit || n != tracks_per_unit(kind)) {
        throw ContractError("inconsistent predictor dimensions");
    }
    if (loc_weights.rows() != static_cast<Eigen::Index>(n) * m * c || loc_weights.cols() != in) {
        throw ContractError("loc_weights shape mismatch");
    }
    if (cls_weights.rows() != c + 1 || cls_weights.cols() != f + 1) {
        throw ContractError("cls_weights shape mismatch");
    }
    if (reg_weights.rows() != 2 || reg_weights.cols() != in) {
        throw ContractError("reg_weights shape mismatch");
    }
}

nlohmann::json params_to_json(const PredictorParams& params) {
    nlohmann::json doc;
    doc["m"] = params.m;
    doc["f"] = params.f;
    doc["c"] = params.c;
    doc["n"] = params.n;
    doc["model_kind"] = to_string(params.kind);
    doc["loc_weights"] = matrix_to_json(params.loc_weights);
    doc["cls_weights"] = matrix_to_json(params.cls_weights);
    doc["reg_weights"] = matrix_to_json(params.reg_weights);
    doc["seed"] = params.seed;
    return doc;
}

PredictorParams params_from_json(const nlohmann::json& doc) {
    try {
        PredictorParams p;
        p.m = doc.at("m").get<int>();
        p.f = doc.at("f").get<int>();
        p.c = doc.at("c").get<int>();
        p.n = doc.at("n").get<int>();
        if (doc.contains("model_kind")) {
            p.kind = parse_model_kind(doc["model_kind"].get<std::string>());
        } else {
            p.kind = p.n == 2 ? ModelKind::kBoundary : ModelKind::kInOut;
        }
        const Eigen::Index in = static_cast<Eigen::Index>(p.m) * p.f + 1;
        p.loc_weights = matrix_from_json(doc.at("loc_weights"), static_cast<Eigen::Index>(p.n) * p.m * p.c, in,
                                         "loc_weights");
        p.cls_weights = matrix_from_json(doc.at("cls_weights"), p.c + 1, p.f + 1, "cls_weights");
        p.reg_weights = matrix_from_json(doc.at("reg_weights"), 2, in, "reg_weights");
        p.seed = doc.at("seed").get<std::uint64_t>();
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("malformed parameter document: ") + e.what());
    }
}

void save_params(const std::string& path, const PredictorParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write parameters to " + path);
    }
    out << params_to_json(params).dump() << '\n';
    if (!out) {
        throw IoError("failed writing parameters to " + path);
    }
}

PredictorParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read parameters from " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return params_from_json(doc);
}

ProbabilityTracks predict_class_tracks(const UnitFeatures& feats, const PredictorParams& params, ModelKind kind,
                                       ClassLabel label) {
    check_features(feats, params);
    check_label(params, label);
    if (kind == ModelKind::kRegression || tracks_per_unit(kind) != params.n) {
        throw ContractError("model kind " + to_string(kind) + " does not match parameters with n=" +
                            std::to_string(params.n));
    }
    const Eigen::VectorXd z = class_rows(params, label.index) * feats.flattened_with_bias();
    const int m = params.m;
    std::vector<double> first(m);
    for (int i = 0; i < m; ++i) {
        first[i] = sigmoid(z[i]);
    }
    if (kind == ModelKind::kInOut) {
        return ProbabilityTracks::in_out(std::move(first), label);
    }
    std::vector<double> second(m);
    for (int i = 0; i < m; ++i) {
        second[i] = sigmoid(z[m + i]);
    }
    return ProbabilityTracks::boundary(std::move(first), std::move(second), label);
}

std::vector<ProbabilityTracks> predict_tracks(const UnitFeatures& feats, const PredictorParams& params,
                                              ModelKind kind) {
    std::vector<ProbabilityTracks> out;
    out.reserve(params.c);
    for (int c = 1; c <= params.c; ++c) {
        out.push_back(predict_class_tracks(feats, params, kind, ClassLabel{c}));
    }
    return out;
}

std::vector<double> predict_class(const UnitFeatures& feats, const PredictorParams& params) {
    // Pooling makes the classifier independent of the grid's unit count.
    if (feats.f != params.f || feats.m < 1 || feats.values.size() != static_cast<std::size_t>(feats.m) * feats.f) {
        throw ContractError("classifier features must have " + std::to_string(params.f) + " columns");
    }
    return softmax(params.cls_weights * feats.pooled_with_bias());
}

RegressionOffsets predict_regression(const UnitFeatures& feats, const PredictorParams& params) {
    check_features(feats, params);
    const Eigen::Vector2d r = params.reg_weights * feats.flattened_with_bias();
    return {r[0], r[1]};
}

RegressionOffsets encode_regression_target(const TemporalSegment& proposal, const TemporalSegment& gt) {
    return {(gt.center() - proposal.center()) / proposal.length(), std::log(gt.length() / proposal.length())};
}

TemporalSegment decode_regression(const TemporalSegment& proposal, const RegressionOffsets& offsets) {
    const double center = proposal.center() + offsets.center_offset * proposal.length();
    const double half = 0.5 * proposal.length() * std::exp(offsets.log_length_ratio);
    return {center - half, center + half};
}

double joint_objective(std::span<const TrainingSample> samples, std::span<const std::size_t> indices,
                       const PredictorParams& params, const TrainConfig& config, PredictorParams* grad) {
    if (indices.empty()) {
        throw ContractError("objective over an empty batch");
    }
    if (grad != nullptr) {
        *grad = PredictorParams::zeros(params.m, params.c, params.kind);
    }
    const double n_cls = static_cast<double>(indices.size());
    const auto n_loc = static_cast<double>(
        std::count_if(indices.begin(), indices.end(), [&](std::size_t k) { return samples[k].positive; }));
    const LossWeights weights = LossWeights::for_units(params.m, config.lambda_tradeoff);
    const int m = params.m;

    double cls_sum = 0.0;
    double loc_sum = 0.0;
    for (std::size_t k : indices) {
        const TrainingSample& s = samples[k];

        // Classification: softmax cross-entropy over C + 1 logits.
        const Eigen::VectorXd logits = params.cls_weights * s.cls_input;
        const double top = logits.maxCoeff();
        const double lse = top + std::log((logits.array() - top).exp().sum());
        cls_sum += lse - logits[s.label.index];
        if (grad != nullptr) {
            Eigen::VectorXd d = (logits.array() - lse).exp();
            d[s.label.index] -= 1.0;
            grad->cls_weights.noalias() += (d / n_cls) * s.cls_input.transpose();
        }

        if (!s.positive || config.lambda_tradeoff == 0.0) {
            continue;
        }
        const double scale = config.lambda_tradeoff / n_loc;
        if (config.kind == ModelKind::kRegression) {
            const Eigen::Vector2d r = params.reg_weights * s.loc_input;
            const Eigen::Vector2d diff =
                r - Eigen::Vector2d(s.regression_target.center_offset, s.regression_target.log_length_ratio);
            loc_sum += 0.5 * diff.squaredNorm();
            if (grad != nullptr) {
                grad->reg_weights.noalias() += (scale * diff) * s.loc_input.transpose();
            }
            continue;
        }

        const Eigen::VectorXd z = class_rows(params, s.label.index) * s.loc_input;
        Eigen::VectorXd dz(z.size());
        if (config.kind == ModelKind::kInOut) {
            for (int i = 0; i < m; ++i) {
                const double t = s.targets.t_io[i];
                loc_sum += softplus(z[i]) - t * z[i];
                dz[i] = sigmoid(z[i]) - t;
            }
        } else {
            const double pos = weights.beta_plus;
            const double neg = weights.beta_minus;
            for (int i = 0; i < m; ++i) {
                for (int track = 0; track < 2; ++track) {
                    const double zi = z[track * m + i];
                    const double t = track == 0 ? s.targets.t_s[i] : s.targets.t_e[i];
                    loc_sum += pos * t * softplus(-zi) + neg * (1.0 - t) * softplus(zi);
                    dz[track * m + i] = weighted_logistic_logit_gradient(sigmoid(zi), t, pos, neg);
                }
            }
        }
        if (grad != nullptr) {
            class_rows(*grad, s.label.index).noalias() += (scale * dz) * s.loc_input.transpose();
        }
    }

    double loss = cls_sum / n_cls;
    if (n_loc > 0 && config.lambda_tradeoff != 0.0) {
        loss += config.lambda_tradeoff * loc_sum / n_loc;
    }
    return loss;
}

namespace {

struct AdamState {
    RowMatrix first;
    RowMatrix second;
};

void adam_step(RowMatrix& w, const RowMatrix& g, AdamState& st, double lr, int step) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    st.first = kBeta1 * st.first + (1.0 - kBeta1) * g;
    st.second = kBeta2 * st.second + (1.0 - kBeta2) * g.cwiseProduct(g);
    const double c1 = 1.0 - std::pow(kBeta1, step);
    const double c2 = 1.0 - std::pow(kBeta2, step);
    w.array() -= lr * (st.first.array() / c1) / ((st.second.array() / c2).sqrt() + kEps);
}

AdamState zero_state(const RowMatrix& w) { return {RowMatrix::Zero(w.rows(), w.cols()), RowMatrix::Zero(w.rows(), w.cols())}; }

}  // namespace

TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config) {
    return train(samples, config, PredictorParams::initialize(config.m, config.num_classes, config.kind, config.seed));
}

TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config, PredictorParams init) {
    if (samples.empty()) {
        throw InvalidParameter("training set is empty");
    }
    if (config.epochs < 0 || config.batch_size < 0) {
        throw InvalidParameter("epochs and batch size must be non-negative");
    }
    if (!(config.lr.initial >= 0.0) || !(config.lr.decayed >= 0.0)) {
        throw InvalidParameter("learning rates must be non-negative");
    }
    init.validate();
    if (init.m != config.m || init.c != config.num_classes || init.kind != config.kind) {
        throw ContractError("initial parameters do not match the training configuration");
    }

    TrainResult result{std::move(init), {}};
    PredictorParams& params = result.params;
    const std::size_t expected_loc = params.loc_weights.cols();
    for (const auto& s : samples) {
        const bool loc_ok = !s.positive || (static_cast<std::size_t>(s.loc_input.size()) == expected_loc &&
                                            s.label.index >= 1 &&
                                            static_cast<int>(s.targets.t_io.size()) == params.m);
        if (!loc_ok || s.cls_input.size() != params.cls_weights.cols() || s.label.index < 0 ||
            s.label.index > params.c) {
            throw ContractError("training sample shape does not match the model");
        }
    }

    AdamState loc_state = zero_state(params.loc_weights);
    AdamState cls_state = zero_state(params.cls_weights);
    AdamState reg_state = zero_state(params.reg_weights);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::vector<std::size_t> all = order;
    std::mt19937_64 shuffle_rng(derive_seed(config.seed, "shuffle"));
    const std::size_t batch = config.batch_size == 0 ? samples.size()
                                                     : std::min<std::size_t>(config.batch_size, samples.size());

    PredictorParams grad;
    int step = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        const double lr = config.lr.at(epoch);
        for (std::size_t begin = 0; begin < order.size(); begin += batch) {
            const std::size_t end = std::min(order.size(), begin + batch);
            const std::span<const std::size_t> idx(order.data() + begin, end - begin);
            const double loss = joint_objective(samples, idx, params, config, &grad);
            if (!std::isfinite(loss)) {
                throw TrainingError("training diverged: non-finite loss", epoch);
            }
            if (lr == 0.0) {
                continue;
            }
            ++step;
            adam_step(params.cls_weights, grad.cls_weights, cls_state, lr, step);
            if (config.kind == ModelKind::kRegression) {
                adam_step(params.reg_weights, grad.reg_weights, reg_state, lr, step);
            } else {
                adam_step(params.loc_weights, grad.loc_weights, loc_state, lr, step);
            }
        }
        const double epoch_loss = joint_objective(samples, all, params, config, nullptr);
        if (!std::isfinite(epoch_loss)) {
            throw TrainingError("training diverged: non-finite loss", epoch);
        }
        result.loss_trace.push_back(epoch_loss);
    }
    return result;
}

}  // namespace blp
