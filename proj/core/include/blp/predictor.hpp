#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "blp/encode.hpp"
#include "blp/loss.hpp"
#include "blp/pinpoint.hpp"
#include "blp/segment.hpp"

namespace blp {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ModelKind { kInOut, kBoundary, kRegression };

std::string to_string(ModelKind kind);
/// Accepts "in-out", "boundary", "regression".
ModelKind parse_model_kind(const std::string& name);

/// Number of probability tracks per unit and class (1 for In-Out, 2 for Boundary).
int tracks_per_unit(ModelKind kind) noexcept;

/// Statistics computed per unit: mean, std, min, max, mean |first difference|,
/// zero-crossing rate.
inline constexpr int kStatsPerUnit = 6;
/// Own statistics followed by the left and right neighbours'.
inline constexpr int kFeaturesPerUnit = 3 * kStatsPerUnit;

/// M x F feature matrix for one grid.
struct UnitFeatures {
    int m = 0;
    int f = kFeaturesPerUnit;
    std::vector<double> values;  // row-major

    double at(int unit, int feature) const { return values[static_cast<std::size_t>(unit) * f + feature]; }
    /// Flattened features with a trailing 1 for the bias column.
    Eigen::VectorXd flattened_with_bias() const;
    /// Column means with a trailing 1.
    Eigen::VectorXd pooled_with_bias() const;
};

/// Signal sample k occupies [k, k+1); a unit holds the samples whose centers
/// fall in its span. The grid must lie within [0, signal.size()] and every
/// unit must hold at least one sample, otherwise ContractError.
UnitFeatures extract_features(std::span<const float> signal, const UnitGrid& grid);

/// Affine heads of the desk-scale predictor.
///
/// loc_weights: (N*M*C) x (M*F + 1); output row (n*M + i)*C + (c-1) is track n,
///              unit i, class c. The last column is the bias.
/// cls_weights: (C + 1) x (F + 1), applied to mean-pooled unit features.
/// reg_weights: 2 x (M*F + 1), producing (center offset, log length ratio).
struct PredictorParams {
    int m = 0;
    int f = kFeaturesPerUnit;
    int c = 0;
    int n = 1;
    ModelKind kind = ModelKind::kInOut;
    RowMatrix loc_weights;
    RowMatrix cls_weights;
    RowMatrix reg_weights;
    std::uint64_t seed = 0;

    /// Zero-initialized parameters of the right shapes.
    static PredictorParams zeros(int m, int num_classes, ModelKind kind);
    /// Weights uniform in [-0.01, 0.01], biases zero.
    static PredictorParams initialize(int m, int num_classes, ModelKind kind, std::uint64_t seed);

    /// Throws ContractError if matrix shapes disagree with m, f, c, n.
    void validate() const;

    friend bool operator==(const PredictorParams&, const PredictorParams&) = default;
};

nlohmann::json params_to_json(const PredictorParams& params);
PredictorParams params_from_json(const nlohmann::json& doc);
void save_params(const std::string& path, const PredictorParams& params);
PredictorParams load_params(const std::string& path);

/// One ProbabilityTracks per action class (index 1..C, stored at [c-1]).
std::vector<ProbabilityTracks> predict_tracks(const UnitFeatures& feats, const PredictorParams& params,
                                              ModelKind kind);
/// Tracks for a single action class.
ProbabilityTracks predict_class_tracks(const UnitFeatures& feats, const PredictorParams& params, ModelKind kind,
                                       ClassLabel label);

/// Softmax over C + 1 classes (background first).
std::vector<double> predict_class(const UnitFeatures& feats, const PredictorParams& params);

struct RegressionOffsets {
    double center_offset = 0.0;     // (gt center - proposal center) / proposal length
    double log_length_ratio = 0.0;  // log(gt length / proposal length)
};

RegressionOffsets predict_regression(const UnitFeatures& feats, const PredictorParams& params);
RegressionOffsets encode_regression_target(const TemporalSegment& proposal, const TemporalSegment& gt);
TemporalSegment decode_regression(const TemporalSegment& proposal, const RegressionOffsets& offsets);

/// Training example for one proposal. `positive` proposals carry targets for
/// their matched ground truth; the rest train the classifier as background.
struct TrainingSample {
    Eigen::VectorXd loc_input;  // search-interval features, flattened, with bias
    Eigen::VectorXd cls_input;  // proposal features, pooled, with bias
    ClassLabel label;
    bool positive = false;
    TargetEncoding targets;
    RegressionOffsets regression_target;
};

struct LearningRateSchedule {
    double initial = 1e-2;
    double decayed = 1e-3;
    int decay_epoch = 10;  // epochs [0, decay_epoch) use `initial`

    double at(int epoch) const noexcept { return epoch < decay_epoch ? initial : decayed; }
};

struct TrainConfig {
    ModelKind kind = ModelKind::kInOut;
    int m = 32;
    int num_classes = 5;
    double gamma = 2.0;
    double lambda_tradeoff = kLambdaThumos;
    LearningRateSchedule lr;
    int epochs = 15;
    int batch_size = 64;  // 0 means full batch
    std::uint64_t seed = 0;
};

struct TrainResult {
    PredictorParams params;
    std::vector<double> loss_trace;  // objective over the full set after each epoch
};

/// Joint objective over `samples[indices]` and, when `grad` is non-null, its
/// gradient w.r.t. every parameter (same shapes as `params`).
double joint_objective(std::span<const TrainingSample> samples, std::span<const std::size_t> indices,
                       const PredictorParams& params, const TrainConfig& config, PredictorParams* grad);

/// Mini-batch Adam on the joint objective. Throws TrainingError on a
/// non-finite loss.
TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config);
/// Continues from `init` instead of a fresh initialization.
TrainResult train(std::span<const TrainingSample> samples, const TrainConfig& config, PredictorParams init);

}  // namespace blp
