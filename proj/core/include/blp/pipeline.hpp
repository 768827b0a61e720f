#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "blp/pinpoint.hpp"
#include "blp/predictor.hpp"
#include "blp/segment.hpp"
#include "blp/synth.hpp"

namespace blp {

/// Units of the fixed grid the classifier pools over. Independent of M so that
/// every localization setting shares one classifier input.
inline constexpr int kClassifierUnits = 8;

struct Detection {
    std::string video_id;
    TemporalSegment segment{0.0, 1.0};
    ClassLabel label;
    double score = 0.0;
    TemporalSegment source_proposal{0.0, 1.0};
    double localization_log_likelihood = 0.0;  // diagnostic only; 0 for regression
    std::size_t input_index = 0;               // position in the proposal list
};

enum class NmsMode { kHard, kSoftGaussian };

struct NmsConfig {
    NmsMode mode = NmsMode::kSoftGaussian;
    double tiou_threshold = 0.5;  // hard mode
    double sigma = 0.5;           // soft mode: score *= exp(-tiou^2 / sigma)
    double score_floor = 0.001;   // soft mode

    void validate() const;
};

NmsMode parse_nms_mode(const std::string& name);
std::string to_string(NmsMode mode);

/// Orders by score descending, then earlier start, then earlier end, then
/// class, then input index.
bool detection_before(const Detection& a, const Detection& b) noexcept;

/// Class-wise greedy suppression. Output is sorted with detection_before.
std::vector<Detection> nms(std::vector<Detection> dets, const NmsConfig& config);

struct DetectConfig {
    ModelKind kind = ModelKind::kInOut;
    double gamma = 2.0;
    int m = 32;
    bool apply_nms = true;
    NmsConfig nms;

    void validate() const;
};

/// Search interval for a proposal: extended by gamma and clamped to the signal.
TemporalSegment search_interval(const TemporalSegment& proposal, double gamma, double signal_length);

/// The three learned functions the pipeline needs. Swappable so tests can
/// inject ideal probabilities.
class DetectionModel {
public:
    virtual ~DetectionModel() = default;

    /// C + 1 class probabilities for a proposal.
    virtual std::vector<double> classify(const SyntheticVideo& video, const TemporalSegment& proposal) const = 0;
    virtual ProbabilityTracks tracks(const SyntheticVideo& video, const UnitGrid& grid, ModelKind kind,
                                     ClassLabel label) const = 0;
    virtual RegressionOffsets regress(const SyntheticVideo& video, const UnitGrid& grid) const = 0;
};

class LinearDetectionModel final : public DetectionModel {
public:
    explicit LinearDetectionModel(PredictorParams params);

    std::vector<double> classify(const SyntheticVideo& video, const TemporalSegment& proposal) const override;
    ProbabilityTracks tracks(const SyntheticVideo& video, const UnitGrid& grid, ModelKind kind,
                             ClassLabel label) const override;
    RegressionOffsets regress(const SyntheticVideo& video, const UnitGrid& grid) const override;

    const PredictorParams& params() const noexcept { return params_; }

private:
    PredictorParams params_;
};

/// Features the classifier sees for a proposal.
UnitFeatures classifier_features(std::span<const float> signal, const TemporalSegment& proposal);

/// True when a proposal can be processed: both its classifier grid and its M-unit
/// search grid hold at least one sample per unit.
bool proposal_resolvable(const TemporalSegment& proposal, double gamma, int m, double signal_length);

/// Classify, localize and suppress. Proposals that cannot be resolved at M
/// units are skipped.
std::vector<Detection> detect(const SyntheticVideo& video, std::span<const TemporalSegment> proposals,
                              const DetectionModel& model, const DetectConfig& config);

/// detect() over many videos with `workers` threads; output keeps video order.
std::vector<Detection> detect_all(std::span<const SyntheticVideo> videos,
                                  std::span<const std::vector<TemporalSegment>> proposals,
                                  const DetectionModel& model, const DetectConfig& config, int workers = 1);

struct SampleConfig {
    int m = 32;
    double gamma = 2.0;
    double positive_tiou = 0.5;
};

/// Pairs each proposal with its max-tIoU ground truth. Matches at or above
/// `positive_tiou` become localization positives of that class; the rest are
/// background examples for the classifier.
std::vector<TrainingSample> build_training_samples(std::span<const SyntheticVideo> videos,
                                                   std::span<const std::vector<TemporalSegment>> proposals,
                                                   const SampleConfig& config);

/// One JSON object per line: video_id, start, end, class, score.
void write_detections(const std::filesystem::path& path, std::span<const Detection> dets);
std::vector<Detection> read_detections(const std::filesystem::path& path);

}  // namespace blp
