#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "blp/pipeline.hpp"
#include "blp/predictor.hpp"
#include "blp/segment.hpp"
#include "blp/synth.hpp"

namespace blp {

struct GroundTruth {
    std::string video_id;
    TemporalSegment segment{0.0, 1.0};
    ClassLabel label;
};

std::vector<GroundTruth> ground_truth_of(std::span<const SyntheticVideo> videos);

/// Evenly spaced thresholds first, first+step, ..., last (inclusive), rounded
/// to 1e-6 so that 0.1 + 0.1 + 0.1 prints as 0.3.
std::vector<double> threshold_grid(double first, double step, double last);

std::vector<double> thumos_tiou_grid();       // 0.1:0.1:0.7
std::vector<double> activitynet_tiou_grid();  // 0.5:0.05:0.95
std::vector<double> recall_tiou_grid();       // 0.05:0.05:1.0

/// All-point interpolated AP of one class. `dets` must be sorted by score
/// descending. Each ground truth can be matched once, within its own video.
double average_precision(std::span<const Detection> dets, std::span<const GroundTruth> gts, double tiou_threshold);

/// Fraction of `gts` overlapped at >= tiou_threshold by any detection in the same video.
double recall_at(std::span<const Detection> dets, std::span<const GroundTruth> gts, double tiou_threshold);

struct EvalConfig {
    std::vector<double> tiou_grid = thumos_tiou_grid();
    std::vector<double> recall_grid = recall_tiou_grid();
    int workers = 1;

    void validate() const;
};

struct EvalReport {
    std::map<int, std::map<double, double>> per_class_ap;
    std::map<double, double> map_at;
    double average_map = 0.0;
    std::map<double, double> recall_curve;
    double average_recall = 0.0;
};

/// Classes are those present in `gts`; detections of other classes are ignored.
EvalReport evaluate(std::span<const Detection> dets, std::span<const GroundTruth> gts, const EvalConfig& config);

nlohmann::json report_to_json(const EvalReport& report);
/// Rows: class,tiou,ap.
std::string report_to_csv(const EvalReport& report);
void write_report(const std::filesystem::path& json_path, const std::filesystem::path& csv_path,
                  const EvalReport& report);

/// Everything needed to train one model and evaluate it on a test split.
struct ExperimentSetup {
    std::span<const SyntheticVideo> train_videos;
    std::span<const std::vector<TemporalSegment>> train_proposals;
    std::span<const SyntheticVideo> test_videos;
    std::span<const std::vector<TemporalSegment>> test_proposals;
    TrainConfig train;
    DetectConfig detect;
    EvalConfig eval;
};

struct ExperimentResult {
    TrainResult training;
    std::vector<Detection> detections;
    EvalReport report;
};

/// Builds samples at the setup's M and gamma, trains, detects and evaluates.
ExperimentResult run_experiment(const ExperimentSetup& setup);

enum class SweepParameter { kUnits, kGamma };

struct SweepRow {
    std::string setting;  // e.g. "M=32" or "gamma=2.0"
    double value = 0.0;
    EvalReport report;
};

/// Retrains and re-evaluates once per value, overriding M or gamma in both the
/// training and detection configs.
std::vector<SweepRow> ablation_sweep(const ExperimentSetup& base, SweepParameter parameter,
                                     std::span<const double> values);

/// Columns: setting,threshold,mAP,AR (AR repeated on every row of a setting).
std::string sweep_to_csv(std::span<const SweepRow> rows);

/// Formats a threshold the way report keys and CSV cells show it ("0.5", "0.05").
std::string format_threshold(double t);

}  // namespace blp
