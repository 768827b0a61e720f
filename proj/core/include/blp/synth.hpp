#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "blp/segment.hpp"

namespace blp {

struct Annotation {
    TemporalSegment segment;
    ClassLabel label;

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// A 1D signal with non-overlapping annotated events in sample coordinates.
struct SyntheticVideo {
    std::string id;
    std::vector<float> signal;
    std::vector<Annotation> annotations;

    double length() const noexcept { return static_cast<double>(signal.size()); }
};

struct SynthConfig {
    int num_videos = 10;
    int min_length = 800;
    int max_length = 1600;
    int num_classes = 5;
    int min_events = 1;
    int max_events = 4;
    int min_duration = 64;
    int max_duration = 192;
    int min_gap = 8;                  // samples between consecutive events
    double noise_sigma = 0.3;
    double amplitude = 1.0;
    double base_frequency = 0.08;     // class k oscillates at k * base_frequency cycles/sample
    std::uint64_t seed = 0;
    std::string id_prefix = "video";

    /// Throws InvalidParameter naming the offending field.
    void validate() const;
};

nlohmann::json synth_config_to_json(const SynthConfig& config);
/// Missing keys keep their defaults.
SynthConfig synth_config_from_json(const nlohmann::json& doc);

/// Noise background with class-specific ramped sinusoids overlaid on each
/// event. Video i is generated from derive_seed(seed, i).
std::vector<SyntheticVideo> generate_dataset(const SynthConfig& config);

/// Waveform value of class `label` at offset `t` samples into an event of the
/// given duration (without noise).
double event_waveform(const SynthConfig& config, int label, double t, double duration);

struct ProposalConfig {
    double jitter_sigma = 0.1;        // relative to the ground-truth duration
    int proposals_per_gt = 4;
    std::vector<int> window_scales{96, 192};
    std::uint64_t seed = 0;

    void validate() const;
};

nlohmann::json proposal_config_to_json(const ProposalConfig& config);
ProposalConfig proposal_config_from_json(const nlohmann::json& doc);

/// Sliding windows (50% stride, in scale order) followed by jittered copies of
/// each annotation; all clamped to [0, length]. Jitter draws are truncated at
/// two standard deviations.
std::vector<TemporalSegment> generate_proposals(const SyntheticVideo& video, const ProposalConfig& config);

/// Writes `videos.jsonl` plus one little-endian float32 file per video under `dir`.
void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticVideo>& videos);
std::vector<SyntheticVideo> read_dataset(const std::filesystem::path& dir);

}  // namespace blp
