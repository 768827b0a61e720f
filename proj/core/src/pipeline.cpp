#include "blp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "blp/encode.hpp"
#include "blp/error.hpp"

namespace blp {

void NmsConfig::validate() const {
    if (!(tiou_threshold >= 0.0 && tiou_threshold <= 1.0)) {
        throw InvalidParameter("nms tiou_threshold must lie in [0, 1]");
    }
    if (!(sigma > 0.0)) {
        throw InvalidParameter("nms sigma must be > 0");
    }
    if (!(score_floor >= 0.0 && score_floor < 1.0)) {
        throw InvalidParameter("nms score_floor must lie in [0, 1)");
    }
}

NmsMode parse_nms_mode(const std::string& name) {
    if (name == "hard") {
        return NmsMode::kHard;
    }
    if (name == "soft-gaussian" || name == "soft") {
        return NmsMode::kSoftGaussian;
    }
    throw InvalidParameter("unknown nms mode '" + name + "' (expected hard or soft-gaussian)");
}

std::string to_string(NmsMode mode) { return mode == NmsMode::kHard ? "hard" : "soft-gaussian"; }

bool detection_before(const Detection& a, const Detection& b) noexcept {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.segment.start() != b.segment.start()) {
        return a.segment.start() < b.segment.start();
    }
    if (a.segment.end() != b.segment.end()) {
        return a.segment.end() < b.segment.end();
    }
    if (a.label.index != b.label.index) {
        return a.label.index < b.label.index;
    }
    return a.input_index < b.input_index;
}

std::vector<Detection> nms(std::vector<Detection> dets, const NmsConfig& config) {
    config.validate();
    // Group by (video, class); suppression never crosses either.
    std::map<std::pair<std::string, int>, std::vector<Detection>> groups;
    for (auto& d : dets) {
        groups[{d.video_id, d.label.index}].push_back(std::move(d));
    }

    std::vector<Detection> kept;
    for (auto& [key, pending] : groups) {
        while (!pending.empty()) {
            auto top_it = std::min_element(pending.begin(), pending.end(), detection_before);
            Detection top = std::move(*top_it);
            pending.erase(top_it);

            std::vector<Detection> rest;
            rest.reserve(pending.size());
            for (auto& d : pending) {
                const double overlap = tiou(top.segment, d.segment);
                if (config.mode == NmsMode::kHard) {
                    if (overlap <= config.tiou_threshold) {
                        rest.push_back(std::move(d));
                    }
                } else {
                    d.score *= std::exp(-(overlap * overlap) / config.sigma);
                    if (d.score >= config.score_floor) {
                        rest.push_back(std::move(d));
                    }
                }
            }
            pending = std::move(rest);
            kept.push_back(std::move(top));
        }
    }
    std::sort(kept.begin(), kept.end(), detection_before);
    return kept;
}

void DetectConfig::validate() const {
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
        throw InvalidParameter("gamma must be >= 1.0");
    }
    if (m < 2) {
        throw InvalidParameter("m must be >= 2");
    }
    nms.validate();
}

TemporalSegment search_interval(const TemporalSegment& proposal, double gamma, double signal_length) {
    return clamp_interval(extend_interval(proposal, gamma), signal_length);
}

UnitFeatures classifier_features(std::span<const float> signal, const TemporalSegment& proposal) {
    return extract_features(signal, UnitGrid(proposal, kClassifierUnits));
}

bool proposal_resolvable(const TemporalSegment& proposal, double gamma, int m, double signal_length) {
    if (proposal.start() < 0.0 || proposal.end() > signal_length || proposal.length() < kClassifierUnits) {
        return false;
    }
    return search_interval(proposal, gamma, signal_length).length() >= m;
}

LinearDetectionModel::LinearDetectionModel(PredictorParams params) : params_(std::move(params)) {
    params_.validate();
}

std::vector<double> LinearDetectionModel::classify(const SyntheticVideo& video,
                                                   const TemporalSegment& proposal) const {
    return predict_class(classifier_features(video.signal, proposal), params_);
}

ProbabilityTracks LinearDetectionModel::tracks(const SyntheticVideo& video, const UnitGrid& grid, ModelKind kind,
                                               ClassLabel label) const {
    if (kind != params_.kind) {
        throw ContractError("detection asks for " + to_string(kind) + " tracks from a " + to_string(params_.kind) +
                            " model");
    }
    if (grid.m() != params_.m) {
        throw ContractError("grid has m=" + std::to_string(grid.m()) + " but the model was trained with m=" +
                            std::to_string(params_.m));
    }
    return predict_class_tracks(extract_features(video.signal, grid), params_, kind, label);
}

RegressionOffsets LinearDetectionModel::regress(const SyntheticVideo& video, const UnitGrid& grid) const {
    if (params_.kind != ModelKind::kRegression) {
        throw ContractError("regression requested from a " + to_string(params_.kind) + " model");
    }
    if (grid.m() != params_.m) {
        throw ContractError("grid has m=" + std::to_string(grid.m()) + " but the model was trained with m=" +
                            std::to_string(params_.m));
    }
    return predict_regression(extract_features(video.signal, grid), params_);
}

std::vector<Detection> detect(const SyntheticVideo& video, std::span<const TemporalSegment> proposals,
                              const DetectionModel& model, const DetectConfig& config) {
    config.validate();
    const double length = video.length();
    std::vector<Detection> out;
    for (std::size_t k = 0; k < proposals.size(); ++k) {
        const TemporalSegment& proposal = proposals[k];
        if (!proposal_resolvable(proposal, config.gamma, config.m, length)) {
            continue;
        }
        const auto scores = model.classify(video, proposal);
        const auto best = std::max_element(scores.begin(), scores.end());
        const int label = static_cast<int>(best - scores.begin());
        if (label == 0) {
            continue;
        }

        const UnitGrid grid(search_interval(proposal, config.gamma, length), config.m);
        Detection det;
        det.video_id = video.id;
        det.label = ClassLabel{label};
        det.score = std::clamp(*best, 0.0, 1.0);
        det.source_proposal = proposal;
        det.input_index = k;
        if (config.kind == ModelKind::kRegression) {
            const auto refined = decode_regression(proposal, model.regress(video, grid));
            const double start = std::max(0.0, refined.start());
            const double end = std::min(length, refined.end());
            det.segment = start < end ? TemporalSegment(start, end) : proposal;
        } else {
            const auto tracks = model.tracks(video, grid, config.kind, det.label);
            const auto result = config.kind == ModelKind::kInOut ? pinpoint_in_out(tracks, grid)
                                                                 : pinpoint_boundary(tracks, grid);
            det.segment = result.segment;
            det.localization_log_likelihood = result.log_likelihood;
        }
        out.push_back(std::move(det));
    }
    if (config.apply_nms) {
        return nms(std::move(out), config.nms);
    }
    std::sort(out.begin(), out.end(), detection_before);
    return out;
}

std::vector<Detection> detect_all(std::span<const SyntheticVideo> videos,
                                  std::span<const std::vector<TemporalSegment>> proposals,
                                  const DetectionModel& model, const DetectConfig& config, int workers) {
    if (videos.size() != proposals.size()) {
        throw ContractError("one proposal list per video is required");
    }
    config.validate();
    std::vector<std::vector<Detection>> per_video(videos.size());
    const auto run = [&](std::size_t first, std::size_t step) {
        for (std::size_t v = first; v < videos.size(); v += step) {
            per_video[v] = detect(videos[v], proposals[v], model, config);
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1) {
        run(0, 1);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    run(t, threads);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    std::vector<Detection> all;
    for (auto& dets : per_video) {
        std::move(dets.begin(), dets.end(), std::back_inserter(all));
    }
    return all;
}

std::vector<TrainingSample> build_training_samples(std::span<const SyntheticVideo> videos,
                                                   std::span<const std::vector<TemporalSegment>> proposals,
                                                   const SampleConfig& config) {
    if (videos.size() != proposals.size()) {
        throw ContractError("one proposal list per video is required");
    }
    std::vector<TrainingSample> samples;
    for (std::size_t v = 0; v < videos.size(); ++v) {
        const auto& video = videos[v];
        for (const auto& proposal : proposals[v]) {
            if (proposal.start() < 0.0 || proposal.end() > video.length() ||
                proposal.length() < kClassifierUnits) {
                continue;
            }
            const Annotation* match = nullptr;
            double best = 0.0;
            for (const auto& ann : video.annotations) {
                const double overlap = tiou(proposal, ann.segment);
                if (overlap > best) {
                    best = overlap;
                    match = &ann;
                }
            }

            TrainingSample s;
            s.cls_input = classifier_features(video.signal, proposal).pooled_with_bias();
            if (match != nullptr && best >= config.positive_tiou) {
                s.label = match->label;
                const auto interval = search_interval(proposal, config.gamma, video.length());
                if (interval.length() >= config.m) {
                    const UnitGrid grid(interval, config.m);
                    s.positive = true;
                    s.loc_input = extract_features(video.signal, grid).flattened_with_bias();
                    s.targets = encode_targets(grid, match->segment, match->label);
                    s.regression_target = encode_regression_target(proposal, match->segment);
                }
            }
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> dets) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write detections to " + path.string());
    }
    for (const auto& d : dets) {
        const nlohmann::json line{{"video_id", d.video_id},
                                  {"start", d.segment.start()},
                                  {"end", d.segment.end()},
                                  {"class", d.label.index},
                                  {"score", d.score}};
        out << line.dump() << '\n';
    }
    if (!out) {
        throw IoError("failed writing detections to " + path.string());
    }
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read detections from " + path.string());
    }
    std::vector<Detection> dets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto doc = nlohmann::json::parse(line);
            Detection d;
            d.video_id = doc.at("video_id").get<std::string>();
            d.segment = TemporalSegment(doc.at("start").get<double>(), doc.at("end").get<double>());
            d.source_proposal = d.segment;
            d.label = ClassLabel{doc.at("class").get<int>()};
            d.score = doc.at("score").get<double>();
            d.input_index = dets.size();
            dets.push_back(std::move(d));
        } catch (const std::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return dets;
}

}  // namespace blp
