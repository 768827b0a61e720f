#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "blp/encode.hpp"
#include "blp/error.hpp"
#include "blp/pipeline.hpp"
#include "blp/synth.hpp"

using namespace blp;

namespace {

Detection det(double s, double e, double score, int label = 1, std::string video = "v", std::size_t index = 0) {
    Detection d;
    d.video_id = std::move(video);
    d.segment = TemporalSegment(s, e);
    d.source_proposal = d.segment;
    d.label = ClassLabel{label};
    d.score = score;
    d.input_index = index;
    return d;
}

const Annotation* best_match(const SyntheticVideo& v, const TemporalSegment& p) {
    const Annotation* best = nullptr;
    double overlap = 0.0;
    for (const auto& a : v.annotations) {
        if (tiou(p, a.segment) > overlap) {
            overlap = tiou(p, a.segment);
            best = &a;
        }
    }
    return overlap >= 0.5 ? best : nullptr;
}

// Knows the ground truth: classifies by overlap and emits the encoded targets as tracks.
class OracleModel final : public DetectionModel {
public:
    explicit OracleModel(int num_classes) : c_(num_classes) {}

    std::vector<double> classify(const SyntheticVideo& video, const TemporalSegment& proposal) const override {
        std::vector<double> s(c_ + 1, 0.1 / c_);
        const Annotation* a = best_match(video, proposal);
        const int label = a == nullptr ? 0 : a->label.index;
        s[label] = 0.9;
        return s;
    }

    ProbabilityTracks tracks(const SyntheticVideo& video, const UnitGrid& grid, ModelKind kind,
                             ClassLabel label) const override {
        const Annotation* a = nullptr;
        double overlap = 0.0;
        for (const auto& ann : video.annotations) {
            if (ann.label == label && tiou(grid.interval(), ann.segment) > overlap) {
                overlap = tiou(grid.interval(), ann.segment);
                a = &ann;
            }
        }
        REQUIRE(a != nullptr);
        const auto t = encode_targets(grid, a->segment, label);
        return kind == ModelKind::kInOut ? ProbabilityTracks::in_out(t.t_io, label)
                                         : ProbabilityTracks::boundary(t.t_s, t.t_e, label);
    }

    RegressionOffsets regress(const SyntheticVideo&, const UnitGrid&) const override { return {}; }

private:
    int c_;
};

class BackgroundModel final : public DetectionModel {
public:
    std::vector<double> classify(const SyntheticVideo&, const TemporalSegment&) const override {
        return {0.7, 0.1, 0.1, 0.1};
    }
    ProbabilityTracks tracks(const SyntheticVideo&, const UnitGrid&, ModelKind, ClassLabel) const override {
        FAIL("background proposals must not reach localization");
        return {};
    }
    RegressionOffsets regress(const SyntheticVideo&, const UnitGrid&) const override { return {}; }
};

SyntheticVideo one_event_video() {
    SyntheticVideo v;
    v.id = "v";
    v.signal.assign(400, 0.0f);
    v.annotations.push_back({TemporalSegment(150, 230), ClassLabel{2}});
    return v;
}

}  // namespace

TEST_CASE("hard NMS keeps the higher of two identical segments") {
    const auto out = nms({det(0, 10, 0.8, 1, "v", 1), det(0, 10, 0.9, 1, "v", 0)}, {NmsMode::kHard, 0.5, 0.5, 0.001});
    REQUIRE(out.size() == 1);
    CHECK(out[0].score == 0.9);
}

TEST_CASE("disjoint segments all survive") {
    for (auto mode : {NmsMode::kHard, NmsMode::kSoftGaussian}) {
        const auto out = nms({det(0, 10, 0.9), det(20, 30, 0.8), det(10, 20, 0.7)}, {mode, 0.5, 0.5, 0.001});
        REQUIRE(out.size() == 3);
        CHECK(out[1].score == 0.8);
        CHECK(out[2].score == 0.7);
    }
}

TEST_CASE("soft-gaussian decay at tIoU 0.5") {
    // (0,10) vs (0,5): intersection 5, union 10.
    const auto out = nms({det(0, 10, 1.0), det(0, 5, 0.8)}, {NmsMode::kSoftGaussian, 0.5, 0.5, 0.001});
    REQUIRE(out.size() == 2);
    CHECK(out[1].score == doctest::Approx(0.8 * 0.6065).epsilon(1e-4));
    CHECK(out[1].score / 0.8 == doctest::Approx(std::exp(-0.25 / 0.5)).epsilon(1e-12));
}

TEST_CASE("soft NMS drops detections under the score floor") {
    const auto out = nms({det(0, 10, 1.0), det(0, 10, 0.002)}, {NmsMode::kSoftGaussian, 0.5, 0.5, 0.001});
    CHECK(out.size() == 1);
}

TEST_CASE("NMS never suppresses across classes or videos") {
    const auto out = nms({det(0, 10, 0.9, 1), det(0, 10, 0.8, 2), det(0, 10, 0.7, 1, "w")}, {NmsMode::kHard, 0.5, 0.5, 0.001});
    CHECK(out.size() == 3);
}

TEST_CASE("NMS properties on random detections") {
    std::mt19937_64 rng(40);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Detection> in;
        for (std::size_t k = 0; k < 30; ++k) {
            const double s = u(rng);
            in.push_back(det(s, s + 1.0 + 0.3 * u(rng), score(rng), 1 + static_cast<int>(k % 3), "v", k));
        }
        const NmsConfig hard{NmsMode::kHard, 0.4, 0.5, 0.001};
        const auto kept = nms(in, hard);
        CHECK(kept.size() <= in.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const bool present = std::any_of(in.begin(), in.end(), [&](const Detection& d) {
                return d.input_index == kept[i].input_index && d.score == kept[i].score;
            });
            CHECK(present);
            for (std::size_t j = i + 1; j < kept.size(); ++j) {
                if (kept[i].label == kept[j].label) {
                    CHECK(tiou(kept[i].segment, kept[j].segment) <= 0.4);
                }
            }
        }

        const NmsConfig soft{NmsMode::kSoftGaussian, 0.5, 0.5, 0.001};
        const auto decayed = nms(in, soft);
        CHECK(decayed.size() <= in.size());
        for (const auto& d : decayed) {
            CHECK(d.score <= in[d.input_index].score);
        }

        // Input order does not matter.
        auto shuffled = in;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto again = nms(shuffled, soft);
        REQUIRE(again.size() == decayed.size());
        for (std::size_t k = 0; k < again.size(); ++k) {
            CHECK(again[k].input_index == decayed[k].input_index);
            CHECK(again[k].score == decayed[k].score);
        }
    }
}

TEST_CASE("NMS config validation") {
    CHECK_THROWS_AS(nms({}, {NmsMode::kHard, 1.5, 0.5, 0.001}), InvalidParameter);
    CHECK_THROWS_AS(nms({}, {NmsMode::kSoftGaussian, 0.5, 0.0, 0.001}), InvalidParameter);
    CHECK(parse_nms_mode("hard") == NmsMode::kHard);
    CHECK(parse_nms_mode("soft-gaussian") == NmsMode::kSoftGaussian);
    CHECK_THROWS_AS(parse_nms_mode("linear"), InvalidParameter);
}

TEST_CASE("search interval is extended then clamped") {
    CHECK(search_interval({10, 20}, 2.0, 100) == TemporalSegment(5, 25));
    CHECK(search_interval({0, 20}, 2.0, 100) == TemporalSegment(0, 30));
    CHECK(search_interval({90, 100}, 3.0, 100) == TemporalSegment(80, 100));
    CHECK(proposal_resolvable({0, 20}, 2.0, 32, 100) == false);
    CHECK(proposal_resolvable({0, 40}, 2.0, 32, 100) == true);
    CHECK(proposal_resolvable({0, 4}, 10.0, 2, 100) == false);
}

TEST_CASE("background-only proposals produce no detections") {
    const auto v = one_event_video();
    const std::vector<TemporalSegment> props{{100, 200}, {150, 250}};
    DetectConfig cfg;
    cfg.m = 16;
    CHECK(detect(v, props, BackgroundModel{}, cfg).empty());
}

TEST_CASE("one proposal without NMS yields its pinpointed segment") {
    const auto v = one_event_video();
    const std::vector<TemporalSegment> props{{140, 240}};
    for (auto kind : {ModelKind::kInOut, ModelKind::kBoundary}) {
        DetectConfig cfg;
        cfg.kind = kind;
        cfg.m = 32;
        cfg.apply_nms = false;
        const OracleModel model(3);
        const auto out = detect(v, props, model, cfg);
        REQUIRE(out.size() == 1);
        const UnitGrid grid(search_interval(props[0], 2.0, v.length()), 32);
        const auto tracks = model.tracks(v, grid, kind, ClassLabel{2});
        const auto expect = kind == ModelKind::kInOut ? pinpoint_in_out(tracks, grid) : pinpoint_boundary(tracks, grid);
        CHECK(out[0].segment == expect.segment);
        CHECK(out[0].label.index == 2);
        CHECK(out[0].score == 0.9);
        CHECK(out[0].source_proposal == props[0]);
    }
}

TEST_CASE("an ideal predictor recovers the ground truth within one unit width") {
    SynthConfig sc;
    sc.num_videos = 30;
    sc.seed = 41;
    const auto videos = generate_dataset(sc);
    ProposalConfig pc;
    pc.window_scales = {};
    pc.seed = 42;
    const OracleModel model(sc.num_classes);
    int checked = 0;
    for (const auto& v : videos) {
        const auto props = generate_proposals(v, pc);
        for (auto kind : {ModelKind::kInOut, ModelKind::kBoundary}) {
            DetectConfig cfg;
            cfg.kind = kind;
            cfg.m = 32;
            cfg.apply_nms = false;
            for (const auto& d : detect(v, props, model, cfg)) {
                const Annotation* a = best_match(v, d.source_proposal);
                REQUIRE(a != nullptr);
                const UnitGrid grid(search_interval(d.source_proposal, 2.0, v.length()), 32);
                if (a->segment.start() < grid.interval().start() || a->segment.end() >= grid.interval().end()) {
                    continue;
                }
                CHECK(std::abs(d.segment.start() - a->segment.start()) <= grid.unit_width() + 1e-9);
                CHECK(std::abs(d.segment.end() - a->segment.end()) <= grid.unit_width() + 1e-9);
                ++checked;
            }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("detect output is sorted, bounded by the proposal count and order-independent") {
    SynthConfig sc;
    sc.num_videos = 10;
    sc.seed = 43;
    const auto videos = generate_dataset(sc);
    ProposalConfig pc;
    pc.seed = 44;
    const OracleModel model(sc.num_classes);
    std::mt19937_64 rng(45);
    for (const auto& v : videos) {
        auto props = generate_proposals(v, pc);
        DetectConfig cfg;
        cfg.m = 32;
        const auto out = detect(v, props, model, cfg);
        CHECK(out.size() <= props.size());
        CHECK(std::is_sorted(out.begin(), out.end(), detection_before));
        for (const auto& d : out) {
            CHECK(d.score >= 0.0);
            CHECK(d.score <= 1.0);
            CHECK_FALSE(d.label.is_background());
        }
        std::shuffle(props.begin(), props.end(), rng);
        const auto again = detect(v, props, model, cfg);
        REQUIRE(again.size() == out.size());
        for (std::size_t k = 0; k < out.size(); ++k) {
            CHECK(again[k].segment == out[k].segment);
            CHECK(again[k].score == out[k].score);
            CHECK(again[k].label == out[k].label);
        }
    }
}

TEST_CASE("detect_all is worker-count invariant") {
    SynthConfig sc;
    sc.num_videos = 12;
    sc.seed = 46;
    const auto videos = generate_dataset(sc);
    ProposalConfig pc;
    std::vector<std::vector<TemporalSegment>> props;
    for (const auto& v : videos) {
        props.push_back(generate_proposals(v, pc));
    }
    const LinearDetectionModel model(PredictorParams::initialize(32, sc.num_classes, ModelKind::kBoundary, 1));
    DetectConfig cfg;
    cfg.kind = ModelKind::kBoundary;
    const auto one = detect_all(videos, props, model, cfg, 1);
    for (int workers : {2, 4, 7}) {
        const auto many = detect_all(videos, props, model, cfg, workers);
        REQUIRE(many.size() == one.size());
        for (std::size_t k = 0; k < one.size(); ++k) {
            CHECK(many[k].video_id == one[k].video_id);
            CHECK(many[k].segment == one[k].segment);
            CHECK(many[k].score == one[k].score);
        }
    }
}

TEST_CASE("linear model rejects mismatched configurations") {
    SyntheticVideo v = one_event_video();
    const std::vector<TemporalSegment> props{{140, 240}};
    auto params = PredictorParams::zeros(16, 3, ModelKind::kInOut);
    params.cls_weights(2, params.cls_weights.cols() - 1) = 5.0;  // always class 2
    const LinearDetectionModel model(params);
    DetectConfig cfg;
    cfg.m = 32;
    CHECK_THROWS_AS(detect(v, props, model, cfg), ContractError);
    cfg.m = 16;
    cfg.kind = ModelKind::kBoundary;
    CHECK_THROWS_AS(detect(v, props, model, cfg), ContractError);
    cfg.kind = ModelKind::kRegression;
    CHECK_THROWS_AS(detect(v, props, model, cfg), ContractError);
    cfg.kind = ModelKind::kInOut;
    CHECK(detect(v, props, model, cfg).size() == 1);

    auto broken = params;
    broken.m = 17;
    CHECK_THROWS_AS(LinearDetectionModel{broken}, ContractError);
}

TEST_CASE("zero-weight regression returns the proposal") {
    const auto v = one_event_video();
    auto params = PredictorParams::zeros(16, 3, ModelKind::kRegression);
    params.cls_weights(1, params.cls_weights.cols() - 1) = 5.0;
    const LinearDetectionModel model(params);
    DetectConfig cfg;
    cfg.kind = ModelKind::kRegression;
    cfg.m = 16;
    const std::vector<TemporalSegment> props{{140, 240}};
    const auto out = detect(v, props, model, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].segment == props[0]);
    CHECK(out[0].label.index == 1);
}

TEST_CASE("training samples pair proposals with their best ground truth") {
    const auto v = one_event_video();
    const std::vector<SyntheticVideo> videos{v};
    const std::vector<std::vector<TemporalSegment>> props{{{150, 230}, {0, 100}, {140, 250}, {2, 6}}};
    const auto samples = build_training_samples(videos, props, {16, 2.0, 0.5});
    REQUIRE(samples.size() == 3);  // (2,6) is shorter than the classifier grid
    CHECK(samples[0].positive);
    CHECK(samples[0].label.index == 2);
    CHECK(samples[0].loc_input.size() == 16 * kFeaturesPerUnit + 1);
    CHECK(samples[0].targets.t_io.size() == 16);
    CHECK(samples[0].regression_target.center_offset == 0.0);
    CHECK_FALSE(samples[1].positive);
    CHECK(samples[1].label.is_background());
    CHECK(samples[2].positive);
    for (const auto& s : samples) {
        CHECK(s.cls_input.size() == kFeaturesPerUnit + 1);
    }
}

TEST_CASE("detections file round trip") {
    const std::vector<Detection> dets{det(1.5, 7.25, 0.75, 3, "a"), det(2, 3, 0.5, 1, "b")};
    const auto path = std::filesystem::temp_directory_path() / "blp_test_dets.jsonl";
    write_detections(path, dets);
    const auto back = read_detections(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].video_id == "a");
    CHECK(back[0].segment == dets[0].segment);
    CHECK(back[0].label.index == 3);
    CHECK(back[0].score == 0.75);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_detections(path), IoError);
}
