#include "blp/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blp/error.hpp"
#include "blp/random.hpp"

namespace blp {

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) {
        throw InvalidParameter(field + ": " + why);
    }
}

double truncated_normal(std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    return std::clamp(dist(rng), -2.0, 2.0);
}

std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xffU) << 24) | ((v & 0xff00U) << 8) | ((v >> 8) & 0xff00U) | (v >> 24);
    }
}

}  // namespace

void SynthConfig::validate() const {
    require(num_videos >= 0, "num_videos", "must be >= 0");
    require(min_length >= 1, "min_length", "must be >= 1");
    require(max_length >= min_length, "max_length", "must be >= min_length");
    require(num_classes >= 2, "num_classes", "must be >= 2");
    require(min_events >= 0, "min_events", "must be >= 0");
    require(max_events >= min_events, "max_events", "must be >= min_events");
    require(min_duration >= 2, "min_duration", "must be >= 2");
    require(max_duration >= min_duration, "max_duration", "must be >= min_duration");
    require(min_gap >= 0, "min_gap", "must be >= 0");
    require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise_sigma", "must be >= 0");
    require(amplitude > 0.0 && std::isfinite(amplitude), "amplitude", "must be > 0");
    require(base_frequency > 0.0 && num_classes * base_frequency < 0.5, "base_frequency",
            "num_classes * base_frequency must lie in (0, 0.5)");
}

nlohmann::json synth_config_to_json(const SynthConfig& c) {
    return {{"num_videos", c.num_videos},     {"min_length", c.min_length},
            {"max_length", c.max_length},     {"num_classes", c.num_classes},
            {"min_events", c.min_events},     {"max_events", c.max_events},
            {"min_duration", c.min_duration}, {"max_duration", c.max_duration},
            {"min_gap", c.min_gap},           {"noise_sigma", c.noise_sigma},
            {"amplitude", c.amplitude},       {"base_frequency", c.base_frequency},
            {"seed", c.seed},                 {"id_prefix", c.id_prefix}};
}

SynthConfig synth_config_from_json(const nlohmann::json& doc) {
    SynthConfig c;
    c.num_videos = doc.value("num_videos", c.num_videos);
    c.min_length = doc.value("min_length", c.min_length);
    c.max_length = doc.value("max_length", c.max_length);
    c.num_classes = doc.value("num_classes", c.num_classes);
    c.min_events = doc.value("min_events", c.min_events);
    c.max_events = doc.value("max_events", c.max_events);
    c.min_duration = doc.value("min_duration", c.min_duration);
    c.max_duration = doc.value("max_duration", c.max_duration);
    c.min_gap = doc.value("min_gap", c.min_gap);
    c.noise_sigma = doc.value("noise_sigma", c.noise_sigma);
    c.amplitude = doc.value("amplitude", c.amplitude);
    c.base_frequency = doc.value("base_frequency", c.base_frequency);
    c.seed = doc.value("seed", c.seed);
    c.id_prefix = doc.value("id_prefix", c.id_prefix);
    return c;
}

double event_waveform(const SynthConfig& config, int label, double t, double duration) {
    constexpr double kRamp = 0.1;
    const double u = t / duration;
    const double envelope = std::clamp(std::min({1.0, u / kRamp, (1.0 - u) / kRamp}), 0.0, 1.0);
    return config.amplitude * envelope *
           std::sin(2.0 * std::numbers::pi * label * config.base_frequency * t);
}

std::vector<SyntheticVideo> generate_dataset(const SynthConfig& config) {
    config.validate();
    std::vector<SyntheticVideo> videos;
    videos.reserve(config.num_videos);
    for (int v = 0; v < config.num_videos; ++v) {
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(v)));
        SyntheticVideo video;
        std::ostringstream id;
        id << config.id_prefix << '_' << std::setfill('0') << std::setw(5) << v;
        video.id = id.str();

        const int length = std::uniform_int_distribution<int>(config.min_length, config.max_length)(rng);
        const int count = std::uniform_int_distribution<int>(config.min_events, config.max_events)(rng);
        std::vector<int> durations(count);
        for (int& d : durations) {
            d = std::uniform_int_distribution<int>(config.min_duration, config.max_duration)(rng);
        }
        long required = 0;
        for (int d : durations) {
            required += d;
        }
        required += static_cast<long>(std::max(count - 1, 0)) * config.min_gap;
        if (required > length) {
            throw GenerationError(video.id + ": " + std::to_string(count) + " events need " +
                                  std::to_string(required) + " samples but the video has " + std::to_string(length));
        }

        // Spread the slack over the count + 1 gaps via sorted cut points.
        const int slack = length - static_cast<int>(required);
        std::vector<int> cuts(count);
        for (int& c : cuts) {
            c = std::uniform_int_distribution<int>(0, slack)(rng);
        }
        std::sort(cuts.begin(), cuts.end());

        std::normal_distribution<double> noise(0.0, 1.0);
        video.signal.resize(length);
        for (float& x : video.signal) {
            x = static_cast<float>(config.noise_sigma * noise(rng));
        }

        int cursor = 0;
        int prev_cut = 0;
        std::uniform_int_distribution<int> pick_class(1, config.num_classes);
        for (int j = 0; j < count; ++j) {
            const int start = cursor + (cuts[j] - prev_cut) + (j > 0 ? config.min_gap : 0);
            const int end = start + durations[j];
            prev_cut = cuts[j];
            cursor = end;
            const int label = pick_class(rng);
            for (int k = start; k < end; ++k) {
                const double t = k + 0.5 - start;
                video.signal[k] =
                    static_cast<float>(video.signal[k] + event_waveform(config, label, t, durations[j]));
            }
            video.annotations.push_back({TemporalSegment(start, end), ClassLabel{label}});
        }
        videos.push_back(std::move(video));
    }
    return videos;
}

void ProposalConfig::validate() const {
    require(jitter_sigma >= 0.0 && jitter_sigma <= 0.4, "jitter_sigma", "must lie in [0, 0.4]");
    require(proposals_per_gt >= 0, "proposals_per_gt", "must be >= 0");
    for (int s : window_scales) {
        require(s >= 2, "window_scales", "every scale must be >= 2");
    }
}

nlohmann::json proposal_config_to_json(const ProposalConfig& c) {
    return {{"jitter_sigma", c.jitter_sigma},
            {"proposals_per_gt", c.proposals_per_gt},
            {"window_scales", c.window_scales},
            {"seed", c.seed}};
}

ProposalConfig proposal_config_from_json(const nlohmann::json& doc) {
    ProposalConfig c;
    c.jitter_sigma = doc.value("jitter_sigma", c.jitter_sigma);
    c.proposals_per_gt = doc.value("proposals_per_gt", c.proposals_per_gt);
    c.window_scales = doc.value("window_scales", c.window_scales);
    c.seed = doc.value("seed", c.seed);
    return c;
}

std::vector<TemporalSegment> generate_proposals(const SyntheticVideo& video, const ProposalConfig& config) {
    config.validate();
    const double length = video.length();
    std::vector<TemporalSegment> out;
    for (int scale : config.window_scales) {
        const int stride = scale / 2;
        for (int start = 0; start + scale <= static_cast<int>(length); start += stride) {
            out.emplace_back(start, start + scale);
        }
    }

    std::mt19937_64 rng(derive_seed(config.seed, video.id));
    for (const auto& ann : video.annotations) {
        const double d = ann.segment.length();
        for (int k = 0; k < config.proposals_per_gt; ++k) {
            const double center = ann.segment.center() + config.jitter_sigma * d * truncated_normal(rng);
            const double len = d * (1.0 + config.jitter_sigma * truncated_normal(rng));
            const double start = std::max(0.0, center - 0.5 * len);
            const double end = std::min(length, center + 0.5 * len);
            if (start < end) {
                out.emplace_back(start, end);
            }
        }
    }
    return out;
}

void write_dataset(const std::filesystem::path& dir, const std::vector<SyntheticVideo>& videos) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "signals", ec);
    if (ec) {
        throw IoError("cannot create " + (dir / "signals").string() + ": " + ec.message());
    }
    std::ofstream index(dir / "videos.jsonl", std::ios::binary);
    if (!index) {
        throw IoError("cannot write " + (dir / "videos.jsonl").string());
    }
    for (const auto& v : videos) {
        const std::string rel = "signals/" + v.id + ".f32";
        std::ofstream raw(dir / rel, std::ios::binary);
        if (!raw) {
            throw IoError("cannot write " + (dir / rel).string());
        }
        for (float x : v.signal) {
            const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(x));
            raw.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
        if (!raw) {
            throw IoError("failed writing " + (dir / rel).string());
        }

        nlohmann::json anns = nlohmann::json::array();
        for (const auto& a : v.annotations) {
            anns.push_back({{"start", a.segment.start()}, {"end", a.segment.end()}, {"class", a.label.index}});
        }
        nlohmann::json line{{"id", v.id}, {"length", v.signal.size()}, {"signal_file", rel}, {"annotations", anns}};
        index << line.dump() << '\n';
    }
    if (!index) {
        throw IoError("failed writing " + (dir / "videos.jsonl").string());
    }
}

std::vector<SyntheticVideo> read_dataset(const std::filesystem::path& dir) {
    const auto index_path = dir / "videos.jsonl";
    std::ifstream index(index_path, std::ios::binary);
    if (!index) {
        throw IoError("cannot read " + index_path.string());
    }
    std::vector<SyntheticVideo> videos;
    std::string line;
    int line_no = 0;
    while (std::getline(index, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto doc = nlohmann::json::parse(line);
            SyntheticVideo v;
            v.id = doc.at("id").get<std::string>();
            const auto length = doc.at("length").get<std::size_t>();
            const auto signal_path = dir / doc.at("signal_file").get<std::string>();
            std::ifstream raw(signal_path, std::ios::binary);
            if (!raw) {
                throw IoError("cannot read " + signal_path.string());
            }
            v.signal.resize(length);
            for (float& x : v.signal) {
                std::uint32_t bits = 0;
                raw.read(reinterpret_cast<char*>(&bits), sizeof bits);
                x = std::bit_cast<float>(to_little_endian(bits));
            }
            if (!raw) {
                throw IoError(signal_path.string() + " is shorter than " + std::to_string(length) + " samples");
            }
            for (const auto& a : doc.at("annotations")) {
                v.annotations.push_back({TemporalSegment(a.at("start").get<double>(), a.at("end").get<double>()),
                                         ClassLabel{a.at("class").get<int>()}});
            }
            videos.push_back(std::move(v));
        } catch (const nlohmann::json::exception& e) {
            throw IoError(index_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const InvalidParameter& e) {
            throw IoError(index_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return videos;
}

}  // namespace blp
