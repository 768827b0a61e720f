#include "blp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "blp/error.hpp"

namespace blp {

std::vector<GroundTruth> ground_truth_of(std::span<const SyntheticVideo> videos) {
    std::vector<GroundTruth> gts;
    for (const auto& v : videos) {
        for (const auto& a : v.annotations) {
            gts.push_back({v.id, a.segment, a.label});
        }
    }
    return gts;
}

std::vector<double> threshold_grid(double first, double step, double last) {
    if (!(step > 0.0) || last < first) {
        throw InvalidParameter("threshold grid needs step > 0 and last >= first");
    }
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double t = std::round((first + k * step) * 1e6) / 1e6;
        if (t > last + 1e-9) {
            break;
        }
        grid.push_back(t);
    }
    return grid;
}

std::vector<double> thumos_tiou_grid() { return threshold_grid(0.1, 0.1, 0.7); }
std::vector<double> activitynet_tiou_grid() { return threshold_grid(0.5, 0.05, 0.95); }
std::vector<double> recall_tiou_grid() { return threshold_grid(0.05, 0.05, 1.0); }

std::string format_threshold(double t) {
    std::ostringstream out;
    out << std::setprecision(6) << t;
    return out.str();
}

double average_precision(std::span<const Detection> dets, std::span<const GroundTruth> gts, double tiou_threshold) {
    if (dets.empty() || gts.empty()) {
        return 0.0;
    }
    std::vector<bool> used(gts.size(), false);
    std::vector<double> precision;
    std::vector<double> recall;
    precision.reserve(dets.size());
    recall.reserve(dets.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < dets.size(); ++k) {
        const auto& d = dets[k];
        std::ptrdiff_t best_gt = -1;
        double best = -1.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (used[g] || gts[g].video_id != d.video_id) {
                continue;
            }
            const double overlap = tiou(d.segment, gts[g].segment);
            if (overlap > best) {
                best = overlap;
                best_gt = static_cast<std::ptrdiff_t>(g);
            }
        }
        if (best_gt >= 0 && best >= tiou_threshold) {
            used[best_gt] = true;
            ++tp;
        }
        precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(gts.size()));
    }
    // Monotone envelope from the right, then area under the step curve.
    for (std::size_t k = precision.size() - 1; k-- > 0;) {
        precision[k] = std::max(precision[k], precision[k + 1]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < precision.size(); ++k) {
        ap += (recall[k] - prev_recall) * precision[k];
        prev_recall = recall[k];
    }
    return std::clamp(ap, 0.0, 1.0);
}

double recall_at(std::span<const Detection> dets, std::span<const GroundTruth> gts, double tiou_threshold) {
    if (gts.empty()) {
        return 0.0;
    }
    std::size_t hit = 0;
    for (const auto& g : gts) {
        const bool found = std::any_of(dets.begin(), dets.end(), [&](const Detection& d) {
            return d.video_id == g.video_id && tiou(d.segment, g.segment) >= tiou_threshold;
        });
        hit += found ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(gts.size());
}

void EvalConfig::validate() const {
    if (tiou_grid.empty() || recall_grid.empty()) {
        throw InvalidParameter("evaluation grids must be non-empty");
    }
    for (double t : tiou_grid) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw InvalidParameter("tiou_grid values must lie in (0, 1]");
        }
    }
    for (double t : recall_grid) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw InvalidParameter("recall_grid values must lie in (0, 1]");
        }
    }
}

EvalReport evaluate(std::span<const Detection> dets, std::span<const GroundTruth> gts, const EvalConfig& config) {
    config.validate();
    std::set<int> class_set;
    for (const auto& g : gts) {
        class_set.insert(g.label.index);
    }
    const std::vector<int> classes(class_set.begin(), class_set.end());

    struct ClassResult {
        std::map<double, double> ap;
        std::map<double, double> recall;
    };
    std::vector<ClassResult> results(classes.size());

    const auto evaluate_class = [&](std::size_t k) {
        const int c = classes[k];
        std::vector<Detection> class_dets;
        for (const auto& d : dets) {
            if (d.label.index == c) {
                class_dets.push_back(d);
            }
        }
        std::sort(class_dets.begin(), class_dets.end(), detection_before);
        std::vector<GroundTruth> class_gts;
        for (const auto& g : gts) {
            if (g.label.index == c) {
                class_gts.push_back(g);
            }
        }
        for (double t : config.tiou_grid) {
            results[k].ap[t] = average_precision(class_dets, class_gts, t);
        }
        for (double t : config.recall_grid) {
            results[k].recall[t] = recall_at(class_dets, class_gts, t);
        }
    };

    const auto threads = std::min<std::size_t>(std::max(1, config.workers), std::max<std::size_t>(1, classes.size()));
    if (threads <= 1) {
        for (std::size_t k = 0; k < classes.size(); ++k) {
            evaluate_class(k);
        }
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t k = t; k < classes.size(); k += threads) {
                    evaluate_class(k);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    EvalReport report;
    for (double t : config.tiou_grid) {
        double sum = 0.0;
        for (std::size_t k = 0; k < classes.size(); ++k) {
            report.per_class_ap[classes[k]][t] = results[k].ap.at(t);
            sum += results[k].ap.at(t);
        }
        report.map_at[t] = classes.empty() ? 0.0 : sum / static_cast<double>(classes.size());
    }
    for (double t : config.recall_grid) {
        double sum = 0.0;
        for (std::size_t k = 0; k < classes.size(); ++k) {
            sum += results[k].recall.at(t);
        }
        report.recall_curve[t] = classes.empty() ? 0.0 : sum / static_cast<double>(classes.size());
    }
    double map_sum = 0.0;
    for (const auto& [t, v] : report.map_at) {
        map_sum += v;
    }
    report.average_map = map_sum / static_cast<double>(report.map_at.size());
    double recall_sum = 0.0;
    for (const auto& [t, v] : report.recall_curve) {
        recall_sum += v;
    }
    report.average_recall = recall_sum / static_cast<double>(report.recall_curve.size());
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [c, by_t] : report.per_class_ap) {
        nlohmann::json row = nlohmann::json::object();
        for (const auto& [t, v] : by_t) {
            row[format_threshold(t)] = v;
        }
        per_class[std::to_string(c)] = row;
    }
    nlohmann::json map_at = nlohmann::json::object();
    for (const auto& [t, v] : report.map_at) {
        map_at[format_threshold(t)] = v;
    }
    nlohmann::json recall = nlohmann::json::object();
    for (const auto& [t, v] : report.recall_curve) {
        recall[format_threshold(t)] = v;
    }
    return {{"per_class_ap", per_class},
            {"map_at", map_at},
            {"average_map", report.average_map},
            {"recall_curve", recall},
            {"average_recall", report.average_recall}};
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "class,tiou,ap\n";
    for (const auto& [c, by_t] : report.per_class_ap) {
        for (const auto& [t, v] : by_t) {
            out << c << ',' << format_threshold(t) << ',' << v << '\n';
        }
    }
    return out.str();
}

void write_report(const std::filesystem::path& json_path, const std::filesystem::path& csv_path,
                  const EvalReport& report) {
    std::ofstream json_out(json_path, std::ios::binary);
    if (!json_out) {
        throw IoError("cannot write " + json_path.string());
    }
    json_out << report_to_json(report).dump(2) << '\n';
    std::ofstream csv_out(csv_path, std::ios::binary);
    if (!csv_out) {
        throw IoError("cannot write " + csv_path.string());
    }
    csv_out << report_to_csv(report);
    if (!json_out || !csv_out) {
        throw IoError("failed writing evaluation report");
    }
}

ExperimentResult run_experiment(const ExperimentSetup& setup) {
    DetectConfig detect_config = setup.detect;
    detect_config.kind = setup.train.kind;
    detect_config.m = setup.train.m;
    detect_config.gamma = setup.train.gamma;

    const auto samples = build_training_samples(setup.train_videos, setup.train_proposals,
                                                SampleConfig{setup.train.m, setup.train.gamma, 0.5});
    ExperimentResult result;
    result.training = train(samples, setup.train);
    const LinearDetectionModel model(result.training.params);
    result.detections =
        detect_all(setup.test_videos, setup.test_proposals, model, detect_config, setup.eval.workers);
    const auto gts = ground_truth_of(setup.test_videos);
    result.report = evaluate(result.detections, gts, setup.eval);
    return result;
}

std::vector<SweepRow> ablation_sweep(const ExperimentSetup& base, SweepParameter parameter,
                                     std::span<const double> values) {
    std::vector<SweepRow> rows;
    for (double value : values) {
        ExperimentSetup setup = base;
        std::ostringstream name;
        if (parameter == SweepParameter::kUnits) {
            setup.train.m = static_cast<int>(value);
            name << "M=" << setup.train.m;
        } else {
            setup.train.gamma = value;
            name << "gamma=" << std::fixed << std::setprecision(1) << value;
        }
        try {
            rows.push_back({name.str(), value, run_experiment(setup).report});
        } catch (const TrainingError& e) {
            throw TrainingError(name.str() + ": " + e.message(), e.epoch());
        } catch (const InvalidParameter& e) {
            throw InvalidParameter(name.str() + ": " + e.what());
        } catch (const ContractError& e) {
            throw ContractError(name.str() + ": " + e.what());
        }
    }
    return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "setting,threshold,mAP,AR\n";
    for (const auto& row : rows) {
        for (const auto& [t, v] : row.report.map_at) {
            out << row.setting << ',' << format_threshold(t) << ',' << v << ',' << row.report.average_recall << '\n';
        }
    }
    return out.str();
}

}  // namespace blp
