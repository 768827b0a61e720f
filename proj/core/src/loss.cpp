#include "blp/loss.hpp"

#include <cmath>
#include <string>

#include "blp/error.hpp"
#include "blp/pinpoint.hpp"

namespace blp {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ContractError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                            std::to_string(b) + ")");
    }
}

double weighted_logistic(std::span<const double> p, std::span<const double> t, double pos, double neg) {
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double q = clip_probability(p[j]);
        sum += pos * t[j] * std::log(q) + neg * (1.0 - t[j]) * std::log1p(-q);
    }
    return -sum;
}

std::vector<double> weighted_logistic_gradient(std::span<const double> p, std::span<const double> t, double pos,
                                               double neg) {
    std::vector<double> g(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double q = clip_probability(p[j]);
        g[j] = -pos * t[j] / q + neg * (1.0 - t[j]) / (1.0 - q);
    }
    return g;
}

void check_simplex(std::span<const double> scores, ClassLabel label) {
    if (label.index < 0 || label.index >= static_cast<int>(scores.size())) {
        throw ContractError("class label " + std::to_string(label.index) + " outside score vector");
    }
    double sum = 0.0;
    for (double s : scores) {
        if (!(s >= 0.0)) {
            throw ContractError("classification scores must be non-negative");
        }
        sum += s;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw ContractError("classification scores sum to " + std::to_string(sum) + ", expected 1");
    }
}

}  // namespace

LossWeights LossWeights::for_units(int m, double lambda_tradeoff) {
    if (m < 2) {
        throw InvalidParameter("loss weights need m >= 2");
    }
    if (!(lambda_tradeoff >= 0.0)) {
        throw InvalidParameter("lambda must be >= 0");
    }
    LossWeights w;
    w.lambda_tradeoff = lambda_tradeoff;
    w.beta_minus = 0.5 * m / (m - 1.0);
    w.beta_plus = (m + 1.0) * w.beta_minus;
    return w;
}

double in_out_loss(std::span<const double> p, std::span<const double> t) {
    check_lengths(p.size(), t.size(), "in_out_loss");
    return weighted_logistic(p, t, 1.0, 1.0);
}

std::vector<double> in_out_loss_gradient(std::span<const double> p, std::span<const double> t) {
    check_lengths(p.size(), t.size(), "in_out_loss_gradient");
    return weighted_logistic_gradient(p, t, 1.0, 1.0);
}

double boundary_loss(std::span<const double> p_s, std::span<const double> p_e, std::span<const double> t_s,
                     std::span<const double> t_e, const LossWeights& w) {
    check_lengths(p_s.size(), t_s.size(), "boundary_loss (start)");
    check_lengths(p_e.size(), t_e.size(), "boundary_loss (end)");
    return weighted_logistic(p_s, t_s, w.beta_plus, w.beta_minus) +
           weighted_logistic(p_e, t_e, w.beta_plus, w.beta_minus);
}

BoundaryGradient boundary_loss_gradient(std::span<const double> p_s, std::span<const double> p_e,
                                        std::span<const double> t_s, std::span<const double> t_e,
                                        const LossWeights& w) {
    check_lengths(p_s.size(), t_s.size(), "boundary_loss_gradient (start)");
    check_lengths(p_e.size(), t_e.size(), "boundary_loss_gradient (end)");
    return {weighted_logistic_gradient(p_s, t_s, w.beta_plus, w.beta_minus),
            weighted_logistic_gradient(p_e, t_e, w.beta_plus, w.beta_minus)};
}

double classification_loss(std::span<const double> scores, ClassLabel label) {
    check_simplex(scores, label);
    return -std::log(clip_probability(scores[label.index]));
}

std::vector<double> classification_loss_gradient(std::span<const double> scores, ClassLabel label) {
    check_simplex(scores, label);
    std::vector<double> g(scores.size(), 0.0);
    g[label.index] = -1.0 / clip_probability(scores[label.index]);
    return g;
}

double joint_loss(std::span<const double> cls_terms, std::span<const double> loc_terms, double lambda_tradeoff) {
    if (cls_terms.empty()) {
        throw ContractError("joint loss needs at least one classification term");
    }
    double cls = 0.0;
    for (double v : cls_terms) {
        cls += v;
    }
    cls /= static_cast<double>(cls_terms.size());
    if (loc_terms.empty() || lambda_tradeoff == 0.0) {
        return cls;
    }
    double loc = 0.0;
    for (double v : loc_terms) {
        loc += v;
    }
    return cls + lambda_tradeoff * loc / static_cast<double>(loc_terms.size());
}

}  // namespace blp
