#pragma once

#include <span>
#include <vector>

#include "blp/segment.hpp"

namespace blp {

/// Trade-off weights for the joint objective and the boundary loss.
struct LossWeights {
    double lambda_tradeoff = 20.0;
    double beta_minus = 1.0;
    double beta_plus = 1.0;

    /// beta_minus = 0.5 M / (M - 1), beta_plus = (M + 1) beta_minus.
    static LossWeights for_units(int m, double lambda_tradeoff = 20.0);
};

inline constexpr double kLambdaThumos = 20.0;
inline constexpr double kLambdaActivityNet = 250.0;

/// -sum_j [t_j log p_j + (1 - t_j) log(1 - p_j)], p clipped.
double in_out_loss(std::span<const double> p, std::span<const double> t);
std::vector<double> in_out_loss_gradient(std::span<const double> p, std::span<const double> t);

/// Class-balanced logistic loss summed over the start and end tracks.
double boundary_loss(std::span<const double> p_s, std::span<const double> p_e, std::span<const double> t_s,
                     std::span<const double> t_e, const LossWeights& w);

struct BoundaryGradient {
    std::vector<double> d_p_s;
    std::vector<double> d_p_e;
};
BoundaryGradient boundary_loss_gradient(std::span<const double> p_s, std::span<const double> p_e,
                                        std::span<const double> t_s, std::span<const double> t_e,
                                        const LossWeights& w);

/// -log scores[label]; scores must be a probability simplex.
double classification_loss(std::span<const double> scores, ClassLabel label);
std::vector<double> classification_loss_gradient(std::span<const double> scores, ClassLabel label);

/// mean(cls_terms) + lambda * mean(loc_terms); loc_terms may be empty.
double joint_loss(std::span<const double> cls_terms, std::span<const double> loc_terms, double lambda_tradeoff);

/// d(loss)/d(logit) for a sigmoid output feeding a weighted logistic term:
/// pos_weight * t * (p - 1) + neg_weight * (1 - t) * p.
inline double weighted_logistic_logit_gradient(double p, double t, double pos_weight, double neg_weight) {
    return pos_weight * t * (p - 1.0) + neg_weight * (1.0 - t) * p;
}

}  // namespace blp
