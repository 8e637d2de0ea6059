#ifndef NAMLITE_METRICS_HPP
#define NAMLITE_METRICS_HPP

#include <span>

namespace namlite {

// Area under the ROC curve with ties counted as one half. NaN when one of
// the classes is absent.
double roc_auc(std::span<const double> scores, std::span<const double> labels);

double rmse(std::span<const double> pred, std::span<const double> target);

// 1 - SSE/SST; NaN for a constant target.
double r_squared(std::span<const double> pred, std::span<const double> target);

}  // namespace namlite

#endif  // NAMLITE_METRICS_HPP
