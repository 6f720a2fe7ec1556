#pragma once
#include <algorithm>
#include <cmath>
#include <string>

namespace cellfit {

enum class LossKind { zero_one, log_loss, brier };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& s);

inline constexpr double kProbClip = 1e-12; // probability floor for log loss

// Predicted class is 1 whenever p >= 0.5; the tie at exactly 0.5 resolves to
// class 1 so thresholded predictions are reproducible.
inline int predicted_class(double p) { return p >= 0.5 ? 1 : 0; }

inline double pointwise_loss(double p, int y, LossKind kind) {
    switch (kind) {
        case LossKind::zero_one:
            return predicted_class(p) == y ? 0.0 : 1.0;
        case LossKind::log_loss: {
            const double q = std::clamp(p, kProbClip, 1.0 - kProbClip);
            return y == 1 ? -std::log(q) : -std::log(1.0 - q);
        }
        case LossKind::brier: {
            const double d = p - static_cast<double>(y);
            return d * d;
        }
    }
    return 0.0;
}

} // namespace cellfit
