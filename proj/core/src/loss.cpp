#include "cellfit/loss.hpp"

#include <stdexcept>

namespace cellfit {

std::string to_string(LossKind kind) {
    switch (kind) {
        case LossKind::zero_one: return "zero_one";
        case LossKind::log_loss: return "log_loss";
        case LossKind::brier: return "brier";
    }
    return "zero_one";
}

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "zero_one") return LossKind::zero_one;
    if (s == "log_loss") return LossKind::log_loss;
    if (s == "brier") return LossKind::brier;
    throw std::invalid_argument("unknown loss kind: " + s);
}

} // namespace cellfit
