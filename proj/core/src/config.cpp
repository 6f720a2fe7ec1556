#include "cellfit/config.hpp"

#include "cellfit/errors.hpp"
#include "cellfit/objective.hpp"

namespace cellfit {

void FitConfig::validate() const {
    if (gamma != 2 && gamma != 3) throw ConfigError("gamma must be 2 or 3");
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (delta && !(*delta > 0.0 && *delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
    if (k_assumed < 1) throw ConfigError("k_assumed must be >= 1");
    if (M < 2) throw ConfigError("pool size M must be >= 2 (the complexity penalty uses log M)");
    if (s_min < 1) throw ConfigError("s_min must be >= 1");
    if (v_min < 1) throw ConfigError("v_min must be >= 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw ConfigError("validation_fraction must lie in (0,1)");
    if (max_leaves && *max_leaves < 1) throw ConfigError("max_leaves must be >= 1");
    if (max_cuts_per_dim < 1) throw ConfigError("max_cuts_per_dim must be >= 1");
    if (!(improvement_tol >= 0.0)) throw ConfigError("improvement_tol must be >= 0");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

double FitConfig::resolved_alpha() const {
    if (delta) return min_alpha(*delta, k_assumed, M);
    return alpha;
}

} // namespace cellfit
