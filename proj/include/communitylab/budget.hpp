#pragma once

#include <cstdlib>
#include <string>

#include "communitylab/error.hpp"

namespace communitylab {

inline constexpr double kDefaultBudget = 1e8;

/// Enumeration budget: COMMUNITYLAB_BUDGET when set and positive, else the default.
inline double default_budget() {
    if (const char* env = std::getenv("COMMUNITYLAB_BUDGET")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0) return v;
    }
    return kDefaultBudget;
}

inline void require_within_budget(const std::string& what, double required, double budget) {
    if (required > budget) throw BudgetExceeded(what, required, budget);
}

} // namespace communitylab
