#pragma once

#include "autonoma/model/types.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace autonoma::model {

using Levels = std::vector<std::vector<std::string>>;

// A plan that passed every structural check, annotated with dependency
// levels. Only validate_plan can produce one.
class ValidatedPlan {
public:
    const Plan& plan() const noexcept { return plan_; }
    const Levels& levels() const noexcept { return levels_; }

    std::size_t level_of(const std::string& step_id) const;
    std::size_t index_of(const std::string& step_id) const;
    const PlanStep& step(const std::string& step_id) const;

    // Transitive dependents of `step_id` in declaration order.
    std::vector<std::string> descendants(const std::string& step_id) const;

private:
    friend ValidatedPlan validate_plan(const Plan&, const std::set<std::string>&);
    ValidatedPlan(Plan plan, Levels levels, std::vector<std::size_t> level_index);

    Plan plan_;
    Levels levels_;
    std::vector<std::size_t> level_index_;  // parallel to plan_.steps
    std::unordered_map<std::string, std::size_t> index_;
};

// Throws Error with EmptyPlan, DuplicateStepId, UnknownCapability,
// UnknownDependency or CyclicDependency.
ValidatedPlan validate_plan(const Plan& plan, const std::set<std::string>& registry_capabilities);

// Longest-path layering: a root sits at level 0, every other step one level
// below its deepest dependency. Steps inside a level keep declaration order.
Levels dependency_levels(const ValidatedPlan& plan);

// Descendants of `step_id` in `plan` (no validation, used by the state fold).
std::vector<std::string> transitive_dependents(const Plan& plan, const std::string& step_id);

}  // namespace autonoma::model
