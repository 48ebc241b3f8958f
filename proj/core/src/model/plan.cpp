#include "autonoma/model/plan.hpp"

#include "autonoma/common/error.hpp"

#include <algorithm>
#include <deque>

namespace autonoma::model {

ValidatedPlan::ValidatedPlan(Plan plan, Levels levels, std::vector<std::size_t> level_index)
    : plan_(std::move(plan)), levels_(std::move(levels)), level_index_(std::move(level_index)) {
    for (std::size_t i = 0; i < plan_.steps.size(); ++i) index_.emplace(plan_.steps[i].id, i);
}

std::size_t ValidatedPlan::index_of(const std::string& step_id) const {
    auto it = index_.find(step_id);
    if (it == index_.end()) throw Error(Errc::not_found, "unknown step '" + step_id + "'");
    return it->second;
}

std::size_t ValidatedPlan::level_of(const std::string& step_id) const {
    return level_index_[index_of(step_id)];
}

const PlanStep& ValidatedPlan::step(const std::string& step_id) const {
    return plan_.steps[index_of(step_id)];
}

std::vector<std::string> ValidatedPlan::descendants(const std::string& step_id) const {
    return transitive_dependents(plan_, step_id);
}

std::vector<std::string> transitive_dependents(const Plan& plan, const std::string& step_id) {
    std::set<std::string> reached{step_id};
    // Iterate to a fixed point; plans are small and may declare dependents
    // before their dependencies.
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& s : plan.steps) {
            if (reached.count(s.id)) continue;
            for (const auto& d : s.depends_on) {
                if (reached.count(d)) {
                    reached.insert(s.id);
                    grew = true;
                    break;
                }
            }
        }
    }
    std::vector<std::string> out;
    for (const auto& s : plan.steps) {
        if (s.id != step_id && reached.count(s.id)) out.push_back(s.id);
    }
    return out;
}

ValidatedPlan validate_plan(const Plan& plan, const std::set<std::string>& registry_capabilities) {
    if (plan.steps.empty()) throw Error(Errc::empty_plan, "plan has no steps");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        if (!index.emplace(plan.steps[i].id, i).second) {
            throw Error(Errc::duplicate_step_id, "duplicate step id '" + plan.steps[i].id + "'");
        }
    }
    for (const auto& s : plan.steps) {
        if (!registry_capabilities.count(s.required_capability)) {
            throw Error(Errc::unknown_capability, "step '" + s.id + "' requires unknown capability '" +
                                                      s.required_capability + "'");
        }
        for (const auto& d : s.depends_on) {
            if (!index.count(d)) {
                throw Error(Errc::unknown_dependency,
                            "step '" + s.id + "' depends on undeclared step '" + d + "'");
            }
        }
    }

    // Kahn's algorithm; ties resolved by declaration order.
    const auto n = plan.steps.size();
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> dependents(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::set<std::size_t> unique_deps;
        for (const auto& d : plan.steps[i].depends_on) unique_deps.insert(index.at(d));
        for (auto d : unique_deps) {
            dependents[d].push_back(i);
            ++indegree[i];
        }
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    std::vector<std::size_t> level(n, 0);
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto i = ready.front();
        ready.pop_front();
        ++visited;
        for (auto c : dependents[i]) {
            level[c] = std::max(level[c], level[i] + 1);
            if (--indegree[c] == 0) ready.push_back(c);
        }
    }
    if (visited != n) {
        std::string members;
        for (std::size_t i = 0; i < n; ++i) {
            if (indegree[i] > 0) members += (members.empty() ? "" : ",") + plan.steps[i].id;
        }
        throw Error(Errc::cyclic_dependency, "dependency cycle among steps {" + members + "}");
    }

    const auto depth = *std::max_element(level.begin(), level.end()) + 1;
    Levels levels(depth);
    for (std::size_t i = 0; i < n; ++i) levels[level[i]].push_back(plan.steps[i].id);
    return ValidatedPlan(plan, std::move(levels), std::move(level));
}

Levels dependency_levels(const ValidatedPlan& plan) { return plan.levels(); }

}  // namespace autonoma::model
