#include "autonoma/agents/registry.hpp"

#include "autonoma/common/error.hpp"

#include <algorithm>

namespace autonoma::agents {

std::shared_ptr<const RegisteredAgent> RegistryView::find(const std::string& id) const {
    if (live_) {
        if (auto a = live_->find(id)) return a;
    }
    if (pinned_) {
        auto it = pinned_->find(id);
        if (it != pinned_->end()) return it->second;
    }
    return nullptr;
}

std::vector<std::shared_ptr<const RegisteredAgent>> RegistryView::agents() const {
    AgentTable merged;
    if (pinned_) merged = *pinned_;
    if (live_) {
        for (const auto& [id, a] : *live_->snapshot()) merged[id] = a;
    }
    std::vector<std::shared_ptr<const RegisteredAgent>> out;
    for (const auto& [id, a] : merged) out.push_back(a);
    return out;
}

std::set<std::string> RegistryView::capabilities() const {
    std::set<std::string> out;
    for (const auto& a : agents()) out.insert(a->manifest.capabilities.begin(), a->manifest.capabilities.end());
    return out;
}

bool RegistryView::empty() const { return agents().empty(); }

std::string Registry::register_agent(AgentManifest manifest, std::shared_ptr<Agent> impl) {
    const auto violations = lint_manifest(manifest);
    if (!violations.empty()) {
        std::string msg = "manifest '" + manifest.id + "' fails grant lint:";
        for (const auto& v : violations) msg += " " + v;
        throw Error(Errc::grant_lint_failure, msg);
    }
    if (!impl) throw Error(Errc::invalid_argument, "agent implementation is null");
    std::lock_guard lock(mu_);
    if (table_->count(manifest.id)) throw Error(Errc::duplicate_agent_id, "agent id already registered: " + manifest.id);
    auto next = std::make_shared<AgentTable>(*table_);
    const auto id = manifest.id;
    (*next)[id] = std::make_shared<const RegisteredAgent>(RegisteredAgent{std::move(manifest), std::move(impl)});
    table_ = std::move(next);
    return id;
}

void Registry::remove_agent(const std::string& id) {
    std::lock_guard lock(mu_);
    if (!table_->count(id)) throw Error(Errc::unknown_agent, "no such agent: " + id);
    auto next = std::make_shared<AgentTable>(*table_);
    next->erase(id);
    table_ = std::move(next);
}

std::shared_ptr<const AgentTable> Registry::snapshot() const {
    std::lock_guard lock(mu_);
    return table_;
}

std::set<std::string> Registry::capabilities() const { return view().capabilities(); }

std::shared_ptr<const RegisteredAgent> Registry::find(const std::string& id) const {
    auto snap = snapshot();
    auto it = snap->find(id);
    return it == snap->end() ? nullptr : it->second;
}

std::string select_agent(const model::PlanStep& step, const RegistryView& registry) {
    const auto capable = [&](const RegisteredAgent& a) {
        return a.manifest.capabilities.count(step.required_capability) != 0;
    };
    if (step.agent_hint) {
        auto hinted = registry.find(*step.agent_hint);
        if (hinted && capable(*hinted)) return hinted->manifest.id;
    }
    for (const auto& a : registry.agents()) {
        if (capable(*a)) return a->manifest.id;  // agents() is sorted by id
    }
    throw Error(Errc::no_capable_agent, "no agent declares capability '" + step.required_capability + "'");
}

}  // namespace autonoma::agents
