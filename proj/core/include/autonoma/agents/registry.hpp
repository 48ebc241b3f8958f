#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/agents/manifest.hpp"
#include "autonoma/model/types.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

namespace autonoma::agents {

struct RegisteredAgent {
    AgentManifest manifest;
    std::shared_ptr<Agent> impl;
};

using AgentTable = std::map<std::string, std::shared_ptr<const RegisteredAgent>>;

class Registry;

// What one workflow executes against: the table pinned when it was planned,
// plus anything registered since. Removals never reach a pinned view.
class RegistryView {
public:
    RegistryView() = default;
    RegistryView(std::shared_ptr<const AgentTable> pinned, const Registry* live)
        : pinned_(std::move(pinned)), live_(live) {}

    std::shared_ptr<const RegisteredAgent> find(const std::string& id) const;
    std::vector<std::shared_ptr<const RegisteredAgent>> agents() const;  // sorted by id
    std::set<std::string> capabilities() const;
    bool empty() const;

private:
    std::shared_ptr<const AgentTable> pinned_;
    const Registry* live_ = nullptr;
};

class Registry {
public:
    // Throws DuplicateAgentId or GrantLintFailure.
    std::string register_agent(AgentManifest manifest, std::shared_ptr<Agent> impl);
    // Takes effect for views created afterwards.
    void remove_agent(const std::string& id);

    std::shared_ptr<const AgentTable> snapshot() const;
    RegistryView view() const { return RegistryView(snapshot(), this); }
    std::set<std::string> capabilities() const;
    std::shared_ptr<const RegisteredAgent> find(const std::string& id) const;

private:
    mutable std::mutex mu_;
    std::shared_ptr<const AgentTable> table_ = std::make_shared<AgentTable>();
};

// Capable agents sorted by id; the hint wins when it qualifies. Throws
// NoCapableAgent.
std::string select_agent(const model::PlanStep& step, const RegistryView& registry);

}  // namespace autonoma::agents
