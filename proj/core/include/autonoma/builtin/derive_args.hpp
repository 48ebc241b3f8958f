#pragma once

#include "autonoma/agents/agent.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

namespace autonoma::builtin {

// Asks the agent-role backend to turn a step description into the JSON
// arguments the agent needs. `schema` describes the expected object. Returns
// nullopt when no backend serves the role; throws InvalidArgument when the
// answer is not a JSON object.
std::optional<Json> derive_args(const agents::TaskPayload& payload, agents::TaskContext& ctx,
                                const std::string& schema);

// Remembers derived arguments per (conversation, step, attempt) so that a
// re-invocation after an approval acts on the same arguments.
class ArgsCache {
public:
    std::optional<Json> find(const agents::TaskPayload& p) const;
    void put(const agents::TaskPayload& p, Json args);

private:
    using Key = std::tuple<std::string, std::string, std::uint32_t>;
    mutable std::mutex mu_;
    std::map<Key, Json> entries_;
};

}  // namespace autonoma::builtin
