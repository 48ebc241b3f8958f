#pragma once

#include "autonoma/common/json.hpp"

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::agents {

enum class HookStage { pre_plan, post_plan, pre_task, post_task, pre_report, post_report };
enum class HookAction { transform, validate, notify };

std::string_view to_string(HookStage s);
HookStage hook_stage_from_string(std::string_view s);

// transform: may rewrite the payload; its return value is ignored.
// validate:  sees a copy; a returned message aborts the stage.
// notify:    sees a copy; side effects only.
struct Hook {
    HookStage stage = HookStage::pre_task;
    std::string id;
    HookAction action = HookAction::notify;
    std::function<std::optional<std::string>(Json& payload)> fn;
};

struct HookAbort {
    std::string hook_id;
    std::string reason;
};

class HookPipeline {
public:
    std::string install_hook(Hook hook);

    // Runs the stage's hooks in registration order. Stops at the first
    // validate abort. Exceptions thrown by a hook count as an abort.
    std::optional<HookAbort> run(HookStage stage, Json& payload) const;

private:
    mutable std::mutex mu_;
    std::vector<Hook> hooks_;
    std::size_t next_id_ = 1;
};

}  // namespace autonoma::agents
