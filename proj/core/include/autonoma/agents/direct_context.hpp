#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/agents/approvals.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace autonoma::agents {

// Context for running an agent outside the supervisor, on a logical clock:
// sleep_for advances time instead of blocking.
class DirectContext final : public TaskContext {
public:
    explicit DirectContext(TimestampMs start = 0, ArtifactSink* sink = nullptr, ApprovalAuthority* approvals = nullptr,
                           std::string conversation_id = {}, provider::Router* provider = nullptr)
        : start_(start),
          sink_(sink),
          approvals_(approvals),
          conversation_id_(std::move(conversation_id)),
          provider_(provider) {}

    void acknowledge() override {
        if (!ack_at_) ack_at_ = now();
    }
    void heartbeat(const std::string& note) override { heartbeats_.emplace_back(now(), note); }
    void sleep_for(std::int64_t ms) override {
        if (!cancelled_) offset_ += ms;
    }
    bool cancelled() const override { return cancelled_; }
    TimestampMs now() const override { return start_ + offset_; }
    bool redeem_approval(const std::string& digest) override {
        return approvals_ && approvals_->redeem_binding(conversation_id_, digest, now());
    }
    ArtifactSink* artifacts() override { return sink_; }
    provider::Router* provider() override { return provider_; }

    void cancel() { cancelled_ = true; }
    bool acked() const { return ack_at_.has_value(); }
    std::optional<TimestampMs> ack_time() const { return ack_at_; }
    const std::vector<std::pair<TimestampMs, std::string>>& heartbeats() const { return heartbeats_; }

private:
    TimestampMs start_;
    std::int64_t offset_ = 0;
    ArtifactSink* sink_;
    ApprovalAuthority* approvals_;
    std::string conversation_id_;
    provider::Router* provider_;
    std::optional<TimestampMs> ack_at_;
    bool cancelled_ = false;
    std::vector<std::pair<TimestampMs, std::string>> heartbeats_;
};

}  // namespace autonoma::agents
