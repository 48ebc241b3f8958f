#include "autonoma/agents/direct_context.hpp"
#include "autonoma/agents/invoke.hpp"
#include "autonoma/supervisor/supervisor.hpp"

#include <atomic>
#include <deque>
#include <map>

namespace autonoma::supervisor {

// ---- SimRuntime ------------------------------------------------------------

void SimRuntime::push(Occurrence o) {
    const auto at = o.at;
    queue_.push(Entry{at, seq_++, std::move(o)});
}

void SimRuntime::start(std::uint64_t run, std::shared_ptr<const agents::RegisteredAgent> agent,
                       agents::TaskPayload payload, const AttemptEnv& env) {
    agents::DirectContext ctx(now_, env.artifacts, env.approvals, env.conversation_id, env.provider);
    auto outcome = agents::invoke(*agent, payload, ctx);
    std::lock_guard lock(mu_);
    if (auto t = ctx.ack_time()) push(Occurrence{Occurrence::Kind::acked, run, *t});
    for (const auto& [at, note] : ctx.heartbeats()) {
        Occurrence o{Occurrence::Kind::heartbeat, run, at};
        o.note = note;
        push(std::move(o));
    }
    Occurrence done{Occurrence::Kind::finished, run, ctx.now()};
    done.outcome = std::move(outcome);
    push(std::move(done));
}

void SimRuntime::cancel(std::uint64_t run) {
    std::lock_guard lock(mu_);
    cancelled_.insert(run);
}

void SimRuntime::set_timer(TimestampMs at, std::uint64_t tag) {
    std::lock_guard lock(mu_);
    push(Occurrence{Occurrence::Kind::timer, tag, std::max(at, now_)});
}

void SimRuntime::post(Occurrence o) {
    std::lock_guard lock(mu_);
    o.at = std::max(o.at, now_);
    push(std::move(o));
}

std::optional<Occurrence> SimRuntime::wait_next() {
    std::lock_guard lock(mu_);
    while (!queue_.empty()) {
        auto e = queue_.top();
        queue_.pop();
        const bool attempt_event = e.occ.kind == Occurrence::Kind::acked ||
                                   e.occ.kind == Occurrence::Kind::heartbeat ||
                                   e.occ.kind == Occurrence::Kind::finished;
        if (attempt_event && cancelled_.count(e.occ.run)) continue;
        now_ = std::max(now_, e.at);
        return std::move(e.occ);
    }
    return std::nullopt;
}

// ---- ThreadRuntime ---------------------------------------------------------

struct ThreadRuntime::Shared {
    std::shared_ptr<Clock> clock;
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Occurrence> ready;
    std::multimap<TimestampMs, std::uint64_t> timers;
    std::map<std::uint64_t, std::shared_ptr<std::atomic<bool>>> cancel_flags;

    void post(Occurrence o) {
        {
            std::lock_guard lock(mu);
            ready.push_back(std::move(o));
        }
        cv.notify_all();
    }
};

namespace {

class ThreadContext final : public agents::TaskContext {
public:
    ThreadContext(std::shared_ptr<ThreadRuntime::Shared> shared, std::uint64_t run,
                  std::shared_ptr<std::atomic<bool>> cancelled, AttemptEnv env)
        : shared_(std::move(shared)), run_(run), cancelled_(std::move(cancelled)), env_(std::move(env)) {}

    void acknowledge() override {
        if (acked_) return;
        acked_ = true;
        shared_->post(Occurrence{Occurrence::Kind::acked, run_, now()});
    }
    void heartbeat(const std::string& note) override {
        Occurrence o{Occurrence::Kind::heartbeat, run_, now()};
        o.note = note;
        shared_->post(std::move(o));
    }
    void sleep_for(std::int64_t ms) override {
        const auto until = now() + ms;
        while (!cancelled() && now() < until) {
            std::this_thread::sleep_for(std::chrono::milliseconds(std::min<std::int64_t>(20, until - now())));
        }
    }
    bool cancelled() const override { return cancelled_->load(); }
    TimestampMs now() const override { return shared_->clock->now_ms(); }
    bool redeem_approval(const std::string& digest) override {
        return env_.approvals && env_.approvals->redeem_binding(env_.conversation_id, digest, now());
    }
    agents::ArtifactSink* artifacts() override { return env_.artifacts; }
    provider::Router* provider() override { return env_.provider; }

private:
    std::shared_ptr<ThreadRuntime::Shared> shared_;
    std::uint64_t run_;
    std::shared_ptr<std::atomic<bool>> cancelled_;
    AttemptEnv env_;
    bool acked_ = false;
};

}  // namespace

ThreadRuntime::ThreadRuntime(std::shared_ptr<Clock> clock, std::int64_t grace_ms)
    : clock_(std::move(clock)), grace_ms_(grace_ms), shared_(std::make_shared<Shared>()) {
    shared_->clock = clock_;
}

ThreadRuntime::~ThreadRuntime() {
    {
        std::lock_guard lock(shared_->mu);
        for (auto& [run, flag] : shared_->cancel_flags) flag->store(true);
    }
    // Give cancelled attempts the grace period, then abandon the rest.
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(grace_ms_);
    for (auto& w : workers_) {
        while (!w.done->load() && std::chrono::steady_clock::now() < deadline) {
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        if (w.done->load()) {
            w.thread.join();
        } else {
            w.thread.detach();
        }
    }
}

void ThreadRuntime::start(std::uint64_t run, std::shared_ptr<const agents::RegisteredAgent> agent,
                          agents::TaskPayload payload, const AttemptEnv& env) {
    auto flag = std::make_shared<std::atomic<bool>>(false);
    {
        std::lock_guard lock(shared_->mu);
        shared_->cancel_flags[run] = flag;
    }
    auto shared = shared_;
    auto done = std::make_shared<std::atomic<bool>>(false);
    std::thread t([shared, run, flag, done, agent = std::move(agent), payload = std::move(payload), env] {
        ThreadContext ctx(shared, run, flag, env);
        auto outcome = agents::invoke(*agent, payload, ctx);
        Occurrence finished{Occurrence::Kind::finished, run, shared->clock->now_ms()};
        finished.outcome = std::move(outcome);
        shared->post(std::move(finished));
        done->store(true);
    });
    workers_.push_back(Worker{std::move(t), std::move(done)});
}

void ThreadRuntime::cancel(std::uint64_t run) {
    std::lock_guard lock(shared_->mu);
    if (auto it = shared_->cancel_flags.find(run); it != shared_->cancel_flags.end()) it->second->store(true);
}

void ThreadRuntime::set_timer(TimestampMs at, std::uint64_t tag) {
    {
        std::lock_guard lock(shared_->mu);
        shared_->timers.emplace(at, tag);
    }
    shared_->cv.notify_all();
}

void ThreadRuntime::post(Occurrence o) {
    o.at = now();
    shared_->post(std::move(o));
}

std::optional<Occurrence> ThreadRuntime::wait_next() {
    std::unique_lock lock(shared_->mu);
    for (;;) {
        const auto now = clock_->now_ms();
        if (!shared_->timers.empty() && shared_->timers.begin()->first <= now) {
            auto it = shared_->timers.begin();
            Occurrence o{Occurrence::Kind::timer, it->second, now};
            shared_->timers.erase(it);
            return o;
        }
        if (!shared_->ready.empty()) {
            auto o = std::move(shared_->ready.front());
            shared_->ready.pop_front();
            // Drop progress from attempts that were cancelled meanwhile.
            if (o.kind != Occurrence::Kind::timer && o.kind != Occurrence::Kind::approval &&
                o.kind != Occurrence::Kind::cancel) {
                auto f = shared_->cancel_flags.find(o.run);
                if (f != shared_->cancel_flags.end() && f->second->load()) continue;
            }
            return o;
        }
        if (shared_->timers.empty()) {
            shared_->cv.wait(lock);
        } else {
            const auto wait = std::max<std::int64_t>(1, shared_->timers.begin()->first - now);
            shared_->cv.wait_for(lock, std::chrono::milliseconds(std::min<std::int64_t>(wait, 50)));
        }
    }
}

}  // namespace autonoma::supervisor
