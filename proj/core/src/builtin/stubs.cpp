#include "autonoma/builtin/stubs.hpp"

#include "autonoma/common/utf8.hpp"

#include <regex>

namespace autonoma::builtin {

namespace {

constexpr unsigned char kPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00,
    0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06, 0x00, 0x00, 0x00, 0x1f, 0x15, 0xc4, 0x89, 0x00,
    0x00, 0x00, 0x0b, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x00, 0x02, 0x00, 0x00, 0x05, 0x00,
    0x01, 0x7a, 0x5e, 0xab, 0x3f, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82,
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

}  // namespace

std::string_view placeholder_png() { return {reinterpret_cast<const char*>(kPng), sizeof kPng}; }

std::vector<std::string> split_actions(std::string_view request) {
    static const std::regex sep(R"(\s*,\s*|\s+(?:and|then)\s+)", std::regex::icase);
    const std::string text(request);
    std::vector<std::string> out;
    for (std::sregex_token_iterator it(text.begin(), text.end(), sep, -1), end; it != end; ++it) {
        auto part = trim(it->str());
        if (!part.empty()) out.push_back(std::move(part));
    }
    return out;
}

StubResult RecordingStubAgent::perform(std::string_view request, agents::ArtifactSink* sink) const {
    StubResult r;
    r.actions = split_actions(request);
    const bool wants_shot = kind_ == Kind::computer ||
                            utf8::to_lower_ascii(request).find("screenshot") != std::string::npos;
    if (wants_shot && !r.actions.empty() && sink) r.screenshot = sink->write_screenshot("capture.png", placeholder_png());
    r.acknowledgment = "recorded " + std::to_string(r.actions.size()) + " action(s); no automation backend attached";
    return r;
}

agents::AgentOutcome RecordingStubAgent::run(const agents::TaskPayload& payload, agents::TaskContext& ctx) {
    const auto request = payload.args.is_object() && payload.args.contains("action")
                             ? payload.args["action"].get<std::string>()
                             : payload.description;
    const auto r = perform(request, ctx.artifacts());
    agents::AgentOutput out;
    out.summary = r.acknowledgment;
    out.data = Json{{"actions", r.actions}, {"backend", kind_ == Kind::browser ? "browser-stub" : "computer-stub"}};
    if (r.screenshot) out.artifacts.push_back(*r.screenshot);
    return out;
}

agents::AgentManifest browser_manifest() {
    agents::AgentManifest m;
    m.id = "browser";
    m.display_name = "Browser";
    m.capabilities = {agents::cap::browse};
    m.description = "Records browser actions; attach an automation backend for real navigation";
    return m;
}

agents::AgentManifest computer_manifest() {
    agents::AgentManifest m;
    m.id = "computer";
    m.display_name = "Computer";
    m.capabilities = {agents::cap::computer_control};
    m.description = "Records desktop actions and returns a placeholder capture";
    return m;
}

}  // namespace autonoma::builtin
