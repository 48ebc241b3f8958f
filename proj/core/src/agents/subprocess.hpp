#pragma once

#include <sys/types.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::agents {

struct SpawnOptions {
    std::vector<std::string> argv;
    std::optional<std::filesystem::path> cwd;
    bool isolate_network = false;
    std::map<std::string, std::string> env;  // replaces the parent environment when non-empty
};

// Child process with piped standard streams, placed in its own process group
// so kill() also reaches grandchildren.
class Subprocess {
public:
    explicit Subprocess(const SpawnOptions& opts);
    ~Subprocess();
    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    void write_stdin(std::string_view data);
    void close_stdin();

    enum class Read { data, eof, timeout };
    // Appends whatever arrives within `timeout_ms` on either stream.
    Read read_some(std::string& out, std::string& err, int timeout_ms);

    void kill();
    // Exit code, or 128 + signal number.
    int wait();
    bool exited() const { return waited_; }

private:
    pid_t pid_ = -1;
    int in_ = -1;
    int out_ = -1;
    int err_ = -1;
    bool waited_ = false;
    int status_ = 0;
};

}  // namespace autonoma::agents
