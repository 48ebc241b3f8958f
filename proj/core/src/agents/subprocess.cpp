#include "subprocess.hpp"

#include "autonoma/common/error.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <string>
#include <fcntl.h>
#include <poll.h>
#include <sched.h>
#include <sys/wait.h>
#include <unistd.h>

namespace autonoma::agents {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

bool write_proc(const std::string& path, const std::string& text) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CLOEXEC);
    if (fd < 0) return false;
    const auto n = ::write(fd, text.data(), text.size());
    ::close(fd);
    return n == static_cast<ssize_t>(text.size());
}

// Identity map of every id when privileged, else just our own ids.
void map_identity(pid_t child) {
    const auto dir = "/proc/" + std::to_string(child) + "/";
    if (write_proc(dir + "uid_map", "0 0 4294967295") && write_proc(dir + "gid_map", "0 0 4294967295")) return;
    write_proc(dir + "uid_map", std::to_string(::getuid()) + " " + std::to_string(::getuid()) + " 1");
    write_proc(dir + "setgroups", "deny");
    write_proc(dir + "gid_map", std::to_string(::getgid()) + " " + std::to_string(::getgid()) + " 1");
}

}  // namespace

Subprocess::Subprocess(const SpawnOptions& opts) {
    if (opts.argv.empty()) throw Error(Errc::invalid_argument, "empty argv");
    int in[2], out[2], err[2], status[2];
    if (::pipe2(in, O_CLOEXEC) || ::pipe2(out, O_CLOEXEC) || ::pipe2(err, O_CLOEXEC) || ::pipe2(status, O_CLOEXEC)) {
        throw Error(Errc::io_error, std::string("pipe: ") + std::strerror(errno));
    }

    std::vector<std::string> env_strings;
    for (const auto& [k, v] : opts.env) env_strings.push_back(k + "=" + v);
    std::vector<char*> argv, envp;
    for (const auto& a : opts.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    for (auto& e : env_strings) envp.push_back(e.data());
    envp.push_back(nullptr);
    const std::string cwd = opts.cwd ? opts.cwd->string() : std::string();

    int ns_ready[2] = {-1, -1}, ns_mapped[2] = {-1, -1};
    if (opts.isolate_network && (::pipe2(ns_ready, O_CLOEXEC) || ::pipe2(ns_mapped, O_CLOEXEC))) {
        throw Error(Errc::io_error, std::string("pipe: ") + std::strerror(errno));
    }

    pid_ = ::fork();
    if (pid_ < 0) throw Error(Errc::io_error, std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
        ::setpgid(0, 0);
        ::dup2(in[0], 0);
        ::dup2(out[1], 1);
        ::dup2(err[1], 2);
        if (opts.isolate_network) {
            // The parent writes the id maps so the child keeps its identity
            // and file permissions inside the new namespace.
            char byte = ::unshare(CLONE_NEWUSER | CLONE_NEWNET) == 0 ? 1 : 0;
            [[maybe_unused]] auto w = ::write(ns_ready[1], &byte, 1);
            [[maybe_unused]] auto r = ::read(ns_mapped[0], &byte, 1);
        }
        if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) {
            const int e = errno;
            [[maybe_unused]] auto n = ::write(status[1], &e, sizeof e);
            ::_exit(127);
        }
        if (opts.env.empty()) {
            ::execvp(argv[0], argv.data());
        } else {
            ::execvpe(argv[0], argv.data(), envp.data());
        }
        const int e = errno;
        [[maybe_unused]] auto n = ::write(status[1], &e, sizeof e);
        ::_exit(127);
    }
    ::setpgid(pid_, pid_);
    if (opts.isolate_network) {
        ::close(ns_ready[1]);
        ::close(ns_mapped[0]);
        char byte = 0;
        if (::read(ns_ready[0], &byte, 1) == 1 && byte == 1) map_identity(pid_);
        [[maybe_unused]] auto w = ::write(ns_mapped[1], &byte, 1);
        ::close(ns_ready[0]);
        ::close(ns_mapped[1]);
    }
    ::close(in[0]);
    ::close(out[1]);
    ::close(err[1]);
    ::close(status[1]);
    in_ = in[1];
    out_ = out[0];
    err_ = err[0];

    int child_errno = 0;
    const auto n = ::read(status[0], &child_errno, sizeof child_errno);
    ::close(status[0]);
    if (n == sizeof child_errno) {
        wait();
        close_fd(in_);
        close_fd(out_);
        close_fd(err_);
        throw Error(Errc::io_error, "cannot start " + opts.argv[0] + ": " + std::strerror(child_errno));
    }
}

Subprocess::~Subprocess() {
    if (!waited_) {
        kill();
        wait();
    }
    close_fd(in_);
    close_fd(out_);
    close_fd(err_);
}

void Subprocess::write_stdin(std::string_view data) {
    std::size_t done = 0;
    while (done < data.size() && in_ >= 0) {
        const auto n = ::write(in_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            return;  // child closed its stdin
        }
        done += static_cast<std::size_t>(n);
    }
}

void Subprocess::close_stdin() { close_fd(in_); }

Subprocess::Read Subprocess::read_some(std::string& out, std::string& err, int timeout_ms) {
    if (out_ < 0 && err_ < 0) return Read::eof;
    pollfd fds[2] = {{out_, POLLIN, 0}, {err_, POLLIN, 0}};
    const int rc = ::poll(fds, 2, timeout_ms);
    if (rc == 0) return Read::timeout;
    if (rc < 0) return errno == EINTR ? Read::timeout : Read::eof;
    char buf[4096];
    int* fdp[2] = {&out_, &err_};
    std::string* sinks[2] = {&out, &err};
    for (int i = 0; i < 2; ++i) {
        if (*fdp[i] < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        const auto n = ::read(*fdp[i], buf, sizeof buf);
        if (n > 0) {
            sinks[i]->append(buf, static_cast<std::size_t>(n));
        } else if (n == 0 || errno != EINTR) {
            close_fd(*fdp[i]);
        }
    }
    return (out_ < 0 && err_ < 0) ? Read::eof : Read::data;
}

void Subprocess::kill() {
    if (pid_ > 0 && !waited_) {
        ::kill(-pid_, SIGKILL);
        ::kill(pid_, SIGKILL);
    }
}

int Subprocess::wait() {
    if (waited_) return status_;
    int st = 0;
    while (::waitpid(pid_, &st, 0) < 0 && errno == EINTR) {
    }
    waited_ = true;
    status_ = WIFEXITED(st) ? WEXITSTATUS(st) : 128 + (WIFSIGNALED(st) ? WTERMSIG(st) : 0);
    // Reap anything left in the group.
    ::kill(-pid_, SIGKILL);
    return status_;
}

}  // namespace autonoma::agents
