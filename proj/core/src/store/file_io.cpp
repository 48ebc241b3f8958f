#include "autonoma/common/error.hpp"
#include "autonoma/store/store.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace autonoma::store {

namespace {

[[noreturn]] void throw_errno(const std::filesystem::path& path, const char* what) {
    const int e = errno;
    if (e == ENOSPC || e == EDQUOT) {
        throw Error(Errc::storage_full, std::string(what) + " " + path.string() + ": " + std::strerror(e));
    }
    throw Error(Errc::io_error, std::string(what) + " " + path.string() + ": " + std::strerror(e));
}

void write_all(int fd, const std::filesystem::path& path, std::string_view data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int saved = errno;
            ::close(fd);
            errno = saved;
            throw_errno(path, "write");
        }
        done += static_cast<std::size_t>(n);
    }
}

}  // namespace

void write_file_durable(const std::filesystem::path& path, std::string_view data) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw_errno(path, "open");
    write_all(fd, path, data);
    if (::fsync(fd) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno(path, "fsync");
    }
    ::close(fd);
}

void append_file_durable(const std::filesystem::path& path, std::string_view data) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw_errno(path, "open");
    write_all(fd, path, data);
    if (::fsync(fd) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno(path, "fsync");
    }
    ::close(fd);
}

void fsync_dir(const std::filesystem::path& dir) {
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::not_found, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace autonoma::store
