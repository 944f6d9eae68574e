#include "cxnprobe/subprocess.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>

#include "cxnprobe/errors.hpp"

namespace cxnprobe {

Subprocess::~Subprocess() {
    if (running()) close();
}

void Subprocess::start(const std::vector<std::string>& argv) {
    if (argv.empty()) throw Error("Subprocess: empty argv");
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
        throw ResourceError("Subprocess: pipe() failed");
    }
    const int pid = fork();
    if (pid < 0) throw ResourceError("Subprocess: fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(out_pipe[1]);
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    pid_ = pid;
    stdin_fd_ = in_pipe[1];
    stdout_fd_ = out_pipe[0];
}

void Subprocess::write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::write(stdin_fd_, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ResourceError("Subprocess: write failed (helper exited?)");
        }
        off += static_cast<std::size_t>(n);
    }
}

std::string Subprocess::read_line() {
    for (;;) {
        const std::size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        const ssize_t n = ::read(stdout_fd_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ResourceError("Subprocess: read failed");
        }
        if (n == 0) throw ResourceError("Subprocess: helper closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::vector<char> Subprocess::read_exact(std::size_t n) {
    std::vector<char> out;
    out.reserve(n);
    const std::size_t from_buffer = std::min(n, buffer_.size());
    out.insert(out.end(), buffer_.begin(),
               buffer_.begin() + static_cast<std::ptrdiff_t>(from_buffer));
    buffer_.erase(0, from_buffer);
    while (out.size() < n) {
        char chunk[65536];
        const std::size_t want = std::min(sizeof(chunk), n - out.size());
        const ssize_t got = ::read(stdout_fd_, chunk, want);
        if (got < 0) {
            if (errno == EINTR) continue;
            throw ResourceError("Subprocess: read failed");
        }
        if (got == 0) throw ResourceError("Subprocess: helper closed mid-frame");
        out.insert(out.end(), chunk, chunk + got);
    }
    return out;
}

int Subprocess::close() {
    if (stdin_fd_ >= 0) ::close(stdin_fd_);
    if (stdout_fd_ >= 0) ::close(stdout_fd_);
    stdin_fd_ = stdout_fd_ = -1;
    int status = 0;
    if (pid_ > 0) {
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace cxnprobe
