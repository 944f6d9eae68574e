#pragma once

#include <string>
#include <vector>

namespace cxnprobe {

// Minimal line/binary-framed pipe to a child process (POSIX).
class Subprocess {
public:
    Subprocess() = default;
    ~Subprocess();
    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    void start(const std::vector<std::string>& argv);
    bool running() const { return pid_ > 0; }

    void write_line(const std::string& line);
    std::string read_line();                  // without trailing newline
    std::vector<char> read_exact(std::size_t n);

    int close();  // closes pipes, waits, returns exit status

private:
    int pid_ = -1;
    int stdin_fd_ = -1;
    int stdout_fd_ = -1;
    std::string buffer_;
};

}  // namespace cxnprobe
