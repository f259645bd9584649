#include "surrscope/blackbox/external_process.hpp"

#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "surrscope/core/error.hpp"

namespace surrscope {

namespace {

void ignore_sigpipe_once()
{
    static const bool done = [] {
        struct sigaction current {};
        sigaction(SIGPIPE, nullptr, &current);
        if (current.sa_handler == SIG_DFL) {
            std::signal(SIGPIPE, SIG_IGN);
        }
        return true;
    }();
    (void)done;
}

int remaining_ms(std::chrono::steady_clock::time_point deadline)
{
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

void set_nonblocking(int fd)
{
    fcntl(fd, F_SETFL, fcntl(fd, F_GETFL) | O_NONBLOCK);
}

} // namespace

ExternalProcessBlackBox::ExternalProcessBlackBox(ExternalProcessConfig config) : config_(std::move(config))
{
    if (config_.command.empty()) {
        throw InvalidArgument("external black-box: empty command");
    }
    if (config_.input_dim == 0) {
        throw InvalidArgument("external black-box: input dimension must be positive");
    }
    if (config_.timeout.count() <= 0) {
        throw InvalidArgument("external black-box: timeout must be positive");
    }
    ignore_sigpipe_once();
    spawn();
}

ExternalProcessBlackBox::~ExternalProcessBlackBox()
{
    shutdown();
}

void ExternalProcessBlackBox::spawn()
{
    int in_pipe[2];
    int out_pipe[2];
    int err_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0) {
        throw BlackBoxError(std::string("external black-box: pipe failed: ") + std::strerror(errno));
    }
    std::vector<char*> argv;
    for (auto& a : config_.command) {
        argv.push_back(const_cast<char*>(a.c_str()));
    }
    argv.push_back(nullptr);

    const pid_t pid = fork();
    if (pid < 0) {
        throw BlackBoxError(std::string("external black-box: fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        execvp(argv[0], argv.data());
        const int code = errno;
        [[maybe_unused]] auto w = write(err_pipe[1], &code, sizeof code);
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);

    // The error pipe closes on a successful exec (O_CLOEXEC) and carries errno otherwise.
    int exec_errno = 0;
    ssize_t got;
    do {
        got = read(err_pipe[0], &exec_errno, sizeof exec_errno);
    } while (got < 0 && errno == EINTR);
    close(err_pipe[0]);
    if (got == static_cast<ssize_t>(sizeof exec_errno)) {
        close(in_pipe[1]);
        close(out_pipe[0]);
        waitpid(pid, nullptr, 0);
        throw BlackBoxError("external black-box: cannot execute '" + config_.command[0]
                            + "': " + std::strerror(exec_errno));
    }

    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    set_nonblocking(to_child_);
    set_nonblocking(from_child_);
    pending_.clear();
    broken_ = false;
}

void ExternalProcessBlackBox::shutdown() noexcept
{
    if (to_child_ >= 0) {
        close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        // Closing stdin asks the child to exit; give it a moment, then kill.
        for (int i = 0; i < 50; ++i) {
            if (waitpid(pid_, nullptr, WNOHANG) == pid_) {
                pid_ = -1;
                return;
            }
            usleep(2000);
        }
        kill(pid_, SIGKILL);
        waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }
}

std::string ExternalProcessBlackBox::encode_batch(const FeatureMatrix& X)
{
    std::string out;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        if (j > 0) {
            out += ',';
        }
        out += 'f';
        out += std::to_string(j);
    }
    out += '\n';
    char buf[32];
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            if (j > 0) {
                out += ',';
            }
            const int len = std::snprintf(buf, sizeof buf, "%.17g", X.at(i, j));
            out.append(buf, static_cast<std::size_t>(len));
        }
        out += '\n';
    }
    out += '\n';
    return out;
}

void ExternalProcessBlackBox::write_all(const std::string& bytes) const
{
    const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
    std::size_t off = 0;
    while (off < bytes.size()) {
        pollfd p{to_child_, POLLOUT, 0};
        const int ready = poll(&p, 1, remaining_ms(deadline));
        if (ready == 0) {
            throw BlackBoxError("external black-box: timed out writing request");
        }
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw BlackBoxError(std::string("external black-box: poll failed: ") + std::strerror(errno));
        }
        const ssize_t w = write(to_child_, bytes.data() + off, bytes.size() - off);
        if (w < 0) {
            if (errno == EAGAIN || errno == EINTR) {
                continue;
            }
            throw BlackBoxError(std::string("external black-box: write failed: ") + std::strerror(errno));
        }
        off += static_cast<std::size_t>(w);
    }
}

std::string ExternalProcessBlackBox::read_line(std::chrono::steady_clock::time_point deadline) const
{
    for (;;) {
        const auto nl = pending_.find('\n');
        if (nl != std::string::npos) {
            std::string line = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            return line;
        }
        pollfd p{from_child_, POLLIN, 0};
        const int ready = poll(&p, 1, remaining_ms(deadline));
        if (ready == 0) {
            throw BlackBoxError("external black-box: timed out waiting for labels");
        }
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw BlackBoxError(std::string("external black-box: poll failed: ") + std::strerror(errno));
        }
        char buf[4096];
        const ssize_t r = read(from_child_, buf, sizeof buf);
        if (r == 0) {
            throw BlackBoxError("external black-box: child closed its output");
        }
        if (r < 0) {
            if (errno == EAGAIN || errno == EINTR) {
                continue;
            }
            throw BlackBoxError(std::string("external black-box: read failed: ") + std::strerror(errno));
        }
        pending_.append(buf, static_cast<std::size_t>(r));
    }
}

BinaryLabels ExternalProcessBlackBox::predict_rows(const FeatureMatrix& X) const
{
    std::lock_guard lock(mu_);
    auto* self = const_cast<ExternalProcessBlackBox*>(this);
    if (broken_) {
        self->shutdown();
        self->spawn();
    }
    try {
        write_all(encode_batch(X));
        const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
        std::vector<std::uint8_t> labels;
        labels.reserve(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const std::string line = read_line(deadline);
            if (line == "0" || line == "1") {
                labels.push_back(static_cast<std::uint8_t>(line[0] - '0'));
            } else {
                throw BlackBoxError("external black-box: row " + std::to_string(i) + ": expected 0 or 1, got '"
                                    + line + "'");
            }
        }
        return BinaryLabels(std::move(labels));
    } catch (...) {
        broken_ = true;
        throw;
    }
}

} // namespace surrscope
