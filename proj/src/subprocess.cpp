#include "ease/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ease/errors.hpp"

namespace ease {
namespace {

void ignore_sigpipe_once() {
    static const bool done = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

std::vector<char*> to_argv(const std::vector<std::string>& args) {
    std::vector<char*> out;
    out.reserve(args.size() + 1);
    for (const auto& a : args) out.push_back(const_cast<char*>(a.c_str()));
    out.push_back(nullptr);
    return out;
}

struct Pipe {
    int fds[2] = {-1, -1};
    Pipe() {
        if (::pipe(fds) != 0) throw IoError("pipe() failed: " + std::string(std::strerror(errno)));
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    int read_end() const { return fds[0]; }
    int write_end() const { return fds[1]; }
    void close_read() {
        if (fds[0] >= 0) ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0) ::close(fds[1]);
        fds[1] = -1;
    }
    int release_read() {
        int fd = fds[0];
        fds[0] = -1;
        return fd;
    }
    int release_write() {
        int fd = fds[1];
        fds[1] = -1;
        return fd;
    }
};

// Forks and execs argv with stdio wired to the given fds (-1 keeps the
// parent's). Returns the child pid; throws only on fork failure. Exec
// failures are reported through exec_err_fd (CLOEXEC write end).
int spawn_child(const std::vector<std::string>& argv,
                const std::map<std::string, std::string>& extra_env,
                int stdin_fd, int stdout_fd, int stderr_fd, int exec_err_fd) {
    ignore_sigpipe_once();
    int pid = ::fork();
    if (pid < 0) throw IoError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        ::setpgid(0, 0);
        if (stdin_fd >= 0) ::dup2(stdin_fd, STDIN_FILENO);
        if (stdout_fd >= 0) ::dup2(stdout_fd, STDOUT_FILENO);
        if (stderr_fd >= 0) ::dup2(stderr_fd, STDERR_FILENO);
        for (const auto& [key, value] : extra_env) ::setenv(key.c_str(), value.c_str(), 1);
        auto cargv = to_argv(argv);
        ::execvp(cargv[0], cargv.data());
        int err = errno;
        (void)!::write(exec_err_fd, &err, sizeof(err));
        ::_exit(127);
    }
    ::setpgid(pid, pid);  // also from the parent, to close the race
    return pid;
}

// Reads the exec-error pipe after closing our write end: zero bytes means the
// exec succeeded (CLOEXEC closed the pipe), otherwise it carries errno.
bool exec_failed(int exec_err_read_fd) {
    int err = 0;
    ssize_t n = ::read(exec_err_read_fd, &err, sizeof(err));
    return n > 0;
}

void kill_and_reap(int pid) {
    ::killpg(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
}

int reap_exit_code(int pid) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return -WTERMSIG(status);
    return -1;
}

}  // namespace

std::vector<std::string> split_command(const std::string& command) {
    std::vector<std::string> tokens;
    std::string current;
    bool in_token = false;
    char quote = '\0';
    for (char c : command) {
        if (quote != '\0') {
            if (c == quote) {
                quote = '\0';
            } else {
                current.push_back(c);
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
            in_token = true;
        } else if (c == ' ' || c == '\t' || c == '\n') {
            if (in_token) {
                tokens.push_back(current);
                current.clear();
                in_token = false;
            }
        } else {
            current.push_back(c);
            in_token = true;
        }
    }
    if (quote != '\0') throw UsageError("unterminated quote in command: " + command);
    if (in_token) tokens.push_back(current);
    return tokens;
}

std::vector<std::string> substitute_placeholders(
    std::vector<std::string> tokens,
    const std::map<std::string, std::string>& values) {
    for (auto& token : tokens) {
        for (const auto& [name, value] : values) {
            const std::string needle = "{" + name + "}";
            size_t pos = 0;
            while ((pos = token.find(needle, pos)) != std::string::npos) {
                token.replace(pos, needle.size(), value);
                pos += value.size();
            }
        }
    }
    return tokens;
}

CommandResult run_command(const std::vector<std::string>& argv, Duration timeout,
                          const std::map<std::string, std::string>& extra_env) {
    if (argv.empty()) throw UsageError("run_command: empty argv");
    CommandResult result;

    Pipe out_pipe;
    Pipe err_signal;
    ::fcntl(err_signal.write_end(), F_SETFD, FD_CLOEXEC);

    int pid = spawn_child(argv, extra_env, -1, out_pipe.write_end(), out_pipe.write_end(),
                          err_signal.write_end());
    out_pipe.close_write();
    err_signal.close_write();

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    char chunk[4096];
    bool open = true;
    while (open) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            result.timed_out = true;
            break;
        }
        pollfd pfd{out_pipe.read_end(), POLLIN, 0};
        int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (rc == 0) {
            result.timed_out = true;
            break;
        }
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        ssize_t n = ::read(out_pipe.read_end(), chunk, sizeof(chunk));
        if (n > 0) {
            result.output.append(chunk, static_cast<size_t>(n));
        } else {
            open = false;  // EOF (or error): child closed its end
        }
    }

    if (result.timed_out) {
        kill_and_reap(pid);
        result.exit_code = -SIGKILL;
    } else {
        result.exit_code = reap_exit_code(pid);
    }
    if (exec_failed(err_signal.read_end())) {
        result.spawn_failed = true;
        result.exit_code = 127;
    }
    return result;
}

LineProcess::LineProcess(const std::vector<std::string>& argv,
                         const std::map<std::string, std::string>& extra_env) {
    if (argv.empty()) throw UsageError("LineProcess: empty argv");
    Pipe to_child;
    Pipe from_child;
    Pipe err_signal;
    ::fcntl(err_signal.write_end(), F_SETFD, FD_CLOEXEC);

    pid_ = spawn_child(argv, extra_env, to_child.read_end(), from_child.write_end(), -1,
                       err_signal.write_end());
    err_signal.close_write();
    if (exec_failed(err_signal.read_end())) {
        int status = 0;
        ::waitpid(pid_, &status, 0);
        pid_ = -1;
        throw IoError("failed to start process: " + argv[0]);
    }
    to_child_ = to_child.release_write();
    from_child_ = from_child.release_read();
}

LineProcess::~LineProcess() { shutdown(); }

void LineProcess::shutdown() {
    if (to_child_ >= 0) ::close(to_child_);
    if (from_child_ >= 0) ::close(from_child_);
    to_child_ = -1;
    from_child_ = -1;
    if (pid_ >= 0) kill_and_reap(pid_);
    pid_ = -1;
}

bool LineProcess::alive() const {
    if (pid_ < 0) return false;
    return ::kill(pid_, 0) == 0 && ::waitpid(pid_, nullptr, WNOHANG) == 0;
}

bool LineProcess::write_line(const std::string& line) {
    if (to_child_ < 0) return false;
    std::string payload = line + "\n";
    size_t written = 0;
    while (written < payload.size()) {
        ssize_t n = ::write(to_child_, payload.data() + written, payload.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        written += static_cast<size_t>(n);
    }
    return true;
}

std::optional<std::string> LineProcess::read_line(Duration timeout) {
    last_read_timed_out_ = false;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (from_child_ < 0) return std::nullopt;
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            last_read_timed_out_ = true;
            return std::nullopt;
        }
        pollfd pfd{from_child_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (rc == 0) {
            last_read_timed_out_ = true;
            return std::nullopt;
        }
        if (rc < 0) {
            if (errno == EINTR) continue;
            return std::nullopt;
        }
        char chunk[4096];
        ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n > 0) {
            buffer_.append(chunk, static_cast<size_t>(n));
        } else {
            return std::nullopt;  // EOF
        }
    }
}

}  // namespace ease
