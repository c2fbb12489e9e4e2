#include "maskcert/external_classifier.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "maskcert/errors.hpp"

namespace maskcert {

using nlohmann::json;

ExternalClassifier::ExternalClassifier(std::vector<std::string> command, int timeout_ms)
    : timeout_ms_(timeout_ms) {
    if (command.empty())
        throw std::invalid_argument("external classifier needs a command line");

    int to_pipe[2];    // parent writes -> child stdin
    int from_pipe[2];  // child stdout -> parent reads
    if (pipe(to_pipe) != 0 || pipe(from_pipe) != 0)
        throw TransportError("pipe() failed: " + std::string(std::strerror(errno)));

    const int pid = fork();
    if (pid < 0) throw TransportError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(to_pipe[0], STDIN_FILENO);
        dup2(from_pipe[1], STDOUT_FILENO);
        close(to_pipe[0]);
        close(to_pipe[1]);
        close(from_pipe[0]);
        close(from_pipe[1]);
        std::vector<char*> argv;
        argv.reserve(command.size() + 1);
        for (auto& arg : command) argv.push_back(arg.data());
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        _exit(127);
    }

    child_pid_ = pid;
    to_child_ = to_pipe[1];
    from_child_ = from_pipe[0];
    close(to_pipe[0]);
    close(from_pipe[1]);
    signal(SIGPIPE, SIG_IGN);  // broken pipes surface as EPIPE write errors

    // Handshake: the child announces its class count on its first line.
    std::string line;
    try {
        line = read_line_locked();
    } catch (...) {
        shutdown();
        throw;
    }
    json hello = json::parse(line, nullptr, false);
    if (hello.is_discarded() || !hello.contains("hello") ||
        !hello["hello"].contains("classes") ||
        !hello["hello"]["classes"].is_number_integer()) {
        shutdown();
        throw ProtocolError("bad handshake line from external classifier: " + line);
    }
    classes_ = hello["hello"]["classes"].get<int>();
    if (classes_ < 2) {
        shutdown();
        throw ProtocolError("external classifier must declare >= 2 classes");
    }
}

ExternalClassifier::~ExternalClassifier() { shutdown(); }

void ExternalClassifier::shutdown() noexcept {
    if (to_child_ >= 0) { close(to_child_); to_child_ = -1; }
    if (from_child_ >= 0) { close(from_child_); from_child_ = -1; }
    if (child_pid_ > 0) {
        int status = 0;
        // give it a moment to exit on closed stdin, then make sure
        for (int i = 0; i < 50; ++i) {
            if (waitpid(child_pid_, &status, WNOHANG) == child_pid_) { child_pid_ = -1; return; }
            usleep(2000);
        }
        kill(child_pid_, SIGKILL);
        waitpid(child_pid_, &status, 0);
        child_pid_ = -1;
    }
}

std::string ExternalClassifier::read_line_locked() const {
    for (;;) {
        const auto newline = read_buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = read_buffer_.substr(0, newline);
            read_buffer_.erase(0, newline + 1);
            return line;
        }
        struct pollfd pfd = {from_child_, POLLIN, 0};
        const int ready = poll(&pfd, 1, timeout_ms_);
        if (ready == 0)
            throw TransportError("timeout waiting for external classifier reply");
        if (ready < 0)
            throw TransportError("poll() failed: " + std::string(std::strerror(errno)));
        char chunk[4096];
        const auto got = read(from_child_, chunk, sizeof chunk);
        if (got < 0)
            throw TransportError("read() failed: " + std::string(std::strerror(errno)));
        if (got == 0)
            throw TransportError("external classifier closed its output stream");
        read_buffer_.append(chunk, static_cast<std::size_t>(got));
    }
}

void ExternalClassifier::write_line_locked(const std::string& line) const {
    std::size_t sent = 0;
    while (sent < line.size()) {
        const auto wrote = write(to_child_, line.data() + sent, line.size() - sent);
        if (wrote < 0) {
            if (errno == EINTR) continue;
            throw TransportError("write to external classifier failed: " +
                                 std::string(std::strerror(errno)));
        }
        sent += static_cast<std::size_t>(wrote);
    }
}

ClassScores ExternalClassifier::classify(const MaskedText& masked) const {
    std::lock_guard<std::mutex> lock(io_mutex_);
    const std::uint64_t id = next_id_++;

    json request;
    request["id"] = id;
    request["tokens"] = masked.tokens;
    write_line_locked(request.dump() + "\n");

    const std::string line = read_line_locked();
    json reply = json::parse(line, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("id") ||
        !reply.contains("scores") || !reply["scores"].is_array())
        throw ProtocolError("malformed reply from external classifier: " + line);
    if (!reply["id"].is_number_unsigned() || reply["id"].get<std::uint64_t>() != id)
        throw ProtocolError("reply id does not match request id " + std::to_string(id));
    if (static_cast<int>(reply["scores"].size()) != classes_)
        throw ProtocolError("reply carries wrong number of scores");

    ClassScores out;
    out.scores.reserve(static_cast<std::size_t>(classes_));
    for (const auto& value : reply["scores"]) {
        if (!value.is_number())
            throw ProtocolError("non-numeric score in external reply");
        const double score = value.get<double>();
        if (!std::isfinite(score))
            throw ProtocolError("non-finite score in external reply");
        out.scores.push_back(score);
    }
    return out;
}

}  // namespace maskcert
