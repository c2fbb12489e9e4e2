#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "maskcert/classifier.hpp"

namespace maskcert {

// Bridge to an external model process speaking newline-delimited JSON over
// its standard streams:
//
//   child -> {"hello": {"classes": <int>}}          (first line, handshake)
//   us    -> {"id": <u64>, "tokens": ["w", ...]}    (sentinel at masked slots)
//   child -> {"id": <u64>, "scores": [<num>, ...]}  (|scores| == classes)
//
// Requests are serialized per process; a single child is never called
// concurrently. I/O failures raise TransportError, malformed or mismatched
// replies raise ProtocolError.
class ExternalClassifier : public BaseClassifier {
public:
    explicit ExternalClassifier(std::vector<std::string> command, int timeout_ms = 10000);
    ~ExternalClassifier() override;

    ExternalClassifier(const ExternalClassifier&) = delete;
    ExternalClassifier& operator=(const ExternalClassifier&) = delete;

    ClassScores classify(const MaskedText& masked) const override;
    int class_count() const override { return classes_; }

private:
    std::string read_line_locked() const;
    void write_line_locked(const std::string& line) const;
    void shutdown() noexcept;

    int classes_ = 0;
    int timeout_ms_ = 10000;
    int child_pid_ = -1;
    int to_child_ = -1;    // our write end
    int from_child_ = -1;  // our read end
    mutable std::mutex io_mutex_;
    mutable std::string read_buffer_;
    mutable std::uint64_t next_id_ = 1;
};

}  // namespace maskcert
