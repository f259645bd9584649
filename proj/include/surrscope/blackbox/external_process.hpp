#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <vector>

#include "surrscope/blackbox/blackbox.hpp"

namespace surrscope {

struct ExternalProcessConfig {
    /// argv of the child; argv[0] is looked up on PATH.
    std::vector<std::string> command;
    std::size_t input_dim = 0;
    std::chrono::milliseconds timeout{10000};
};

/// Black-box served by a long-lived child process.
///
/// Wire protocol, one batch per predict call, ASCII with '\n' line ends:
///   request:  "f0,f1,...,f{d-1}" header, one CSV row per sample (17
///             significant digits), then an empty line;
///   response: one line per row holding exactly "0" or "1".
/// Any other response, a closed pipe, or silence past the timeout is a
/// BlackBoxError and retires the child. Calls are serialized.
class ExternalProcessBlackBox final : public BlackBox {
public:
    explicit ExternalProcessBlackBox(ExternalProcessConfig config);
    ~ExternalProcessBlackBox() override;

    ExternalProcessBlackBox(const ExternalProcessBlackBox&) = delete;
    ExternalProcessBlackBox& operator=(const ExternalProcessBlackBox&) = delete;

    std::size_t input_dim() const noexcept override { return config_.input_dim; }
    std::string kind() const override { return "external_process"; }
    const ExternalProcessConfig& config() const noexcept { return config_; }

    /// Request bytes for a batch; exposed so the format can be pinned in tests.
    static std::string encode_batch(const FeatureMatrix& X);

protected:
    BinaryLabels predict_rows(const FeatureMatrix& X) const override;

private:
    void spawn();
    void shutdown() noexcept;
    void write_all(const std::string& bytes) const;
    std::string read_line(std::chrono::steady_clock::time_point deadline) const;

    ExternalProcessConfig config_;
    mutable std::mutex mu_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    mutable std::string pending_;
    mutable bool broken_ = false;
};

} // namespace surrscope
