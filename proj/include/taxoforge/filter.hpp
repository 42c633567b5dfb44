#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace taxoforge {

// Scores sorted descending, ties broken by label ascending, labels unique.
struct Classification {
    std::vector<std::pair<std::string, double>> scores;

    double score_of(const std::string& label) const;
};

// Enforce the Classification invariants on raw backend output.
Classification normalize_scores(std::vector<std::pair<std::string, double>> raw);

// A classifier seam. Implementations must be callable from multiple workers
// concurrently. Throws BackendFailure on fault; the pipeline counts the image
// as rejected and continues.
class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;
    virtual Classification classify(const std::filesystem::path& image) = 0;
};

bool accept(const Classification& c, const std::string& positive_label, double threshold);

// Fixed score list, any image.
class ConstantBackend : public ClassifierBackend {
public:
    explicit ConstantBackend(std::vector<std::pair<std::string, double>> scores)
        : scores_(normalize_scores(std::move(scores))) {}
    Classification classify(const std::filesystem::path&) override { return scores_; }

private:
    Classification scores_;
};

// Looks the image's filename up in a sidecar JSON manifest {filename: label};
// the mapped label scores 1.0, every other known label 0.0.
class OracleBackend : public ClassifierBackend {
public:
    OracleBackend(const std::filesystem::path& manifest, std::vector<std::string> labels);
    Classification classify(const std::filesystem::path& image) override;

private:
    std::map<std::string, std::string> mapping_;
    std::vector<std::string> labels_;
};

// Answers with the holdout image's own category directory name at 1.0.
// Ground truth for eval runs.
class DirectoryOracleBackend : public ClassifierBackend {
public:
    explicit DirectoryOracleBackend(std::vector<std::string> labels)
        : labels_(std::move(labels)) {}
    Classification classify(const std::filesystem::path& image) override;

private:
    std::vector<std::string> labels_;
};

// Long-lived child process per worker thread. Protocol: child is started as
// "command model_path"; per request the parent writes the absolute image path
// on one line, the child answers "label<TAB>score" lines ended by a blank one.
class CommandBackend : public ClassifierBackend {
public:
    CommandBackend(std::string command, std::string model_path);
    ~CommandBackend() override;
    Classification classify(const std::filesystem::path& image) override;

private:
    struct Session;
    std::shared_ptr<Session> session_for_this_thread();

    std::string command_;
    std::string model_path_;
    std::mutex mu_;
    std::map<std::thread::id, std::shared_ptr<Session>> sessions_;
};

}  // namespace taxoforge
