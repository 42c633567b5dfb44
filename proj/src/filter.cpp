#include "taxoforge/filter.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "taxoforge/errors.hpp"

namespace taxoforge {

double Classification::score_of(const std::string& label) const {
    for (const auto& [l, s] : scores)
        if (l == label) return s;
    return -1.0;
}

Classification normalize_scores(std::vector<std::pair<std::string, double>> raw) {
    std::stable_sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    // drop repeated labels, keeping the highest-scored occurrence
    std::vector<std::pair<std::string, double>> out;
    for (auto& p : raw) {
        bool dup = false;
        for (const auto& q : out)
            if (q.first == p.first) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(std::move(p));
    }
    return {std::move(out)};
}

bool accept(const Classification& c, const std::string& positive_label, double threshold) {
    const double s = c.score_of(positive_label);
    return s >= 0.0 && s >= threshold;
}

OracleBackend::OracleBackend(const std::filesystem::path& manifest,
                             std::vector<std::string> labels)
    : labels_(std::move(labels)) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open oracle manifest: " + manifest.string());
    nlohmann::json j = nlohmann::json::parse(in);
    for (auto& [file, label] : j.items()) mapping_[file] = label.get<std::string>();
}

Classification OracleBackend::classify(const std::filesystem::path& image) {
    auto it = mapping_.find(image.filename().string());
    if (it == mapping_.end())
        throw BackendFailure("image not in oracle manifest: " + image.string());
    std::vector<std::pair<std::string, double>> raw;
    for (const auto& l : labels_) raw.emplace_back(l, l == it->second ? 1.0 : 0.0);
    return normalize_scores(std::move(raw));
}

Classification DirectoryOracleBackend::classify(const std::filesystem::path& image) {
    const std::string truth = image.parent_path().filename().string();
    std::vector<std::pair<std::string, double>> raw;
    for (const auto& l : labels_) raw.emplace_back(l, l == truth ? 1.0 : 0.0);
    return normalize_scores(std::move(raw));
}

struct CommandBackend::Session {
    pid_t pid = -1;
    FILE* to_child = nullptr;
    FILE* from_child = nullptr;

    ~Session() {
        if (to_child) fclose(to_child);
        if (from_child) fclose(from_child);
        if (pid > 0) {
            kill(pid, SIGTERM);
            waitpid(pid, nullptr, 0);
        }
    }
};

CommandBackend::CommandBackend(std::string command, std::string model_path)
    : command_(std::move(command)), model_path_(std::move(model_path)) {}

CommandBackend::~CommandBackend() = default;

std::shared_ptr<CommandBackend::Session> CommandBackend::session_for_this_thread() {
    std::lock_guard lock(mu_);
    auto& slot = sessions_[std::this_thread::get_id()];
    if (slot) return slot;

    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw BackendFailure("pipe() failed");
    pid_t pid = fork();
    if (pid < 0) throw BackendFailure("fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execlp(command_.c_str(), command_.c_str(), model_path_.c_str(), nullptr);
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);

    auto s = std::make_shared<Session>();
    s->pid = pid;
    s->to_child = fdopen(in_pipe[1], "w");
    s->from_child = fdopen(out_pipe[0], "r");
    if (!s->to_child || !s->from_child) throw BackendFailure("fdopen() failed");
    slot = s;
    return s;
}

Classification CommandBackend::classify(const std::filesystem::path& image) {
    auto s = session_for_this_thread();

    const std::string line = std::filesystem::absolute(image).string() + "\n";
    if (fputs(line.c_str(), s->to_child) == EOF || fflush(s->to_child) != 0) {
        std::lock_guard lock(mu_);
        sessions_.erase(std::this_thread::get_id());
        throw BackendFailure("classifier child not accepting input");
    }

    std::vector<std::pair<std::string, double>> raw;
    char buf[4096];
    for (;;) {
        if (!fgets(buf, sizeof buf, s->from_child)) {
            std::lock_guard lock(mu_);
            sessions_.erase(std::this_thread::get_id());
            throw BackendFailure("classifier child closed its output");
        }
        std::string l(buf);
        while (!l.empty() && (l.back() == '\n' || l.back() == '\r')) l.pop_back();
        if (l.empty()) break;
        auto tab = l.find('\t');
        if (tab == std::string::npos)
            throw BackendFailure("malformed classifier reply: " + l);
        try {
            raw.emplace_back(l.substr(0, tab), std::stod(l.substr(tab + 1)));
        } catch (const std::exception&) {
            throw BackendFailure("malformed classifier score: " + l);
        }
    }
    return normalize_scores(std::move(raw));
}

}  // namespace taxoforge
