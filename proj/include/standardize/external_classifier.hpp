// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

// Adapter for a level classifier living in another process: the command
// receives the profile JSON on stdin and prints one level id.

#pragma once

#include <csignal>
#include <cstring>
#include <string>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "standardize/error.hpp"
#include "standardize/evaluation.hpp"
#include "standardize/util.hpp"

namespace standardize {

class ExternalClassifier : public LevelClassifier {
public:
    explicit ExternalClassifier(std::string command) : command_(std::move(command)) {
        if (util::trim(command_).empty()) throw Error(ErrorCode::invalid_argument, "classifier command is empty");
    }

    LevelId classify(const FeatureVector& profile) const override {
        nlohmann::ordered_json j = profile;
        std::string output = run(j.dump() + "\n");
        auto lines = util::split_lines(output);
        std::string level = lines.empty() ? "" : std::string(util::trim(lines.front()));
        if (level.empty()) throw Error(ErrorCode::backend, "classifier '" + command_ + "' printed no level");
        return level;
    }

    std::string name() const override { return "external:" + command_; }

private:
    std::string run(const std::string& input) const {
        int in[2], out[2];
        if (pipe(in) != 0) throw Error(ErrorCode::io, std::string("pipe: ") + std::strerror(errno));
        if (pipe(out) != 0) {
            close(in[0]);
            close(in[1]);
            throw Error(ErrorCode::io, std::string("pipe: ") + std::strerror(errno));
        }
        pid_t pid = fork();
        if (pid < 0) throw Error(ErrorCode::io, std::string("fork: ") + std::strerror(errno));
        if (pid == 0) {
            dup2(in[0], STDIN_FILENO);
            dup2(out[1], STDOUT_FILENO);
            close(in[0]);
            close(in[1]);
            close(out[0]);
            close(out[1]);
            execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(in[0]);
        close(out[1]);

        // A child that exits without reading stdin must not kill us with SIGPIPE.
        sigset_t block, old;
        sigemptyset(&block);
        sigaddset(&block, SIGPIPE);
        pthread_sigmask(SIG_BLOCK, &block, &old);
        std::size_t written = 0;
        while (written < input.size()) {
            ssize_t n = write(in[1], input.data() + written, input.size() - written);
            if (n <= 0) break;
            written += static_cast<std::size_t>(n);
        }
        close(in[1]);
        timespec zero{0, 0};
        while (sigtimedwait(&block, nullptr, &zero) > 0) {
        }
        pthread_sigmask(SIG_SETMASK, &old, nullptr);

        std::string output;
        char buf[4096];
        ssize_t n;
        while ((n = read(out[0], buf, sizeof buf)) > 0) output.append(buf, static_cast<std::size_t>(n));
        close(out[0]);
        int status = 0;
        waitpid(pid, &status, 0);
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
            throw Error(ErrorCode::backend, "classifier '" + command_ + "' failed with status " +
                                                std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
        }
        return output;
    }

    std::string command_;
};

}  // namespace standardize
