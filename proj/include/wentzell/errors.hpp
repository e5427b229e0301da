#pragma once

#include <stdexcept>
#include <string>

namespace wentzell {

/// A parameter set violates one of the standing hypotheses (positivity/bounds).
class HypothesisError : public std::invalid_argument {
public:
    HypothesisError(std::string hypothesis, const std::string& what)
        : std::invalid_argument(hypothesis + ": " + what), hypothesis_(std::move(hypothesis)) {}

    const std::string& hypothesis() const { return hypothesis_; }

private:
    std::string hypothesis_;
};

/// Bad configuration document; `path` is the offending field (e.g. "params.q").
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string path, const std::string& what)
        : std::invalid_argument(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Time stepping produced non-finite or unbounded state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double last_valid_time, const std::string& what)
        : std::runtime_error(what), last_valid_time_(last_valid_time) {}

    double last_valid_time() const { return last_valid_time_; }

private:
    double last_valid_time_;
};

/// Lyapunov certification could not establish positive constants.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wentzell
