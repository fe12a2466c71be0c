#pragma once

#include <stdexcept>
#include <string>

namespace fsp {

// Bad user input: missing files, malformed config, unusable CLI arguments.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Failure inside the pipeline itself (degenerate labels, infeasible CV, ...).
// The CLI maps this to exit code 1.
class PipelineError : public std::runtime_error {
public:
    explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

// Corrupt or incompatible model/report files.
class ModelFormatError : public InputError {
public:
    explicit ModelFormatError(const std::string& what) : InputError(what) {}
};

}  // namespace fsp
