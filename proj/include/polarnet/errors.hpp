#pragma once

#include <stdexcept>
#include <string>

namespace polarnet {

// Error categories aligned with the CLI exit codes: bad input or
// configuration (2), a missing upstream artifact (3), and numerical
// failures such as non-convergence (4).

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class MissingArtifactError : public std::runtime_error {
public:
    explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace polarnet
