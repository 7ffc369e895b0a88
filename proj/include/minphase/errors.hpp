#pragma once

#include <stdexcept>
#include <string>

namespace minphase {

// Base of every library error. `exit_code()` is what the CLI returns.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
    virtual int exit_code() const noexcept { return 2; }
};

// Bad input: malformed files, grids that do not line up, arguments outside a domain.
class input_error : public error {
public:
    using error::error;
};

class parse_error : public input_error {
public:
    using input_error::input_error;
};

class incompatible_grid : public input_error {
public:
    using input_error::input_error;
};

class domain_error : public input_error {
public:
    using input_error::input_error;
};

class quantization_error : public input_error {
public:
    using input_error::input_error;
};

class resolution_error : public input_error {
public:
    using input_error::input_error;
};

// The data were read fine but the mathematics refused: exit code 1.
class validation_error : public error {
public:
    using error::error;
    int exit_code() const noexcept override { return 1; }
};

class not_factorizable : public validation_error {
public:
    using validation_error::validation_error;
};

class ill_conditioned : public validation_error {
public:
    using validation_error::validation_error;
};

class not_self_map : public validation_error {
public:
    using validation_error::validation_error;
};

class not_preserving : public validation_error {
public:
    using validation_error::validation_error;
};

}  // namespace minphase
