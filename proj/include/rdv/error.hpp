#pragma once

#include <stdexcept>
#include <string>

namespace rdv {

enum class error_code {
    invalid_parameter,
    resource_limit,
    search_failure,
    schedule_rejected,
    constraint_violation,
    config_error,
    parse_error,
};

const char* to_string(error_code code) noexcept;

class error : public std::runtime_error {
public:
    error(error_code code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    error_code code() const noexcept { return code_; }

private:
    error_code code_;
};

[[noreturn]] inline void fail(error_code code, const std::string& what) {
    throw error(code, what);
}

}  // namespace rdv
