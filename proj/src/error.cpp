#include "rdv/error.hpp"

namespace rdv {

const char* to_string(error_code code) noexcept {
    switch (code) {
        case error_code::invalid_parameter: return "invalid-parameter";
        case error_code::resource_limit: return "resource-limit";
        case error_code::search_failure: return "search-failure";
        case error_code::schedule_rejected: return "schedule-rejected";
        case error_code::constraint_violation: return "constraint-violation";
        case error_code::config_error: return "config-error";
        case error_code::parse_error: return "parse-error";
    }
    return "unknown";
}

}  // namespace rdv
