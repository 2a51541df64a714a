#pragma once

#include <stdexcept>
#include <string>

namespace netsense {

enum class Errc {
    malformed_document,
    missing_required_field,
    range_violation,
    invalid_offset,
    private_address,
    provider_timeout,
    provider_error,
    missing_country,
    all_components_empty,
    invalid_query,
    file_not_found,
    header_mismatch,
    storage_failure,
    empty_input,
    budget_too_small,
    auth_failure,
    bad_request,
    exhausted,
    malformed_response,
    duplicate_use_case,
    overloaded,
    bind_failure,
    config_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace netsense
