#include "netsense/errors.hpp"

namespace netsense {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::malformed_document: return "MalformedDocument";
    case Errc::missing_required_field: return "MissingRequiredField";
    case Errc::range_violation: return "RangeViolation";
    case Errc::invalid_offset: return "InvalidOffset";
    case Errc::private_address: return "PrivateAddress";
    case Errc::provider_timeout: return "ProviderTimeout";
    case Errc::provider_error: return "ProviderError";
    case Errc::missing_country: return "MissingCountry";
    case Errc::all_components_empty: return "AllComponentsEmpty";
    case Errc::invalid_query: return "InvalidQuery";
    case Errc::file_not_found: return "FileNotFound";
    case Errc::header_mismatch: return "HeaderMismatch";
    case Errc::storage_failure: return "StorageFailure";
    case Errc::empty_input: return "EmptyInput";
    case Errc::budget_too_small: return "BudgetTooSmall";
    case Errc::auth_failure: return "AuthFailure";
    case Errc::bad_request: return "BadRequest";
    case Errc::exhausted: return "Exhausted";
    case Errc::malformed_response: return "MalformedResponse";
    case Errc::duplicate_use_case: return "DuplicateUseCase";
    case Errc::overloaded: return "Overloaded";
    case Errc::bind_failure: return "BindFailure";
    case Errc::config_error: return "ConfigError";
    }
    return "Error";
}

} // namespace netsense
