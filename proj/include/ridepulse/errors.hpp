#pragma once

#include <stdexcept>
#include <string>

namespace ridepulse {

enum class errc {
    file_unreadable,
    malformed_record,
    invalid_coordinate,
    empty_keyword_list,
    invalid_mix,
    malformed_line,
    valence_out_of_range,
    duplicate_token,
    empty_lexicon,
    index_out_of_range,
    compound_out_of_range,
    insufficient_exemplars,
    k_out_of_range,
    unparsable_label,
    endpoint_unreachable,
    auth_failure,
    rate_limited,
    id_set_mismatch,
    invalid_timestamp,
    config_invalid,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::file_unreadable:        return "FileUnreadable";
        case errc::malformed_record:       return "MalformedRecord";
        case errc::invalid_coordinate:     return "InvalidCoordinate";
        case errc::empty_keyword_list:     return "EmptyKeywordList";
        case errc::invalid_mix:            return "InvalidMix";
        case errc::malformed_line:         return "MalformedLine";
        case errc::valence_out_of_range:   return "ValenceOutOfRange";
        case errc::duplicate_token:        return "DuplicateToken";
        case errc::empty_lexicon:          return "EmptyLexicon";
        case errc::index_out_of_range:     return "IndexOutOfRange";
        case errc::compound_out_of_range:  return "CompoundOutOfRange";
        case errc::insufficient_exemplars: return "InsufficientExemplars";
        case errc::k_out_of_range:         return "KOutOfRange";
        case errc::unparsable_label:       return "UnparsableLabel";
        case errc::endpoint_unreachable:   return "EndpointUnreachable";
        case errc::auth_failure:           return "AuthFailure";
        case errc::rate_limited:           return "RateLimited";
        case errc::id_set_mismatch:        return "IdSetMismatch";
        case errc::invalid_timestamp:      return "InvalidTimestamp";
        case errc::config_invalid:         return "ConfigInvalid";
    }
    return "UnknownError";
}

/// Exception carrying a machine-checkable error code alongside the message.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace ridepulse
