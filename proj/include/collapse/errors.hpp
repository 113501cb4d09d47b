#pragma once

#include <stdexcept>
#include <string>

namespace collapse {

// Precondition/contract breach by the caller (dimension mismatch, bad range).
class contract_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid physical or numerical configuration (e.g. stability guard).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A hit center so remote that every amplitude underflows; callers resample.
class degenerate_hit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Statistics requested on an ensemble with no resolved paths.
class empty_statistics_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config-file or CSV syntax problem; message carries key/row and line number.
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure; message carries the offending path.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* what) {
    if (!cond) throw contract_error(what);
}

} // namespace detail
} // namespace collapse
