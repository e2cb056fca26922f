#pragma once

#include <stdexcept>
#include <string>

namespace ada {

/// Error categories used across the library. The CLI maps these to exit codes.
enum class ErrorKind {
    config,        // bad configuration file / key / value
    validation,    // structurally invalid input data
    usage,         // API called out of contract (e.g. stepping a finished episode)
    contract,      // precondition of a verifier or trainer violated
    numerical,     // non-finite values where finite ones are required
    empty_buffer,  // sampling from an empty buffer
    degenerate_gap,// all-action Q ties; caller should resample
    compatibility, // checkpoint/environment shape mismatch
    io             // file read/write failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& m)     { return Error(ErrorKind::config, m); }
inline Error validation_error(const std::string& m) { return Error(ErrorKind::validation, m); }
inline Error usage_error(const std::string& m)      { return Error(ErrorKind::usage, m); }
inline Error contract_error(const std::string& m)   { return Error(ErrorKind::contract, m); }
inline Error numerical_error(const std::string& m)  { return Error(ErrorKind::numerical, m); }
inline Error empty_buffer_error(const std::string& m) { return Error(ErrorKind::empty_buffer, m); }
inline Error degenerate_gap_error(const std::string& m) { return Error(ErrorKind::degenerate_gap, m); }
inline Error compatibility_error(const std::string& m) { return Error(ErrorKind::compatibility, m); }
inline Error io_error(const std::string& m)         { return Error(ErrorKind::io, m); }

} // namespace ada
