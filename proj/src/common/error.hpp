#pragma once

#include <stdexcept>
#include <string>

namespace vdea {

// Error classes map onto the process exit codes used by the CLI:
// usage/contract -> 2, data/format -> 3, numeric -> 4.
enum class ErrorClass { contract, data, numeric, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& msg)
        : std::runtime_error(msg), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }
    int exit_code() const noexcept;
    const char* class_name() const noexcept;

private:
    ErrorClass cls_;
};

struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(ErrorClass::contract, msg) {}
};

struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(ErrorClass::data, msg) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(ErrorClass::numeric, msg) {}
};

[[noreturn]] void throw_contract(const std::string& msg);

// require(cond, msg): contract check that survives NDEBUG builds.
inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

}  // namespace vdea
