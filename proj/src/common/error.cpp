#include "common/error.hpp"

namespace vdea {

int Error::exit_code() const noexcept {
    switch (cls_) {
        case ErrorClass::contract: return 2;
        case ErrorClass::data: return 3;
        case ErrorClass::numeric: return 4;
        case ErrorClass::internal: return 1;
    }
    return 1;
}

const char* Error::class_name() const noexcept {
    switch (cls_) {
        case ErrorClass::contract: return "usage";
        case ErrorClass::data: return "data";
        case ErrorClass::numeric: return "numeric";
        case ErrorClass::internal: return "internal";
    }
    return "internal";
}

void throw_contract(const std::string& msg) { throw ContractError(msg); }

}  // namespace vdea
