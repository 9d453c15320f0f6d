#pragma once

#include <stdexcept>
#include <string>

namespace adsim {

struct NumericDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// message bus
struct SchemaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnknownTopicError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// frame codec
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownIdError : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct EncodingError : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct LayoutError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace adsim
