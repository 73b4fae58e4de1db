#ifndef HDMANOVA_ERRORS_HPP
#define HDMANOVA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hdmanova {

// Base for everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: dimensions, sample layout, configuration. CLI exit code 2.
struct input_error : error {
    using error::error;
};

// Numerical failure while computing with otherwise valid input. CLI exit code 3.
struct numeric_error : error {
    using error::error;
};

struct invalid_dimension_error : input_error {
    using input_error::input_error;
};
struct insufficient_sample_error : input_error {
    using input_error::input_error;
};
struct unsupported_parity_error : input_error {
    using input_error::input_error;
};
struct unsupported_design_error : input_error {
    using input_error::input_error;
};
struct config_error : input_error {
    using input_error::input_error;
};
struct empty_request_error : input_error {
    using input_error::input_error;
};
struct pairing_error : input_error {
    using input_error::input_error;
};

struct degenerate_scatter_error : numeric_error {
    using numeric_error::numeric_error;
};
struct precision_error : numeric_error {
    using numeric_error::numeric_error;
};
struct estimation_degenerate_error : numeric_error {
    using numeric_error::numeric_error;
};

}  // namespace hdmanova

#endif
