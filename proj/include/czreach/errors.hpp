#ifndef CZREACH_ERRORS_HPP
#define CZREACH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace czreach {

/// Operands have incompatible shapes.
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The LP solver could not certify a result within its iteration budget.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation requiring a nonempty set was given an empty one.
struct EmptySetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Interval division by an interval containing zero.
struct DivisionByZeroInterval : std::domain_error {
    using std::domain_error::domain_error;
};

/// Expression text does not match the grammar. Carries a 0-based position.
struct SyntaxError : std::invalid_argument {
    SyntaxError(const std::string& msg, std::size_t pos)
        : std::invalid_argument(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    std::size_t position;
};

/// A variable name references an index outside the declared state dimension.
struct UnknownVariable : SyntaxError {
    using SyntaxError::SyntaxError;
};

/// JSON input does not match the documented schema.
struct SchemaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Network layer dimensions do not chain.
struct DimensionChainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Neuron or coordinate index outside the valid range.
struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Exact propagation exceeded the configured member cap.
struct MemberExplosion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Internal consistency failure: a network output set lost the
/// input-generator prefix required by the closed-loop composition.
struct PrefixViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// Linearization point lies outside the interval hull of the set.
struct GammaOutsideHull : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A verification routine was fed reach results of the wrong kind.
struct MethodMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Rejection sampling of a constrained initial set starved.
struct SamplingStarvation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plotting request on a result with too few dimensions.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace czreach

#endif
