#pragma once

#include <stdexcept>
#include <string>

namespace mvnt {

// Base of all library errors. DataError covers problems with user-supplied
// input (CLI maps these to exit code 2), NumericError covers failures of the
// computation itself (exit code 3).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct NotSpd : NumericError {
    using NumericError::NumericError;
};

struct SingularCovariance : DataError {
    using DataError::DataError;
};

struct TooFewRows : DataError {
    using DataError::DataError;
};

struct CsvError : DataError {
    using DataError::DataError;
};

struct BadParameter : DataError {
    using DataError::DataError;
};

struct DegenerateData : DataError {
    using DataError::DataError;
};

// An exponent argument exceeded the overflow cap; the statistic would be
// meaningless after saturation, so we refuse to compute it.
struct ExpOverflow : NumericError {
    using NumericError::NumericError;
};

struct GammaTooSmall : NumericError {
    using NumericError::NumericError;
};

struct DimensionTooLarge : NumericError {
    using NumericError::NumericError;
};

struct NonFinite : NumericError {
    using NumericError::NumericError;
};

struct NonStationary : NumericError {
    using NumericError::NumericError;
};

struct NumericBlowup : NumericError {
    using NumericError::NumericError;
};

struct BootstrapUnstable : NumericError {
    using NumericError::NumericError;
};

}  // namespace mvnt
