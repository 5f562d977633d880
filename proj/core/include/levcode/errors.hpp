#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levcode {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite entries, bad shapes, or preconditions violated by the caller.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A probability vector that is empty, negative, or does not sum to one.
class InvalidDistributionError : public Error {
public:
    using Error::Error;
};

/// K does not divide N (partitioning) or similar divisibility constraints.
class DivisibilityError : public Error {
public:
    using Error::Error;
};

/// Coding parameters (n, k, d) that admit no balanced assignment.
class InfeasibleParamsError : public Error {
public:
    using Error::Error;
};

/// Length or shape mismatch between two arguments.
class ArityError : public Error {
public:
    using Error::Error;
};

/// Two objects that must describe the same experiment disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// An iterative numerical procedure failed to converge.
class NumericalFailureError : public Error {
public:
    using Error::Error;
};

/// Matrix is numerically rank deficient; carries the detected rank.
class RankDeficiencyError : public Error {
public:
    RankDeficiencyError(const std::string& msg, std::size_t rank)
        : Error(msg), numerical_rank(rank) {}
    std::size_t numerical_rank;
};

/// Malformed binary file; carries the offset where parsing failed.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t offset)
        : Error(msg + " (at byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

/// A requested class label is absent from the data.
class EmptyClassError : public Error {
public:
    using Error::Error;
};

}  // namespace levcode
