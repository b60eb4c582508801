#pragma once

#include <stdexcept>
#include <string>

namespace causal {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unusable tabular input.
class DataError : public Error {
public:
    using Error::Error;
};

// Graph invariant violations and unknown node names.
class GraphError : public Error {
public:
    using Error::Error;
};

// Failed statistical preconditions (insufficient rows, singular designs).
class StatsError : public Error {
public:
    using Error::Error;
};

}  // namespace causal
