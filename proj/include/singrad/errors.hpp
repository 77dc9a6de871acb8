#pragma once

#include <stdexcept>
#include <string>

namespace singrad {

/// Base class for all library errors; catch this to handle any failure.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter tuple (N, p, eps) outside the admissible regime.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Point or argument outside an operation's domain (r out of range, bad grid bounds).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Collocation matrix numerically rank-deficient.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration diverged (ratios >= 1 persistently).
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (bad JSON, unknown keys, inconsistent values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Exterior truncation sequence did not stabilize by the last R_m.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Requested spherical-harmonic degree exceeds the angular set's exactness.
class BandLimitError : public Error {
public:
    using Error::Error;
};

/// Inequality check invoked outside its hypothesis range of p.
class HypothesisError : public Error {
public:
    using Error::Error;
};

} // namespace singrad
