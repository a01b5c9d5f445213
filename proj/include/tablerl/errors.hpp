#pragma once

#include <stdexcept>
#include <string>

namespace tablerl {

/// Base class for every error this library raises.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- table model / parsing ---

/// Input contains no table at all.
class NoTableFound : public Error {
public:
    using Error::Error;
};

/// A table element was opened but never closed.
class MalformedMarkup : public Error {
public:
    using Error::Error;
};

/// Grid with zero rows or zero columns.
class EmptyGrid : public Error {
public:
    using Error::Error;
};

/// Markdown cannot express rowspan/colspan > 1.
class SpansNotRepresentable : public Error {
public:
    using Error::Error;
};

/// The golden answer of a scoring record failed to parse. Distinct from a bad
/// prediction: it means the dataset record itself is corrupt.
class GoldUnparseable : public Error {
public:
    using Error::Error;
};

// --- optimization kernels ---

/// Rollout group has fewer than two members.
class GroupTooSmall : public Error {
public:
    using Error::Error;
};

/// All rewards in the group were equal and the degeneracy policy is Skip.
class DegenerateGroupSkipped : public Error {
public:
    using Error::Error;
};

// --- data construction ---

/// A solution has fewer than two steps and cannot be split.
class SolutionTooShort : public Error {
public:
    using Error::Error;
};

// --- generic ---

/// Argument outside its mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace tablerl
