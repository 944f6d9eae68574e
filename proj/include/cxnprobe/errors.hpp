#pragma once

#include <stdexcept>
#include <string>

namespace cxnprobe {

// Exit-code mapping used by the CLI: DataError -> 1, InfeasibleError -> 2,
// ResourceError -> 3. Everything else is a plain Error (also 1).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

// Quota/constraint system cannot be satisfied; carries the first violated cell.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::string cell)
        : Error(what), cell_(std::move(cell)) {}
    const std::string& cell() const { return cell_; }

private:
    std::string cell_;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class CapabilityError : public Error {
public:
    using Error::Error;
};

class StaleCacheError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace cxnprobe
