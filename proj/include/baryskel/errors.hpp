#ifndef BARYSKEL_ERRORS_HPP
#define BARYSKEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace baryskel {

/// A problem with the caller's data: malformed input, domain violation,
/// unbounded or empty polytope, dimension mismatch.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A broken invariant inside the library. Reaching one of these means a
/// soundness bug (e.g. a theorem-guaranteed search exhausted), never bad
/// user data.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

} // namespace baryskel

#endif
