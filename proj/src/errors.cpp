#include "hydrostate/errors.hpp"

#include <sstream>
#include <utility>

namespace hydrostate {

ValidationError::ValidationError(std::string element, const std::string& message)
    : Error(message), element_(std::move(element)) {}

namespace {

std::string schema_message(const std::string& path, const std::string& expected,
                           const std::string& found) {
    std::ostringstream os;
    os << "at " << (path.empty() ? "/" : path) << ": expected " << expected << ", found "
       << found;
    return os.str();
}

std::string convergence_message(int iterations, double residual, const std::string& where) {
    std::ostringstream os;
    os << where << " did not converge after " << iterations << " iterations (residual "
       << residual << ")";
    return os.str();
}

}  // namespace

SchemaError::SchemaError(std::string path, std::string expected, std::string found)
    : ValidationError(path, schema_message(path, expected, found)),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

NonConvergence::NonConvergence(int iterations, double residual, const std::string& where)
    : Error(convergence_message(iterations, residual, where)),
      iterations_(iterations),
      residual_(residual) {}

UnknownTarget::UnknownTarget(std::string id)
    : Error("measurement target '" + id + "' does not resolve in the network"),
      id_(std::move(id)) {}

DegenerateRange::DegenerateRange(std::size_t dimension)
    : Error("normalization range for dimension " + std::to_string(dimension) +
            " has hi <= lo"),
      dimension_(dimension) {}

}  // namespace hydrostate
