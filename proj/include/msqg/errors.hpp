#ifndef MSQG_ERRORS_HPP
#define MSQG_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msqg {

/// Kernel or interaction evaluated at coincident points.
class SingularityError : public std::runtime_error {
public:
    SingularityError(std::string what, std::size_t i, std::size_t j)
        : std::runtime_error(std::move(what)), first(i), second(j) {}
    std::size_t first;
    std::size_t second;
};

/// An integrator stage came closer to a collision than the step size can resolve.
class StepRejectedError : public std::runtime_error {
public:
    StepRejectedError(std::string what, double t) : std::runtime_error(std::move(what)), time(t) {}
    double time;
};

/// Field evaluation requested outside the time span of the stored trajectory.
class ExtrapolationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// No candidate below the residual tolerance was found.
class SearchFailureError : public std::runtime_error {
public:
    SearchFailureError(std::string what, double best) : std::runtime_error(std::move(what)), best_residual(best) {}
    double best_residual;
};

/// Output or input file could not be opened or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace msqg

#endif
