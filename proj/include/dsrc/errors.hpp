#pragma once

#include <stdexcept>
#include <string>

namespace dsrc {

/// A scenario parameter violates an invariant; `field()` names the offender.
class InvalidParams : public std::invalid_argument {
public:
    InvalidParams(std::string field, const std::string& what)
        : std::invalid_argument(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Fixed-point iteration exhausted max_iter. Carries the last residual and
/// iteration count so callers can diagnose the stalled iterate.
class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Converged buffer occupancy exceeds 1: the offered load is beyond what the
/// periodic broadcast mode supports. Signals a parameter error, not a bug.
class Infeasible : public std::runtime_error {
public:
    Infeasible(const std::string& what, double rho)
        : std::runtime_error(what), rho_(rho) {}
    double rho() const noexcept { return rho_; }

private:
    double rho_;
};

/// The drift balance has no solution: the channel cannot drain the offered load.
class Saturated : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Result tables asked to be compared do not share a grid.
class IncomparableTable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dsrc
