#ifndef QDYN_TYPES_HPP
#define QDYN_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdyn {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

inline constexpr Complex imag_unit{0.0, 1.0};

/// Base error for all precondition and runtime failures in the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when the boundary-norm monitor trips during propagation:
/// too much mass has reached the edge of the periodic domain and the
/// run would start to wrap around.
struct MonitorAbort : Error {
    MonitorAbort(const std::string& msg, double time, double mass)
        : Error(msg), abort_time(time), boundary_mass(mass) {}
    double abort_time;
    double boundary_mass;
};

}  // namespace qdyn

#endif
