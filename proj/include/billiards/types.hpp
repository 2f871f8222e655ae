#ifndef BILLIARDS_TYPES_HPP
#define BILLIARDS_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace billiards {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Errc {
    NonConvexSection,
    AxisNotInterior,
    NotOnSurface,
    TangentLine,
    RootFindFailure,
    NotReflectable,
    MaxReflectionsExceeded,
    DegenerateStep,
    NotOnDelta0,
    OutsideClosedD,
    InvalidArgument,
    IoError
};

const char* errc_name(Errc c);

class BilliardError : public std::runtime_error {
public:
    BilliardError(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw BilliardError(code, what);
}

struct Tolerances {
    double root = 1e-12;      // relative tolerance on the line parameter t
    double tangent = 1e-9;    // |<v,n>| at a hit below this rejects the line
    double gamma = 1e-9;      // |G(v)| band for membership of a direction in Gamma
    int max_root_iter = 200;
};

/// An oriented line encoded as (v, Q): unit direction and the foot of the
/// perpendicular from the origin, so <v,Q> = 0.
struct OrientedLine {
    Vec v;
    Vec q;

    OrientedLine() = default;
    OrientedLine(Vec dir, Vec foot) : v(std::move(dir)), q(std::move(foot)) {}

    int dim() const { return static_cast<int>(v.size()); }
    Vec point_at(double t) const { return q + t * v; }
    OrientedLine reversed() const { return OrientedLine(-v, q); }
    double dist_to_origin() const { return q.norm(); }
};

/// (v, P - <P,v>v): the line through P with direction v, re-footed.
OrientedLine line_from_point_direction(const Vec& point, const Vec& direction);

/// Checks ||v|| = 1 and <v,Q> = 0 within 1e-12; throws InvalidArgument otherwise.
void check_line(const OrientedLine& line);

inline double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

} // namespace billiards

#endif
