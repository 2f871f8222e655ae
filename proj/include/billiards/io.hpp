#ifndef BILLIARDS_IO_HPP
#define BILLIARDS_IO_HPP

#include <iosfwd>
#include <string>

#include "billiards/dynamics.hpp"
#include "billiards/integrals.hpp"

namespace billiards {

/// Formats a double as a JSON-compatible number with 17 significant digits.
std::string fmt17(double x);

/// Cone spec JSON:
/// {"dim": n,
///  "section": {"kind": "ellipsoid", "center": [...], "matrix": [[...]]}
///           | {"kind": "radial_fourier", "a0": r, "cos": [...], "sin": [...]},
///  "tol": {"root": 1e-12, "tangent": 1e-9}}
ConeShape parse_cone_json(const std::string& text);
ConeShape load_cone_file(const std::string& path);
std::string cone_to_json(const ConeShape& shape);

/// Parses "v=a,b,...;Q=c,d,..." into an oriented line (re-footing is not
/// applied: malformed input is an error, not silently fixed).
OrientedLine parse_line_arg(const std::string& text, int dim);

/// Trajectory JSONL: one record per step plus a terminal record.
void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj);

/// Integral table CSV.
void write_integral_table_header(std::ostream& out, int dim);
void write_integral_row(std::ostream& out, std::uint64_t traj_id, const OrientedLine& line,
                        const PhaseClass& cls, const IntegralVector& iv);

} // namespace billiards

#endif
