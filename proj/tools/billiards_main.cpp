#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "billiards/io.hpp"
#include "billiards/verify.hpp"

namespace {

using namespace billiards;

int log_level() {
    const char* env = std::getenv("BILLIARD_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[billiards] " << msg << "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::IoError, "cannot open output file: " + path);
    return out;
}

OrientedLine resolve_start(const ConeShape& shape, const std::string& line_arg,
                           std::uint64_t seed, double q_radius) {
    if (!line_arg.empty()) return parse_line_arg(line_arg, shape.dim());
    LineSampler sampler(shape, seed, q_radius);
    return sampler.next_in_psi().line;
}

int cmd_simulate(const std::string& cone_path, const std::string& line_arg, std::uint64_t seed,
                 int cap, double q_radius, const std::string& out_path) {
    const ConeShape shape = load_cone_file(cone_path);
    shape.require_valid();
    const OrientedLine start = resolve_start(shape, line_arg, seed, q_radius);
    log_info("simulating from v=" + fmt17(start.v[0]) + ",... dist " + fmt17(start.dist_to_origin()));
    const Trajectory traj = run_trajectory(shape, start, cap);
    auto out = open_out(out_path);
    write_trajectory_jsonl(out, traj);
    std::cout << "m=" << traj.reflection_count << " final=" << phase_tag_name(traj.final_tag)
              << " out=" << out_path << "\n";
    return 0;
}

int cmd_sample(const std::string& cone_path, std::size_t count, std::uint64_t seed, int cap,
               double q_radius, const std::string& out_path) {
    const ConeShape shape = load_cone_file(cone_path);
    const TransportField field(shape);
    LineSampler sampler(shape, seed, q_radius);
    auto out = open_out(out_path);
    write_integral_table_header(out, shape.dim());
    std::size_t written = 0;
    std::uint64_t traj_id = 0;
    while (written < count) {
        const auto sample = sampler.next_in_psi();
        IntegralVector iv;
        try {
            iv = integral_vector(field, sample.line, cap);
        } catch (const BilliardError&) {
            continue;  // tangent or degenerate: rejected like any non-phase-space line
        }
        write_integral_row(out, traj_id++, sample.line, sample.cls, iv);
        ++written;
    }
    std::cout << "rows=" << written << " acceptance_rate=" << fmt17(sampler.acceptance_rate())
              << " out=" << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& cone_path, const std::string& suite, std::size_t samples,
               std::uint64_t seed, int cap, double q_radius) {
    const ConeShape shape = load_cone_file(cone_path);
    const SuiteConfig cfg{samples, seed, cap, q_radius};
    VerificationReport report;
    if (suite == "geometry")
        report = verify_geometry(shape, cfg);
    else if (suite == "dynamics")
        report = verify_dynamics(shape, cfg);
    else if (suite == "integrals")
        report = verify_integrals(shape, cfg);
    else if (suite == "all")
        report = verify_all(shape, cfg);
    else
        fail(Errc::InvalidArgument, "unknown suite: " + suite);
    report.print(std::cout);
    return report.all_pass() ? 0 : 1;
}

int cmd_classify(const std::string& cone_path, const std::string& line_arg) {
    const ConeShape shape = load_cone_file(cone_path);
    const OrientedLine line = parse_line_arg(line_arg, shape.dim());
    const PhaseClass cls = classify(shape, line);
    std::cout << "class=" << phase_tag_name(cls.tag);
    if (!cls.reason.empty()) std::cout << " reason=\"" << cls.reason << "\"";
    std::cout << "\n";
    if (cls.tag == PhaseTag::NotInPhaseSpace) return 0;
    if (cls.tag == PhaseTag::Delta0 || cls.tag == PhaseTag::Delta1) {
        const Vec n_v = shape.normal_at(line.v);
        std::cout << "pairing=<n_v,Q>=" << fmt17(n_v.dot(line.q)) << "\n";
        return 0;
    }
    const IntervalRecord rec = intersect(shape, line);
    std::cout << "t_enter=" << fmt17(rec.t_enter) << " t_exit=" << fmt17(rec.t_exit) << "\n";
    const auto print_hit = [](const char* label, const SurfaceHit& hit) {
        std::cout << label << " t=" << fmt17(hit.t) << " point=[";
        for (int i = 0; i < hit.point.size(); ++i)
            std::cout << (i ? "," : "") << fmt17(hit.point[i]);
        std::cout << "] incidence=" << fmt17(hit.incidence) << "\n";
    };
    if (rec.enter_hit) print_hit("enter", *rec.enter_hit);
    if (rec.exit_hit) print_hit("exit", *rec.exit_hit);
    return 0;
}

int cmd_angle_oracle(double theta, std::size_t samples, std::uint64_t seed) {
    const AngleOracleReport report = run_angle_oracle(theta, samples, seed);
    std::cout << "theta=" << fmt17(theta) << " bound=" << report.bound
              << " max_count=" << report.max_count << " min_count=" << report.min_count
              << " samples=" << report.samples << " mismatches=" << report.mismatches
              << " over_bound=" << report.over_bound << "\n";
    const bool ok = report.over_bound == 0 && report.mismatches == 0 && report.bound_attained;
    std::cout << (ok ? "PASS" : "FAIL") << ": every count <= ceil(pi/theta), bound "
              << (report.bound_attained ? "attained" : "NOT attained") << "\n";
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birkhoff billiards inside convex cones: simulation, integrals, verification"};
    app.require_subcommand(1);

    std::string cone_path, line_arg, out_path, suite = "all";
    std::uint64_t seed = 1;
    std::size_t count = 1000;
    int cap = 100000;
    double q_radius = 3.0;
    double theta = 1.0;

    auto* sim = app.add_subcommand("simulate", "run one trajectory and write JSONL");
    sim->add_option("--cone", cone_path, "cone spec JSON file")->required();
    sim->add_option("--line", line_arg, "start line \"v=...;Q=...\" (default: seeded random)");
    sim->add_option("--seed", seed, "RNG seed for a random start");
    sim->add_option("--cap", cap, "reflection cap");
    sim->add_option("--qradius", q_radius, "sampling ball radius for random starts");
    sim->add_option("--out", out_path, "output JSONL path")->required();

    auto* smp = app.add_subcommand("sample", "sample phase-space lines and tabulate integrals");
    smp->add_option("--cone", cone_path, "cone spec JSON file")->required();
    smp->add_option("--n", count, "number of accepted lines");
    smp->add_option("--seed", seed, "RNG seed");
    smp->add_option("--cap", cap, "reflection cap");
    smp->add_option("--qradius", q_radius, "sampling ball radius");
    smp->add_option("--out", out_path, "output CSV path")->required();

    auto* ver = app.add_subcommand("verify", "run the invariant verification suites");
    ver->add_option("--cone", cone_path, "cone spec JSON file")->required();
    ver->add_option("--suite", suite, "all|geometry|dynamics|integrals");
    ver->add_option("--n", count, "samples per check");
    ver->add_option("--seed", seed, "RNG seed");
    ver->add_option("--cap", cap, "reflection cap");
    ver->add_option("--qradius", q_radius, "sampling ball radius");

    auto* cls = app.add_subcommand("classify", "classify a line and print its intersection data");
    cls->add_option("--cone", cone_path, "cone spec JSON file")->required();
    cls->add_option("--line", line_arg, "line \"v=...;Q=...\"")->required();

    auto* ang = app.add_subcommand("angle-oracle", "planar-angle reflection bound check");
    ang->add_option("--theta", theta, "wedge angle in (0, pi)")->required();
    ang->add_option("--n", count, "number of sampled trajectories");
    ang->add_option("--seed", seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(cone_path, line_arg, seed, cap, q_radius, out_path);
        if (smp->parsed()) return cmd_sample(cone_path, count, seed, cap, q_radius, out_path);
        if (ver->parsed()) return cmd_verify(cone_path, suite, count, seed, cap, q_radius);
        if (cls->parsed()) return cmd_classify(cone_path, line_arg);
        if (ang->parsed()) return cmd_angle_oracle(theta, count, seed);
    } catch (const BilliardError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 1;
}
