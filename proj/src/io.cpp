#include "billiards/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace billiards {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::string vec_json(const Vec& v) {
    std::string out = "[";
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt17(v[i]);
    }
    return out + "]";
}

Tolerances tol_from_json(const json& j) {
    Tolerances tol;
    if (j.contains("tol")) {
        const auto& t = j.at("tol");
        if (t.contains("root")) tol.root = t.at("root").get<double>();
        if (t.contains("tangent")) tol.tangent = t.at("tangent").get<double>();
        if (t.contains("gamma")) tol.gamma = t.at("gamma").get<double>();
    }
    return tol;
}

} // namespace

ConeShape parse_cone_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::IoError, std::string("cone spec is not valid JSON: ") + e.what());
    }
    try {
        const int dim = j.at("dim").get<int>();
        const auto& sec = j.at("section");
        const std::string kind = sec.at("kind").get<std::string>();
        const Tolerances tol = tol_from_json(j);
        if (kind == "ellipsoid") {
            const auto center_list = sec.at("center").get<std::vector<double>>();
            Vec center(center_list.size());
            for (std::size_t i = 0; i < center_list.size(); ++i) center[i] = center_list[i];
            const auto rows = sec.at("matrix").get<std::vector<std::vector<double>>>();
            Mat matrix(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rows.size())
                    fail(Errc::IoError, "section matrix must be square");
                for (std::size_t c = 0; c < rows[r].size(); ++c) matrix(r, c) = rows[r][c];
            }
            return ConeShape::ellipsoid(dim, std::move(center), std::move(matrix), tol);
        }
        if (kind == "radial_fourier") {
            if (dim != 3) fail(Errc::IoError, "radial_fourier sections require dim = 3");
            std::vector<double> cs, sn;
            if (sec.contains("cos")) cs = sec.at("cos").get<std::vector<double>>();
            if (sec.contains("sin")) sn = sec.at("sin").get<std::vector<double>>();
            return ConeShape::radial_fourier(sec.at("a0").get<double>(), std::move(cs),
                                             std::move(sn), tol);
        }
        fail(Errc::IoError, "unknown section kind: " + kind);
    } catch (const json::exception& e) {
        fail(Errc::IoError, std::string("cone spec missing fields: ") + e.what());
    }
}

ConeShape load_cone_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::IoError, "cannot open cone spec file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cone_json(buf.str());
}

std::string cone_to_json(const ConeShape& shape) {
    std::ostringstream out;
    out << "{\"dim\": " << shape.dim() << ", \"section\": ";
    if (shape.is_ellipsoid()) {
        const auto& sec = shape.ellipsoid_section();
        out << "{\"kind\": \"ellipsoid\", \"center\": " << vec_json(sec.center) << ", \"matrix\": [";
        for (int r = 0; r < sec.matrix.rows(); ++r) {
            if (r) out << ",";
            out << vec_json(sec.matrix.row(r));
        }
        out << "]}";
    } else {
        const auto& sec = shape.radial_section();
        out << "{\"kind\": \"radial_fourier\", \"a0\": " << fmt17(sec.a0) << ", \"cos\": [";
        for (std::size_t i = 0; i < sec.cos_coeffs.size(); ++i)
            out << (i ? "," : "") << fmt17(sec.cos_coeffs[i]);
        out << "], \"sin\": [";
        for (std::size_t i = 0; i < sec.sin_coeffs.size(); ++i)
            out << (i ? "," : "") << fmt17(sec.sin_coeffs[i]);
        out << "]}";
    }
    const auto& tol = shape.tol();
    out << ", \"tol\": {\"root\": " << fmt17(tol.root) << ", \"tangent\": " << fmt17(tol.tangent)
        << ", \"gamma\": " << fmt17(tol.gamma) << "}}";
    return out.str();
}

OrientedLine parse_line_arg(const std::string& text, int dim) {
    const auto parse_list = [&](const std::string& part, const std::string& name) {
        Vec out(dim);
        std::stringstream ss(part);
        std::string item;
        int i = 0;
        while (std::getline(ss, item, ',')) {
            if (i >= dim) fail(Errc::IoError, name + " has too many components");
            try {
                out[i++] = std::stod(item);
            } catch (const std::exception&) {
                fail(Errc::IoError, name + " has a non-numeric component: " + item);
            }
        }
        if (i != dim) fail(Errc::IoError, name + " needs exactly " + std::to_string(dim) + " components");
        return out;
    };

    const auto v_pos = text.find("v=");
    const auto q_pos = text.find("Q=");
    const auto semi = text.find(';');
    if (v_pos == std::string::npos || q_pos == std::string::npos || semi == std::string::npos)
        fail(Errc::IoError, "line argument must look like \"v=...;Q=...\"");
    std::string first = text.substr(0, semi);
    std::string second = text.substr(semi + 1);
    std::string v_part = (first.rfind("v=", 0) == 0) ? first.substr(2) : second.substr(2);
    std::string q_part = (first.rfind("Q=", 0) == 0) ? first.substr(2) : second.substr(2);

    OrientedLine line(parse_list(v_part, "v"), parse_list(q_part, "Q"));
    check_line(line);
    return line;
}

void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj) {
    for (const auto& step : traj.steps) {
        out << "{\"k\":" << step.k << ",\"v\":" << vec_json(step.line.v)
            << ",\"Q\":" << vec_json(step.line.q) << ",\"p\":" << vec_json(step.p)
            << ",\"alpha\":" << fmt17(step.alpha) << ",\"theta\":" << fmt17(step.theta)
            << ",\"A\":" << fmt17(step.a_value) << ",\"dist\":" << fmt17(step.dist) << "}\n";
    }
    out << "{\"final_v\":" << vec_json(traj.final_line.v)
        << ",\"final_Q\":" << vec_json(traj.final_line.q) << ",\"m\":" << traj.reflection_count
        << "}\n";
}

void write_integral_table_header(std::ostream& out, int dim) {
    out << "traj_id,class,m";
    for (int i = 0; i < dim; ++i) out << ",v" << i + 1;
    for (int i = 0; i < dim; ++i) out << ",Q" << i + 1;
    for (int i = 0; i < 2 * dim - 1; ++i) out << ",I" << i + 1;
    for (int i = 0; i < 2 * dim - 1; ++i) out << ",Is" << i + 1;
    out << "\n";
}

void write_integral_row(std::ostream& out, std::uint64_t traj_id, const OrientedLine& line,
                        const PhaseClass& cls, const IntegralVector& iv) {
    out << traj_id << "," << phase_tag_name(cls.tag) << "," << iv.m;
    for (int i = 0; i < line.v.size(); ++i) out << "," << fmt17(line.v[i]);
    for (int i = 0; i < line.q.size(); ++i) out << "," << fmt17(line.q[i]);
    for (double x : iv.values) out << "," << fmt17(x);
    for (double x : iv.smooth_values) out << "," << fmt17(x);
    out << "\n";
}

} // namespace billiards
