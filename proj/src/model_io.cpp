#include "ceo/model_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace ceo::io {

using nlohmann::json;

namespace {

MatrixXd parse_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ParseError("key \"" + key + "\": expected a nested array matrix");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ParseError("key \"" + key + "\": matrix rows have unequal length");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number())
                throw ParseError("key \"" + key + "\": non-numeric entry");
            const double v = j[r][c].get<double>();
            if (!std::isfinite(v))
                throw ParseError("key \"" + key + "\": non-finite entry");
            m(r, c) = v;
        }
    }
    return m;
}

TestChannelGains parse_omegas(const json& j) {
    TestChannelGains g;
    for (std::size_t k = 0; k < j.size(); ++k)
        g.omegas.push_back(
            symmetrize(parse_matrix(j[k], "omegas[" + std::to_string(k) + "]")));
    return g;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

ModelFile parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("model document must be a JSON object");

    ModelFile out;
    if (j.contains("mode")) {
        const auto mode = j["mode"].get<std::string>();
        if (mode == "real") out.model.mode = Mode::Real;
        else if (mode == "complex") out.model.mode = Mode::Complex;
        else throw ParseError("key \"mode\": expected \"real\" or \"complex\"");
    }
    if (!j.contains("sigma_x")) throw ParseError("missing key \"sigma_x\"");
    out.model.sigma_x = symmetrize(parse_matrix(j["sigma_x"], "sigma_x"));
    out.model.n_x = static_cast<int>(out.model.sigma_x.rows());

    if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty())
        throw ParseError("missing or empty key \"agents\"");
    for (std::size_t k = 0; k < j["agents"].size(); ++k) {
        const auto& ja = j["agents"][k];
        const std::string tag = "agents[" + std::to_string(k) + "]";
        if (!ja.is_object()) throw ParseError("key \"" + tag + "\": expected object");
        if (!ja.contains("H")) throw ParseError("missing key \"" + tag + ".H\"");
        if (!ja.contains("sigma"))
            throw ParseError("missing key \"" + tag + ".sigma\"");
        Agent a;
        a.H = parse_matrix(ja["H"], tag + ".H");
        a.sigma = symmetrize(parse_matrix(ja["sigma"], tag + ".sigma"));
        out.model.agents.push_back(std::move(a));
    }
    if (j.contains("omegas")) {
        if (!j["omegas"].is_array()) throw ParseError("key \"omegas\": expected array");
        out.omegas = parse_omegas(j["omegas"]);
    }
    return out;
}

ModelFile load_model_file(const std::string& path) {
    return parse_model_json(read_file(path));
}

TestChannelGains parse_omegas_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (j.is_object()) {
        if (!j.contains("omegas")) throw ParseError("missing key \"omegas\"");
        j = j["omegas"];
    }
    if (!j.is_array()) throw ParseError("key \"omegas\": expected array of matrices");
    return parse_omegas(j);
}

TestChannelGains load_omegas_file(const std::string& path) {
    return parse_omegas_json(read_file(path));
}

}  // namespace ceo::io
