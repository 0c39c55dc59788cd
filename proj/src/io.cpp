#include "current_lab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "current_lab/error.hpp"

namespace current_lab {

namespace {

using nlohmann::json;

std::size_t as_index(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ValidationError("field '" + field + "' must be a nonnegative integer");
    return j.get<std::size_t>();
}

double as_real(const json& j, const std::string& field) {
    if (!j.is_number()) throw ValidationError("field '" + field + "' must be a number");
    return j.get<double>();
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Network network_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("network must be a JSON object");
    if (!j.contains("vertices")) throw ValidationError("missing field 'vertices'");
    if (!j.contains("edges")) throw ValidationError("missing field 'edges'");
    if (!j.contains("beta")) throw ValidationError("missing field 'beta'");

    NetworkSpec spec;
    spec.vertices = as_index(j["vertices"], "vertices");
    const json& edges = j["edges"];
    if (!edges.is_array()) throw ValidationError("field 'edges' must be an array of [u, v] pairs");
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::string name = "edges[" + std::to_string(e) + "]";
        if (!edges[e].is_array() || edges[e].size() != 2)
            throw ValidationError("field '" + name + "' must be a pair [u, v]");
        spec.edges.push_back({as_index(edges[e][0], name), as_index(edges[e][1], name)});
    }
    const json& beta = j["beta"];
    if (beta.is_number()) {
        spec.beta.assign(spec.edges.size(), as_real(beta, "beta"));
    } else if (beta.is_array()) {
        if (beta.size() != spec.edges.size())
            throw ValidationError("field 'beta' has " + std::to_string(beta.size()) + " entries for " +
                                  std::to_string(spec.edges.size()) + " edges");
        for (std::size_t e = 0; e < beta.size(); ++e) spec.beta.push_back(as_real(beta[e], "beta[" + std::to_string(e) + "]"));
    } else {
        throw ValidationError("field 'beta' must be a number or an array of numbers");
    }
    if (j.contains("pinning") && !j["pinning"].is_null()) {
        const json& p = j["pinning"];
        if (!p.is_object() || !p.contains("vertex"))
            throw ValidationError("field 'pinning' must be an object with 'vertex' and 'conductance'");
        Pinning pin;
        pin.vertex = as_index(p["vertex"], "pinning.vertex");
        pin.conductance = p.contains("conductance") ? as_real(p["conductance"], "pinning.conductance") : 2.0;
        spec.pinning = pin;
    }
    try {
        return build_network(spec);
    } catch (const ValidationError&) {
        throw;
    } catch (const LabError& err) {
        throw ValidationError(err.what());
    }
}

json network_to_json(const Network& net) {
    json edges = json::array();
    for (const Edge& e : net.edges()) edges.push_back({e.u, e.v});
    json j = {{"vertices", net.vertex_count()}, {"edges", edges}, {"beta", net.beta()}};
    if (net.pinning())
        j["pinning"] = {{"vertex", net.pinning()->vertex}, {"conductance", net.pinning()->conductance}};
    else
        j["pinning"] = nullptr;
    return j;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string() + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        const auto [line, col] = line_column(text, err.byte == 0 ? 0 : err.byte - 1);
        std::ostringstream msg;
        msg << path.string() << ":" << line << ":" << col << ": malformed JSON";
        throw ValidationError(msg.str());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError(path.string() + ": cannot write file");
    out << j.dump(2) << '\n';
}

Network load_network(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    try {
        return network_from_json(j);
    } catch (const ValidationError& err) {
        throw ValidationError(path.string() + ": " + err.what());
    }
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, const Network& net) {
    json header = {{"dimension", m.rows()}};
    if (net.pinning())
        header["pinning"] = {{"vertex", net.pinning()->vertex}, {"conductance", net.pinning()->conductance}};
    else
        header["pinning"] = nullptr;
    out << header.dump() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_double(m(r, c));
        out << '\n';
    }
}

void write_field_csv(std::ostream& out, const FieldSample& field) {
    out << "vertex,h,u,sign\n";
    for (std::size_t x = 0; x < field.h.size(); ++x)
        out << x << ',' << format_double(field.h[x]) << ',' << format_double(field.magnitude[x]) << ','
            << int(field.sign[x]) << '\n';
}

std::vector<std::size_t> parse_order(const std::string& text) {
    std::vector<std::size_t> order;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t value = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size())
            throw ValidationError("order: '" + item + "' is not a vertex id");
        order.push_back(value);
    }
    if (order.empty()) throw ValidationError("order: empty permutation");
    return order;
}

}  // namespace current_lab
