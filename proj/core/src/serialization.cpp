#include "ht/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "ht/errors.hpp"

namespace ht {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string to_json(const Distribution& d) {
    nlohmann::json j;
    j["labels"] = d.labels();
    j["probs"] = std::vector<double>(d.probs().begin(), d.probs().end());
    return j.dump();
}

Distribution distribution_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw StructuralError(std::string("invalid distribution JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("probs") || !j["probs"].is_array()) {
        throw StructuralError("distribution JSON needs a \"probs\" array");
    }
    std::vector<double> probs;
    for (const auto& v : j["probs"]) {
        if (!v.is_number()) throw StructuralError("distribution JSON probs must be numbers");
        probs.push_back(v.get<double>());
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) throw StructuralError("distribution JSON labels must be an array");
        for (const auto& v : j["labels"]) {
            if (v.is_string()) {
                labels.push_back(v.get<std::string>());
            } else if (v.is_number_integer()) {
                labels.push_back(std::to_string(v.get<long long>()));
            } else if (v.is_number()) {
                labels.push_back(format_double(v.get<double>()));
            } else {
                throw StructuralError("distribution JSON labels must be strings or numbers");
            }
        }
    }
    return Distribution(std::move(probs), std::move(labels));
}

std::string to_csv(const Distribution& d) {
    std::string out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        out += d.labels()[i];
        out += ',';
        out += format_double(d[i]);
        out += '\n';
    }
    return out;
}

Distribution distribution_from_csv(std::string_view text) {
    std::vector<double> probs;
    std::vector<std::string> labels;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) {
            throw StructuralError("CSV line " + std::to_string(line_no) + " is not 'label,prob'");
        }
        const std::string value = trim(std::string_view(line).substr(comma + 1));
        double x = 0.0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), x);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
            throw StructuralError("CSV line " + std::to_string(line_no) + " has a malformed probability");
        }
        labels.push_back(trim(std::string_view(line).substr(0, comma)));
        probs.push_back(x);
    }
    return Distribution(std::move(probs), std::move(labels));
}

Distribution load_distribution(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("cannot open distribution file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    return csv ? distribution_from_csv(buf.str()) : distribution_from_json(buf.str());
}

}  // namespace ht
