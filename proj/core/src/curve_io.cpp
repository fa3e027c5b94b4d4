// curve_io.cpp — CSV/JSON curve serialization.  Both formats print every
// number through the same %.17g formatter so emissions of one run are
// numerically identical.
#include "g2kit/curve_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "g2kit/errors.hpp"

namespace g2kit::curve_io {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void require_writable(const regression::CorrelationCurve& curve) {
    regression::validate_curve(curve);
    if (curve.g2.empty())
        throw ConfigError("curve serialization: g2 column required but curve has none");
}

regression::CorrelationCurve read_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("curve file: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool with_errors = false;
    if (line == "tau,g1_re,g1_im,g2,g1_err,g2_err") {
        with_errors = true;
    } else if (line != "tau,g1_re,g1_im,g2") {
        throw ConfigError("curve file: unrecognized CSV header \"" + line + "\"");
    }
    regression::CorrelationCurve curve;
    const std::size_t ncols = with_errors ? 6 : 4;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[6];
        std::size_t k = 0;
        while (std::getline(row, cell, ',')) {
            if (k >= ncols) break;
            std::size_t used = 0;
            try {
                vals[k] = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw ConfigError("curve file: bad number at line " + std::to_string(lineno));
            }
            if (used != cell.size())
                throw ConfigError("curve file: bad number at line " + std::to_string(lineno));
            ++k;
        }
        if (k != ncols)
            throw ConfigError("curve file: expected " + std::to_string(ncols) +
                              " columns at line " + std::to_string(lineno));
        curve.tau.push_back(vals[0]);
        curve.g1.emplace_back(vals[1], vals[2]);
        curve.g2.push_back(vals[3]);
        if (with_errors) {
            curve.g1_err.push_back(vals[4]);
            curve.g2_err.push_back(vals[5]);
        }
    }
    return curve;
}

regression::CorrelationCurve read_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("curve file: JSON parse error: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigError("curve file: expected a JSON array of records");
    regression::CorrelationCurve curve;
    bool with_errors = false;
    bool first = true;
    for (const auto& rec : doc) {
        if (!rec.is_object()) throw ConfigError("curve file: each record must be an object");
        try {
            if (first) {
                with_errors = rec.contains("g1_err") || rec.contains("g2_err");
                first = false;
            }
            curve.tau.push_back(rec.at("tau").get<double>());
            curve.g1.emplace_back(rec.at("g1_re").get<double>(), rec.at("g1_im").get<double>());
            curve.g2.push_back(rec.at("g2").get<double>());
            if (with_errors) {
                curve.g1_err.push_back(rec.at("g1_err").get<double>());
                curve.g2_err.push_back(rec.at("g2_err").get<double>());
            } else if (rec.contains("g1_err") || rec.contains("g2_err")) {
                throw ConfigError("curve file: error columns must appear in every record or none");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("curve file: bad record: ") + e.what());
        }
    }
    return curve;
}

} // namespace

Format format_from_string(const std::string& name) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw ConfigError("unknown output format \"" + name + "\": expected csv or json");
}

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

std::string write_csv(const regression::CorrelationCurve& curve) {
    require_writable(curve);
    const bool errs = curve.has_errors();
    std::string out = errs ? "tau,g1_re,g1_im,g2,g1_err,g2_err\n" : "tau,g1_re,g1_im,g2\n";
    for (std::size_t i = 0; i < curve.tau.size(); ++i) {
        out += num(curve.tau[i]);
        out += ',';
        out += num(curve.g1[i].real());
        out += ',';
        out += num(curve.g1[i].imag());
        out += ',';
        out += num(curve.g2[i]);
        if (errs) {
            out += ',';
            out += num(curve.g1_err[i]);
            out += ',';
            out += num(curve.g2_err[i]);
        }
        out += '\n';
    }
    return out;
}

std::string write_json(const regression::CorrelationCurve& curve) {
    // Records are emitted by hand so the numbers go through the same
    // formatter as the CSV writer.
    require_writable(curve);
    const bool errs = curve.has_errors();
    std::string out = "[\n";
    for (std::size_t i = 0; i < curve.tau.size(); ++i) {
        out += "  {\"tau\": " + num(curve.tau[i]) +
               ", \"g1_re\": " + num(curve.g1[i].real()) +
               ", \"g1_im\": " + num(curve.g1[i].imag()) +
               ", \"g2\": " + num(curve.g2[i]);
        if (errs)
            out += ", \"g1_err\": " + num(curve.g1_err[i]) +
                   ", \"g2_err\": " + num(curve.g2_err[i]);
        out += i + 1 < curve.tau.size() ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

std::string write(const regression::CorrelationCurve& curve, Format f) {
    return f == Format::csv ? write_csv(curve) : write_json(curve);
}

regression::CorrelationCurve read(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) throw ConfigError("curve file: empty input");
    regression::CorrelationCurve curve =
        text[i] == '[' ? read_json(text) : read_csv(text);
    regression::validate_curve(curve);
    if (curve.g2.empty()) throw ConfigError("curve file: no data rows");
    return curve;
}

void write_file(const regression::CorrelationCurve& curve, const std::string& path, Format f) {
    const std::string body = write(curve, f);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw ConfigError("cannot write output file: " + path);
}

regression::CorrelationCurve read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open curve file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read(buf.str());
}

} // namespace g2kit::curve_io
