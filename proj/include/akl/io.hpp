#ifndef AKL_IO_HPP
#define AKL_IO_HPP

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "akl/ridge.hpp"

namespace akl {

namespace io_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
        size_t comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return fields;
}

inline double parse_double(const std::string& s, int line_no, const std::string& path) {
    try {
        size_t consumed = 0;
        double v = std::stod(s, &consumed);
        if (consumed != s.size()) throw std::invalid_argument("trailing garbage");
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        return v;
    } catch (const std::exception&) {
        throw input_error(path + ":" + std::to_string(line_no) + ": bad numeric field '" + s +
                          "'");
    }
}

}  // namespace io_detail

/// Parses a dataset CSV with header `x1,...,xn,y1,...,yl`. The feature
/// dimension is inferred from the column count and the expected target
/// count. Errors cite the 1-based line number.
inline Dataset load_dataset(const std::string& path, Index expected_targets = 1) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot open dataset: " + path);
    if (expected_targets < 1) throw input_error("load_dataset: need at least one target");

    std::string line;
    if (!std::getline(is, line)) throw input_error(path + ": empty file");
    const auto header = io_detail::split_csv_line(line);
    const Index cols = static_cast<Index>(header.size());
    const Index n = cols - expected_targets;
    if (n < 1)
        throw input_error(path + ":1: header has " + std::to_string(cols) +
                          " columns, too few for " + std::to_string(expected_targets) +
                          " target(s)");

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = io_detail::split_csv_line(line);
        if (static_cast<Index>(fields.size()) != cols)
            throw input_error(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(cols) + " fields, got " +
                              std::to_string(fields.size()));
        std::vector<double> row(cols);
        for (Index j = 0; j < cols; ++j)
            row[j] = io_detail::parse_double(fields[j], line_no, path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw input_error(path + ": empty dataset");

    Dataset data;
    data.points.resize(static_cast<Index>(rows.size()), n);
    data.targets.resize(static_cast<Index>(rows.size()), expected_targets);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (Index j = 0; j < n; ++j) data.points(static_cast<Index>(i), j) = rows[i][j];
        for (Index j = 0; j < expected_targets; ++j)
            data.targets(static_cast<Index>(i), j) = rows[i][n + j];
    }
    data.validate();
    return data;
}

inline void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    char buf[40];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (Index j = 0; j < data.dim(); ++j) os << (j ? "," : "") << 'x' << (j + 1);
    for (Index j = 0; j < data.target_dim(); ++j) os << ",y" << (j + 1);
    os << '\n';
    for (Index i = 0; i < data.size(); ++i) {
        for (Index j = 0; j < data.dim(); ++j) os << (j ? "," : "") << fmt(data.points(i, j));
        for (Index j = 0; j < data.target_dim(); ++j) os << ',' << fmt(data.targets(i, j));
        os << '\n';
    }
}

namespace io_detail {

constexpr int kModelVersion = 1;

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw input_error("model file: field '" + field + "' is not a matrix");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(j[i].size()) != cols)
            throw input_error("model file: ragged rows in field '" + field + "'");
        for (Index c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw input_error("model file: non-numeric entry in field '" + field + "'");
            m(i, c) = j[i][c].get<double>();
        }
    }
    return m;
}

}  // namespace io_detail

inline void save_model(const KernelModel& model, const std::string& path) {
    model.validate();
    nlohmann::json j;
    j["version"] = io_detail::kModelVersion;
    j["family"] = "gaussian";
    j["n"] = model.dim();
    j["width_mode"] = to_string(model.spec.mode);
    j["centers"] = io_detail::matrix_to_json(model.centers);
    j["widths"] = io_detail::matrix_to_json(model.spec.widths);
    j["sigma_min"] = model.spec.sigma_min;
    j["sigma_max"] = model.spec.sigma_max;
    j["weights"] = io_detail::matrix_to_json(model.weights);
    j["lambda_used"] = model.lambda_used;
    j["flavor"] = to_string(model.flavor);
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    os << j.dump(2) << '\n';
}

inline KernelModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot open model: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error("model file: invalid JSON in " + path + ": " + e.what());
    }
    if (!j.contains("version") || !j["version"].is_number_integer())
        throw input_error("model file: missing field 'version'");
    if (j["version"].get<int>() != io_detail::kModelVersion)
        throw input_error("model file: unsupported version " +
                          std::to_string(j["version"].get<int>()));
    for (const char* field : {"family", "n", "width_mode", "centers", "widths", "weights",
                              "lambda_used", "flavor"})
        if (!j.contains(field))
            throw input_error(std::string("model file: missing field '") + field + "'");
    if (j["family"].get<std::string>() != "gaussian")
        throw input_error("model file: unsupported family '" +
                          j["family"].get<std::string>() + "'");

    KernelModel model;
    model.centers = io_detail::matrix_from_json(j["centers"], "centers");
    model.spec.n = j["n"].get<Index>();
    model.spec.mode = width_mode_from_string(j["width_mode"].get<std::string>());
    model.spec.widths = io_detail::matrix_from_json(j["widths"], "widths");
    model.spec.sigma_min = j.value("sigma_min", 1e-12);
    model.spec.sigma_max = j.value("sigma_max", 1e12);
    model.weights = io_detail::matrix_from_json(j["weights"], "weights");
    model.lambda_used = j["lambda_used"].get<double>();
    model.flavor = flavor_from_string(j["flavor"].get<std::string>());
    model.validate();
    return model;
}

}  // namespace akl

#endif
