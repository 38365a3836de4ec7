// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <zlib.h>

#include "sympgnn/simulate.hpp"

namespace sympgnn {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "cannot write file: " + path);
    out << content;
    require(out.good(), "write failed: " + path);
}

inline bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return in.good();
}

inline std::string gzip_read_file(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    require(f != nullptr, "cannot open gzip file: " + path);
    std::string out;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool ok = n == 0;
    gzclose(f);
    require(ok, "gzip read failed: " + path);
    return out;
}

inline void gzip_write_file(const std::string& path, const std::string& content) {
    gzFile f = gzopen(path.c_str(), "wb");
    require(f != nullptr, "cannot write gzip file: " + path);
    const int written = gzwrite(f, content.data(), static_cast<unsigned>(content.size()));
    gzclose(f);
    require(written == static_cast<int>(content.size()), "gzip write failed: " + path);
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Reads plain or .gz text depending on the extension.
inline std::string read_maybe_gzip(const std::string& path) {
    return ends_with(path, ".gz") ? gzip_read_file(path) : read_text_file(path);
}
inline void write_maybe_gzip(const std::string& path, const std::string& content) {
    if (ends_with(path, ".gz"))
        gzip_write_file(path, content);
    else
        write_text_file(path, content);
}

// ---- matrix <-> json -----------------------------------------------------------

inline nlohmann::json matrix_to_json(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    require(j.is_array(), "matrix JSON: expected array of rows");
    const std::size_t rows = j.size();
    if (rows == 0) return Matrix();
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        require(j[i].is_array() && j[i].size() == cols, "matrix JSON: ragged rows");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    m.check_finite("matrix_from_json");
    return m;
}

// ---- trajectory JSONL -----------------------------------------------------------
// Header line {"h":..., "metadata":{...}} then one line per frame
// {"t":..., "p":[[...]], "q":[[...]]} with "edges" when per-frame graphs exist.

inline std::string trajectory_to_jsonl(const Trajectory& traj) {
    traj.validate();
    std::ostringstream out;
    nlohmann::json head;
    head["h"] = traj.h;
    head["metadata"] = traj.metadata;
    out << head.dump() << "\n";
    for (std::size_t f = 0; f < traj.frames(); ++f) {
        nlohmann::json line;
        line["t"] = traj.h * static_cast<double>(f);
        line["p"] = matrix_to_json(traj.states[f].p);
        line["q"] = matrix_to_json(traj.states[f].q);
        if (traj.has_graphs()) {
            auto edges = nlohmann::json::array();
            for (const auto& [a, b] : traj.graphs[f].edges) edges.push_back({a, b});
            line["edges"] = std::move(edges);
        }
        out << line.dump() << "\n";
    }
    return out.str();
}

inline Trajectory trajectory_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "trajectory: empty file");
    nlohmann::json head = nlohmann::json::parse(line);
    Trajectory traj;
    traj.h = head.at("h").get<double>();
    traj.metadata = head.value("metadata", nlohmann::json::object());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        PhaseState s{matrix_from_json(j.at("p")), matrix_from_json(j.at("q"))};
        if (j.contains("edges")) {
            Graph g;
            g.n = s.n();
            for (const auto& e : j.at("edges")) g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
            traj.graphs.push_back(std::move(g));
        }
        traj.states.push_back(std::move(s));
    }
    traj.validate();
    return traj;
}

inline void trajectory_save(const Trajectory& traj, const std::string& path) {
    write_maybe_gzip(path, trajectory_to_jsonl(traj));
}
inline Trajectory trajectory_load(const std::string& path) {
    return trajectory_from_jsonl(read_maybe_gzip(path));
}

/// Plot-friendly CSV: t then p and q entries row-major per frame.
inline std::string trajectory_to_csv(const Trajectory& traj) {
    traj.validate();
    std::ostringstream out;
    out.precision(17);
    const std::size_t n = traj.states.front().n(), d = traj.states.front().d();
    out << "t";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) out << ",p" << i << "_" << c;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) out << ",q" << i << "_" << c;
    out << "\n";
    for (std::size_t f = 0; f < traj.frames(); ++f) {
        out << traj.h * static_cast<double>(f);
        for (double v : traj.states[f].p.data()) out << "," << v;
        for (double v : traj.states[f].q.data()) out << "," << v;
        out << "\n";
    }
    return out.str();
}

/// (iteration, value) CSV used for loss and accuracy curves.
inline std::string curve_to_csv(const std::vector<double>& values,
                                const std::string& value_name = "value",
                                std::size_t stride = 1) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration," << value_name << "\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        if (i % stride == 0 || i + 1 == values.size()) out << i << "," << values[i] << "\n";
    return out.str();
}

}  // namespace sympgnn
