#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "linalg.hpp"

namespace pursuit {

void Dataset::set_labels(std::vector<int> labels) {
    if (labels.size() != n_) throw std::invalid_argument("labels: count must equal row count");
    labels_ = std::move(labels);
}

void Dataset::set_true_direction(std::vector<double> u) {
    if (u.size() != d_) throw std::invalid_argument("true_direction: dimension mismatch");
    if (std::abs(la::norm(u) - 1.0) > 1e-9)
        throw std::invalid_argument("true_direction: must be unit norm");
    true_direction_ = std::move(u);
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > n_) throw std::out_of_range("slice: bad range");
    Dataset out(end - begin, d_);
    std::copy(values_.begin() + begin * d_, values_.begin() + end * d_,
              out.values_.begin());
    return out;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) throw CsvError("empty file: " + path, 1);
    while (!header.empty() && (header.back() == '\r' || header.back() == '\n'))
        header.pop_back();

    std::size_t columns = 1;
    for (char c : header)
        if (c == ',') ++columns;
    const bool labeled = header.size() >= 5 && header.compare(header.size() - 5, 5, "label") == 0;
    const std::size_t d = labeled ? columns - 1 : columns;
    if (d == 0) throw CsvError("no value columns in " + path, 1);

    std::vector<double> values;
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;

        std::size_t cells = 0;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p)
                throw CsvError("non-numeric cell in " + path + " line " +
                                   std::to_string(lineno), lineno);
            ++cells;
            if (labeled && cells == columns) {
                labels.push_back(static_cast<int>(v));
            } else {
                values.push_back(v);
            }
            p = end;
            if (*p == ',') {
                ++p;
            } else if (*p == '\0') {
                break;
            } else {
                throw CsvError("malformed cell in " + path + " line " +
                                   std::to_string(lineno), lineno);
            }
        }
        if (cells != columns)
            throw CsvError("ragged row in " + path + " line " + std::to_string(lineno) +
                               ": expected " + std::to_string(columns) + " cells, got " +
                               std::to_string(cells), lineno);
    }
    if (values.empty()) throw CsvError("no data rows in " + path, lineno);

    Dataset out(values.size() / d, d);
    out.mutable_values() = std::move(values);
    if (labeled) out.set_labels(std::move(labels));
    return out;
}

void save_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);

    for (std::size_t j = 0; j < data.dim(); ++j) {
        if (j) out << ',';
        out << 'x' << j;
    }
    if (data.has_labels()) out << ",label";
    out << '\n';

    char buf[40];
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < data.dim(); ++j) {
            if (j) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
            out << buf;
        }
        if (data.has_labels()) out << ',' << data.labels()[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace pursuit
