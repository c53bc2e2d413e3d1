#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

namespace pursuit {

// n x d sample matrix, row major. Labels and the ground-truth direction are
// optional and carried along for evaluation only. Values are immutable after
// construction; transforms produce new datasets.
class Dataset {
  public:
    Dataset() = default;
    Dataset(std::size_t n, std::size_t d) : n_(n), d_(d), values_(n * d, 0.0) {}

    std::size_t rows() const { return n_; }
    std::size_t dim() const { return d_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * d_, d_}; }
    std::span<double> mutable_row(std::size_t i) { return {values_.data() + i * d_, d_}; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    bool has_labels() const { return !labels_.empty(); }
    const std::vector<int>& labels() const { return labels_; }
    void set_labels(std::vector<int> labels);

    bool has_true_direction() const { return true_direction_.has_value(); }
    const std::vector<double>& true_direction() const { return *true_direction_; }
    void set_true_direction(std::vector<double> u);
    void clear_true_direction() { true_direction_.reset(); }

    // Dataset containing rows [begin, end), without labels.
    Dataset slice(std::size_t begin, std::size_t end) const;

  private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> values_;
    std::vector<int> labels_;
    std::optional<std::vector<double>> true_direction_;
};

// CSV with header `x0,...,x{d-1}[,label]`, 17 significant digits, UNIX
// newlines. Loading is lossless with respect to saving.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

// Parse error carrying the 1-based line number.
class CsvError : public std::runtime_error {
  public:
    CsvError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

}  // namespace pursuit
