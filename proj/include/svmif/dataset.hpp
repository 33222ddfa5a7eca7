#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace svmif {

struct Sample {
    std::vector<double> x;
    double y = 0.0;
};

/// Labeled regression samples. Non-empty, one shared input dimension, all
/// values finite; the constructor enforces this and throws InputError.
class Dataset {
public:
    explicit Dataset(std::vector<Sample> samples);

    std::size_t size() const { return samples_.size(); }
    std::size_t dimension() const { return dimension_; }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    std::span<const Sample> samples() const { return samples_; }

    std::vector<double> targets() const;

    /// Half-open sample range [first, last) as a new dataset.
    Dataset slice(std::size_t first, std::size_t last) const;

    auto begin() const { return samples_.begin(); }
    auto end() const { return samples_.end(); }

private:
    std::vector<Sample> samples_;
    std::size_t dimension_ = 0;
};

/// Reads delimited text: n feature columns then the target, one sample per
/// line. Columns may be separated by commas, semicolons, tabs or spaces;
/// blank lines and lines starting with '#' are skipped.
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

void write_dataset(std::ostream& out, const Dataset& data);

/// Parses the numeric fields of one delimited line. Throws InputError naming
/// `line_number` on a malformed field.
std::vector<double> parse_delimited_line(const std::string& line, std::size_t line_number);

} // namespace svmif
