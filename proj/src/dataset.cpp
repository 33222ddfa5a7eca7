#include "svmif/dataset.hpp"

#include "svmif/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace svmif {

Dataset::Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw InputError("dataset is empty");
    }
    dimension_ = samples_.front().x.size();
    if (dimension_ == 0) {
        throw InputError("dataset samples have no input features");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const Sample& s = samples_[i];
        if (s.x.size() != dimension_) {
            throw InputError("sample " + std::to_string(i) + " has dimension " +
                             std::to_string(s.x.size()) + ", expected " +
                             std::to_string(dimension_));
        }
        bool finite = std::isfinite(s.y);
        for (double v : s.x) {
            finite = finite && std::isfinite(v);
        }
        if (!finite) {
            throw InputError("sample " + std::to_string(i) + " contains a non-finite value");
        }
    }
}

std::vector<double> Dataset::targets() const {
    std::vector<double> y;
    y.reserve(samples_.size());
    for (const Sample& s : samples_) {
        y.push_back(s.y);
    }
    return y;
}

Dataset Dataset::slice(std::size_t first, std::size_t last) const {
    if (first >= last || last > samples_.size()) {
        throw InputError("invalid dataset slice");
    }
    return Dataset(std::vector<Sample>(samples_.begin() + static_cast<std::ptrdiff_t>(first),
                                       samples_.begin() + static_cast<std::ptrdiff_t>(last)));
}

std::vector<double> parse_delimited_line(const std::string& line, std::size_t line_number) {
    std::vector<double> fields;
    std::size_t pos = 0;
    auto is_sep = [](char c) { return c == ',' || c == ';' || c == ' ' || c == '\t' || c == '\r'; };
    while (pos < line.size()) {
        while (pos < line.size() && is_sep(line[pos])) {
            ++pos;
        }
        if (pos >= line.size()) {
            break;
        }
        std::size_t end = pos;
        while (end < line.size() && !is_sep(line[end])) {
            ++end;
        }
        const std::string token = line.substr(pos, end - pos);
        char* parsed_end = nullptr;
        errno = 0;
        const double value = std::strtod(token.c_str(), &parsed_end);
        if (parsed_end != token.c_str() + token.size() || errno == ERANGE) {
            throw InputError("line " + std::to_string(line_number) + ": cannot parse '" + token +
                             "' as a number");
        }
        fields.push_back(value);
        pos = end;
    }
    return fields;
}

Dataset read_dataset(std::istream& in) {
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_number = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::vector<double> fields = parse_delimited_line(line, line_number);
        if (fields.size() < 2) {
            throw InputError("line " + std::to_string(line_number) +
                             ": expected at least one feature column and a target");
        }
        if (columns == 0) {
            columns = fields.size();
        } else if (fields.size() != columns) {
            throw InputError("line " + std::to_string(line_number) + ": expected " +
                             std::to_string(columns) + " columns, found " +
                             std::to_string(fields.size()));
        }
        Sample s;
        s.y = fields.back();
        fields.pop_back();
        s.x = std::move(fields);
        samples.push_back(std::move(s));
    }
    return Dataset(std::move(samples));
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open dataset file '" + path + "'");
    }
    return read_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    std::ostringstream buf;
    buf << std::setprecision(17);
    for (const Sample& s : data) {
        for (double v : s.x) {
            buf << v << ',';
        }
        buf << s.y << '\n';
    }
    out << buf.str();
}

} // namespace svmif
