#include "mobai/instance.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>

#include "mobai/error.hpp"

namespace mobai {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw InvalidShape("matrix data size does not match " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw InvalidShape("ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), cols, std::move(data));
}

Instance::Instance(Matrix means, TieMode mode) : means_(std::move(means)), mode_(mode) {
    if (means_.rows() < 2) throw InvalidShape("an instance needs at least 2 arms");
    if (means_.cols() < 1) throw InvalidShape("an instance needs at least 1 objective");
    for (double v : means_.data()) {
        if (!std::isfinite(v)) throw InvalidShape("instance means must be finite");
    }
    if (mode_ == TieMode::strict) (void)best_arms(*this, TieMode::strict);
}

BestArms best_arms(const Instance& inst, TieMode mode) {
    BestArms out;
    out.arms.resize(inst.objectives());
    for (std::size_t m = 0; m < inst.objectives(); ++m) {
        std::size_t best = 0;
        bool tied = false;
        for (std::size_t i = 1; i < inst.arms(); ++i) {
            const double v = inst.mean(i, m);
            const double b = inst.mean(best, m);
            if (v > b) {
                best = i;
                tied = false;
            } else if (v == b) {
                tied = true;
            }
        }
        if (tied && mode == TieMode::strict) throw DuplicateMaximum(m);
        out.arms[m] = best;
    }
    return out;
}

GapMatrix gaps(const Instance& inst) {
    const BestArms best = best_arms(inst);
    GapMatrix out{Matrix(inst.arms(), inst.objectives())};
    for (std::size_t i = 0; i < inst.arms(); ++i) {
        for (std::size_t m = 0; m < inst.objectives(); ++m) {
            out.gaps(i, m) = inst.mean(best[m], m) - inst.mean(i, m);
        }
    }
    return out;
}

Instance gen_synthetic(std::size_t arms, std::size_t objectives, std::uint64_t seed) {
    if (objectives > arms) {
        throw InvalidShape("synthetic instances need objectives <= arms");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> low(0.0, 1.0);
    std::uniform_real_distribution<double> high(1.2, 2.0);
    Matrix means(arms, objectives);
    for (std::size_t i = 0; i < arms; ++i) {
        for (std::size_t m = 0; m < objectives; ++m) {
            means(i, m) = (i == m) ? high(rng) : low(rng);
        }
    }
    return Instance(std::move(means), TieMode::strict);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    T value{};
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || field.empty()) {
        throw ParseError(line_no, "cannot parse field '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

Instance parse_instance_csv(std::istream& in, double scale, TieMode mode) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!trim(line).empty()) return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError(1, "missing `K,M` header");
    const auto header = split_fields(line);
    if (header.size() != 2) throw ParseError(line_no, "header must be `K,M`");
    const auto k = parse_field<std::size_t>(header[0], line_no);
    const auto m = parse_field<std::size_t>(header[1], line_no);
    if (k < 2 || m < 1) throw ParseError(line_no, "header needs K >= 2 and M >= 1");

    Matrix means(k, m);
    for (std::size_t i = 0; i < k; ++i) {
        if (!next_line()) {
            throw ShapeMismatch("expected " + std::to_string(k) + " rows, found " +
                                std::to_string(i));
        }
        const auto fields = split_fields(line);
        if (fields.size() != m) {
            throw ShapeMismatch("line " + std::to_string(line_no) + ": expected " +
                                std::to_string(m) + " fields, found " +
                                std::to_string(fields.size()));
        }
        for (std::size_t j = 0; j < m; ++j) {
            means(i, j) = parse_field<double>(fields[j], line_no) * scale;
        }
    }
    if (next_line()) {
        throw ShapeMismatch("line " + std::to_string(line_no) + ": more than " +
                            std::to_string(k) + " rows");
    }
    return Instance(std::move(means), mode);
}

Instance load_instance_csv(const std::filesystem::path& path, double scale, TieMode mode) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open instance file " + path.string());
    return parse_instance_csv(in, scale, mode);
}

void write_instance_csv(std::ostream& out, const Instance& inst) {
    out << inst.arms() << ',' << inst.objectives() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < inst.arms(); ++i) {
        for (std::size_t m = 0; m < inst.objectives(); ++m) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, inst.mean(i, m));
            if (m) out << ',';
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

void save_instance_csv(const std::filesystem::path& path, const Instance& inst) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write instance file " + path.string());
    write_instance_csv(out, inst);
}

}  // namespace mobai
