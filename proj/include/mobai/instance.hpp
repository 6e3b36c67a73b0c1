#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <vector>

#include "mobai/matrix.hpp"

namespace mobai {

// How argmax ties between arms are handled when resolving best arms.
//   strict        - a tie on any objective is an error (truth instances)
//   lowest_index  - the smallest arm index wins (empirical instances)
enum class TieMode { strict, lowest_index };

// Per-objective best arm, 0-based arm indices.
struct BestArms {
    std::vector<std::size_t> arms;

    std::size_t operator[](std::size_t m) const { return arms[m]; }
    std::size_t size() const noexcept { return arms.size(); }
    friend bool operator==(const BestArms&, const BestArms&) = default;
};

// Sub-optimality gaps, gaps(i, m) = means(best_m, m) - means(i, m).
struct GapMatrix {
    Matrix gaps;

    double operator()(std::size_t i, std::size_t m) const { return gaps(i, m); }
};

// K x M matrix of arm means. The tie mode is fixed at construction: strict
// instances are validated to have a unique best arm per objective.
class Instance {
public:
    Instance(Matrix means, TieMode mode = TieMode::strict);
    Instance(const std::vector<std::vector<double>>& rows, TieMode mode = TieMode::strict)
        : Instance(Matrix::from_rows(rows), mode) {}
    // Literal rows, e.g. Instance({{1.0}, {0.0}}).
    Instance(std::initializer_list<std::initializer_list<double>> rows,
             TieMode mode = TieMode::strict)
        : Instance(std::vector<std::vector<double>>(rows.begin(), rows.end()), mode) {}

    std::size_t arms() const noexcept { return means_.rows(); }
    std::size_t objectives() const noexcept { return means_.cols(); }
    double mean(std::size_t arm, std::size_t objective) const { return means_(arm, objective); }
    const Matrix& means() const noexcept { return means_; }
    TieMode tie_mode() const noexcept { return mode_; }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    Matrix means_;
    TieMode mode_;
};

BestArms best_arms(const Instance& inst, TieMode mode);
inline BestArms best_arms(const Instance& inst) { return best_arms(inst, inst.tie_mode()); }

// Uses the instance's own tie mode to locate the best arms.
GapMatrix gaps(const Instance& inst);

// means(i, m) ~ U[0, 1] for i != m and means(m, m) ~ U[1.2, 2], drawn row-major
// from std::mt19937_64 seeded with `seed`. Requires objectives <= arms.
Instance gen_synthetic(std::size_t arms, std::size_t objectives, std::uint64_t seed);

// Instance CSV: header `K,M` then K rows of M comma-separated decimals.
Instance load_instance_csv(const std::filesystem::path& path, double scale = 1.0,
                           TieMode mode = TieMode::strict);
Instance parse_instance_csv(std::istream& in, double scale = 1.0,
                            TieMode mode = TieMode::strict);
void write_instance_csv(std::ostream& out, const Instance& inst);
void save_instance_csv(const std::filesystem::path& path, const Instance& inst);

}  // namespace mobai
