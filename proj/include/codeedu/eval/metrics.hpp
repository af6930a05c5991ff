#pragma once

#include <cstddef>
#include <vector>

namespace codeedu::eval {

// pass[n][k][m]: whether submission k for problem n passes case m.
class OutcomeMatrix {
public:
    OutcomeMatrix(std::size_t problems, std::size_t submissions, std::size_t cases);

    std::size_t problems() const { return n_; }
    std::size_t submissions() const { return k_; }
    std::size_t cases() const { return m_; }

    bool at(std::size_t n, std::size_t k, std::size_t m) const { return cells_[index(n, k, m)] != 0; }
    void set(std::size_t n, std::size_t k, std::size_t m, bool value) { cells_[index(n, k, m)] = value; }
    // Copies one problem's K x M block.
    void set_row(std::size_t n, const std::vector<std::vector<bool>>& row);

    bool operator==(const OutcomeMatrix&) const = default;

private:
    std::size_t index(std::size_t n, std::size_t k, std::size_t m) const;

    std::size_t n_, k_, m_;
    std::vector<char> cells_;
};

// Fraction of problems where some submission passes every case.
double pass_at_k(const OutcomeMatrix& matrix);
// Fraction of all (problem, submission, case) triples that pass.
double recall_at_k(const OutcomeMatrix& matrix);
// Relative improvement in percent; undefined_baseline when pre is 0.
double tir(double pre, double post);

} // namespace codeedu::eval
