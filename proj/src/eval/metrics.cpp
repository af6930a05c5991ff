#include "codeedu/eval/metrics.hpp"

#include "codeedu/error.hpp"

#include <cmath>

namespace codeedu::eval {

OutcomeMatrix::OutcomeMatrix(std::size_t problems, std::size_t submissions, std::size_t cases)
    : n_(problems), k_(submissions), m_(cases) {
    require(n_ > 0 && k_ > 0 && m_ > 0, "outcome matrix dimensions must be positive");
    cells_.assign(n_ * k_ * m_, 0);
}

std::size_t OutcomeMatrix::index(std::size_t n, std::size_t k, std::size_t m) const {
    require(n < n_ && k < k_ && m < m_, "outcome matrix index out of range");
    return (n * k_ + k) * m_ + m;
}

void OutcomeMatrix::set_row(std::size_t n, const std::vector<std::vector<bool>>& row) {
    require(row.size() == k_, "row must hold exactly K submissions");
    for (std::size_t k = 0; k < k_; ++k) {
        require(row[k].size() == m_, "submission must hold exactly M case results");
        for (std::size_t m = 0; m < m_; ++m) set(n, k, m, row[k][m]);
    }
}

double pass_at_k(const OutcomeMatrix& matrix) {
    std::size_t solved = 0;
    for (std::size_t n = 0; n < matrix.problems(); ++n) {
        bool any = false;
        for (std::size_t k = 0; k < matrix.submissions() && !any; ++k) {
            bool all = true;
            for (std::size_t m = 0; m < matrix.cases() && all; ++m) all = matrix.at(n, k, m);
            any = all;
        }
        solved += any;
    }
    return static_cast<double>(solved) / static_cast<double>(matrix.problems());
}

double recall_at_k(const OutcomeMatrix& matrix) {
    std::size_t passed = 0;
    for (std::size_t n = 0; n < matrix.problems(); ++n)
        for (std::size_t k = 0; k < matrix.submissions(); ++k)
            for (std::size_t m = 0; m < matrix.cases(); ++m) passed += matrix.at(n, k, m);
    return static_cast<double>(passed) /
           static_cast<double>(matrix.problems() * matrix.submissions() * matrix.cases());
}

double tir(double pre, double post) {
    require(std::isfinite(pre) && std::isfinite(post), "scores must be finite");
    if (pre == 0.0)
        fail(ErrorKind::undefined_baseline, "improvement rate is undefined for a zero pre-test score",
             {{"pre", pre}, {"post", post}});
    require(pre > 0.0, "pre-test score must be positive");
    // Rounded to 1e-9 percent so that e.g. 0.4 -> 0.6 reads as exactly 50.
    return std::round((post - pre) / pre * 100.0 * 1e9) / 1e9;
}

} // namespace codeedu::eval
