#ifndef NAMLITE_TESTS_SYNTHETIC_HPP
#define NAMLITE_TESTS_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "namlite/ensemble.hpp"
#include "namlite/table.hpp"

namespace namlite::testing {

struct Synthetic {
  Table features;
  Labels labels;
};

// Ground-truth components of the additive regression generator.
double truth_x1(double x);  // sin(2 pi x)
double truth_x2(double x);  // 1{x > 0.5}
double truth_x3(double x);  // 0.5 x
double truth_x4(double x);  // (2x - 1)^2
double truth_x5(double x);  // -0.6 x

// y = sin(2 pi x1) + 1{x2 > 0.5} + 0.5 x3 + N(0, 0.1^2), x ~ U(0, 1).
// `informative` of 3 or 5 selects how many truth terms enter (x4, x5 add
// (2 x4 - 1)^2 - 0.6 x5); `noise` appends uninformative columns after them.
Synthetic additive_regression(std::size_t n, std::uint64_t seed, int informative = 3, int noise = 0);

// y = 1{x1 > 0 xor x2 > 0} flipped with probability 0.05, x ~ U(-1, 1), plus
// `noise` uninformative U(-1, 1) columns.
Synthetic xor_classification(std::size_t n, std::uint64_t seed, int noise = 2);

// Logit increasing in x1, decreasing in x2, free in x3.
Synthetic monotone_classification(std::size_t n, std::uint64_t seed);

// Classification where the missingness of x1 (about 30%) depends on the
// label. x2 and x3 drive the label without missing values; n1..n4 are noise
// with 30% missingness at random.
Synthetic missing_classification(std::size_t n, std::uint64_t seed);

// Event time T | x ~ Exponential(rate(x)) with rate = 0.5 exp(1.2 x1 - 0.8 x2),
// independent Exponential(0.25) censoring.
Synthetic exponential_survival(std::size_t n, std::uint64_t seed);
double exponential_survival_rate(double x1, double x2);

// y = f(x) + N(0, sd^2) for a wiggly f on U(0, 1).
Synthetic noisy_curve(std::size_t n, std::uint64_t seed, double sd);

// y = x + N(0, sd^2), x ~ U(0, 1).
Synthetic noisy_line(std::size_t n, std::uint64_t seed, double sd);

// Rows of `table` written as CSV with the label columns appended.
std::string to_csv(const Synthetic& data);

}  // namespace namlite::testing

#endif  // NAMLITE_TESTS_SYNTHETIC_HPP
