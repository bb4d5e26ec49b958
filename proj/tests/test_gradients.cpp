#include <gtest/gtest.h>

#include <random>

#include "gradcheck.hpp"

namespace {

constexpr int kShapes = 25;

template <class Case>
void run_cases(std::uint64_t seed, int n, Case&& one) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i) {
    const gradcheck::Report r = one(rng);
    EXPECT_TRUE(r.ok()) << "case " << i << ": relative error " << r.max_rel << " at " << r.worst;
  }
}

TEST(Gradients, DenseLayer) { run_cases(1, kShapes, gradcheck::dense_case); }
TEST(Gradients, DenseStackWithSparseInput) { run_cases(2, kShapes, gradcheck::dense_stack_case); }
TEST(Gradients, LstmStep) { run_cases(3, kShapes, gradcheck::lstm_case); }
TEST(Gradients, LstmSequence) { run_cases(4, kShapes, gradcheck::lstm_sequence_case); }
TEST(Gradients, SeqModel) {
  run_cases(5, kShapes, [](std::mt19937_64& rng) { return gradcheck::seq_case(rng, 6); });
}
TEST(Gradients, Vae) {
  run_cases(6, kShapes, [](std::mt19937_64& rng) { return gradcheck::vae_case(rng, 6); });
}
TEST(Gradients, LifeHead) { run_cases(7, kShapes, gradcheck::life_case); }

}  // namespace
