#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "test_support.hpp"

namespace bellext::test {
std::uint64_t& seed() {
  static std::uint64_t value = kDefaultSeed;
  return value;
}
}  // namespace bellext::test

int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      bellext::test::seed() = std::strtoull(argv[i + 1], nullptr, 10);
      ++i;
    } else if (std::strncmp(argv[i], "--seed=", 7) == 0) {
      bellext::test::seed() = std::strtoull(argv[i] + 7, nullptr, 10);
    }
  }
  std::cout << "property seed: " << bellext::test::seed() << '\n';
  return RUN_ALL_TESTS();
}
