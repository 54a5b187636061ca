#include <doctest.h>

#include "properties.hpp"

TEST_SUITE("properties") {
  TEST_CASE("seeded property corpus") {
    for (const auto& p : testing::props::kAll) {
      SUBCASE(p.name) {
        const auto msg = testing::props::run_corpus(p.run);
        INFO(msg);
        CHECK(msg.empty());
      }
    }
  }
}
