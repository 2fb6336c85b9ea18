// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure.

#include "mtn/acceptance.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
    std::uint64_t seed = 7;
    std::string bundle_dir = ".";
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--seed")) seed = std::stoull(argv[i + 1]);
        if (!std::strcmp(argv[i], "--bundle-dir")) bundle_dir = argv[i + 1];
    }
    const auto results = mtn::acceptance::run_all(seed, bundle_dir, std::cout);
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    std::cout << (all ? "ACCEPTANCE: all criteria pass" : "ACCEPTANCE: FAILURES PRESENT")
              << std::endl;
    return all ? 0 : 1;
}
