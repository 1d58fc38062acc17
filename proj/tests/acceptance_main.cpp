// Runs every verification criterion and prints one pass/fail line each.

#include <cstdio>
#include <cstring>

#include "hkgf/acceptance.hpp"

int main(int argc, char** argv) {
    std::string filter;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--filter") == 0) filter = argv[i + 1];

    auto results = hkgf::accept::run_all(filter);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        std::printf("%s  %-22s %s  [%.1fs]\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str(), r.seconds);
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %s\n", results.size(), all ? "all passed" : "FAILURES present");
    return all ? 0 : 1;
}
