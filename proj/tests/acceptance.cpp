#include <chrono>
#include <cstdio>

#include "acceptance_suite.hpp"

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = csk::acceptance::run_all([](const csk::acceptance::Result& r) {
        std::printf("%s\n", csk::acceptance::format(r).c_str());
        std::fflush(stdout);
    });
    int passed = 0;
    for (const auto& r : results) passed += r.pass;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d/%d criteria pass (%.1f s)\n", passed, csk::acceptance::kCriteria, s);
    return csk::acceptance::acceptable(results) ? 0 : 1;
}
