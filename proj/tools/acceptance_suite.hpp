#pragma once

#include <functional>
#include <string>
#include <vector>

namespace csk::acceptance {

struct Result {
    int id = 0;
    std::string name;
    bool pass = false;
    bool expected_failure = false;  // documented as unattainable
    std::string detail;
};

constexpr int kCriteria = 12;

Result run(int id);

/// Runs the criteria in order, reporting each one as soon as it finishes.
std::vector<Result> run_all(const std::function<void(const Result&)>& report = {});

std::string format(const Result& r);

/// True when every failure is a documented expected failure.
bool acceptable(const std::vector<Result>& results);

}  // namespace csk::acceptance
