#pragma once

#include <string>
#include <vector>

#include "contagion/weights.hpp"

namespace contagion::cli {

enum ExitCode : int { kOk = 0, kIoFailure = 2, kInvalid = 3 };

/// Entry point of the `contagion_lab` tool. Returns the process exit code.
int run(int argc, const char* const* argv);

/// Same as run(), with argv[0] supplied.
int run(const std::vector<std::string>& args);

/// Weighted ensemble as written by `estimate`.
struct EnsembleDir {
    BankPopulation population;
    std::vector<WeightedNetwork> members;
    double increment = kDefaultIncrement;
};

/// Reads manifest.json, population.csv and member files from `dir`.
/// Throws IoError if the manifest or a member is missing.
EnsembleDir load_ensemble_dir(const std::string& dir);

}  // namespace contagion::cli
