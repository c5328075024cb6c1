#pragma once

// Experiment configuration files: a flat key-value document with one
// section level and a versioned schema field. Unknown keys and schema
// mismatches are hard errors.

#include <string>

#include "seqreg/experiments.hpp"

namespace seqreg {

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace seqreg
