#pragma once

#include "gfnlab/train.hpp"

#include <string>
#include <vector>

namespace gfnlab {

struct ReproduceOptions {
    int jobs = 1;
    std::string out_root;  // default: runs/<matrix>
    bool quiet = false;
};

std::vector<std::string> reproduce_matrix_names();

// Runs the named experiment matrix (all algorithms x seeds {0,1,2}) and
// writes one run directory per cell plus summary.csv (and a pivoted
// table.csv for the two table matrices).
void reproduce(const std::string& matrix_name, const ReproduceOptions& opts);

// Exposed for the acceptance suite: the run grid of a matrix.
struct MatrixRun {
    std::string tag;  // environment variant label
    RunConfig cfg;
};
std::vector<MatrixRun> reproduce_runs(const std::string& matrix_name,
                                      const std::string& out_root);

// Thread-pooled execution helper shared with the acceptance suite.
std::vector<TrainResult> run_matrix(const std::vector<MatrixRun>& runs, int jobs, bool quiet);

double median3(double a, double b, double c);

}  // namespace gfnlab
