#pragma once

#include "gfnlab/tensor.hpp"

#include <map>
#include <string>
#include <vector>

namespace gfnlab {

// Checkpoint container: a single JSON header line
//   {"format_version":1,"params":[{"name":...,"shape":[...],"offset":N},...]}
// terminated by '\n', followed by a little-endian IEEE-754 f64 blob of all
// tensors concatenated row-major in header order. Offsets are byte offsets
// from the start of the blob.

struct BlobEntry {
    std::string name;
    std::vector<int> shape;
    Matrix data;
};

void save_blob(const std::string& path, const std::vector<BlobEntry>& entries);

// Throws FormatError on any corruption; never partially loads.
std::vector<BlobEntry> load_blob(const std::string& path);

// Convenience wrappers over the parameter store.
void save_checkpoint(const std::string& path, const std::vector<const Parameter*>& params);

// Assigns values into matching (name, shape) parameters; throws FormatError
// if the file does not cover exactly the given parameter set.
void load_checkpoint(const std::string& path, const std::vector<Parameter*>& params);

}  // namespace gfnlab
