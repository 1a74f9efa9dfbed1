#pragma once

#include <string>

#include "safel2o/types.hpp"

namespace safel2o {

// Git-style blob hash: SHA-1 of "blob <size>\0" + bytes, hex-encoded.
std::string git_blob_hash(const std::string& bytes);

// Blob hash of a file's contents.
std::string git_blob_hash_file(const std::string& path);

// Short tag identifying a dictionary: blob hash of its row-major doubles.
std::string dict_fingerprint(const Matrix& a);

}  // namespace safel2o
