#include "safel2o/hash.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "safel2o/errors.hpp"

namespace safel2o {

namespace {

std::string sha1_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha1(), nullptr))
    throw NumericError("sha1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string git_blob_hash(const std::string& bytes) {
  std::string framed = "blob " + std::to_string(bytes.size());
  framed += '\0';
  framed += bytes;
  return sha1_hex(framed);
}

std::string git_blob_hash_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for hashing");
  std::ostringstream ss;
  ss << f.rdbuf();
  return git_blob_hash(ss.str());
}

std::string dict_fingerprint(const Matrix& a) {
  std::string bytes;
  bytes.resize(static_cast<std::size_t>(a.size()) * sizeof(double));
  // Row-major order, matching the on-disk dataset layout.
  std::size_t off = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      double v = a(i, j);
      std::memcpy(&bytes[off], &v, sizeof v);
      off += sizeof v;
    }
  return git_blob_hash(bytes).substr(0, 16);
}

}  // namespace safel2o
