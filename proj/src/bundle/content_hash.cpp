#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "topiclens/bundle.hpp"

namespace topiclens {
namespace fs = std::filesystem;

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("SHA-256 initialisation failed");
  }

  void update(std::string_view data) {
    if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1) throw std::runtime_error("SHA-256 update failed");
  }

  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len) != 1) throw std::runtime_error("SHA-256 final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[digest[i] >> 4]);
      out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

void hash_file(Sha256& sha, std::string_view role, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot open " + path.filename().string() + " for hashing");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  sha.update(role);
  sha.update(std::string_view("\0", 1));
  sha.update(std::to_string(content.size()));
  sha.update(std::string_view("\0", 1));
  sha.update(content);
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 sha;
  sha.update(data);
  return sha.hex();
}

std::string bundle_hash(const fs::path& dir) {
  const BundleFiles files = BundleFiles::resolve(dir);
  Sha256 sha;
  hash_file(sha, "manifest", dir / "manifest.json");
  hash_file(sha, "vocabulary", files.vocabulary);
  hash_file(sha, "topic_term", files.topic_term);
  hash_file(sha, "doc_topic", files.doc_topic);
  hash_file(sha, "documents", files.documents);
  if (files.doc_term) hash_file(sha, "doc_term", *files.doc_term);
  if (files.doc_embeddings) hash_file(sha, "doc_embeddings", *files.doc_embeddings);
  if (files.groups) hash_file(sha, "groups", *files.groups);
  return sha.hex();
}

}  // namespace topiclens
