#include "ue/harness/digest.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <ostream>
#include <streambuf>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "ue/error.hpp"

namespace ue::harness {

namespace {

class Sha1 {
 public:
  Sha1() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha1(), nullptr) != 1) throw Error("SHA-1 initialization failed");
  }
  void update(const void* data, std::size_t n) {
    if (n != 0 && EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-1 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw Error("SHA-1 finalization failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

class CountingBuf : public std::streambuf {
 public:
  std::size_t count = 0;

 protected:
  std::streamsize xsputn(const char*, std::streamsize n) override {
    count += static_cast<std::size_t>(n);
    return n;
  }
  int_type overflow(int_type c) override {
    if (c != traits_type::eof()) ++count;
    return traits_type::not_eof(c);
  }
};

class HashingBuf : public std::streambuf {
 public:
  explicit HashingBuf(Sha1& sha) : sha_(sha) {}

 protected:
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    sha_.update(s, static_cast<std::size_t>(n));
    return n;
  }
  int_type overflow(int_type c) override {
    if (c != traits_type::eof()) {
      const char ch = traits_type::to_char_type(c);
      sha_.update(&ch, 1);
    }
    return traits_type::not_eof(c);
  }

 private:
  Sha1& sha_;
};

void hash_header(Sha1& sha, std::size_t size) {
  const std::string header = fmt::format("blob {}", size);
  sha.update(header.data(), header.size() + 1);  // include the NUL
}

}  // namespace

std::string git_blob_sha1(std::string_view bytes) {
  Sha1 sha;
  hash_header(sha, bytes.size());
  sha.update(bytes.data(), bytes.size());
  return sha.hex();
}

std::string git_blob_sha1_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  const auto size = std::filesystem::file_size(path);
  Sha1 sha;
  hash_header(sha, static_cast<std::size_t>(size));
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    sha.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return sha.hex();
}

std::string git_blob_sha1_stream(const std::function<void(std::ostream&)>& writer) {
  CountingBuf counter;
  {
    std::ostream out(&counter);
    writer(out);
  }
  Sha1 sha;
  hash_header(sha, counter.count);
  HashingBuf hashing(sha);
  {
    std::ostream out(&hashing);
    writer(out);
  }
  return sha.hex();
}

}  // namespace ue::harness
