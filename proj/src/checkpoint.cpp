#include "pafnet/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "pafnet/errors.hpp"

namespace pafnet {

namespace {

constexpr char kMagic[8] = {'P', 'A', 'F', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::ofstream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

std::uint64_t get_u64(std::ifstream& is) {
  char buf[8];
  is.read(buf, 8);
  if (!is) throw IoError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const ParamStore& store, const NetworkSpec& spec,
                     const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(kMagic, 8);
  put_u64(os, spec.hash());
  put_u64(os, store.values.size());
  put_u64(os, store.omega_offset);
  put_u64(os, store.omega_count);
  put_u64(os, store.lambda_offset);
  put_u64(os, store.lambda_count);
  for (double v : store.values) put_u64(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw IoError("write failed for " + path);
}

ParamStore load_checkpoint(const NetworkSpec& spec, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw IoError(path + " is not a checkpoint file");
  const std::uint64_t hash = get_u64(is);
  if (hash != spec.hash())
    throw SpecHashMismatch("checkpoint " + path +
                           " was written for a different network spec");
  const std::uint64_t n = get_u64(is);
  if (n != count_params(spec))
    throw SpecHashMismatch("checkpoint parameter count mismatch");

  // names and offsets are reconstructed from the spec (seed irrelevant here)
  ParamStore store = init_params(spec, 0);
  const std::uint64_t omega_offset = get_u64(is);
  const std::uint64_t omega_count = get_u64(is);
  const std::uint64_t lambda_offset = get_u64(is);
  const std::uint64_t lambda_count = get_u64(is);
  if (omega_offset != store.omega_offset || omega_count != store.omega_count ||
      lambda_offset != store.lambda_offset || lambda_count != store.lambda_count)
    throw SpecHashMismatch("checkpoint segment layout mismatch");
  for (std::uint64_t i = 0; i < n; ++i)
    store.values[i] = std::bit_cast<double>(get_u64(is));
  // must consume the file exactly
  is.peek();
  if (!is.eof()) throw IoError(path + " has trailing bytes");
  return store;
}

}  // namespace pafnet
