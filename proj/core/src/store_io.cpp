#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "exactbn/errors.hpp"
#include "exactbn/local_scores.hpp"

namespace exactbn {

static_assert(std::endian::native == std::endian::little, "cache files are written in host order");

namespace {

constexpr std::array<char, 4> kStoreMagic{'B', 'N', 'L', 'S'};
constexpr std::array<char, 4> kShardMagic{'B', 'N', 'L', 'P'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw CacheError("cannot create " + path.string());
  }
  template <class T>
  void put(const T& value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  void bytes(std::span<const std::byte> data) {
    out_.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  }
  void finish() {
    out_.flush();
    if (!out_) throw CacheError("write failed for " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw CacheError("cannot open " + path.string());
  }
  template <class T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw CacheError(path_.string() + ": truncated file");
    return value;
  }
  void bytes(std::span<std::byte> data) {
    in_.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!in_) throw CacheError(path_.string() + ": truncated payload");
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw CacheError(path_.string() + ": trailing bytes");
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

struct Header {
  ScoreSpec spec;
  Precision precision = Precision::kSingle;
  std::vector<Arity> arities;
};

void write_header(Writer& w, const std::array<char, 4>& magic, const Header& h) {
  w.put(magic);
  w.put(kFormatVersion);
  w.put(static_cast<std::uint32_t>(h.arities.size()));
  w.put(static_cast<std::uint8_t>(h.spec.kind));
  w.put(static_cast<std::uint8_t>(h.precision));
  w.put(h.spec.ess);
  for (Arity a : h.arities) w.put(static_cast<std::uint32_t>(a));
}

Header read_header(Reader& r, const std::array<char, 4>& magic) {
  const auto got = r.get<std::array<char, 4>>();
  if (got != magic) {
    throw CacheError(r.path().string() + ": bad magic (expected " + std::string(magic.begin(), magic.end()) + ")");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw CacheError(r.path().string() + ": unsupported format version " + std::to_string(version));
  }
  const auto n = r.get<std::uint32_t>();
  if (n < 1 || n > static_cast<std::uint32_t>(kMaxVars)) throw CacheError(r.path().string() + ": bad variable count");
  Header h;
  const auto kind = r.get<std::uint8_t>();
  if (kind > 2) throw CacheError(r.path().string() + ": unknown score kind");
  h.spec.kind = static_cast<ScoreKind>(kind);
  const auto precision = r.get<std::uint8_t>();
  if (precision != 4 && precision != 8) throw CacheError(r.path().string() + ": bad precision field");
  h.precision = static_cast<Precision>(precision);
  h.spec.ess = r.get<double>();
  try {
    h.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw CacheError(r.path().string() + ": " + e.what());
  }
  h.arities.resize(n);
  for (auto& a : h.arities) {
    a = r.get<std::uint32_t>();
    if (a < 1 || a > kMaxArity) throw CacheError(r.path().string() + ": bad arity");
  }
  return h;
}

}  // namespace

void save_store(const std::filesystem::path& path, const LocalScoreStore& store) {
  Writer w(path);
  write_header(w, kStoreMagic, {store.spec(), store.precision(), store.arities()});
  w.bytes(store.buffer().raw());
  w.finish();
}

LocalScoreStore load_store(const std::filesystem::path& path) {
  Reader r(path);
  const Header h = read_header(r, kStoreMagic);
  LocalScoreStore store(h.spec, h.precision, h.arities);
  r.bytes(store.buffer().raw());
  r.expect_end();
  return store;
}

void save_shard(const std::filesystem::path& path, const ShardResult& shard) {
  Writer w(path);
  write_header(w, kShardMagic, {shard.spec, shard.precision, shard.arities});
  w.put(shard.index);
  w.put(shard.count);
  w.put(shard.depth);
  w.put(static_cast<std::uint64_t>(shard.records.size()));
  const bool single = shard.precision == Precision::kSingle;
  for (const auto& rec : shard.records) {
    w.put(rec.var);
    w.put(rec.set);
    if (single) {
      w.put(static_cast<float>(rec.score));
    } else {
      w.put(rec.score);
    }
  }
  w.finish();
}

ShardResult load_shard(const std::filesystem::path& path) {
  Reader r(path);
  const Header h = read_header(r, kShardMagic);
  ShardResult shard;
  shard.spec = h.spec;
  shard.precision = h.precision;
  shard.arities = h.arities;
  shard.index = r.get<std::uint32_t>();
  shard.count = r.get<std::uint32_t>();
  shard.depth = r.get<std::uint32_t>();
  const auto records = r.get<std::uint64_t>();
  const std::uint64_t max_records = h.arities.size() << (h.arities.size() - 1);
  if (records > max_records) throw CacheError(path.string() + ": record count exceeds table size");
  shard.records.reserve(records);
  const bool single = shard.precision == Precision::kSingle;
  for (std::uint64_t i = 0; i < records; ++i) {
    ShardResult::Record rec{};
    rec.var = r.get<std::uint32_t>();
    rec.set = r.get<std::uint32_t>();
    rec.score = single ? static_cast<double>(r.get<float>()) : r.get<double>();
    shard.records.push_back(rec);
  }
  r.expect_end();
  return shard;
}

}  // namespace exactbn
