#include "conman/crypto.hpp"

#include <algorithm>
#include <cctype>

#include <openssl/sha.h>

namespace conman::crypto {
namespace {

constexpr std::string_view kBase58Alphabet =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
constexpr std::string_view kBech32Charset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";
constexpr std::uint32_t kBech32Const = 1;
constexpr std::uint32_t kBech32mConst = 0x2bc830a3;

// Keccak-f[1600]
constexpr std::array<std::uint64_t, 24> kRoundConstants{
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808AULL, 0x8000000080008000ULL,
    0x000000000000808BULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008AULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000AULL,
    0x000000008000808BULL, 0x800000000000008BULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800AULL, 0x800000008000000AULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};
constexpr std::array<int, 24> kRho{1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                   27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPi{10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                  15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

constexpr std::uint64_t rotl(std::uint64_t x, int n) { return (x << n) | (x >> (64 - n)); }

void keccak_f(std::array<std::uint64_t, 25>& a) {
  for (std::uint64_t rc : kRoundConstants) {
    std::array<std::uint64_t, 5> c{};
    for (int x = 0; x < 5; ++x) c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    for (int x = 0; x < 5; ++x) {
      const std::uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
      for (int y = 0; y < 25; y += 5) a[y + x] ^= d;
    }
    std::uint64_t t = a[1];
    for (int i = 0; i < 24; ++i) {
      const int j = kPi[i];
      const std::uint64_t tmp = a[j];
      a[j] = rotl(t, kRho[i]);
      t = tmp;
    }
    for (int y = 0; y < 25; y += 5) {
      std::array<std::uint64_t, 5> row{};
      for (int x = 0; x < 5; ++x) row[x] = a[y + x];
      for (int x = 0; x < 5; ++x) a[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
    }
    a[0] ^= rc;
  }
}

std::uint32_t bech32_polymod(std::span<const std::uint8_t> values) {
  constexpr std::array<std::uint32_t, 5> gen{0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd,
                                             0x2a1462b3};
  std::uint32_t chk = 1;
  for (std::uint8_t v : values) {
    const std::uint32_t top = chk >> 25;
    chk = ((chk & 0x1ffffff) << 5) ^ v;
    for (int i = 0; i < 5; ++i) {
      if ((top >> i) & 1) chk ^= gen[i];
    }
  }
  return chk;
}

Bytes hrp_expand(std::string_view hrp) {
  Bytes out;
  out.reserve(hrp.size() * 2 + 1);
  for (char c : hrp) out.push_back(static_cast<std::uint8_t>(static_cast<unsigned char>(c) >> 5));
  out.push_back(0);
  for (char c : hrp) out.push_back(static_cast<std::uint8_t>(static_cast<unsigned char>(c) & 31));
  return out;
}

bool convert_bits(std::span<const std::uint8_t> in, int from, int to, bool pad, Bytes& out) {
  std::uint32_t acc = 0;
  int bits = 0;
  const std::uint32_t maxv = (1u << to) - 1;
  for (std::uint8_t v : in) {
    if ((v >> from) != 0) return false;
    acc = (acc << from) | v;
    bits += from;
    while (bits >= to) {
      bits -= to;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & maxv));
    }
  }
  if (pad) {
    if (bits) out.push_back(static_cast<std::uint8_t>((acc << (to - bits)) & maxv));
  } else if (bits >= from || ((acc << (to - bits)) & maxv)) {
    return false;
  }
  return true;
}

bool all_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

Digest32 sha256(std::span<const std::uint8_t> data) {
  Digest32 out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest32 sha256(std::string_view data) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Digest32 double_sha256(std::span<const std::uint8_t> data) {
  const auto first = sha256(data);
  return sha256(std::span<const std::uint8_t>(first));
}

Digest32 keccak256(std::span<const std::uint8_t> data) {
  constexpr std::size_t rate = 136;
  std::array<std::uint64_t, 25> state{};
  auto absorb_block = [&state](const std::uint8_t* block) {
    for (std::size_t i = 0; i < rate / 8; ++i) {
      std::uint64_t lane = 0;
      for (int b = 0; b < 8; ++b) lane |= static_cast<std::uint64_t>(block[i * 8 + b]) << (8 * b);
      state[i] ^= lane;
    }
    keccak_f(state);
  };
  std::size_t offset = 0;
  for (; offset + rate <= data.size(); offset += rate) absorb_block(data.data() + offset);
  std::array<std::uint8_t, rate> last{};
  const std::size_t rem = data.size() - offset;
  std::copy_n(data.data() + offset, rem, last.begin());
  last[rem] ^= 0x01;
  last[rate - 1] ^= 0x80;
  absorb_block(last.data());
  Digest32 out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(state[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

Digest32 keccak256(std::string_view data) {
  return keccak256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

std::optional<Bytes> from_hex(std::string_view hex) {
  if (hex.size() % 2 || !all_hex(hex)) return std::nullopt;
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    return static_cast<std::uint8_t>(std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

std::string base58_encode(std::span<const std::uint8_t> data) {
  std::size_t zeros = 0;
  while (zeros < data.size() && data[zeros] == 0) ++zeros;
  // Repeated division of the big-endian number by 58.
  Bytes digits;
  for (std::size_t i = zeros; i < data.size(); ++i) {
    std::uint32_t carry = data[i];
    for (auto& d : digits) {
      carry += static_cast<std::uint32_t>(d) << 8;
      d = static_cast<std::uint8_t>(carry % 58);
      carry /= 58;
    }
    while (carry) {
      digits.push_back(static_cast<std::uint8_t>(carry % 58));
      carry /= 58;
    }
  }
  std::string out(zeros, '1');
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kBase58Alphabet[*it]);
  return out;
}

std::optional<Bytes> base58_decode(std::string_view s) {
  std::size_t zeros = 0;
  while (zeros < s.size() && s[zeros] == '1') ++zeros;
  Bytes bytes;  // little-endian accumulator
  for (std::size_t i = zeros; i < s.size(); ++i) {
    const auto pos = kBase58Alphabet.find(s[i]);
    if (pos == std::string_view::npos) return std::nullopt;
    std::uint32_t carry = static_cast<std::uint32_t>(pos);
    for (auto& b : bytes) {
      carry += static_cast<std::uint32_t>(b) * 58;
      b = static_cast<std::uint8_t>(carry & 0xff);
      carry >>= 8;
    }
    while (carry) {
      bytes.push_back(static_cast<std::uint8_t>(carry & 0xff));
      carry >>= 8;
    }
  }
  Bytes out(zeros, 0);
  out.insert(out.end(), bytes.rbegin(), bytes.rend());
  return out;
}

std::string base58check_encode(std::span<const std::uint8_t> payload) {
  Bytes buf(payload.begin(), payload.end());
  const auto check = double_sha256(payload);
  buf.insert(buf.end(), check.begin(), check.begin() + 4);
  return base58_encode(buf);
}

std::optional<Bytes> base58check_decode(std::string_view s) {
  auto raw = base58_decode(s);
  if (!raw || raw->size() < 5) return std::nullopt;
  const std::size_t body = raw->size() - 4;
  const auto check = double_sha256(std::span<const std::uint8_t>(raw->data(), body));
  if (!std::equal(check.begin(), check.begin() + 4, raw->begin() + static_cast<long>(body))) {
    return std::nullopt;
  }
  raw->resize(body);
  return raw;
}

std::string segwit_encode(std::string_view hrp, int witness_version,
                          std::span<const std::uint8_t> program) {
  Bytes data{static_cast<std::uint8_t>(witness_version)};
  convert_bits(program, 8, 5, true, data);
  const std::uint32_t constant = witness_version == 0 ? kBech32Const : kBech32mConst;
  Bytes values = hrp_expand(hrp);
  values.insert(values.end(), data.begin(), data.end());
  values.insert(values.end(), 6, 0);
  const std::uint32_t mod = bech32_polymod(values) ^ constant;
  std::string out(hrp);
  out.push_back('1');
  for (std::uint8_t d : data) out.push_back(kBech32Charset[d]);
  for (int i = 0; i < 6; ++i) out.push_back(kBech32Charset[(mod >> (5 * (5 - i))) & 31]);
  return out;
}

std::optional<SegwitAddress> segwit_decode(std::string_view expected_hrp, std::string_view addr) {
  if (addr.size() < 8 || addr.size() > 90) return std::nullopt;
  bool lower = false, upper = false;
  for (char c : addr) {
    if (c < 33 || c > 126) return std::nullopt;
    if (std::islower(static_cast<unsigned char>(c))) lower = true;
    if (std::isupper(static_cast<unsigned char>(c))) upper = true;
  }
  if (lower && upper) return std::nullopt;
  std::string s(addr);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto sep = s.rfind('1');
  if (sep == std::string::npos || sep == 0 || sep + 7 > s.size()) return std::nullopt;
  const std::string hrp = s.substr(0, sep);
  if (hrp != expected_hrp) return std::nullopt;
  Bytes data;
  for (std::size_t i = sep + 1; i < s.size(); ++i) {
    const auto pos = kBech32Charset.find(s[i]);
    if (pos == std::string_view::npos) return std::nullopt;
    data.push_back(static_cast<std::uint8_t>(pos));
  }
  Bytes values = hrp_expand(hrp);
  values.insert(values.end(), data.begin(), data.end());
  const std::uint32_t residue = bech32_polymod(values);
  if (residue != kBech32Const && residue != kBech32mConst) return std::nullopt;
  const Bech32Variant variant =
      residue == kBech32Const ? Bech32Variant::Bech32 : Bech32Variant::Bech32m;
  data.resize(data.size() - 6);
  if (data.empty()) return std::nullopt;
  SegwitAddress out;
  out.hrp = hrp;
  out.witness_version = data[0];
  if (out.witness_version > 16) return std::nullopt;
  if (!convert_bits(std::span(data).subspan(1), 5, 8, false, out.program)) return std::nullopt;
  if (out.program.size() < 2 || out.program.size() > 40) return std::nullopt;
  if (out.witness_version == 0) {
    if (variant != Bech32Variant::Bech32) return std::nullopt;
    if (out.program.size() != 20 && out.program.size() != 32) return std::nullopt;
  } else if (variant != Bech32Variant::Bech32m) {
    return std::nullopt;
  }
  return out;
}

std::string eip55_checksum(std::span<const std::uint8_t> address20) {
  const std::string lower = to_hex(address20);
  const auto hash = keccak256(lower);
  std::string out = "0x";
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const std::uint8_t nib = (i % 2 == 0) ? (hash[i / 2] >> 4) : (hash[i / 2] & 15);
    const char c = lower[i];
    out.push_back(nib >= 8 && c >= 'a' ? static_cast<char>(c - 'a' + 'A') : c);
  }
  return out;
}

bool eth_address_valid(std::string_view addr) {
  if (addr.size() != 42 || addr[0] != '0' || (addr[1] != 'x' && addr[1] != 'X')) return false;
  const auto hex = addr.substr(2);
  if (!all_hex(hex)) return false;
  const bool has_lower = std::any_of(hex.begin(), hex.end(), [](char c) { return c >= 'a' && c <= 'f'; });
  const bool has_upper = std::any_of(hex.begin(), hex.end(), [](char c) { return c >= 'A' && c <= 'F'; });
  if (!(has_lower && has_upper)) return true;
  const auto bytes = from_hex(hex);
  return eip55_checksum(*bytes).substr(2) == hex;
}

bool btc_base58_address_valid(std::string_view addr) {
  if (addr.empty() || (addr[0] != '1' && addr[0] != '3')) return false;
  const auto payload = base58check_decode(addr);
  if (!payload || payload->size() != 21) return false;
  const std::uint8_t version = (*payload)[0];
  return (addr[0] == '1' && version == 0x00) || (addr[0] == '3' && version == 0x05);
}

bool btc_bech32_address_valid(std::string_view addr) {
  return segwit_decode("bc", addr).has_value();
}

}  // namespace conman::crypto
