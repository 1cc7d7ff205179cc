#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Checksum primitives for payment-address recognition. Nothing here signs,
// derives keys or touches real funds.
namespace conman::crypto {

using Bytes = std::vector<std::uint8_t>;
using Digest32 = std::array<std::uint8_t, 32>;

Digest32 sha256(std::span<const std::uint8_t> data);
Digest32 sha256(std::string_view data);
Digest32 double_sha256(std::span<const std::uint8_t> data);

// Original Keccak-256 (0x01 padding), as used by Ethereum; not SHA3-256.
Digest32 keccak256(std::span<const std::uint8_t> data);
Digest32 keccak256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> data);
std::optional<Bytes> from_hex(std::string_view hex);

std::string base58_encode(std::span<const std::uint8_t> data);
std::optional<Bytes> base58_decode(std::string_view s);

// payload = version byte + body; appends the 4-byte double-SHA256 checksum.
std::string base58check_encode(std::span<const std::uint8_t> payload);
// Returns the payload (without checksum) when the checksum verifies.
std::optional<Bytes> base58check_decode(std::string_view s);

enum class Bech32Variant { Bech32, Bech32m };

struct SegwitAddress {
  std::string hrp;
  int witness_version = 0;
  Bytes program;
};

std::string segwit_encode(std::string_view hrp, int witness_version,
                          std::span<const std::uint8_t> program);
// Full BIP-173/BIP-350 validation: charset, single case, checksum variant per
// witness version, program length rules.
std::optional<SegwitAddress> segwit_decode(std::string_view expected_hrp, std::string_view addr);

// "0x" + 40 hex characters with EIP-55 mixed-case checksum.
std::string eip55_checksum(std::span<const std::uint8_t> address20);
// All-lower or all-upper hex is accepted unchecked; mixed case must match the
// EIP-55 capitalisation exactly.
bool eth_address_valid(std::string_view addr);

// Mainnet P2PKH ('1') or P2SH ('3') Base58Check address.
bool btc_base58_address_valid(std::string_view addr);
// Mainnet "bc1" segwit address.
bool btc_bech32_address_valid(std::string_view addr);

}  // namespace conman::crypto
