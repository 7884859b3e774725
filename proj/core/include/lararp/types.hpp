#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lararp
{

using NodeId = std::uint32_t;
using Bytes = std::vector<std::uint8_t>;

/// Sentinel next hop for a local broadcast.
inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();
/// Sentinel for "no node".
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max() - 1;

inline constexpr std::size_t kBlockSize = 16;

/**
 * \brief Fixed 16-byte value with a phantom tag so secrets, digests, keys
 * and authentication tags cannot be mixed up at compile time.
 */
template <typename Tag>
struct Block
{
    std::array<std::uint8_t, kBlockSize> bytes{};

    friend auto operator<=>(const Block&, const Block&) = default;
    friend bool operator==(const Block&, const Block&) = default;
};

using Secret = Block<struct SecretTag>;
using Digest = Block<struct DigestTag>;
using AuthTag = Block<struct AuthTagTag>;
using SymmetricKey = Block<struct SymmetricKeyTag>;

using RequestId = std::array<std::uint8_t, 8>;

/// Base for every error this library throws.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error
{
  public:
    using Error::Error;
};

class ChainExhausted : public Error
{
  public:
    using Error::Error;
};

class EncodingError : public Error
{
  public:
    using Error::Error;
};

class ConfigError : public Error
{
  public:
    using Error::Error;
};

} // namespace lararp
