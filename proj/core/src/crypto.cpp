#include "lararp/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <mutex>
#include <string>

namespace lararp
{

namespace
{

void
EnsureSodium()
{
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0)
        {
            throw Error("libsodium initialisation failed");
        }
    });
}

} // namespace

Digest
OneWay(std::string_view domain, std::span<const std::uint8_t> input)
{
    EnsureSodium();
    crypto_generichash_state state;
    crypto_generichash_init(&state, nullptr, 0, kBlockSize);
    const auto len = static_cast<std::uint8_t>(domain.size());
    crypto_generichash_update(&state, &len, 1);
    crypto_generichash_update(&state,
                              reinterpret_cast<const unsigned char*>(domain.data()),
                              domain.size());
    crypto_generichash_update(&state, input.data(), input.size());
    Digest out;
    crypto_generichash_final(&state, out.bytes.data(), out.bytes.size());
    return out;
}

Secret
ChainStep(const Secret& secret)
{
    Secret next;
    next.bytes = OneWay("chain", secret.bytes).bytes;
    return next;
}

Digest
PublicImage(const Secret& secret)
{
    return OneWay("public", secret.bytes);
}

KeyChain
KeyChain::Generate(NodeId owner, const Secret& seed, std::size_t length)
{
    if (length == 0)
    {
        throw InvalidParameter("KeyChain::Generate: chain length must be at least 1");
    }
    KeyChain chain;
    chain.m_owner = owner;
    chain.m_secrets.reserve(length);
    chain.m_publics.reserve(length);
    Secret current = ChainStep(seed);
    for (std::size_t i = 0; i < length; ++i)
    {
        chain.m_secrets.push_back(current);
        chain.m_publics.push_back(PublicImage(current));
        current = ChainStep(current);
    }
    return chain;
}

Reveal
KeyChain::RevealNext()
{
    if (Exhausted())
    {
        throw ChainExhausted("key chain of node " + std::to_string(m_owner) + " is exhausted");
    }
    Reveal r{static_cast<std::uint32_t>(m_next), m_secrets[m_next]};
    ++m_next;
    return r;
}

bool
VerifyReveal(std::span<const Digest> publics, std::uint32_t index, const Secret& secret)
{
    if (index >= publics.size())
    {
        return false;
    }
    const Digest image = PublicImage(secret);
    return sodium_memcmp(image.bytes.data(), publics[index].bytes.data(), kBlockSize) == 0;
}

AuthTag
ComputeTag(const SymmetricKey& key, std::span<const std::uint8_t> message)
{
    if (message.empty())
    {
        throw InvalidParameter("ComputeTag: message must be nonempty");
    }
    EnsureSodium();
    AuthTag tag;
    crypto_generichash(tag.bytes.data(),
                       tag.bytes.size(),
                       message.data(),
                       message.size(),
                       key.bytes.data(),
                       key.bytes.size());
    return tag;
}

bool
VerifyTag(const SymmetricKey& key, std::span<const std::uint8_t> message, const AuthTag& tag)
{
    if (message.empty())
    {
        return false;
    }
    const AuthTag expected = ComputeTag(key, message);
    return sodium_memcmp(expected.bytes.data(), tag.bytes.data(), kBlockSize) == 0;
}

SharedKeyTable
SharedKeyTable::Provision(std::size_t nodeCount, Rng& rng)
{
    SharedKeyTable table;
    table.m_nodeCount = nodeCount;
    const std::size_t pairs = nodeCount < 2 ? 0 : nodeCount * (nodeCount - 1) / 2;
    table.m_keys.reserve(pairs);
    for (std::size_t i = 0; i < pairs; ++i)
    {
        table.m_keys.push_back(rng.FillBlock<SymmetricKey>());
    }
    return table;
}

std::size_t
SharedKeyTable::Index(NodeId a, NodeId b) const
{
    if (a == b)
    {
        throw InvalidParameter("SharedKeyTable: no key for a node with itself");
    }
    if (a >= m_nodeCount || b >= m_nodeCount)
    {
        throw InvalidParameter("SharedKeyTable: node id out of range");
    }
    const std::size_t lo = std::min(a, b);
    const std::size_t hi = std::max(a, b);
    // Row-major upper triangle without the diagonal.
    return hi * (hi - 1) / 2 + lo;
}

const SymmetricKey&
SharedKeyTable::Key(NodeId a, NodeId b) const
{
    return m_keys[Index(a, b)];
}

} // namespace lararp
