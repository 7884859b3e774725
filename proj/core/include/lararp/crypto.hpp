#pragma once

#include "lararp/rng.hpp"
#include "lararp/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace lararp
{

// One-way function and keyed tag. Both produce 128-bit outputs; the backend
// is BLAKE2b (unkeyed for the one-way function, keyed for tags) and lives
// entirely in crypto.cpp, so swapping primitives touches one file.

/// Domain-separated one-way function: H(len(domain) || domain || input).
Digest OneWay(std::string_view domain, std::span<const std::uint8_t> input);

/// Successor of a chain secret.
Secret ChainStep(const Secret& secret);

/// Public verifier for a chain secret. Uses a different domain from ChainStep,
/// so PublicImage(s[i]) never equals s[i+1].
Digest PublicImage(const Secret& secret);

/// One revealed chain element, carried in a route request as verification
/// information for the source.
struct Reveal
{
    std::uint32_t index = 0;
    Secret secret;

    friend bool operator==(const Reveal&, const Reveal&) = default;
};

/**
 * \brief A source's one-time secret list and the matching public verifiers.
 *
 * secrets[0] = ChainStep(seed), secrets[i+1] = ChainStep(secrets[i]),
 * publics[i] = PublicImage(secrets[i]). Each secret is revealed at most once,
 * in index order.
 */
class KeyChain
{
  public:
    KeyChain() = default;

    /// Throws InvalidParameter when length is zero.
    static KeyChain Generate(NodeId owner, const Secret& seed, std::size_t length);

    /// Returns the next unrevealed element and advances the cursor.
    /// Throws ChainExhausted once every secret has been revealed.
    Reveal RevealNext();

    NodeId Owner() const
    {
        return m_owner;
    }

    std::span<const Secret> Secrets() const
    {
        return m_secrets;
    }

    std::span<const Digest> Publics() const
    {
        return m_publics;
    }

    std::size_t NextIndex() const
    {
        return m_next;
    }

    std::size_t Length() const
    {
        return m_secrets.size();
    }

    bool Exhausted() const
    {
        return m_next >= m_secrets.size();
    }

  private:
    NodeId m_owner = kNoNode;
    std::vector<Secret> m_secrets;
    std::vector<Digest> m_publics;
    std::size_t m_next = 0;
};

/// True iff index is in range and PublicImage(secret) == publics[index].
/// A bad index is an attack, not a programming error, so it yields false.
bool VerifyReveal(std::span<const Digest> publics, std::uint32_t index, const Secret& secret);

/// Keyed 128-bit tag over canonical message bytes. Throws InvalidParameter on
/// an empty message.
AuthTag ComputeTag(const SymmetricKey& key, std::span<const std::uint8_t> message);

/// Recomputes the tag and compares in constant time.
bool VerifyTag(const SymmetricKey& key, std::span<const std::uint8_t> message, const AuthTag& tag);

/**
 * \brief Pre-provisioned pairwise symmetric keys for every unordered node pair.
 */
class SharedKeyTable
{
  public:
    SharedKeyTable() = default;

    static SharedKeyTable Provision(std::size_t nodeCount, Rng& rng);

    /// Symmetric: Key(a, b) == Key(b, a). Throws InvalidParameter for a == b
    /// or ids outside the table.
    const SymmetricKey& Key(NodeId a, NodeId b) const;

    std::size_t NodeCount() const
    {
        return m_nodeCount;
    }

    std::size_t Size() const
    {
        return m_keys.size();
    }

  private:
    std::size_t Index(NodeId a, NodeId b) const;

    std::size_t m_nodeCount = 0;
    std::vector<SymmetricKey> m_keys;
};

} // namespace lararp
