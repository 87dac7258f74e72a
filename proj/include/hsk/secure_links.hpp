#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>

#include "hsk/rng.hpp"
#include "hsk/types.hpp"

namespace hsk {

// Two-party exchange: each side turns a private value into a public token,
// and (own private, peer public) maps to the same shared key on both ends.
// Deliberately pluggable; nothing here is production cryptography.
class KeyExchangePrimitive {
public:
    virtual ~KeyExchangePrimitive() = default;
    virtual std::string name() const = 0;
    virtual Bytes make_private(SplitMix64& rng) const = 0;
    virtual Bytes public_token(const Bytes& priv) const = 0;
    // Throws LinkError on malformed peer tokens.
    virtual Bytes shared_key(const Bytes& own_priv, const Bytes& peer_pub) const = 0;
};

// "test-double": shared key = SHA-256 over the two public tokens in
// canonical order. "finite-field": classic g^x exchange over the Mersenne
// prime 2^61-1, hashed to key bytes.
std::unique_ptr<KeyExchangePrimitive> make_key_exchange(const std::string& name);

// Authenticated contract: decrypt returns nullopt on a wrong key or a
// corrupted ciphertext, never garbage.
class SymmetricCipher {
public:
    virtual ~SymmetricCipher() = default;
    virtual std::string name() const = 0;
    virtual Bytes encrypt(const Bytes& key, const Bytes& plaintext) const = 0;
    virtual std::optional<Bytes> decrypt(const Bytes& key, const Bytes& ciphertext) const = 0;
};

std::unique_ptr<SymmetricCipher> make_cipher(const std::string& name);  // "xor-siv"

struct LinkRecord {
    Bytes key;
    int round_established = 0;
};

struct StoreDelta {
    std::uint64_t new_exchanges = 0;
    std::uint64_t reused_links = 0;
    std::uint64_t pruned = 0;

    StoreDelta& operator+=(const StoreDelta& other);
};

// Established pairwise link keys, keyed by unordered node pair. After every
// protocol round the key set equals the current secure-link edge set.
class SecureLinkStore {
public:
    bool has(const EdgeKey& e) const { return links_.count(e) > 0; }
    const LinkRecord& record(const EdgeKey& e) const;  // throws LookupError
    std::size_t size() const { return links_.size(); }
    std::vector<EdgeKey> edge_keys() const;  // sorted

    // Runs the exchange for a fresh pair (both simulated endpoints must
    // agree byte for byte); a pair already present is counted as reuse and
    // left untouched.
    StoreDelta establish(NodeId a, NodeId b, const KeyExchangePrimitive& kx, SplitMix64& rng,
                         int round);
    StoreDelta establish_for_edges(std::span<const EdgeKey> edges, const KeyExchangePrimitive& kx,
                                   SplitMix64& rng, int round);

    // Drops every pair touching a departed node and every pair no longer in
    // current_edges.
    StoreDelta prune(const std::set<NodeId>& departed, std::span<const EdgeKey> current_edges);

private:
    std::map<EdgeKey, LinkRecord> links_;
};

struct SessionKey {
    Bytes bytes;
    int epoch = 0;

    friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

SessionKey generate_session_key(SplitMix64& rng, int epoch, std::size_t key_len = 32);

Bytes wrap_session_key(const SessionKey& sk, const Bytes& link_key, const SymmetricCipher& cipher);
std::optional<SessionKey> unwrap_session_key(const Bytes& ciphertext, const Bytes& link_key,
                                             const SymmetricCipher& cipher);

Bytes sha256(std::span<const std::uint8_t> data);

}  // namespace hsk
