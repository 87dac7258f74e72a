#include "hsk/secure_links.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>

namespace hsk {

Bytes sha256(std::span<const std::uint8_t> data) {
    Bytes digest(32);
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != 32)
        throw Error("sha256 failed");
    return digest;
}

namespace {

Bytes concat(std::initializer_list<std::span<const std::uint8_t>> parts) {
    Bytes out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

// Shared key = hash of the two public tokens in canonical (sorted) order,
// so both endpoints compute identical bytes without any secret math.
class HashedTokenExchange final : public KeyExchangePrimitive {
public:
    std::string name() const override { return "test-double"; }

    Bytes make_private(SplitMix64& rng) const override { return rng.next_bytes(16); }

    Bytes public_token(const Bytes& priv) const override {
        if (priv.empty()) throw LinkError("test-double: empty private value");
        return sha256(priv);
    }

    Bytes shared_key(const Bytes& own_priv, const Bytes& peer_pub) const override {
        if (peer_pub.size() != 32) throw LinkError("test-double: malformed peer token");
        const Bytes own_pub = public_token(own_priv);
        const Bytes& lo = own_pub < peer_pub ? own_pub : peer_pub;
        const Bytes& hi = own_pub < peer_pub ? peer_pub : own_pub;
        return sha256(concat({lo, hi}));
    }
};

constexpr std::uint64_t kFieldPrime = 2305843009213693951ULL;  // 2^61 - 1
constexpr std::uint64_t kGenerator = 3;

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % kFieldPrime);
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t result = 1;
    base %= kFieldPrime;
    while (exp > 0) {
        if (exp & 1) result = mod_mul(result, base);
        base = mod_mul(base, base);
        exp >>= 1;
    }
    return result;
}

Bytes u64_bytes(std::uint64_t v) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xFF);
        v >>= 8;
    }
    return out;
}

std::uint64_t u64_from(const Bytes& b) {
    std::uint64_t v = 0;
    for (std::uint8_t byte : b) v = (v << 8) | byte;
    return v;
}

// g^x over GF(2^61-1). A toy group: the point is a genuine exchange behind
// the same interface, not key strength.
class FiniteFieldExchange final : public KeyExchangePrimitive {
public:
    std::string name() const override { return "finite-field"; }

    Bytes make_private(SplitMix64& rng) const override {
        return u64_bytes(2 + rng.next_below(kFieldPrime - 3));  // x in [2, p-2]
    }

    Bytes public_token(const Bytes& priv) const override {
        if (priv.size() != 8) throw LinkError("finite-field: malformed private value");
        return u64_bytes(mod_pow(kGenerator, u64_from(priv)));
    }

    Bytes shared_key(const Bytes& own_priv, const Bytes& peer_pub) const override {
        if (own_priv.size() != 8) throw LinkError("finite-field: malformed private value");
        if (peer_pub.size() != 8) throw LinkError("finite-field: malformed peer token");
        const std::uint64_t token = u64_from(peer_pub);
        if (token <= 1 || token >= kFieldPrime)
            throw LinkError("finite-field: peer token outside the group");
        return sha256(u64_bytes(mod_pow(token, u64_from(own_priv))));
    }
};

// Deterministic authenticated test cipher: tag = H(key,0x01,m) doubles as
// the stream nonce, so equal inputs give equal ciphertexts and any
// tampering or wrong key fails the tag check.
class XorSivCipher final : public SymmetricCipher {
public:
    std::string name() const override { return "xor-siv"; }

    Bytes encrypt(const Bytes& key, const Bytes& plaintext) const override {
        const Bytes tag = sha256(concat({key, Bytes{0x01}, plaintext}));
        Bytes out = tag;
        const Bytes stream = keystream(key, tag, plaintext.size());
        for (std::size_t i = 0; i < plaintext.size(); ++i)
            out.push_back(plaintext[i] ^ stream[i]);
        return out;
    }

    std::optional<Bytes> decrypt(const Bytes& key, const Bytes& ciphertext) const override {
        if (ciphertext.size() < 32) return std::nullopt;
        const Bytes tag(ciphertext.begin(), ciphertext.begin() + 32);
        const std::size_t body_len = ciphertext.size() - 32;
        const Bytes stream = keystream(key, tag, body_len);
        Bytes plaintext(body_len);
        for (std::size_t i = 0; i < body_len; ++i)
            plaintext[i] = ciphertext[32 + i] ^ stream[i];
        if (sha256(concat({key, Bytes{0x01}, plaintext})) != tag) return std::nullopt;
        return plaintext;
    }

private:
    static Bytes keystream(const Bytes& key, const Bytes& tag, std::size_t len) {
        Bytes stream;
        stream.reserve(len + 32);
        std::uint32_t counter = 0;
        while (stream.size() < len) {
            Bytes ctr(4);
            std::uint32_t c = counter++;
            for (int i = 0; i < 4; ++i) {
                ctr[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(c & 0xFF);
                c >>= 8;
            }
            const Bytes block = sha256(concat({key, Bytes{0x02}, tag, ctr}));
            stream.insert(stream.end(), block.begin(), block.end());
        }
        stream.resize(len);
        return stream;
    }
};

}  // namespace

std::unique_ptr<KeyExchangePrimitive> make_key_exchange(const std::string& name) {
    if (name == "test-double") return std::make_unique<HashedTokenExchange>();
    if (name == "finite-field") return std::make_unique<FiniteFieldExchange>();
    throw ConfigError("unknown key exchange primitive: " + name);
}

std::unique_ptr<SymmetricCipher> make_cipher(const std::string& name) {
    if (name == "xor-siv") return std::make_unique<XorSivCipher>();
    throw ConfigError("unknown cipher: " + name);
}

StoreDelta& StoreDelta::operator+=(const StoreDelta& other) {
    new_exchanges += other.new_exchanges;
    reused_links += other.reused_links;
    pruned += other.pruned;
    return *this;
}

const LinkRecord& SecureLinkStore::record(const EdgeKey& e) const {
    auto it = links_.find(e);
    if (it == links_.end())
        throw LookupError("no link key for (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                          ")");
    return it->second;
}

std::vector<EdgeKey> SecureLinkStore::edge_keys() const {
    std::vector<EdgeKey> out;
    out.reserve(links_.size());
    for (const auto& [e, rec] : links_) out.push_back(e);
    return out;
}

StoreDelta SecureLinkStore::establish(NodeId a, NodeId b, const KeyExchangePrimitive& kx,
                                      SplitMix64& rng, int round) {
    if (a == b) throw LinkError("establish: a link needs two distinct nodes");
    const EdgeKey e(a, b);
    if (links_.count(e)) return {.new_exchanges = 0, .reused_links = 1, .pruned = 0};

    // Simulate both endpoints; lower id draws first so replay is stable.
    const Bytes priv_a = kx.make_private(rng);
    const Bytes priv_b = kx.make_private(rng);
    const Bytes pub_a = kx.public_token(priv_a);
    const Bytes pub_b = kx.public_token(priv_b);
    const Bytes key_at_a = kx.shared_key(priv_a, pub_b);
    const Bytes key_at_b = kx.shared_key(priv_b, pub_a);
    if (key_at_a != key_at_b)
        throw LinkError("exchange disagreement on (" + std::to_string(e.a) + "," +
                        std::to_string(e.b) + ")");

    links_[e] = LinkRecord{key_at_a, round};
    return {.new_exchanges = 1, .reused_links = 0, .pruned = 0};
}

StoreDelta SecureLinkStore::establish_for_edges(std::span<const EdgeKey> edges,
                                                const KeyExchangePrimitive& kx, SplitMix64& rng,
                                                int round) {
    StoreDelta delta;
    for (const EdgeKey& e : edges) delta += establish(e.a, e.b, kx, rng, round);
    return delta;
}

StoreDelta SecureLinkStore::prune(const std::set<NodeId>& departed,
                                  std::span<const EdgeKey> current_edges) {
    StoreDelta delta;
    for (auto it = links_.begin(); it != links_.end();) {
        const EdgeKey& e = it->first;
        const bool touches_departed = departed.count(e.a) > 0 || departed.count(e.b) > 0;
        const bool still_current =
            std::binary_search(current_edges.begin(), current_edges.end(), e);
        if (touches_departed || !still_current) {
            it = links_.erase(it);
            delta.pruned += 1;
        } else {
            ++it;
        }
    }
    return delta;
}

SessionKey generate_session_key(SplitMix64& rng, int epoch, std::size_t key_len) {
    return SessionKey{rng.next_bytes(key_len), epoch};
}

namespace {

// epoch (4 bytes little endian) || key bytes
Bytes serialize_session_key(const SessionKey& sk) {
    Bytes out(4);
    std::uint32_t e = static_cast<std::uint32_t>(sk.epoch);
    for (int i = 0; i < 4; ++i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(e & 0xFF);
        e >>= 8;
    }
    out.insert(out.end(), sk.bytes.begin(), sk.bytes.end());
    return out;
}

}  // namespace

Bytes wrap_session_key(const SessionKey& sk, const Bytes& link_key,
                       const SymmetricCipher& cipher) {
    return cipher.encrypt(link_key, serialize_session_key(sk));
}

std::optional<SessionKey> unwrap_session_key(const Bytes& ciphertext, const Bytes& link_key,
                                             const SymmetricCipher& cipher) {
    const auto plain = cipher.decrypt(link_key, ciphertext);
    if (!plain || plain->size() < 4) return std::nullopt;
    std::uint32_t e = 0;
    for (int i = 3; i >= 0; --i) e = (e << 8) | (*plain)[static_cast<std::size_t>(i)];
    return SessionKey{Bytes(plain->begin() + 4, plain->end()), static_cast<int>(e)};
}

}  // namespace hsk
