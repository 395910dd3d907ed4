#include "credfield/core/secp256k1.hpp"

#include <memory>

#include <openssl/bn.h>
#include <openssl/rand.h>
#include <secp256k1.h>

#include "credfield/core/error.hpp"

namespace credfield::core {

namespace {

struct BnFree {
  void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
};
struct CtxFree {
  void operator()(BN_CTX* ctx) const { BN_CTX_free(ctx); }
};
using Bn = std::unique_ptr<BIGNUM, BnFree>;
using Ctx = std::unique_ptr<BN_CTX, CtxFree>;

constexpr std::array<std::uint8_t, kScalarSize> kOrder = {
    0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xfe,
    0xba, 0xae, 0xdc, 0xe6, 0xaf, 0x48, 0xa0, 0x3b, 0xbf, 0xd2, 0x5e, 0x8c, 0xd0, 0x36, 0x41, 0x41};

[[noreturn]] void crypto_failure(const char* what) { throw CoreError(Errc::CryptoFailure, what); }

Bn new_bn() {
  Bn bn(BN_new());
  if (!bn) crypto_failure("BN_new");
  return bn;
}

Bn bn_from(ByteView be) {
  Bn bn(BN_bin2bn(be.data(), static_cast<int>(be.size()), nullptr));
  if (!bn) crypto_failure("BN_bin2bn");
  return bn;
}

template <std::size_t N>
std::array<std::uint8_t, N> bn_to(const BIGNUM* bn) {
  std::array<std::uint8_t, N> out{};
  if (BN_bn2binpad(bn, out.data(), static_cast<int>(N)) != static_cast<int>(N)) crypto_failure("BN_bn2binpad");
  return out;
}

Ctx new_ctx() {
  Ctx ctx(BN_CTX_new());
  if (!ctx) crypto_failure("BN_CTX_new");
  return ctx;
}

// Order constants shared read-only by all threads.
struct Curve {
  Bn order;
  Bn order_minus_one;
  Bn half_order;

  Curve() {
    order = bn_from(kOrder);
    order_minus_one.reset(BN_dup(order.get()));
    half_order = new_bn();
    if (!order || !order_minus_one || BN_sub_word(order_minus_one.get(), 1) != 1 ||
        BN_rshift1(half_order.get(), order.get()) != 1) {
      crypto_failure("curve order setup");
    }
  }
};

const Curve& curve() {
  static const Curve instance;
  return instance;
}

bool in_open_range(const BIGNUM* v) {
  return !BN_is_zero(v) && !BN_is_negative(v) && BN_cmp(v, curve().order.get()) < 0;
}

// One signing context for the process, blinded once at start-up. Signing,
// key creation and verification only read it, so threads may share it.
const secp256k1_context* secp() {
  static secp256k1_context* const instance = [] {
    secp256k1_context* c = secp256k1_context_create(SECP256K1_CONTEXT_NONE);
    if (c == nullptr) crypto_failure("secp256k1_context_create");
    std::array<std::uint8_t, 32> seed{};
    if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1 ||
        secp256k1_context_randomize(c, seed.data()) != 1) {
      secp256k1_context_destroy(c);
      crypto_failure("secp256k1_context_randomize");
    }
    secure_wipe(seed);
    return c;
  }();
  return instance;
}

// HMAC_DRBG nonce stream from RFC 6979 section 3.2, qlen = 256. Candidates
// are emitted raw; the caller rejects those outside [1, n-1] or yielding
// r = 0 / s = 0 and asks for the next one.
class Rfc6979 {
 public:
  Rfc6979(std::span<const std::uint8_t, kScalarSize> key, std::span<const std::uint8_t, 32> digest) {
    // bits2octets(h1): h < 2^256 < 2n, so one conditional subtraction reduces it.
    Bn h = bn_from(digest);
    if (BN_cmp(h.get(), curve().order.get()) >= 0 && BN_sub(h.get(), h.get(), curve().order.get()) != 1) {
      crypto_failure("BN_sub");
    }
    auto h_octets = bn_to<32>(h.get());

    Bytes seed;
    append(seed, key);
    append(seed, h_octets);
    v_.assign(32, 0x01);
    k_.assign(32, 0x00);
    step(seed, 0x00);
    step(seed, 0x01);
    secure_wipe(seed);
  }
  ~Rfc6979() {
    secure_wipe(k_);
    secure_wipe(v_);
  }
  Rfc6979(const Rfc6979&) = delete;
  Rfc6979& operator=(const Rfc6979&) = delete;

  void next(std::uint8_t* out) {
    if (started_) {
      Bytes data = v_;
      data.push_back(0x00);
      k_ = hmac_sha256(k_, data);
      v_ = hmac_sha256(k_, v_);
    }
    started_ = true;
    v_ = hmac_sha256(k_, v_);
    std::copy(v_.begin(), v_.end(), out);
  }

 private:
  void step(ByteView seed, std::uint8_t separator) {
    Bytes data = v_;
    data.push_back(separator);
    append(data, seed);
    k_ = hmac_sha256(k_, data);
    v_ = hmac_sha256(k_, v_);
    secure_wipe(data);
  }

  Bytes v_;
  Bytes k_;
  bool started_ = false;
};

// Nonce callback for secp256k1_ecdsa_sign: attempt i yields the i-th candidate.
int rfc6979_nonce(unsigned char* nonce32, const unsigned char* msg32, const unsigned char* key32,
                  const unsigned char* /*algo16*/, void* /*data*/, unsigned int attempt) {
  try {
    Rfc6979 stream(std::span<const std::uint8_t, kScalarSize>(key32, kScalarSize),
                   std::span<const std::uint8_t, 32>(msg32, 32));
    for (unsigned int i = 0; i <= attempt; ++i) stream.next(nonce32);
    return 1;
  } catch (...) {
    return 0;
  }
}

secp256k1_pubkey parse_point(const PublicKey& pub) {
  secp256k1_pubkey point;
  if (secp256k1_ec_pubkey_parse(secp(), &point, pub.bytes().data(), kPublicKeySize) != 1) {
    crypto_failure("stored public key no longer parses");
  }
  return point;
}

}  // namespace

const std::array<std::uint8_t, kScalarSize>& curve_order() { return kOrder; }

SecretScalar SecretScalar::from_bytes(ByteView big_endian) {
  if (big_endian.size() != kScalarSize) throw CoreError(Errc::InvalidScalar, "scalar must be 32 bytes");
  if (secp256k1_ec_seckey_verify(secp(), big_endian.data()) != 1) {
    throw CoreError(Errc::InvalidScalar, "scalar outside [1, n-1]");
  }
  SecretScalar out;
  std::copy(big_endian.begin(), big_endian.end(), out.value_.begin());
  return out;
}

SecretScalar::SecretScalar(SecretScalar&& other) noexcept : value_(other.value_) { secure_wipe(other.value_); }

SecretScalar& SecretScalar::operator=(SecretScalar&& other) noexcept {
  if (this != &other) {
    value_ = other.value_;
    secure_wipe(other.value_);
  }
  return *this;
}

SecretScalar::~SecretScalar() { secure_wipe(value_); }

std::optional<PublicKey> PublicKey::from_compressed(ByteView encoded) {
  if (encoded.size() != kPublicKeySize || (encoded[0] != 0x02 && encoded[0] != 0x03)) return std::nullopt;
  secp256k1_pubkey point;
  if (secp256k1_ec_pubkey_parse(secp(), &point, encoded.data(), encoded.size()) != 1) return std::nullopt;
  PublicKey key;
  std::copy(encoded.begin(), encoded.end(), key.encoded_.begin());
  return key;
}

PublicKey PublicKey::from_secret(const SecretScalar& secret) {
  secp256k1_pubkey point;
  if (secp256k1_ec_pubkey_create(secp(), &point, secret.reveal().data()) != 1) {
    crypto_failure("secp256k1_ec_pubkey_create");
  }
  PublicKey key;
  std::size_t len = key.encoded_.size();
  if (secp256k1_ec_pubkey_serialize(secp(), key.encoded_.data(), &len, &point, SECP256K1_EC_COMPRESSED) != 1 ||
      len != kPublicKeySize) {
    crypto_failure("secp256k1_ec_pubkey_serialize");
  }
  return key;
}

Signature Signature::from_compact(std::span<const std::uint8_t, kSignatureSize> compact) {
  Signature sig;
  std::copy(compact.begin(), compact.begin() + 32, sig.r.begin());
  std::copy(compact.begin() + 32, compact.end(), sig.s.begin());
  return sig;
}

std::array<std::uint8_t, kSignatureSize> Signature::compact() const {
  std::array<std::uint8_t, kSignatureSize> out{};
  std::copy(r.begin(), r.end(), out.begin());
  std::copy(s.begin(), s.end(), out.begin() + 32);
  return out;
}

bool Signature::in_range() const {
  return in_open_range(bn_from(r).get()) && in_open_range(bn_from(s).get());
}

bool Signature::is_low_s() const { return BN_cmp(bn_from(s).get(), curve().half_order.get()) <= 0; }

Signature mirror_s(const Signature& sig) {
  Bn s = bn_from(sig.s);
  Bn mirrored = new_bn();
  if (BN_sub(mirrored.get(), curve().order.get(), s.get()) != 1) crypto_failure("BN_sub");
  Signature out = sig;
  if (!BN_is_negative(mirrored.get())) out.s = bn_to<32>(mirrored.get());
  return out;
}

Signature sign_deterministic(const SecretScalar& key, const Digest& digest) {
  secp256k1_ecdsa_signature raw;
  if (secp256k1_ecdsa_sign(secp(), &raw, digest.data(), key.reveal().data(), rfc6979_nonce, nullptr) != 1) {
    crypto_failure("secp256k1_ecdsa_sign");
  }
  std::array<std::uint8_t, kSignatureSize> compact{};
  secp256k1_ecdsa_signature_serialize_compact(secp(), compact.data(), &raw);
  return Signature::from_compact(compact);  // already low-s
}

bool verify_signature(const Digest& digest, const Signature& sig, const PublicKey& pub) {
  if (!sig.in_range() || !sig.is_low_s()) return false;
  secp256k1_ecdsa_signature raw;
  const auto compact = sig.compact();
  if (secp256k1_ecdsa_signature_parse_compact(secp(), &raw, compact.data()) != 1) return false;
  const secp256k1_pubkey point = parse_point(pub);
  return secp256k1_ecdsa_verify(secp(), &raw, digest.data(), &point) == 1;
}

EntropySource system_entropy() {
  return [](std::span<std::uint8_t> out) {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
      throw CoreError(Errc::EntropyFailure, "system CSPRNG failed");
    }
  };
}

SecretScalar generate_browser_key(const EntropySource& entropy) {
  if (!entropy) throw CoreError(Errc::EntropyFailure, "no entropy source");
  std::array<std::uint8_t, kScalarSize> draw{};
  // Each draw is accepted with probability ~1 - 2^-128; a run of rejections
  // this long means the source is broken.
  constexpr int kMaxDraws = 64;
  for (int i = 0; i < kMaxDraws; ++i) {
    entropy(draw);
    if (in_open_range(bn_from(draw).get())) {
      SecretScalar key = SecretScalar::from_bytes(draw);
      secure_wipe(draw);
      return key;
    }
  }
  secure_wipe(draw);
  throw CoreError(Errc::EntropyFailure, "entropy source produced no valid scalar");
}

SecretScalar scalar_from_kdf_output(ByteView dk) {
  const Curve& c = curve();
  Ctx ctx = new_ctx();
  Bn v = bn_from(dk);
  if (BN_nnmod(v.get(), v.get(), c.order_minus_one.get(), ctx.get()) != 1 || BN_add_word(v.get(), 1) != 1) {
    crypto_failure("scalar reduction");
  }
  auto bytes = bn_to<kScalarSize>(v.get());
  SecretScalar out = SecretScalar::from_bytes(bytes);
  secure_wipe(bytes);
  return out;
}

}  // namespace credfield::core
