#include "oracle.hpp"

#include <stdexcept>

namespace oracle {

namespace {

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

constexpr std::uint64_t kSha512K[80] = {
    0x428a2f98d728ae22, 0x7137449123ef65cd, 0xb5c0fbcfec4d3b2f, 0xe9b5dba58189dbbc, 0x3956c25bf348b538,
    0x59f111f1b605d019, 0x923f82a4af194f9b, 0xab1c5ed5da6d8118, 0xd807aa98a3030242, 0x12835b0145706fbe,
    0x243185be4ee4b28c, 0x550c7dc3d5ffb4e2, 0x72be5d74f27b896f, 0x80deb1fe3b1696b1, 0x9bdc06a725c71235,
    0xc19bf174cf692694, 0xe49b69c19ef14ad2, 0xefbe4786384f25e3, 0x0fc19dc68b8cd5b5, 0x240ca1cc77ac9c65,
    0x2de92c6f592b0275, 0x4a7484aa6ea6e483, 0x5cb0a9dcbd41fbd4, 0x76f988da831153b5, 0x983e5152ee66dfab,
    0xa831c66d2db43210, 0xb00327c898fb213f, 0xbf597fc7beef0ee4, 0xc6e00bf33da88fc2, 0xd5a79147930aa725,
    0x06ca6351e003826f, 0x142929670a0e6e70, 0x27b70a8546d22ffc, 0x2e1b21385c26c926, 0x4d2c6dfc5ac42aed,
    0x53380d139d95b3df, 0x650a73548baf63de, 0x766a0abb3c77b2a8, 0x81c2c92e47edaee6, 0x92722c851482353b,
    0xa2bfe8a14cf10364, 0xa81a664bbc423001, 0xc24b8b70d0f89791, 0xc76c51a30654be30, 0xd192e819d6ef5218,
    0xd69906245565a910, 0xf40e35855771202a, 0x106aa07032bbd1b8, 0x19a4c116b8d2d0c8, 0x1e376c085141ab53,
    0x2748774cdf8eeb99, 0x34b0bcb5e19b48a8, 0x391c0cb3c5c95a63, 0x4ed8aa4ae3418acb, 0x5b9cca4f7763e373,
    0x682e6ff3d6b2b8a3, 0x748f82ee5defb2fc, 0x78a5636f43172f60, 0x84c87814a1f0ab72, 0x8cc702081a6439ec,
    0x90befffa23631e28, 0xa4506cebde82bde9, 0xbef9a3f7b2c67915, 0xc67178f2e372532b, 0xca273eceea26619c,
    0xd186b8c721c0c207, 0xeada7dd6cde0eb1e, 0xf57d4f7fee6ed178, 0x06f067aa72176fba, 0x0a637dc5a2c898a6,
    0x113f9804bef90dae, 0x1b710b35131c471b, 0x28db77f523047d84, 0x32caab7b40c72493, 0x3c9ebe0a15c9bebc,
    0x431d67c49c100d4c, 0x4cc5d4becb3e42b6, 0x597f299cfc657e2a, 0x5fcb6fab3ad6faec, 0x6c44198c4a475817};

template <typename W>
W rotr(W x, unsigned n) {
  return (x >> n) | (x << (sizeof(W) * 8 - n));
}

// Generic Merkle-Damgard padding: block of 64 or 128 bytes, length field of 8 or 16 bytes.
Bytes pad(const Bytes& data, std::size_t block, std::size_t len_bytes) {
  Bytes m = data;
  m.push_back(0x80);
  while ((m.size() + len_bytes) % block != 0) m.push_back(0);
  const std::uint64_t bits = static_cast<std::uint64_t>(data.size()) * 8;
  for (std::size_t i = 0; i < len_bytes; ++i) {
    const std::size_t shift = (len_bytes - 1 - i) * 8;
    m.push_back(shift >= 64 ? 0 : static_cast<std::uint8_t>(bits >> shift));
  }
  return m;
}

}  // namespace

Bytes sha256(const Bytes& data) {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  const Bytes m = pad(data, 64, 8);
  for (std::size_t off = 0; off < m.size(); off += 64) {
    std::uint32_t w[64];
    for (int t = 0; t < 16; ++t) {
      w[t] = (std::uint32_t{m[off + 4 * t]} << 24) | (std::uint32_t{m[off + 4 * t + 1]} << 16) |
             (std::uint32_t{m[off + 4 * t + 2]} << 8) | std::uint32_t{m[off + 4 * t + 3]};
    }
    for (int t = 16; t < 64; ++t) {
      const std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
      const std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
      w[t] = w[t - 16] + s0 + w[t - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int t = 0; t < 64; ++t) {
      const std::uint32_t t1 = hh + (rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25)) + ((e & f) ^ (~e & g)) +
                               kSha256K[t] + w[t];
      const std::uint32_t t2 = (rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22)) + ((a & b) ^ (a & c) ^ (b & c));
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }
  Bytes out;
  for (std::uint32_t v : h) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  return out;
}

Bytes sha512(const Bytes& data) {
  std::uint64_t h[8] = {0x6a09e667f3bcc908, 0xbb67ae8584caa73b, 0x3c6ef372fe94f82b, 0xa54ff53a5f1d36f1,
                        0x510e527fade682d1, 0x9b05688c2b3e6c1f, 0x1f83d9abfb41bd6b, 0x5be0cd19137e2179};
  const Bytes m = pad(data, 128, 16);
  for (std::size_t off = 0; off < m.size(); off += 128) {
    std::uint64_t w[80];
    for (int t = 0; t < 16; ++t) {
      w[t] = 0;
      for (int i = 0; i < 8; ++i) w[t] = (w[t] << 8) | m[off + 8 * t + i];
    }
    for (int t = 16; t < 80; ++t) {
      const std::uint64_t s0 = rotr(w[t - 15], 1) ^ rotr(w[t - 15], 8) ^ (w[t - 15] >> 7);
      const std::uint64_t s1 = rotr(w[t - 2], 19) ^ rotr(w[t - 2], 61) ^ (w[t - 2] >> 6);
      w[t] = w[t - 16] + s0 + w[t - 7] + s1;
    }
    std::uint64_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int t = 0; t < 80; ++t) {
      const std::uint64_t t1 = hh + (rotr(e, 14) ^ rotr(e, 18) ^ rotr(e, 41)) + ((e & f) ^ (~e & g)) +
                               kSha512K[t] + w[t];
      const std::uint64_t t2 = (rotr(a, 28) ^ rotr(a, 34) ^ rotr(a, 39)) + ((a & b) ^ (a & c) ^ (b & c));
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }
  Bytes out;
  for (std::uint64_t v : h) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  return out;
}

namespace {

template <typename Hash>
Bytes hmac(Hash hash, std::size_t block, const Bytes& key, const Bytes& data) {
  Bytes k = key.size() > block ? hash(key) : key;
  k.resize(block, 0);
  Bytes inner(block), outer(block);
  for (std::size_t i = 0; i < block; ++i) {
    inner[i] = k[i] ^ 0x36;
    outer[i] = k[i] ^ 0x5c;
  }
  inner.insert(inner.end(), data.begin(), data.end());
  const Bytes ih = hash(inner);
  outer.insert(outer.end(), ih.begin(), ih.end());
  return hash(outer);
}

}  // namespace

Bytes hmac_sha256(const Bytes& key, const Bytes& data) { return hmac(sha256, 64, key, data); }
Bytes hmac_sha512(const Bytes& key, const Bytes& data) { return hmac(sha512, 128, key, data); }

Bytes pbkdf2_sha512(const Bytes& password, const Bytes& salt, std::uint32_t iterations, std::size_t length) {
  Bytes out;
  for (std::uint32_t block = 1; out.size() < length; ++block) {
    Bytes s = salt;
    s.push_back(static_cast<std::uint8_t>(block >> 24));
    s.push_back(static_cast<std::uint8_t>(block >> 16));
    s.push_back(static_cast<std::uint8_t>(block >> 8));
    s.push_back(static_cast<std::uint8_t>(block));
    Bytes u = hmac_sha512(password, s);
    Bytes t = u;
    for (std::uint32_t i = 1; i < iterations; ++i) {
      u = hmac_sha512(password, u);
      for (std::size_t j = 0; j < t.size(); ++j) t[j] ^= u[j];
    }
    out.insert(out.end(), t.begin(), t.end());
  }
  out.resize(length);
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd hex");
  Bytes out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(std::string(hex.substr(i, 2)), nullptr, 16)));
  }
  return out;
}

std::string to_hex(const Bytes& b) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  for (std::uint8_t v : b) {
    s.push_back(digits[v >> 4]);
    s.push_back(digits[v & 15]);
  }
  return s;
}

Bytes bytes_of(std::string_view s) { return Bytes(s.begin(), s.end()); }

Int from_be(const Bytes& b) {
  Int v = 0;
  for (std::uint8_t x : b) v = (v << 8) | x;
  return v;
}

Bytes to_be(const Int& v, std::size_t width) {
  Bytes out(width, 0);
  Int t = v;
  for (std::size_t i = 0; i < width; ++i) {
    out[width - 1 - i] = static_cast<std::uint8_t>(t & 0xff);
    t >>= 8;
  }
  return out;
}

namespace {

const Int& field_prime() {
  static const Int p = from_be(from_hex("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f"));
  return p;
}

Int mod(const Int& a, const Int& m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

Int inverse(const Int& a, const Int& m) {
  return boost::multiprecision::powm(mod(a, m), m - 2, m);
}

Point add(const Point& a, const Point& b) {
  const Int& p = field_prime();
  if (a.infinity) return b;
  if (b.infinity) return a;
  Int lambda;
  if (a.x == b.x) {
    if (mod(a.y + b.y, p) == 0) return Point{0, 0, true};
    lambda = mod(3 * a.x * a.x * inverse(2 * a.y, p), p);
  } else {
    lambda = mod((b.y - a.y) * inverse(b.x - a.x, p), p);
  }
  Point r;
  r.x = mod(lambda * lambda - a.x - b.x, p);
  r.y = mod(lambda * (a.x - r.x) - a.y, p);
  return r;
}

Point mul(const Int& k, const Point& base) {
  Point result{0, 0, true};
  Point addend = base;
  Int e = k;
  while (e > 0) {
    if ((e & 1) != 0) result = add(result, addend);
    addend = add(addend, addend);
    e >>= 1;
  }
  return result;
}

const Point& generator() {
  static const Point g{from_be(from_hex("79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798")),
                       from_be(from_hex("483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8")),
                       false};
  return g;
}

}  // namespace

const Int& curve_order() {
  static const Int n = from_be(from_hex("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141"));
  return n;
}

Point scalar_base_mul(const Int& k) { return mul(k, generator()); }

Bytes compress(const Point& p) {
  Bytes out{static_cast<std::uint8_t>((p.y & 1) != 0 ? 0x03 : 0x02)};
  const Bytes x = to_be(p.x, 32);
  out.insert(out.end(), x.begin(), x.end());
  return out;
}

bool x_on_curve(const Int& x) {
  const Int& p = field_prime();
  const Int rhs = mod(x * x * x + 7, p);
  // Euler criterion.
  return rhs == 0 || boost::multiprecision::powm(rhs, (p - 1) / 2, p) == 1;
}

bool decompress(const Bytes& enc, Point& out) {
  if (enc.size() != 33 || (enc[0] != 0x02 && enc[0] != 0x03)) return false;
  const Int& p = field_prime();
  const Int x = from_be(Bytes(enc.begin() + 1, enc.end()));
  if (x >= p || !x_on_curve(x)) return false;
  const Int rhs = mod(x * x * x + 7, p);
  Int y = boost::multiprecision::powm(rhs, (p + 1) / 4, p);
  if (((y & 1) != 0) != (enc[0] == 0x03)) y = p - y;
  out = Point{x, y, false};
  return true;
}

Int rfc6979_nonce(const Int& key, const Bytes& digest) {
  const Int& n = curve_order();
  const Bytes x = to_be(key, 32);
  const Bytes h = to_be(mod(from_be(digest), n), 32);
  Bytes v(32, 0x01);
  Bytes k(32, 0x00);
  auto cat = [](std::initializer_list<const Bytes*> parts, std::initializer_list<std::uint8_t> sep = {}) {
    Bytes out;
    auto it = parts.begin();
    out.insert(out.end(), (*it)->begin(), (*it)->end());
    ++it;
    out.insert(out.end(), sep.begin(), sep.end());
    for (; it != parts.end(); ++it) out.insert(out.end(), (*it)->begin(), (*it)->end());
    return out;
  };
  k = hmac_sha256(k, cat({&v, &x, &h}, {0x00}));
  v = hmac_sha256(k, v);
  k = hmac_sha256(k, cat({&v, &x, &h}, {0x01}));
  v = hmac_sha256(k, v);
  for (;;) {
    v = hmac_sha256(k, v);
    const Int candidate = from_be(v);
    if (candidate >= 1 && candidate < n) return candidate;
    Bytes kv = v;
    kv.push_back(0x00);
    k = hmac_sha256(k, kv);
    v = hmac_sha256(k, v);
  }
}

Bytes ecdsa_sign(const Int& key, const Bytes& digest) {
  const Int& n = curve_order();
  const Int z = mod(from_be(digest), n);
  const Int k = rfc6979_nonce(key, digest);
  const Point r_point = scalar_base_mul(k);
  const Int r = mod(r_point.x, n);
  Int s = mod(inverse(k, n) * (z + r * key), n);
  if (s > n / 2) s = n - s;
  Bytes out = to_be(r, 32);
  const Bytes sb = to_be(s, 32);
  out.insert(out.end(), sb.begin(), sb.end());
  return out;
}

bool ecdsa_verify(const Bytes& digest, const Bytes& compact, const Point& pub) {
  const Int& n = curve_order();
  if (compact.size() != 64) return false;
  const Int r = from_be(Bytes(compact.begin(), compact.begin() + 32));
  const Int s = from_be(Bytes(compact.begin() + 32, compact.end()));
  if (r < 1 || r >= n || s < 1 || s > n / 2) return false;
  const Int z = mod(from_be(digest), n);
  const Int w = inverse(s, n);
  const Point sum = add(scalar_base_mul(mod(z * w, n)), mul(mod(r * w, n), pub));
  return !sum.infinity && mod(sum.x, n) == r;
}

Bytes build_salt(std::string_view origin, std::string_view user_id) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(origin.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(origin.size()));
  out.insert(out.end(), origin.begin(), origin.end());
  out.push_back(static_cast<std::uint8_t>(user_id.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(user_id.size()));
  out.insert(out.end(), user_id.begin(), user_id.end());
  return out;
}

Int password_scalar(std::string_view password, std::string_view origin, std::string_view user_id,
                    std::uint32_t iterations) {
  const Bytes dk = pbkdf2_sha512(bytes_of(password), build_salt(origin, user_id), iterations, 48);
  return 1 + from_be(dk) % (curve_order() - 1);
}

Bytes derive_blob(std::string_view user_id, const Bytes& challenge, std::string_view password,
                  std::string_view origin, std::uint64_t browser_time, const Int& browser_key,
                  std::uint32_t iterations) {
  const Int sp = password_scalar(password, origin, user_id, iterations);
  Bytes msg_p{0x01};
  msg_p.insert(msg_p.end(), challenge.begin(), challenge.end());
  const Bytes sigma_p = ecdsa_sign(sp, sha256(msg_p));
  Bytes msg_b{0x02};
  msg_b.insert(msg_b.end(), sigma_p.begin(), sigma_p.end());
  const Bytes t = to_be(Int(browser_time), 8);
  msg_b.insert(msg_b.end(), t.begin(), t.end());
  const Bytes sigma_b = ecdsa_sign(browser_key, sha256(msg_b));

  Bytes blob{0x01};
  blob.insert(blob.end(), t.begin(), t.end());
  blob.insert(blob.end(), sigma_p.begin(), sigma_p.end());
  blob.insert(blob.end(), sigma_b.begin(), sigma_b.end());
  const Bytes vp = compress(scalar_base_mul(sp));
  const Bytes vb = compress(scalar_base_mul(browser_key));
  blob.insert(blob.end(), vp.begin(), vp.end());
  blob.insert(blob.end(), vb.begin(), vb.end());
  return blob;
}

Bytes store_identifier(const Bytes& salt, const Bytes& compressed_point, std::uint32_t iterations) {
  return pbkdf2_sha512(compressed_point, salt, iterations, 64);
}

}  // namespace oracle
