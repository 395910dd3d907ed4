// The oracle must itself be right before anything is checked against it.
#include <catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace oracle;

TEST_CASE("oracle hashes match FIPS 180-4 examples", "[oracle]") {
  CHECK(to_hex(sha256(bytes_of("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(sha256({})) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(sha512(bytes_of("abc"))) ==
        "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
        "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f");
}

TEST_CASE("oracle HMAC matches RFC 4231 test case 2", "[oracle]") {
  const Bytes key = bytes_of("Jefe");
  const Bytes data = bytes_of("what do ya want for nothing?");
  CHECK(to_hex(hmac_sha256(key, data)) == "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
  CHECK(to_hex(hmac_sha512(key, data)) ==
        "164b7a7bfcf819e2e395fbe73b56e0a387bd64222e831fd610270cd7ea250554"
        "9758bf75c05a994a6d034f65f8f0e6fdcaeab1a34d4a6b4b636e070a38bce737");
}

TEST_CASE("oracle PBKDF2-HMAC-SHA512 matches published vectors", "[oracle]") {
  CHECK(to_hex(pbkdf2_sha512(bytes_of("password"), bytes_of("salt"), 1, 64)) ==
        "867f70cf1ade02cff3752599a3a53dc4af34c7a669815ae5d513554e1c8cf252"
        "c02d470a285a0501bad999bfe943c08f050235d7d68b1da55e63f73b60a57fce");
  CHECK(to_hex(pbkdf2_sha512(bytes_of("password"), bytes_of("salt"), 2, 64)) ==
        "e1d9c16aa681708a45f5c7c4e215ceb66e011a2e9f0040713f18aefdb866d53c"
        "f76cab2868a39b9f7840edce4fef5a82be67335c77a6068e04112754f27ccf4e");
}

TEST_CASE("oracle secp256k1 and RFC 6979 match well-known vectors", "[oracle]") {
  // Generator compression (private key 1).
  CHECK(to_hex(compress(scalar_base_mul(1))) ==
        "0279be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
  // n*G is the identity.
  CHECK(scalar_base_mul(curve_order()).infinity);
  // Key 1, SHA-256("Satoshi Nakamoto").
  const Bytes sig = ecdsa_sign(1, sha256(bytes_of("Satoshi Nakamoto")));
  CHECK(to_hex(sig) ==
        "934b1ea10a4b3c1757e2b0c017d0b6143ce3c9a7e6a4a49860d7a6ab210ee3d8"
        "2442ce9d2b916064108014783e923ec36b49743e2ffa1c4496f01a512aafd9e5");
  CHECK(ecdsa_verify(sha256(bytes_of("Satoshi Nakamoto")), sig, scalar_base_mul(1)));
}
