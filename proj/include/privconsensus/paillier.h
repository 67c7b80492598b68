// Copyright 2026 The privconsensus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Paillier additively homomorphic encryption with generator g = n + 1, plus
// a fixed-point codec that maps reals into the plaintext ring Z_n.
//
//   Enc(m; r) = (1 + m n) r^n mod n^2
//   Dec(c)    = L(c^lambda mod n^2) mu mod n,   L(u) = (u - 1) / n
//   Enc(m1) Enc(m2)  decrypts to m1 + m2 mod n
//   Enc(m)^a         decrypts to a m mod n

#ifndef PRIVCONSENSUS_PAILLIER_H_
#define PRIVCONSENSUS_PAILLIER_H_

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "privconsensus/rng.h"

namespace privconsensus {

inline constexpr int kMinKeyBits = 512;
inline constexpr int kDefaultKeyBits = 2048;

struct PaillierPublicKey {
  mpz_class n;
  mpz_class n_squared;
  mpz_class g;
  int key_bits = 0;
  uint64_t fingerprint = 0;  // FNV-1a of the big-endian bytes of n
};

struct PaillierSecretKey {
  mpz_class lambda;  // lcm(p - 1, q - 1)
  mpz_class mu;      // L(g^lambda mod n^2)^-1 mod n
};

struct PaillierKeyPair {
  PaillierPublicKey public_key;
  PaillierSecretKey secret_key;
};

struct Ciphertext {
  mpz_class value;  // in [0, n^2)
  uint64_t key_fingerprint = 0;
};

// Deterministic given `seed`. key_bits must be even and >= kMinKeyBits.
absl::StatusOr<PaillierKeyPair> GenerateKeyPair(int key_bits, uint64_t seed);

// `m` must lie in [0, n). Randomness r is drawn from `rng`, which the caller
// owns; concurrent encryptions are safe with one stream per caller.
absl::StatusOr<Ciphertext> Encrypt(const PaillierPublicKey& pk,
                                   const mpz_class& m, Rng& rng);

absl::StatusOr<mpz_class> Decrypt(const PaillierKeyPair& key,
                                  const Ciphertext& c);

absl::StatusOr<Ciphertext> HomAdd(const PaillierPublicKey& pk,
                                  const Ciphertext& c1, const Ciphertext& c2);

// `a` must lie in [0, n).
absl::StatusOr<Ciphertext> HomScale(const PaillierPublicKey& pk,
                                    const Ciphertext& c, const mpz_class& a);

// Wire format: 8-byte big-endian key fingerprint, 4-byte big-endian payload
// length L, then the ciphertext value as L big-endian bytes (L is the byte
// length of n^2; the value is left-padded with zeros).
std::vector<uint8_t> SerializeCiphertext(const PaillierPublicKey& pk,
                                         const Ciphertext& c);
absl::StatusOr<Ciphertext> DeserializeCiphertext(
    std::span<const uint8_t> bytes);

std::vector<uint8_t> ToBigEndian(const mpz_class& v);
uint64_t KeyFingerprint(const mpz_class& n);

// Fixed-point encoding of reals into Z_n with scale 2^frac_bits. Negative
// values occupy the upper half of [0, n). Encoding leaves headroom for one
// multiplication by an encoded factor of magnitude <= 1: |x| 2^{2f} < n / 4.
class FixedPointCodec {
 public:
  static constexpr int kDefaultFracBits = 32;

  explicit FixedPointCodec(mpz_class n, int frac_bits = kDefaultFracBits);

  int frac_bits() const { return frac_bits_; }
  const mpz_class& modulus() const { return n_; }

  // Rounds x * 2^f to the nearest integer. Fails on non-finite x or when
  // the headroom bound is exceeded.
  absl::StatusOr<mpz_class> Encode(double x) const;

  // Interprets v as a signed residue and divides by 2^(f * scale_power);
  // scale_power = 2 decodes the product of two encoded values.
  double Decode(const mpz_class& v, int scale_power = 1) const;

  // Largest magnitude accepted by Encode.
  double Headroom() const;

 private:
  mpz_class n_;
  mpz_class half_n_;
  int frac_bits_;
};

}  // namespace privconsensus

#endif  // PRIVCONSENSUS_PAILLIER_H_
