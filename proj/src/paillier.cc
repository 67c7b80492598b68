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

#include "privconsensus/paillier.h"

#include <cmath>
#include <limits>
#include <string_view>

#include "absl/strings/str_cat.h"

namespace privconsensus {
namespace {

// Uniform integer with exactly `bits` random bits (may have leading zeros).
mpz_class RandomBits(int bits, Rng& rng) {
  const int words = (bits + 63) / 64;
  std::vector<uint64_t> buf(words);
  for (auto& w : buf) w = rng.Bits64();
  mpz_class v;
  mpz_import(v.get_mpz_t(), buf.size(), -1, sizeof(uint64_t), 0, 0,
             buf.data());
  const int excess = words * 64 - bits;
  if (excess > 0) v >>= excess;
  return v;
}

// Uniform in [1, bound) and coprime to `bound`.
mpz_class RandomUnit(const mpz_class& bound, Rng& rng) {
  const int bits = static_cast<int>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  while (true) {
    mpz_class r = RandomBits(bits, rng);
    if (r == 0 || r >= bound) continue;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), bound.get_mpz_t());
    if (g == 1) return r;
  }
}

// Prime with exactly `bits` bits and its top two bits set, so the product of
// two such primes has exactly 2 * bits bits.
mpz_class RandomPrime(int bits, Rng& rng) {
  while (true) {
    mpz_class candidate = RandomBits(bits, rng);
    mpz_setbit(candidate.get_mpz_t(), bits - 1);
    mpz_setbit(candidate.get_mpz_t(), bits - 2);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
    if (static_cast<int>(mpz_sizeinbase(p.get_mpz_t(), 2)) == bits) return p;
  }
}

mpz_class PowMod(const mpz_class& base, const mpz_class& exp,
                 const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(),
           mod.get_mpz_t());
  return out;
}

absl::Status CheckKey(const PaillierPublicKey& pk, const Ciphertext& c) {
  if (c.key_fingerprint != pk.fingerprint) {
    return absl::FailedPreconditionError(absl::StrCat(
        "ciphertext under key ", c.key_fingerprint,
        " used with key ", pk.fingerprint));
  }
  return absl::OkStatus();
}

void PutBigEndian(uint64_t v, int bytes, std::vector<uint8_t>& out) {
  for (int i = bytes - 1; i >= 0; --i) out.push_back((v >> (8 * i)) & 0xff);
}

}  // namespace

std::vector<uint8_t> ToBigEndian(const mpz_class& v) {
  size_t count = 0;
  const size_t size = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  std::vector<uint8_t> out(std::max<size_t>(size, 1), 0);
  mpz_export(out.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(std::max<size_t>(count, 1));
  return out;
}

uint64_t KeyFingerprint(const mpz_class& n) {
  const std::vector<uint8_t> bytes = ToBigEndian(n);
  return Fnv1a64(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                  bytes.size()));
}

absl::StatusOr<PaillierKeyPair> GenerateKeyPair(int key_bits, uint64_t seed) {
  if (key_bits < kMinKeyBits || key_bits % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "key_bits must be even and at least ", kMinKeyBits, ", got ",
        key_bits));
  }
  Rng rng(seed, "paillier-keygen");
  const int half = key_bits / 2;
  while (true) {
    const mpz_class p = RandomPrime(half, rng);
    const mpz_class q = RandomPrime(half, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    const mpz_class pm1 = p - 1;
    const mpz_class qm1 = q - 1;
    const mpz_class phi = pm1 * qm1;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;

    PaillierKeyPair key;
    PaillierPublicKey& pk = key.public_key;
    pk.n = n;
    pk.n_squared = n * n;
    pk.g = n + 1;
    pk.key_bits = key_bits;
    pk.fingerprint = KeyFingerprint(n);

    PaillierSecretKey& sk = key.secret_key;
    mpz_lcm(sk.lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    const mpz_class u = PowMod(pk.g, sk.lambda, pk.n_squared);
    const mpz_class l = (u - 1) / n;
    if (mpz_invert(sk.mu.get_mpz_t(), l.get_mpz_t(), n.get_mpz_t()) == 0) {
      continue;
    }
    return key;
  }
}

absl::StatusOr<Ciphertext> Encrypt(const PaillierPublicKey& pk,
                                   const mpz_class& m, Rng& rng) {
  if (m < 0 || m >= pk.n) {
    return absl::OutOfRangeError("plaintext outside [0, n)");
  }
  const mpz_class r = RandomUnit(pk.n, rng);
  // g^m = (1 + n)^m = 1 + m n (mod n^2).
  mpz_class gm = 1 + m * pk.n;
  mpz_class c = gm * PowMod(r, pk.n, pk.n_squared);
  c %= pk.n_squared;
  return Ciphertext{c, pk.fingerprint};
}

absl::StatusOr<mpz_class> Decrypt(const PaillierKeyPair& key,
                                  const Ciphertext& c) {
  const PaillierPublicKey& pk = key.public_key;
  if (absl::Status s = CheckKey(pk, c); !s.ok()) return s;
  if (c.value <= 0 || c.value >= pk.n_squared) {
    return absl::OutOfRangeError("ciphertext outside [1, n^2)");
  }
  const mpz_class u = PowMod(c.value, key.secret_key.lambda, pk.n_squared);
  mpz_class m = ((u - 1) / pk.n) * key.secret_key.mu;
  m %= pk.n;
  return m;
}

absl::StatusOr<Ciphertext> HomAdd(const PaillierPublicKey& pk,
                                  const Ciphertext& c1, const Ciphertext& c2) {
  if (absl::Status s = CheckKey(pk, c1); !s.ok()) return s;
  if (absl::Status s = CheckKey(pk, c2); !s.ok()) return s;
  mpz_class c = c1.value * c2.value;
  c %= pk.n_squared;
  return Ciphertext{c, pk.fingerprint};
}

absl::StatusOr<Ciphertext> HomScale(const PaillierPublicKey& pk,
                                    const Ciphertext& c, const mpz_class& a) {
  if (absl::Status s = CheckKey(pk, c); !s.ok()) return s;
  if (a < 0 || a >= pk.n) {
    return absl::OutOfRangeError("scalar outside [0, n)");
  }
  return Ciphertext{PowMod(c.value, a, pk.n_squared), pk.fingerprint};
}

std::vector<uint8_t> SerializeCiphertext(const PaillierPublicKey& pk,
                                         const Ciphertext& c) {
  const size_t width = (mpz_sizeinbase(pk.n_squared.get_mpz_t(), 2) + 7) / 8;
  std::vector<uint8_t> out;
  out.reserve(12 + width);
  PutBigEndian(c.key_fingerprint, 8, out);
  PutBigEndian(width, 4, out);
  std::vector<uint8_t> value = ToBigEndian(c.value);
  if (c.value == 0) value.clear();
  out.insert(out.end(), width - value.size(), 0);
  out.insert(out.end(), value.begin(), value.end());
  return out;
}

absl::StatusOr<Ciphertext> DeserializeCiphertext(
    std::span<const uint8_t> bytes) {
  if (bytes.size() < 12) {
    return absl::InvalidArgumentError("ciphertext record shorter than header");
  }
  uint64_t fingerprint = 0;
  for (int i = 0; i < 8; ++i) fingerprint = (fingerprint << 8) | bytes[i];
  uint64_t width = 0;
  for (int i = 8; i < 12; ++i) width = (width << 8) | bytes[i];
  if (bytes.size() != 12 + width) {
    return absl::InvalidArgumentError(
        absl::StrCat("ciphertext payload length ", bytes.size() - 12,
                     " does not match header ", width));
  }
  Ciphertext c;
  c.key_fingerprint = fingerprint;
  if (width > 0) {
    mpz_import(c.value.get_mpz_t(), width, 1, 1, 1, 0, bytes.data() + 12);
  }
  return c;
}

FixedPointCodec::FixedPointCodec(mpz_class n, int frac_bits)
    : n_(std::move(n)), frac_bits_(frac_bits) {
  half_n_ = n_ / 2;
}

absl::StatusOr<mpz_class> FixedPointCodec::Encode(double x) const {
  if (!std::isfinite(x)) {
    return absl::InvalidArgumentError("cannot encode a non-finite value");
  }
  const double scaled = std::nearbyint(std::ldexp(x, frac_bits_));
  if (!std::isfinite(scaled)) {
    return absl::OutOfRangeError(absl::StrCat(
        "value ", x, " exceeds fixed-point headroom ", Headroom()));
  }
  mpz_class v(scaled);
  mpz_class magnitude = abs(v);
  // |v| 2^f < n / 4 keeps one product with an encoded |a| <= 1 below n / 2.
  mpz_class bound = magnitude << (frac_bits_ + 2);
  if (bound >= n_) {
    return absl::OutOfRangeError(absl::StrCat(
        "value ", x, " exceeds fixed-point headroom ", Headroom()));
  }
  if (v < 0) v += n_;
  return v;
}

double FixedPointCodec::Decode(const mpz_class& v, int scale_power) const {
  mpz_class r = v % n_;
  if (r < 0) r += n_;
  if (r > half_n_) r -= n_;
  return std::ldexp(r.get_d(), -frac_bits_ * scale_power);
}

double FixedPointCodec::Headroom() const {
  const long bits = static_cast<long>(mpz_sizeinbase(n_.get_mpz_t(), 2));
  const long exp = bits - 1 - 2 * frac_bits_ - 2;
  if (exp > std::numeric_limits<double>::max_exponent) {
    return std::numeric_limits<double>::infinity();
  }
  return std::ldexp(1.0, static_cast<int>(exp));
}

}  // namespace privconsensus
