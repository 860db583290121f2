#include "rqla/stabilizer.hpp"

#include <bit>

#include "rqla/errors.hpp"

namespace rqla {

Tableau::Tableau(std::size_t n)
    : n_(n), w_((n + 63) / 64), xs_((2 * n + 1) * w_, 0), zs_((2 * n + 1) * w_, 0), r_(2 * n + 1, 0) {
  if (n == 0) throw DimensionError("tableau needs at least one qubit");
  for (std::size_t i = 0; i < n; ++i) {
    xs_[i * w_ + i / 64] |= std::uint64_t{1} << (i % 64);
    zs_[(i + n) * w_ + i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

void Tableau::check(std::size_t q) const {
  if (q >= n_) throw DimensionError("tableau qubit index out of range");
}

void Tableau::h(std::size_t q) {
  check(q);
  const std::size_t w = q / 64;
  const std::uint64_t m = std::uint64_t{1} << (q % 64);
  each_row([&](std::size_t row) {
    std::uint64_t& xw = xs_[row * w_ + w];
    std::uint64_t& zw = zs_[row * w_ + w];
    const bool xb = xw & m, zb = zw & m;
    r_[row] ^= (xb && zb);
    xw = (xw & ~m) | (zb ? m : 0);
    zw = (zw & ~m) | (xb ? m : 0);
  });
}

void Tableau::s(std::size_t q) {
  check(q);
  const std::size_t w = q / 64;
  const std::uint64_t m = std::uint64_t{1} << (q % 64);
  each_row([&](std::size_t row) {
    const bool xb = xs_[row * w_ + w] & m, zb = zs_[row * w_ + w] & m;
    r_[row] ^= (xb && zb);
    if (xb) zs_[row * w_ + w] ^= m;
  });
}

void Tableau::sdg(std::size_t q) {
  check(q);
  const std::size_t w = q / 64;
  const std::uint64_t m = std::uint64_t{1} << (q % 64);
  each_row([&](std::size_t row) {
    const bool xb = xs_[row * w_ + w] & m, zb = zs_[row * w_ + w] & m;
    r_[row] ^= (xb && !zb);
    if (xb) zs_[row * w_ + w] ^= m;
  });
}

void Tableau::x(std::size_t q) {
  check(q);
  const std::size_t w = q / 64;
  const std::uint64_t m = std::uint64_t{1} << (q % 64);
  each_row([&](std::size_t row) { r_[row] ^= static_cast<bool>(zs_[row * w_ + w] & m); });
}

void Tableau::z(std::size_t q) {
  check(q);
  const std::size_t w = q / 64;
  const std::uint64_t m = std::uint64_t{1} << (q % 64);
  each_row([&](std::size_t row) { r_[row] ^= static_cast<bool>(xs_[row * w_ + w] & m); });
}

void Tableau::y(std::size_t q) {
  check(q);
  const std::size_t w = q / 64;
  const std::uint64_t m = std::uint64_t{1} << (q % 64);
  each_row([&](std::size_t row) { r_[row] ^= static_cast<bool>((xs_[row * w_ + w] ^ zs_[row * w_ + w]) & m); });
}

void Tableau::cnot(std::size_t c, std::size_t t) {
  check(c);
  check(t);
  if (c == t) throw ValidationError("CNOT control equals target");
  const std::size_t wc = c / 64, wt = t / 64;
  const std::uint64_t mc = std::uint64_t{1} << (c % 64), mt = std::uint64_t{1} << (t % 64);
  each_row([&](std::size_t row) {
    std::uint64_t* xr = &xs_[row * w_];
    std::uint64_t* zr = &zs_[row * w_];
    const bool xc = xr[wc] & mc, zc = zr[wc] & mc, xt = xr[wt] & mt, zt = zr[wt] & mt;
    r_[row] ^= (xc && zt && (xt == zc));
    if (xc) xr[wt] ^= mt;
    if (zt) zr[wc] ^= mc;
  });
}

void Tableau::cz(std::size_t a, std::size_t b) {
  h(b);
  cnot(a, b);
  h(b);
}

void Tableau::cy(std::size_t c, std::size_t t) {
  sdg(t);
  cnot(c, t);
  s(t);
}

void Tableau::pauli(const PauliString& p) {
  if (p.size() != n_) throw DimensionError("Pauli width does not match tableau");
  for (std::size_t k = 0; k < n_; ++k) {
    switch (p.axis(k)) {
      case 'X': x(k); break;
      case 'Y': y(k); break;
      case 'Z': z(k); break;
      default: break;
    }
  }
}

void Tableau::controlled_pauli(std::size_t c, const PauliString& p) {
  check(c);
  if (p.size() != n_) throw DimensionError("Pauli width does not match tableau");
  if (p.axis(c) != 'I') throw ValidationError("controlled Pauli acts on its own control");
  for (std::size_t k = 0; k < n_; ++k) {
    switch (p.axis(k)) {
      case 'X': cnot(c, k); break;
      case 'Y': cy(c, k); break;
      case 'Z': cz(c, k); break;
      default: break;
    }
  }
}

void Tableau::apply(const PrepGate& g) {
  switch (g.kind) {
    case PrepGate::Kind::h: h(g.q0); break;
    case PrepGate::Kind::s: s(g.q0); break;
    case PrepGate::Kind::cnot: cnot(g.q0, g.q1); break;
    case PrepGate::Kind::pauli: pauli(g.pauli.string); break;  // global phase dropped
    case PrepGate::Kind::rotation: throw ValidationError("rotation gate is not Clifford");
  }
}

int Tableau::row_sum_phase(std::size_t h, std::size_t i) const {
  // exponent of i in P_i * P_h, same site table as multiply()
  int e = 0;
  for (std::size_t w = 0; w < w_; ++w) {
    const std::uint64_t x1 = xs_[i * w_ + w], z1 = zs_[i * w_ + w];
    const std::uint64_t x2 = xs_[h * w_ + w], z2 = zs_[h * w_ + w];
    const std::uint64_t pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2);
    const std::uint64_t neg = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2);
    e += std::popcount(pos) - std::popcount(neg);
  }
  return e;
}

void Tableau::rowsum(std::size_t h, std::size_t i) {
  const int total = 2 * r_[h] + 2 * r_[i] + row_sum_phase(h, i);
  r_[h] = (((total % 4) + 4) % 4) == 2;
  for (std::size_t w = 0; w < w_; ++w) {
    xs_[h * w_ + w] ^= xs_[i * w_ + w];
    zs_[h * w_ + w] ^= zs_[i * w_ + w];
  }
  ++row_updates_;
}

void Tableau::rowcopy(std::size_t dst, std::size_t src) {
  for (std::size_t w = 0; w < w_; ++w) {
    xs_[dst * w_ + w] = xs_[src * w_ + w];
    zs_[dst * w_ + w] = zs_[src * w_ + w];
  }
  r_[dst] = r_[src];
}

int Tableau::measure_z(std::size_t q, Rng& rng) {
  check(q);
  std::size_t p = 2 * n_;
  for (std::size_t i = n_; i < 2 * n_; ++i)
    if (xbit(i, q)) {
      p = i;
      break;
    }
  if (p < 2 * n_) {
    for (std::size_t i = 0; i < 2 * n_; ++i)
      if (i != p && xbit(i, q)) rowsum(i, p);
    rowcopy(p - n_, p);
    for (std::size_t w = 0; w < w_; ++w) xs_[p * w_ + w] = zs_[p * w_ + w] = 0;
    zs_[p * w_ + q / 64] |= std::uint64_t{1} << (q % 64);
    r_[p] = rng() >> 63;
    return r_[p] ? -1 : 1;
  }
  const std::size_t s = 2 * n_;
  for (std::size_t w = 0; w < w_; ++w) xs_[s * w_ + w] = zs_[s * w_ + w] = 0;
  r_[s] = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (xbit(i, q)) rowsum(s, i + n_);
  return r_[s] ? -1 : 1;
}

int Tableau::peek_z(std::size_t q) const {
  check(q);
  PauliString p(n_);
  p.set_axis(q, 'Z');
  return expectation(p);
}

int Tableau::expectation(const PauliString& p) const {
  if (p.size() != n_) throw DimensionError("Pauli width does not match tableau");
  Tableau t = *this;
  const std::size_t s = 2 * n_;
  auto row_anticommutes = [&](std::size_t row) {
    int par = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      const char a = p.axis(k);
      const bool px = a == 'X' || a == 'Y', pz = a == 'Z' || a == 'Y';
      par ^= (t.xbit(row, k) && pz) ^ (t.zbit(row, k) && px);
    }
    return par != 0;
  };
  for (std::size_t i = n_; i < 2 * n_; ++i)
    if (row_anticommutes(i)) return 0;
  for (std::size_t w = 0; w < w_; ++w) t.xs_[s * w_ + w] = t.zs_[s * w_ + w] = 0;
  t.r_[s] = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (row_anticommutes(i)) t.rowsum(s, i + n_);
  // scratch row now equals +-p up to the stored sign
  for (std::size_t k = 0; k < n_; ++k) {
    const char a = p.axis(k);
    const bool px = a == 'X' || a == 'Y', pz = a == 'Z' || a == 'Y';
    if (t.xbit(s, k) != px || t.zbit(s, k) != pz) throw Error("tableau expectation reconstruction failed");
  }
  return t.r_[s] ? -1 : 1;
}

bool Tableau::is_valid() const {
  auto symp = [&](std::size_t a, std::size_t b) {
    int par = 0;
    for (std::size_t w = 0; w < w_; ++w)
      par ^= std::popcount((xs_[a * w_ + w] & zs_[b * w_ + w]) ^ (zs_[a * w_ + w] & xs_[b * w_ + w])) & 1;
    return par;
  };
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      if (symp(n_ + i, n_ + j) != 0) return false;
      if (symp(i, j) != 0) return false;
      if (symp(i, n_ + j) != (i == j ? 1 : 0)) return false;
    }
  return true;
}

}  // namespace rqla
