#include "rqla/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rqla/errors.hpp"

namespace rqla {

namespace {

std::uint64_t low_mask(std::size_t n) { return n >= 64 ? ~0ULL : ((1ULL << n) - 1); }

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

}  // namespace

cplx i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

PauliString::PauliString(std::size_t n) : n_(static_cast<std::uint32_t>(n)) {
  if (n == 0 || n > kMaxQubits) throw DimensionError("qubit count must be in [1, 63]");
}

PauliString::PauliString(std::size_t n, std::uint64_t x, std::uint64_t z) : PauliString(n) {
  if ((x | z) & ~low_mask(n)) throw DimensionError("Pauli mask wider than qubit count");
  x_ = x;
  z_ = z;
}

PauliString PauliString::parse(std::string_view axes) {
  PauliString p(axes.size());
  for (std::size_t k = 0; k < axes.size(); ++k) p.set_axis(k, axes[k]);
  return p;
}

char PauliString::axis(std::size_t qubit) const {
  if (qubit >= n_) throw DimensionError("qubit index out of range");
  const std::uint64_t b = 1ULL << (n_ - 1 - qubit);
  const bool xb = x_ & b, zb = z_ & b;
  if (xb && zb) return 'Y';
  if (xb) return 'X';
  if (zb) return 'Z';
  return 'I';
}

void PauliString::set_axis(std::size_t qubit, char a) {
  if (qubit >= n_) throw DimensionError("qubit index out of range");
  const std::uint64_t b = 1ULL << (n_ - 1 - qubit);
  x_ &= ~b;
  z_ &= ~b;
  switch (a) {
    case 'I': case 'i': break;
    case 'X': case 'x': x_ |= b; break;
    case 'Y': case 'y': x_ |= b; z_ |= b; break;
    case 'Z': case 'z': z_ |= b; break;
    default: throw ValidationError(std::string("bad Pauli axis '") + a + "'");
  }
}

std::string PauliString::str() const {
  std::string s(n_, 'I');
  for (std::size_t k = 0; k < n_; ++k) s[k] = axis(k);
  return s;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }
int PauliString::y_count() const { return std::popcount(x_ & z_); }

bool PauliString::commutes_with(const PauliString& o) const {
  return parity((x_ & o.z_) ^ (z_ & o.x_)) == 0;
}

PauliString PauliString::tensor(const PauliString& o) const {
  const std::size_t n = n_ + o.n_;
  if (n > kMaxQubits) throw DimensionError("tensor product too wide");
  return PauliString(n, (x_ << o.n_) | o.x_, (z_ << o.n_) | o.z_);
}

Matrix PauliString::dense() const {
  const std::size_t dim = std::size_t{1} << n_;
  Matrix m(dim, dim);
  const cplx ph = i_pow(y_count());
  for (std::size_t j = 0; j < dim; ++j)
    m(j ^ x_, j) = parity(j & z_) ? -ph : ph;
  return m;
}

cplx PhasedPauli::phase_value() const { return i_pow(phase); }

PhasedPauli multiply(const PauliString& p, const PauliString& q) {
  if (p.size() != q.size()) throw DimensionError("Pauli product of different widths");
  const std::uint64_t x1 = p.x(), z1 = p.z(), x2 = q.x(), z2 = q.z();
  // per-site products giving +i: XY, YZ, ZX; giving -i: XZ, YX, ZY
  const std::uint64_t pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2);
  const std::uint64_t neg = (x1 & ~z1 & ~x2 & z2) | (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2);
  const int e = std::popcount(pos) - std::popcount(neg);
  return {((e % 4) + 4) % 4, PauliString(p.size(), x1 ^ x2, z1 ^ z2)};
}

PhasedPauli multiply(const PhasedPauli& p, const PhasedPauli& q) {
  PhasedPauli r = multiply(p.string, q.string);
  r.phase = (r.phase + p.phase + q.phase) & 3;
  return r;
}

void apply_pauli(const PauliString& p, cplx factor, cplx* v, std::size_t dim) {
  const std::uint64_t x = p.x(), z = p.z();
  const cplx ph = factor * i_pow(p.y_count());
  if (x == 0) {
    if (z == 0) {
      if (ph != cplx(1.0, 0.0))
        for (std::size_t j = 0; j < dim; ++j) v[j] *= ph;
      return;
    }
    for (std::size_t j = 0; j < dim; ++j) v[j] *= parity(j & z) ? -ph : ph;
    return;
  }
  // swap pairs (j, j^x); visit each pair once from its smaller member
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  for (std::size_t j = 0; j < dim; ++j) {
    if (j & top) continue;
    const std::size_t k = j ^ x;
    const cplx vj = v[j], vk = v[k];
    // new[k] = ph * s(j) * old[j];  new[j] = ph * s(k) * old[k]
    v[k] = (parity(j & z) ? -ph : ph) * vj;
    v[j] = (parity(k & z) ? -ph : ph) * vk;
  }
}

void apply_pauli(const PauliString& p, int phase, StateVector& v) {
  if (v.size() != (std::size_t{1} << p.size())) throw DimensionError("state length does not match Pauli width");
  apply_pauli(p, i_pow(phase), v.data(), v.size());
}

PauliOperator::PauliOperator(std::size_t n, std::vector<Term> terms) : n_(n) {
  for (const auto& t : terms) {
    if (t.string.size() != n) throw DimensionError("term width does not match operator width");
    if (!std::isfinite(t.coeff)) throw ValidationError("non-finite Pauli coefficient");
  }
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.string < b.string; });
  for (const auto& t : terms) {
    if (!terms_.empty() && terms_.back().string == t.string)
      terms_.back().coeff += t.coeff;
    else
      terms_.push_back(t);
  }
  std::erase_if(terms_, [](const Term& t) { return std::abs(t.coeff) <= kDedupTol; });
}

double PauliOperator::weight() const {
  double w = 0.0;
  for (const auto& t : terms_) w += std::abs(t.coeff);
  return w;
}

double PauliOperator::coefficient(const PauliString& s) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                             [](const Term& t, const PauliString& k) { return t.string < k; });
  return (it != terms_.end() && it->string == s) ? it->coeff : 0.0;
}

Matrix PauliOperator::dense() const {
  if (n_ == 0) throw DimensionError("empty-width operator has no dense form");
  const std::size_t dim = std::size_t{1} << n_;
  Matrix m(dim, dim);
  for (const auto& t : terms_) {
    const cplx ph = t.coeff * i_pow(t.string.y_count());
    for (std::size_t j = 0; j < dim; ++j)
      m(j ^ t.string.x(), j) += parity(j & t.string.z()) ? -ph : ph;
  }
  return m;
}

PauliOperator PauliOperator::conj() const {
  auto terms = terms_;
  for (auto& t : terms)
    if (t.string.y_count() & 1) t.coeff = -t.coeff;
  return PauliOperator(n_, std::move(terms));
}

PauliOperator PauliOperator::scaled(double s) const {
  auto terms = terms_;
  for (auto& t : terms) t.coeff *= s;
  return PauliOperator(n_, std::move(terms));
}

PauliOperator PauliOperator::embed(std::size_t total, std::size_t offset) const {
  if (offset + n_ > total) throw DimensionError("embedding does not fit");
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  const std::size_t shift = total - offset - n_;
  for (const auto& t : terms_)
    terms.push_back({PauliString(total, t.string.x() << shift, t.string.z() << shift), t.coeff});
  return PauliOperator(total, std::move(terms));
}

PauliOperator PauliOperator::plus_identity(double c) const {
  auto terms = terms_;
  terms.push_back({PauliString(n_), c});
  return PauliOperator(n_, std::move(terms));
}

PauliOperator operator+(const PauliOperator& a, const PauliOperator& b) {
  if (a.n_ != b.n_) throw DimensionError("operator sum of different widths");
  auto terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return PauliOperator(a.n_, std::move(terms));
}

PauliOperator operator-(const PauliOperator& a, const PauliOperator& b) { return a + b.scaled(-1.0); }

PauliOperator decompose_dense(const Matrix& m, double tol) {
  const std::size_t dim = m.rows();
  if (dim != m.cols() || dim < 2 || (dim & (dim - 1))) throw DimensionError("decompose_dense needs a 2^n x 2^n matrix");
  const std::size_t n = std::countr_zero(dim);
  if (n > 12) throw DimensionError("dense decomposition limited to 12 qubits");
  if (!m.is_hermitian(tol)) throw ValidationError("matrix is not Hermitian within tolerance");
  std::vector<PauliOperator::Term> terms;
  for (std::uint64_t x = 0; x < dim; ++x)
    for (std::uint64_t z = 0; z < dim; ++z) {
      const cplx ph = i_pow(std::popcount(x & z));
      cplx tr = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const cplx e = m(j, j ^ x) * ph;
        tr += parity(j & z) ? -e : e;
      }
      const double a = tr.real() / static_cast<double>(dim);
      if (std::abs(a) > tol) terms.push_back({PauliString(n, x, z), a});
    }
  return PauliOperator(n, std::move(terms));
}

PauliOperator hermitian_embed(const PauliOperator& h1, const PauliOperator& h2) {
  if (h1.num_qubits() != h2.num_qubits()) throw DimensionError("embedding halves of different widths");
  const std::size_t n = h1.num_qubits();
  const PauliString x = PauliString::parse("X"), y = PauliString::parse("Y");
  std::vector<PauliOperator::Term> terms;
  for (const auto& t : h1.terms()) terms.push_back({x.tensor(t.string), t.coeff});
  for (const auto& t : h2.terms()) terms.push_back({y.tensor(t.string), -t.coeff});
  return PauliOperator(n + 1, std::move(terms));
}

PauliOperator tensor(const PauliOperator& a, const PauliOperator& b) {
  std::vector<PauliOperator::Term> terms;
  for (const auto& s : a.terms())
    for (const auto& t : b.terms()) terms.push_back({s.string.tensor(t.string), s.coeff * t.coeff});
  return PauliOperator(a.num_qubits() + b.num_qubits(), std::move(terms));
}

StateVector apply_to_state(const PauliOperator& op, const StateVector& v) {
  if (v.size() != (std::size_t{1} << op.num_qubits())) throw DimensionError("state length does not match operator width");
  StateVector out(v.size(), 0.0), tmp;
  for (const auto& t : op.terms()) {
    tmp = v;
    apply_pauli(t.string, cplx(t.coeff, 0.0), tmp.data(), tmp.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] += tmp[j];
  }
  return out;
}

StateVector apply_to_state(const PhasedPauli& p, const StateVector& v) {
  StateVector out = v;
  apply_pauli(p.string, p.phase, out);
  return out;
}

PauliOperator parse_pauli_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<PauliOperator::Term> terms;
  std::size_t n = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string coeff_tok, axes;
    if (!(ls >> coeff_tok)) continue;
    std::string extra;
    if (!(ls >> axes) || (ls >> extra))
      throw ValidationError("line " + std::to_string(lineno) + ": expected '<coeff> <axes>'");
    double c;
    try {
      std::size_t used = 0;
      c = std::stod(coeff_tok, &used);
      if (used != coeff_tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("line " + std::to_string(lineno) + ": bad coefficient '" + coeff_tok + "'");
    }
    if (n == 0) n = axes.size();
    if (axes.size() != n) throw DimensionError("line " + std::to_string(lineno) + ": inconsistent qubit count");
    auto s = PauliString::parse(axes);
    for (const auto& t : terms)
      if (t.string == s) throw ValidationError("line " + std::to_string(lineno) + ": duplicate string " + axes);
    terms.push_back({s, c});
  }
  if (n == 0) throw ValidationError("Pauli text has no terms");
  return PauliOperator(n, std::move(terms));
}

std::string format_pauli_text(const PauliOperator& op) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& t : op.terms()) out << t.coeff << ' ' << t.string.str() << '\n';
  return out.str();
}

PauliOperator read_pauli_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open Pauli file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_pauli_text(ss.str());
}

}  // namespace rqla
