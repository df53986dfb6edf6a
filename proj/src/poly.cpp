#include "confreach/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace confreach {

int total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

bool GradedLexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string VarSpace::name(int var) const {
  if (var < 0 || var >= total()) throw std::out_of_range("variable index out of range");
  if (var < nt) return "t";
  if (var < nt + nx) return "x" + std::to_string(var - nt + 1);
  return "theta" + std::to_string(var - nt - nx + 1);
}

namespace {

double monomial_value(double coeff, const Exponent& e, std::span<const double> z) {
  double value = coeff;
  for (std::size_t v = 0; v < e.size(); ++v) {
    for (int k = 0; k < e[v]; ++k) value *= z[v];
  }
  return value;
}

std::vector<double> binomial_row(int n) {
  std::vector<double> row(n + 1, 1.0);
  for (int k = 1; k < n; ++k) row[k] = row[k - 1] * (n - k + 1) / k;
  return row;
}

}  // namespace

MultiPoly::MultiPoly(VarSpace space) : space_(space) {
  if (space.nt < 0 || space.nt > 1 || space.nx < 0 || space.ntheta < 0) {
    throw std::invalid_argument("invalid variable space");
  }
}

MultiPoly::MultiPoly(VarSpace space, const std::vector<std::pair<Exponent, double>>& terms)
    : MultiPoly(space) {
  for (const auto& [e, c] : terms) {
    if (static_cast<int>(e.size()) != space_.total()) {
      throw std::invalid_argument("exponent length does not match variable count");
    }
    accumulate(e, c);
  }
}

MultiPoly MultiPoly::constant(VarSpace space, double c) {
  return MultiPoly(space, {{Exponent(space.total(), 0), c}});
}

MultiPoly MultiPoly::variable(VarSpace space, int var) {
  if (var < 0 || var >= space.total()) throw std::out_of_range("variable index out of range");
  Exponent e(space.total(), 0);
  e[var] = 1;
  return MultiPoly(space, {{e, 1.0}});
}

MultiPoly MultiPoly::monomial(VarSpace space, Exponent e, double c) {
  return MultiPoly(space, {{std::move(e), c}});
}

void MultiPoly::accumulate(const Exponent& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void MultiPoly::require_same_space(const MultiPoly& other) const {
  if (!(space_ == other.space_)) throw std::invalid_argument("variable-space mismatch");
}

int MultiPoly::degree() const {
  if (terms_.empty()) return kZeroDegree;
  return total_degree(terms_.rbegin()->first);
}

int MultiPoly::degree_in(int first, int count) const {
  int deg = kZeroDegree;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int v = first; v < first + count; ++v) d += e[v];
    deg = std::max(deg, d);
  }
  return deg;
}

double MultiPoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

double MultiPoly::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != space_.total()) {
    throw std::invalid_argument("evaluation point dimension mismatch");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) sum += monomial_value(c, e, point);
  return sum;
}

MultiPoly MultiPoly::operator-() const { return *this * -1.0; }

MultiPoly MultiPoly::operator*(double s) const {
  MultiPoly out(space_);
  if (s == 0.0) return out;
  for (const auto& [e, c] : terms_) out.accumulate(e, c * s);
  return out;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  a.require_same_space(b);
  MultiPoly out = a;
  for (const auto& [e, c] : b.terms_) out.accumulate(e, c);
  return out;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
  a.require_same_space(b);
  MultiPoly out = a;
  for (const auto& [e, c] : b.terms_) out.accumulate(e, -c);
  return out;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.require_same_space(b);
  MultiPoly out(a.space_);
  Exponent e(a.space_.total());
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = static_cast<std::uint16_t>(ea[v] + eb[v]);
      out.accumulate(e, ca * cb);
    }
  }
  return out;
}

MultiPoly MultiPoly::derivative(int var) const {
  if (var < 0 || var >= space_.total()) throw std::out_of_range("derivative variable out of range");
  MultiPoly out(space_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent d = e;
    --d[var];
    out.accumulate(d, c * e[var]);
  }
  return out;
}

MultiPoly MultiPoly::substitute(int var, double value) const {
  if (var < 0 || var >= space_.total()) throw std::out_of_range("substitution variable out of range");
  MultiPoly out(space_);
  for (const auto& [e, c] : terms_) {
    double factor = 1.0;
    for (int k = 0; k < e[var]; ++k) factor *= value;
    Exponent r = e;
    r[var] = 0;
    out.accumulate(r, c * factor);
  }
  return out;
}

MultiPoly MultiPoly::affine_substitute(std::span<const double> scale,
                                       std::span<const double> offset) const {
  const auto n = static_cast<std::size_t>(space_.total());
  if (scale.size() != n || offset.size() != n) {
    throw std::invalid_argument("affine map dimension mismatch");
  }
  // Expand one variable at a time: z_v -> offset_v + scale_v z_v.
  TermMap current = terms_;
  for (std::size_t v = 0; v < n; ++v) {
    if (scale[v] == 1.0 && offset[v] == 0.0) continue;
    MultiPoly next(space_);
    for (const auto& [e, c] : current) {
      const int p = e[v];
      const auto binom = binomial_row(p);
      Exponent r = e;
      for (int k = 0; k <= p; ++k) {
        // C(p,k) * scale^k * offset^(p-k) * z^k
        double coef = c * binom[k];
        for (int i = 0; i < k; ++i) coef *= scale[v];
        for (int i = 0; i < p - k; ++i) coef *= offset[v];
        r[v] = static_cast<std::uint16_t>(k);
        next.accumulate(r, coef);
      }
    }
    current = std::move(next.terms_);
  }
  MultiPoly out(space_);
  out.terms_ = std::move(current);
  return out;
}

MultiPoly MultiPoly::reembed(VarSpace target) const {
  MultiPoly out(target);
  for (const auto& [e, c] : terms_) {
    Exponent r(target.total(), 0);
    auto move_block = [&](int src_first, int src_count, int dst_first, int dst_count) {
      for (int i = 0; i < src_count; ++i) {
        const auto p = e[src_first + i];
        if (p == 0) continue;
        if (i >= dst_count) {
          throw std::invalid_argument("cannot re-embed: variable " + space_.name(src_first + i) +
                                      " has no slot in target space");
        }
        r[dst_first + i] = p;
      }
    };
    move_block(0, space_.nt, 0, target.nt);
    move_block(space_.nt, space_.nx, target.nt, target.nx);
    move_block(space_.nt + space_.nx, space_.ntheta, target.nt + target.nx, target.ntheta);
    out.accumulate(r, c);
  }
  return out;
}

MultiPoly MultiPoly::cleaned(double tol) const {
  MultiPoly out(space_);
  for (const auto& [e, c] : terms_) {
    if (std::abs(c) > tol) out.terms_.emplace(e, c);
  }
  return out;
}

double MultiPoly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

MultiPoly poly_add(const MultiPoly& a, const MultiPoly& b) { return a + b; }
MultiPoly poly_mul(const MultiPoly& a, const MultiPoly& b) { return a * b; }
MultiPoly partial_derivative(const MultiPoly& p, int var_index) { return p.derivative(var_index); }
double evaluate(const MultiPoly& p, std::span<const double> point) { return p.evaluate(point); }

MultiPoly lie_derivative(const MultiPoly& v, std::span<const MultiPoly> field) {
  const VarSpace& s = v.space();
  if (static_cast<int>(field.size()) != s.nx) {
    throw std::invalid_argument("vector field arity does not match state dimension");
  }
  MultiPoly out(s);
  if (s.nt == 1) out = v.derivative(s.t_index());
  for (int i = 0; i < s.nx; ++i) {
    if (!(field[i].space() == s)) throw std::invalid_argument("variable-space mismatch in vector field");
    out = out + v.derivative(s.x_index(i)) * field[i];
  }
  return out;
}

long MonomialBasis::index_of(const Exponent& e) const {
  auto it = std::lower_bound(exponents.begin(), exponents.end(), e, GradedLexLess{});
  if (it == exponents.end() || *it != e) return -1;
  return static_cast<long>(it - exponents.begin());
}

namespace {

void enumerate_degree(int nvars, int remaining, int var, Exponent& cur, std::vector<Exponent>& out) {
  if (var == nvars - 1) {
    cur[var] = static_cast<std::uint16_t>(remaining);
    out.push_back(cur);
    return;
  }
  for (int p = 0; p <= remaining; ++p) {
    cur[var] = static_cast<std::uint16_t>(p);
    enumerate_degree(nvars, remaining - p, var + 1, cur, out);
  }
}

}  // namespace

MonomialBasis basis_enumerate(int nvars, int max_degree) {
  if (nvars < 0 || max_degree < 0) throw std::invalid_argument("basis requires nvars >= 0, degree >= 0");
  MonomialBasis basis{nvars, max_degree, {}};
  basis.exponents.reserve(basis_size(nvars, max_degree));
  if (nvars == 0) {
    basis.exponents.emplace_back();
    return basis;
  }
  Exponent cur(nvars, 0);
  for (int d = 0; d <= max_degree; ++d) enumerate_degree(nvars, d, 0, cur, basis.exponents);
  return basis;
}

std::size_t basis_size(int nvars, int max_degree) {
  // C(n + d, d) computed incrementally; exact for the sizes used here.
  std::size_t r = 1;
  for (int k = 1; k <= max_degree; ++k) r = r * (nvars + k) / k;
  return r;
}

PolyEvaluator::PolyEvaluator(const MultiPoly& p) : nvars_(p.space().total()) {
  offsets_.push_back(0);
  for (const auto& [e, c] : p.terms()) {
    coeffs_.push_back(c);
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] > 0) factors_.emplace_back(static_cast<std::uint16_t>(v), e[v]);
    }
    offsets_.push_back(static_cast<std::uint32_t>(factors_.size()));
  }
}

double PolyEvaluator::operator()(std::span<const double> z) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    double value = coeffs_[t];
    for (auto f = offsets_[t]; f < offsets_[t + 1]; ++f) {
      const double zv = z[factors_[f].first];
      for (int k = 0; k < factors_[f].second; ++k) value *= zv;
    }
    sum += value;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class TermParser {
 public:
  TermParser(std::string_view text, VarSpace space) : text_(text), space_(space) {}

  MultiPoly parse() {
    MultiPoly result(space_);
    skip_ws();
    if (pos_ >= text_.size()) throw std::invalid_argument("empty polynomial text");
    while (pos_ < text_.size()) {
      const std::size_t term_start = pos_;
      double sign = 1.0;
      bool had_sign = false;
      while (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        if (text_[pos_] == '-') sign = -sign;
        had_sign = true;
        ++pos_;
        skip_ws();
      }
      if (!had_sign && term_start != 0) fail(term_start, "expected '+' or '-' between terms");
      double coeff = sign;
      Exponent e(space_.total(), 0);
      int factors = 0;
      while (true) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '*') {
          if (factors == 0) fail(term_start, "term starts with '*'");
          ++pos_;
          skip_ws();
        }
        if (pos_ >= text_.size() || text_[pos_] == '+' || text_[pos_] == '-') break;
        const char ch = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
          coeff *= parse_number(term_start);
        } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
          const std::size_t name_start = pos_;
          while (pos_ < text_.size() &&
                 (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
          }
          const int var = lookup(text_.substr(name_start, pos_ - name_start), term_start);
          int power = 1;
          skip_ws();
          if (pos_ < text_.size() && text_[pos_] == '^') {
            ++pos_;
            skip_ws();
            power = parse_power(term_start);
          }
          e[var] = static_cast<std::uint16_t>(e[var] + power);
        } else {
          fail(term_start, std::string("unexpected character '") + ch + "'");
        }
        ++factors;
      }
      if (factors == 0) fail(term_start, "missing factor");
      result = result + MultiPoly::monomial(space_, e, coeff);
    }
    return result;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string term_text(std::size_t start) const {
    std::size_t end = start;
    // A term runs until the next top-level sign that does not belong to an exponent.
    while (end < text_.size()) {
      const char c = text_[end];
      if ((c == '+' || c == '-') && end > start) {
        const char prev = text_[end - 1];
        if (prev != 'e' && prev != 'E') break;
      }
      ++end;
    }
    std::string s(text_.substr(start, end - start));
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
  }

  [[noreturn]] void fail(std::size_t term_start, const std::string& why) const {
    throw std::invalid_argument("malformed polynomial term '" + term_text(term_start) + "': " + why);
  }

  double parse_number(std::size_t term_start) {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double value = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail(term_start, "bad coefficient");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    if (!std::isfinite(value)) fail(term_start, "non-finite coefficient");
    return value;
  }

  int parse_power(std::size_t term_start) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail(term_start, "exponent must be a nonnegative integer");
    const int p = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (p > 1000) fail(term_start, "exponent too large");
    return p;
  }

  int lookup(std::string_view name, std::size_t term_start) const {
    if (name == "t" && space_.nt == 1) return space_.t_index();
    if (name == "x" && space_.nx == 1) return space_.x_index(0);
    if (name == "theta" && space_.ntheta == 1) return space_.theta_index(0);
    auto indexed = [&](std::string_view prefix, int count) -> int {
      if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return -1;
      const auto digits = name.substr(prefix.size());
      if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        return -1;
      }
      const int k = std::stoi(std::string(digits));
      return (k >= 1 && k <= count) ? k - 1 : -1;
    };
    if (int k = indexed("theta", space_.ntheta); k >= 0) return space_.theta_index(k);
    if (int k = indexed("x", space_.nx); k >= 0) return space_.x_index(k);
    fail(term_start, "unknown variable '" + std::string(name) + "'");
  }

  std::string_view text_;
  VarSpace space_;
  std::size_t pos_ = 0;
};

std::string format_term(const VarSpace& space, const Exponent& e, double c) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%+.17g", c);
  std::string s = buf;
  for (int v = 0; v < space.total(); ++v) {
    if (e[v] == 0) continue;
    s += " * " + space.name(v);
    if (e[v] > 1) s += "^" + std::to_string(e[v]);
  }
  return s;
}

}  // namespace

MultiPoly parse_poly(std::string_view text, VarSpace space) { return TermParser(text, space).parse(); }

std::string format_poly(const MultiPoly& p) {
  if (p.is_zero()) return "+0\n";
  std::string out;
  for (const auto& [e, c] : p.terms()) out += format_term(p.space(), e, c) + "\n";
  return out;
}

std::string to_string(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [e, c] : p.terms()) {
    if (!out.empty()) out += " ";
    out += format_term(p.space(), e, c);
  }
  return out;
}

}  // namespace confreach
