#pragma once

// Sparse multivariate polynomials over a fixed variable count, stored as a
// canonical exponent-vector -> coefficient map. Monomials are ordered graded
// lexicographically (degree first, then x1-major within a degree), which fixes
// the layout of every monomial basis and Gram matrix built on top.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace soskit {

class Exponent {
public:
    Exponent() = default;

    explicit Exponent(std::vector<int> alpha) : alpha_(std::move(alpha)) {
        for (int a : alpha_) {
            if (a < 0) throw std::invalid_argument("Exponent: negative entry");
            degree_ += a;
        }
    }

    static Exponent zero(int n) { return Exponent(std::vector<int>(n, 0)); }

    static Exponent unit(int n, int var, int power = 1) {
        std::vector<int> a(n, 0);
        a.at(var) = power;
        return Exponent(std::move(a));
    }

    int size() const { return static_cast<int>(alpha_.size()); }
    int degree() const { return degree_; }
    int operator[](int i) const { return alpha_[i]; }
    const std::vector<int>& entries() const { return alpha_; }

    Exponent operator+(const Exponent& o) const {
        if (size() != o.size()) throw std::invalid_argument("Exponent: size mismatch");
        std::vector<int> a(alpha_);
        for (int i = 0; i < size(); ++i) a[i] += o.alpha_[i];
        return Exponent(std::move(a));
    }

    bool operator==(const Exponent& o) const { return alpha_ == o.alpha_; }
    bool operator!=(const Exponent& o) const { return !(*this == o); }

    // Graded lexicographic: lower degree first; within a degree, larger power
    // on the earliest variable first, so (2,0) < (1,1) < (0,2). This matches
    // the conventional basis listing [1, x1, .., xn, x1^2, x1x2, ..].
    bool operator<(const Exponent& o) const {
        if (degree_ != o.degree_) return degree_ < o.degree_;
        for (int i = 0; i < size(); ++i)
            if (alpha_[i] != o.alpha_[i]) return alpha_[i] > o.alpha_[i];
        return false;
    }

    std::string str() const {
        if (degree_ == 0) return "1";
        std::string s;
        for (int i = 0; i < size(); ++i) {
            if (alpha_[i] == 0) continue;
            if (!s.empty()) s += "*";
            s += "x" + std::to_string(i + 1);
            if (alpha_[i] > 1) s += "^" + std::to_string(alpha_[i]);
        }
        return s;
    }

private:
    std::vector<int> alpha_;
    int degree_ = 0;
};

/// Ordered, duplicate-free list of exponents spanning a monomial vector z(x).
struct MonomialBasis {
    int n = 0;
    std::vector<Exponent> entries;

    int size() const { return static_cast<int>(entries.size()); }
    const Exponent& operator[](int i) const { return entries[i]; }
};

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int n) : n_(n) {
        if (n < 0) throw std::invalid_argument("Polynomial: negative variable count");
    }

    static Polynomial constant(int n, double c) {
        Polynomial p(n);
        p.add_term(Exponent::zero(n), c);
        return p;
    }

    static Polynomial monomial(const Exponent& e, double c) {
        Polynomial p(e.size());
        p.add_term(e, c);
        return p;
    }

    int vars() const { return n_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e.degree());
        return d;
    }

    const std::map<Exponent, double>& terms() const { return terms_; }

    double coeff(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? 0.0 : it->second;
    }

    // Accumulates into the canonical map; exact zeros are pruned so the sparse
    // form stays canonical (no epsilon pruning, arithmetic is exact-sparse).
    void add_term(const Exponent& e, double c) {
        if (e.size() != n_) throw std::invalid_argument("Polynomial: exponent length != n");
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (c != 0.0) terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    void set_coeff(const Exponent& e, double c) {
        if (e.size() != n_) throw std::invalid_argument("Polynomial: exponent length != n");
        if (c == 0.0)
            terms_.erase(e);
        else
            terms_[e] = c;
    }

    double eval(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != n_)
            throw std::invalid_argument("Polynomial::eval: point dimension != n");
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c;
            for (int i = 0; i < n_; ++i) {
                double xi = x[i];
                for (int k = 0; k < e[i]; ++k) t *= xi;
            }
            acc += t;
        }
        return acc;
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_same_vars(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        check_same_vars(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    Polynomial& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_same_vars(b);
        Polynomial r(a.n_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
        return r;
    }

    bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

private:
    void check_same_vars(const Polynomial& o) const {
        if (n_ != o.n_) throw std::invalid_argument("Polynomial: variable count mismatch");
    }

    int n_ = 0;
    std::map<Exponent, double> terms_;
};

/// All exponent vectors with degree <= d in n variables, sorted; the full
/// basis has C(n+d, d) entries.
inline MonomialBasis monomials_up_to(int n, int d) {
    if (n < 1) throw std::invalid_argument("monomials_up_to: n must be >= 1");
    if (d < 0) throw std::invalid_argument("monomials_up_to: d must be >= 0");
    MonomialBasis basis;
    basis.n = n;
    std::vector<int> cur(n, 0);
    // Depth-first enumeration over remaining degree budget.
    auto rec = [&](auto&& self, int var, int budget) -> void {
        if (var == n) {
            basis.entries.emplace_back(cur);
            return;
        }
        for (int a = 0; a <= budget; ++a) {
            cur[var] = a;
            self(self, var + 1, budget - a);
        }
        cur[var] = 0;
    };
    rec(rec, 0, d);
    std::sort(basis.entries.begin(), basis.entries.end());
    return basis;
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
    return r;
}

namespace detail {

// Deterministic standard normals: Box-Muller on raw mt19937_64 draws. Avoids
// std::normal_distribution, whose output differs across standard libraries.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = unit();
        double u2 = unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double unit() {  // uniform in (0,1)
        return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t raw() { return rng_(); }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace detail

/// Random coercive instance p(x) = p0(x) + sum_i x_i^{2d}, where p0 carries a
/// standard-normal coefficient on every monomial of degree < 2d. Deterministic
/// per seed.
inline Polynomial random_pop_instance(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("random_pop_instance: need n >= 1, d >= 1");
    detail::NormalSampler normal(seed);
    Polynomial p(n);
    MonomialBasis low = monomials_up_to(n, 2 * d - 1);
    for (const Exponent& e : low.entries) p.add_term(e, normal());
    for (int i = 0; i < n; ++i) p.add_term(Exponent::unit(n, i, 2 * d), 1.0);
    return p;
}

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Text format, one term per line: "coefficient e1 e2 ... en" after a header
// line "vars n degree 2d". '#" starts a comment. Writer/parser round-trip
// bit-exactly for finite doubles.
inline std::string format_polynomial(const Polynomial& p) {
    std::string out = "vars " + std::to_string(p.vars()) + " degree " + std::to_string(p.degree()) + "\n";
    for (const auto& [e, c] : p.terms()) {
        out += detail::format_double(c);
        for (int i = 0; i < e.size(); ++i) out += " " + std::to_string(e[i]);
        out += "\n";
    }
    return out;
}

inline Polynomial read_polynomial(std::istream& in) {
    std::string line;
    int lineno = 0;
    int n = -1;
    Polynomial p;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (n < 0) {
            std::string kw1, kw2;
            int deg;
            if (!(ls >> kw1)) continue;  // blank/comment line before header
            if (!(ls >> n >> kw2 >> deg) || kw1 != "vars" || kw2 != "degree")
                throw ParseError(lineno, "expected header 'vars <n> degree <2d>'");
            if (n < 1) throw ParseError(lineno, "variable count must be >= 1");
            p = Polynomial(n);
            continue;
        }
        double c;
        if (!(ls >> c)) {
            std::string rest;
            if (ls.clear(), ls >> rest)
                throw ParseError(lineno, "expected a coefficient, got '" + rest + "'");
            continue;  // blank line
        }
        std::vector<int> alpha(n);
        for (int i = 0; i < n; ++i) {
            if (!(ls >> alpha[i])) throw ParseError(lineno, "expected " + std::to_string(n) + " exponents");
            if (alpha[i] < 0) throw ParseError(lineno, "negative exponent");
        }
        std::string extra;
        if (ls >> extra) throw ParseError(lineno, "trailing token '" + extra + "'");
        p.add_term(Exponent(std::move(alpha)), c);
    }
    if (n < 0) throw ParseError(lineno, "missing header line");
    return p;
}

inline Polynomial parse_polynomial(const std::string& text) {
    std::istringstream in(text);
    return read_polynomial(in);
}

inline Polynomial load_polynomial(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open polynomial file: " + path);
    return read_polynomial(in);
}

inline void save_polynomial(const Polynomial& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write polynomial file: " + path);
    out << format_polynomial(p);
}

}  // namespace soskit
