// Copyright 2026 The cornerdtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cornerdtc/errors.hpp"

namespace cornerdtc {

using cd = std::complex<double>;

/// Largest lattice a PauliString can address (one bit per site in each mask).
inline constexpr size_t kMaxPauliSites = 64;
/// Largest register a StateVector may hold (2^26 amplitudes = 1 GiB).
inline constexpr size_t kMaxStateSites = 26;

/// Exact global phase i^k of a Pauli string.
enum class Phase : uint8_t { kOne = 0, kI = 1, kMinusOne = 2, kMinusI = 3 };

inline constexpr Phase phase_from_quarter_turns(int k) {
    return static_cast<Phase>(((k % 4) + 4) % 4);
}
inline constexpr int quarter_turns(Phase p) {
    return static_cast<int>(p);
}
inline constexpr Phase operator*(Phase a, Phase b) {
    return phase_from_quarter_turns(quarter_turns(a) + quarter_turns(b));
}
inline cd phase_value(Phase p) {
    switch (p) {
        case Phase::kOne:
            return {1, 0};
        case Phase::kI:
            return {0, 1};
        case Phase::kMinusOne:
            return {-1, 0};
        case Phase::kMinusI:
            return {0, -1};
    }
    return {1, 0};
}

/// A signed tensor product of single-site Pauli operators.
///
/// Site s carries X when only bit s of x_mask is set, Z when only bit s of
/// z_mask is set and Y when both are. The stored operator is exactly
/// phase * (tensor product of the named Paulis).
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(size_t num_sites) : num_sites_(num_sites) {
        check_size(num_sites);
    }
    PauliString(size_t num_sites, uint64_t x_mask, uint64_t z_mask, Phase phase = Phase::kOne)
        : num_sites_(num_sites), x_(x_mask), z_(z_mask), phase_(phase) {
        check_size(num_sites);
        uint64_t allowed = num_sites == 64 ? ~uint64_t{0} : ((uint64_t{1} << num_sites) - 1);
        if ((x_mask | z_mask) & ~allowed) {
            throw DimensionMismatch("Pauli mask addresses a site outside the register");
        }
    }

    static PauliString single(size_t num_sites, size_t site, char pauli) {
        return from_sparse(num_sites, {{site, pauli}});
    }

    static PauliString from_sparse(size_t num_sites, std::initializer_list<std::pair<size_t, char>> ops) {
        return from_sparse(num_sites, std::span<const std::pair<size_t, char>>(ops.begin(), ops.size()));
    }

    /// Builds the product of the listed single-site operators. Repeated sites
    /// are multiplied in list order.
    static PauliString from_sparse(size_t num_sites, std::span<const std::pair<size_t, char>> ops) {
        PauliString out(num_sites);
        for (const auto &[site, pauli] : ops) {
            if (site >= num_sites) {
                throw DimensionMismatch("site " + std::to_string(site) + " out of range");
            }
            uint64_t bit = uint64_t{1} << site;
            PauliString factor(num_sites);
            switch (pauli) {
                case 'I':
                    break;
                case 'X':
                    factor.x_ = bit;
                    break;
                case 'Y':
                    factor.x_ = bit;
                    factor.z_ = bit;
                    break;
                case 'Z':
                    factor.z_ = bit;
                    break;
                default:
                    throw ParseError(std::string("unknown Pauli '") + pauli + "'");
            }
            out = out * factor;
        }
        return out;
    }

    /// Parses the sparse form produced by str(): optional sign prefix
    /// ("+", "-", "+i", "-i", "i"), then tokens like "X3" or "I".
    static PauliString parse(std::string_view text, size_t num_sites) {
        std::istringstream in{std::string(text)};
        std::string token;
        Phase phase = Phase::kOne;
        std::vector<std::pair<size_t, char>> ops;
        bool first = true;
        while (in >> token) {
            if (first) {
                first = false;
                size_t k = 0;
                if (token[k] == '+' || token[k] == '-') {
                    if (token[k] == '-') phase = Phase::kMinusOne;
                    ++k;
                }
                if (k < token.size() && token[k] == 'i') {
                    phase = phase * Phase::kI;
                    ++k;
                }
                token = token.substr(k);
                if (token.empty()) continue;
            }
            if (token == "I") continue;
            char p = token[0];
            if (token.size() < 2) throw ParseError("bad Pauli token '" + token + "'");
            size_t site = 0;
            try {
                size_t used = 0;
                site = std::stoul(token.substr(1), &used);
                if (used != token.size() - 1) throw ParseError("bad site index in '" + token + "'");
            } catch (const std::logic_error &) {
                throw ParseError("bad site index in '" + token + "'");
            }
            ops.emplace_back(site, p);
        }
        PauliString out = from_sparse(num_sites, ops);
        out.phase_ = out.phase_ * phase;
        return out;
    }

    size_t num_sites() const {
        return num_sites_;
    }
    uint64_t x_mask() const {
        return x_;
    }
    uint64_t z_mask() const {
        return z_;
    }
    Phase phase() const {
        return phase_;
    }
    size_t weight() const {
        return std::popcount(x_ | z_);
    }
    size_t num_y() const {
        return std::popcount(x_ & z_);
    }
    bool is_identity() const {
        return x_ == 0 && z_ == 0 && phase_ == Phase::kOne;
    }
    /// Hermitian iff the phase is real.
    bool is_hermitian() const {
        return phase_ == Phase::kOne || phase_ == Phase::kMinusOne;
    }

    char at(size_t site) const {
        bool x = (x_ >> site) & 1;
        bool z = (z_ >> site) & 1;
        return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
    }

    PauliString with_phase(Phase p) const {
        PauliString out = *this;
        out.phase_ = p;
        return out;
    }
    PauliString unsigned_part() const {
        return with_phase(Phase::kOne);
    }
    PauliString operator-() const {
        return with_phase(phase_ * Phase::kMinusOne);
    }

    /// Exact operator product, phase included.
    friend PauliString operator*(const PauliString &a, const PauliString &b) {
        if (a.num_sites_ != b.num_sites_) {
            throw DimensionMismatch("Pauli strings on different register sizes");
        }
        // Each single-site Pauli is i^{xz} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1.x2}.
        uint64_t x3 = a.x_ ^ b.x_;
        uint64_t z3 = a.z_ ^ b.z_;
        int k = std::popcount(a.x_ & a.z_) + std::popcount(b.x_ & b.z_) + 2 * std::popcount(a.z_ & b.x_) -
                std::popcount(x3 & z3);
        PauliString out(a.num_sites_);
        out.x_ = x3;
        out.z_ = z3;
        out.phase_ = a.phase_ * b.phase_ * phase_from_quarter_turns(k);
        return out;
    }

    bool operator==(const PauliString &other) const = default;

    /// Sparse text form, e.g. "+X0 Z6", "-iY3", "+I".
    std::string str() const {
        static constexpr const char *kSigns[] = {"+", "+i", "-", "-i"};
        std::string out = kSigns[quarter_turns(phase_)];
        if (x_ == 0 && z_ == 0) return out + "I";
        bool first = true;
        for (size_t s = 0; s < num_sites_; ++s) {
            char p = at(s);
            if (p == 'I') continue;
            if (!first) out += ' ';
            first = false;
            out += p;
            out += std::to_string(s);
        }
        return out;
    }

   private:
    static void check_size(size_t n) {
        if (n > kMaxPauliSites) {
            throw DimensionMismatch("at most 64 sites are supported, got " + std::to_string(n));
        }
    }

    size_t num_sites_ = 0;
    uint64_t x_ = 0;
    uint64_t z_ = 0;
    Phase phase_ = Phase::kOne;
};

inline PauliString multiply(const PauliString &a, const PauliString &b) {
    return a * b;
}

/// True iff the symplectic overlap of a and b is even.
inline bool commutes(const PauliString &a, const PauliString &b) {
    if (a.num_sites() != b.num_sites()) {
        throw DimensionMismatch("Pauli strings on different register sizes");
    }
    return (std::popcount((a.x_mask() & b.z_mask()) ^ (a.z_mask() & b.x_mask())) & 1) == 0;
}

struct PauliTerm {
    double coefficient;
    PauliString op;  // phase is always +1 once stored
};

/// Real-weighted sum of Hermitian Pauli strings.
///
/// Terms keep first-insertion order; adding an existing string accumulates its
/// coefficient. Signs of +-1-phased strings are folded into the coefficient.
class OperatorSum {
   public:
    OperatorSum() = default;
    explicit OperatorSum(size_t num_sites) : num_sites_(num_sites) {
    }

    size_t num_sites() const {
        return num_sites_;
    }
    const std::vector<PauliTerm> &terms() const {
        return terms_;
    }
    size_t size() const {
        return terms_.size();
    }
    bool empty() const {
        return terms_.empty();
    }

    void add(double coefficient, const PauliString &op) {
        if (op.num_sites() != num_sites_) {
            throw DimensionMismatch("term has " + std::to_string(op.num_sites()) + " sites, sum has " +
                                    std::to_string(num_sites_));
        }
        if (!op.is_hermitian()) {
            throw NonHermitianResidual("OperatorSum terms must be Hermitian, got " + op.str());
        }
        if (!std::isfinite(coefficient)) {
            throw Error("non-finite coefficient for " + op.str());
        }
        if (op.phase() == Phase::kMinusOne) coefficient = -coefficient;
        Key key{op.x_mask(), op.z_mask()};
        auto it = index_.find(key);
        if (it != index_.end()) {
            terms_[it->second].coefficient += coefficient;
            return;
        }
        index_.emplace(key, terms_.size());
        terms_.push_back({coefficient, op.unsigned_part()});
    }

    OperatorSum &operator+=(const OperatorSum &other) {
        for (const auto &t : other.terms_) add(t.coefficient, t.op);
        return *this;
    }
    friend OperatorSum operator+(OperatorSum a, const OperatorSum &b) {
        a += b;
        return a;
    }
    friend OperatorSum operator*(double s, const OperatorSum &a) {
        OperatorSum out(a.num_sites_);
        for (const auto &t : a.terms_) out.add(s * t.coefficient, t.op);
        return out;
    }

    /// Copy with terms below `drop` in magnitude removed.
    OperatorSum canonicalized(double drop = 1e-14) const {
        OperatorSum out(num_sites_);
        for (const auto &t : terms_) {
            if (t.coefficient != 0 && std::abs(t.coefficient) >= drop) out.add(t.coefficient, t.op);
        }
        return out;
    }

    double coefficient_of(const PauliString &op) const {
        auto it = index_.find(Key{op.x_mask(), op.z_mask()});
        if (it == index_.end()) return 0.0;
        double c = terms_[it->second].coefficient;
        return op.phase() == Phase::kMinusOne ? -c : c;
    }

    bool commutes_with(const PauliString &p) const {
        for (const auto &t : terms_) {
            if (!commutes(t.op, p)) return false;
        }
        return true;
    }

    /// One term per line: "<coef> * <paulis>", e.g. "0.31 * X3 X7".
    std::string str() const {
        std::string out;
        char buf[64];
        for (const auto &t : terms_) {
            std::snprintf(buf, sizeof(buf), "%.17g", t.coefficient);
            out += buf;
            out += " * ";
            out += t.op.str().substr(1);
            out += '\n';
        }
        return out;
    }

    static OperatorSum parse(std::string_view text, size_t num_sites) {
        OperatorSum out(num_sites);
        std::istringstream in{std::string(text)};
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto star = line.find('*');
            if (star == std::string::npos) {
                throw ParseError("line " + std::to_string(line_no) + ": expected '<coef> * <paulis>'");
            }
            double c = 0;
            try {
                c = std::stod(line.substr(0, star));
            } catch (const std::logic_error &) {
                throw ParseError("line " + std::to_string(line_no) + ": bad coefficient");
            }
            out.add(c, PauliString::parse(line.substr(star + 1), num_sites));
        }
        return out;
    }

   private:
    struct Key {
        uint64_t x, z;
        bool operator==(const Key &) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key &k) const {
            return std::hash<uint64_t>()(k.x * 0x9E3779B97F4A7C15ull ^ k.z);
        }
    };

    size_t num_sites_ = 0;
    std::vector<PauliTerm> terms_;
    std::unordered_map<Key, size_t, KeyHash> index_;
};

/// C with [a, b] = i C. C is Hermitian, so it is again an OperatorSum.
inline OperatorSum commutator_over_i(const OperatorSum &a, const OperatorSum &b) {
    if (a.num_sites() != b.num_sites()) throw DimensionMismatch("commutator of operators on different registers");
    OperatorSum out(a.num_sites());
    for (const auto &ta : a.terms()) {
        for (const auto &tb : b.terms()) {
            if (commutes(ta.op, tb.op)) continue;
            // Anticommuting Hermitian strings multiply to +-i times a Hermitian string.
            PauliString p = ta.op * tb.op;
            double sign = p.phase() == Phase::kI ? 1.0 : -1.0;
            out.add(2.0 * sign * ta.coefficient * tb.coefficient, p.with_phase(Phase::kOne));
        }
    }
    return out.canonicalized(0.0);
}

/// Frobenius norm, exact in the Pauli basis: ||sum_k c_k P_k||_F^2 = 2^N sum_k c_k^2.
inline double frobenius_norm(const OperatorSum &op) {
    double s = 0;
    for (const auto &t : op.terms()) s += t.coefficient * t.coefficient;
    return std::sqrt(s * std::ldexp(1.0, static_cast<int>(op.num_sites())));
}

inline double commutator_frobenius_norm(const OperatorSum &a, const OperatorSum &b) {
    return frobenius_norm(commutator_over_i(a, b));
}

/// Complex amplitudes over the 2^N computational basis. Bit s of a basis
/// index is site s; bit value 0 is spin up (Z = +1).
class StateVector {
   public:
    StateVector() = default;
    /// |0...0>, all spins up.
    explicit StateVector(size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits > kMaxStateSites) {
            throw DimensionMismatch("state vectors are limited to " + std::to_string(kMaxStateSites) + " sites");
        }
        amps_.assign(size_t{1} << num_qubits, cd{0, 0});
        amps_[0] = 1;
    }

    static StateVector basis_state(size_t num_qubits, uint64_t index) {
        StateVector v(num_qubits);
        if (index >= v.dimension()) throw DimensionMismatch("basis index out of range");
        v.amps_[0] = 0;
        v.amps_[index] = 1;
        return v;
    }

    static StateVector from_amplitudes(size_t num_qubits, std::vector<cd> amps) {
        StateVector v(num_qubits);
        if (amps.size() != v.dimension()) throw DimensionMismatch("amplitude count does not match 2^N");
        v.amps_ = std::move(amps);
        return v;
    }

    static StateVector zeros(size_t num_qubits) {
        StateVector v(num_qubits);
        v.amps_[0] = 0;
        return v;
    }

    /// Normalized complex Gaussian vector (Haar-distributed direction).
    static StateVector random(size_t num_qubits, std::mt19937_64 &rng) {
        StateVector v(num_qubits);
        std::normal_distribution<double> g;
        for (auto &a : v.amps_) a = cd(g(rng), g(rng));
        v.normalize();
        return v;
    }

    size_t num_qubits() const {
        return num_qubits_;
    }
    size_t dimension() const {
        return amps_.size();
    }
    std::span<cd> amplitudes() {
        return amps_;
    }
    std::span<const cd> amplitudes() const {
        return amps_;
    }
    cd &operator[](size_t i) {
        return amps_[i];
    }
    const cd &operator[](size_t i) const {
        return amps_[i];
    }

    double norm() const {
        double s = 0;
        for (const auto &a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }
    void normalize() {
        double n = norm();
        if (n == 0) throw Error("cannot normalize the zero vector");
        for (auto &a : amps_) a /= n;
    }

    /// <this|other>
    cd inner(const StateVector &other) const {
        check_same(other);
        cd s = 0;
        for (size_t i = 0; i < amps_.size(); ++i) s += std::conj(amps_[i]) * other.amps_[i];
        return s;
    }

    void axpy(cd alpha, const StateVector &x) {
        check_same(x);
        for (size_t i = 0; i < amps_.size(); ++i) amps_[i] += alpha * x.amps_[i];
    }
    void scale(cd alpha) {
        for (auto &a : amps_) a *= alpha;
    }

    void check_same(const StateVector &other) const {
        if (other.num_qubits_ != num_qubits_) {
            throw DimensionMismatch("state vectors of " + std::to_string(num_qubits_) + " and " +
                                    std::to_string(other.num_qubits_) + " sites");
        }
    }

   private:
    size_t num_qubits_ = 0;
    std::vector<cd> amps_;
};

/// Pre-grouped form of an OperatorSum for repeated matrix-free application.
///
/// Terms sharing an X mask are applied together: out[b] = sum over groups of
/// sum_t f_t (-1)^{|(b^x) & z_t|} in[b^x].
class CompiledOperator {
   public:
    CompiledOperator() = default;
    explicit CompiledOperator(const OperatorSum &op) : num_sites_(op.num_sites()) {
        std::unordered_map<uint64_t, size_t> group_of;
        for (const auto &t : op.terms()) {
            if (t.coefficient == 0) continue;
            auto [it, inserted] = group_of.emplace(t.op.x_mask(), groups_.size());
            if (inserted) groups_.push_back({t.op.x_mask(), {}});
            // P|b> = i^{#Y} (-1)^{|b & z|} |b ^ x>
            cd f = t.coefficient * phase_value(phase_from_quarter_turns(static_cast<int>(t.op.num_y())));
            groups_[it->second].terms.push_back({t.op.z_mask(), f});
        }
    }

    size_t num_sites() const {
        return num_sites_;
    }

    /// out = H in. `out` must not alias `in`. Each output amplitude is reduced
    /// in a fixed term order, so the result does not depend on `workers`.
    void apply(std::span<const cd> in, std::span<cd> out, size_t workers = 1) const {
        if (in.size() != out.size() || in.size() != (size_t{1} << num_sites_)) {
            throw DimensionMismatch("operator on " + std::to_string(num_sites_) + " sites applied to vector of size " +
                                    std::to_string(in.size()));
        }
        const size_t dim = in.size();
        workers = std::max<size_t>(1, std::min<size_t>(workers, dim / 4096 + 1));
        if (workers == 1) {
            apply_range(in, out, 0, dim);
            return;
        }
        std::vector<std::thread> pool;
        size_t chunk = (dim + workers - 1) / workers;
        for (size_t w = 0; w < workers; ++w) {
            size_t lo = w * chunk, hi = std::min(dim, lo + chunk);
            if (lo < hi) pool.emplace_back([&, lo, hi] { apply_range(in, out, lo, hi); });
        }
        for (auto &t : pool) t.join();
    }

    StateVector apply(const StateVector &v, size_t workers = 1) const {
        StateVector out = StateVector::zeros(v.num_qubits());
        apply(v.amplitudes(), out.amplitudes(), workers);
        return out;
    }

   private:
    void apply_range(std::span<const cd> in, std::span<cd> out, size_t lo, size_t hi) const {
        for (size_t b = lo; b < hi; ++b) {
            cd acc = 0;
            for (const auto &g : groups_) {
                uint64_t src = b ^ g.x;
                cd a = in[src];
                double wr = 0, wi = 0;
                for (const auto &t : g.terms) {
                    double s = 1.0 - 2.0 * static_cast<double>(std::popcount(src & t.z) & 1);
                    wr += s * t.f.real();
                    wi += s * t.f.imag();
                }
                acc += cd(wr, wi) * a;
            }
            out[b] = acc;
        }
    }

    struct Term {
        uint64_t z;
        cd f;
    };
    struct Group {
        uint64_t x;
        std::vector<Term> terms;
    };
    size_t num_sites_ = 0;
    std::vector<Group> groups_;
};

/// op * v, matrix-free; linear and unnormalized.
inline StateVector apply(const OperatorSum &op, const StateVector &v) {
    if (op.num_sites() != v.num_qubits()) {
        throw DimensionMismatch("operator has " + std::to_string(op.num_sites()) + " sites, state has " +
                                std::to_string(v.num_qubits()));
    }
    return CompiledOperator(op).apply(v);
}

/// p * v for a single Pauli string (a signed permutation).
inline StateVector apply(const PauliString &p, const StateVector &v) {
    if (p.num_sites() != v.num_qubits()) {
        throw DimensionMismatch("Pauli string has " + std::to_string(p.num_sites()) + " sites, state has " +
                                std::to_string(v.num_qubits()));
    }
    StateVector out = StateVector::zeros(v.num_qubits());
    const cd f = phase_value(p.phase() * phase_from_quarter_turns(static_cast<int>(p.num_y())));
    const uint64_t x = p.x_mask(), z = p.z_mask();
    auto in = v.amplitudes();
    auto o = out.amplitudes();
    for (size_t b = 0; b < in.size(); ++b) {
        o[b ^ x] = (std::popcount(b & z) & 1) ? -f * in[b] : f * in[b];
    }
    return out;
}

/// Re<v|op|v>. Raises NonHermitianResidual when the imaginary part exceeds 1e-10.
inline double expectation(const OperatorSum &op, const StateVector &v) {
    StateVector w = apply(op, v);
    cd e = v.inner(w);
    if (std::abs(e.imag()) > 1e-10) {
        throw NonHermitianResidual("imaginary expectation residual " + std::to_string(e.imag()));
    }
    return e.real();
}

inline double expectation(const PauliString &p, const StateVector &v) {
    cd e = v.inner(apply(p, v));
    if (std::abs(e.imag()) > 1e-10) {
        throw NonHermitianResidual("imaginary expectation residual " + std::to_string(e.imag()));
    }
    return e.real();
}

}  // namespace cornerdtc
