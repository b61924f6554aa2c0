#include "mave/jetpoly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "mave/errors.hpp"

namespace mave {

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << '[' << t << ',' << z1 << ',' << z2 << ']';
    return os.str();
}

std::string JetCoordinate::name() const {
    return (field == Field::U ? "u" : "v") + order.str();
}

Ring::Ring(std::vector<std::string> params) : params_(std::move(params)) {
    for (std::size_t i = 0; i < params_.size(); ++i)
        for (std::size_t j = i + 1; j < params_.size(); ++j)
            if (params_[i] == params_[j])
                throw ValidationError("duplicate ring parameter '" + params_[i] + "'");
}

const std::shared_ptr<const Ring>& Ring::standard() {
    static const std::shared_ptr<const Ring> r =
        std::make_shared<const Ring>(std::vector<std::string>{"lambda", "s0"});
    return r;
}

int Ring::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i] == name)
            return int(i);
    return -1;
}

int Monomial::jet_degree(Field f) const {
    int d = 0;
    for (const auto& [jc, e] : jets)
        if (jc.field == f)
            d += int(e);
    return d;
}

int Monomial::jet_degree() const {
    return jet_degree(Field::U) + jet_degree(Field::V);
}

int Monomial::compare_key(const Monomial& a, const Monomial& b) {
    if (a.jets != b.jets)
        return a.jets < b.jets ? -1 : 1;
    if (a.z != b.z)
        return a.z < b.z ? -1 : 1;
    if (a.params != b.params)
        return a.params < b.params ? -1 : 1;
    return 0;
}

void JetPolynomial::check_ring(const JetPolynomial& o) const {
    if (ring_ == o.ring_)
        return;
    if (!(*ring_ == *o.ring_))
        throw RingMismatchError("operands belong to different ring instances");
}

void JetPolynomial::normalize(std::vector<Monomial>& ts) {
    std::sort(ts.begin(), ts.end(),
              [](const Monomial& a, const Monomial& b) { return Monomial::compare_key(a, b) < 0; });
    std::vector<Monomial> out;
    out.reserve(ts.size());
    for (auto& m : ts) {
        if (!out.empty() && Monomial::compare_key(out.back(), m) == 0)
            out.back().coeff += m.coeff;
        else
            out.push_back(std::move(m));
        if (!out.empty() && out.back().coeff == 0)
            out.pop_back();
    }
    ts = std::move(out);
}

JetPolynomial JetPolynomial::constant(const Rational& c, std::shared_ptr<const Ring> ring) {
    JetPolynomial p(std::move(ring));
    if (c != 0)
        p.terms_.push_back(Monomial{c, {}, {0, 0}, {}});
    return p;
}

JetPolynomial JetPolynomial::coordinate(const JetCoordinate& jc, std::shared_ptr<const Ring> ring) {
    JetPolynomial p(std::move(ring));
    p.terms_.push_back(Monomial{Rational(1), {{jc, 1}}, {0, 0}, {}});
    return p;
}

JetPolynomial JetPolynomial::zvar(int which, std::shared_ptr<const Ring> ring) {
    if (which != 1 && which != 2)
        throw ValidationError("zvar index must be 1 or 2");
    JetPolynomial p(std::move(ring));
    Monomial m{Rational(1), {}, {0, 0}, {}};
    m.z[which - 1] = 1;
    p.terms_.push_back(std::move(m));
    return p;
}

JetPolynomial JetPolynomial::parameter(std::string_view name, std::shared_ptr<const Ring> ring) {
    const int idx = ring->index_of(name);
    if (idx < 0)
        throw RingMismatchError("parameter '" + std::string(name) + "' not in ring");
    JetPolynomial p(std::move(ring));
    p.terms_.push_back(Monomial{Rational(1), {}, {0, 0}, {{std::uint16_t(idx), 1}}});
    return p;
}

bool JetPolynomial::is_constant() const {
    if (terms_.empty())
        return true;
    return terms_.size() == 1 && terms_[0].jets.empty() && terms_[0].z == std::array<std::uint32_t, 2>{0, 0} &&
           terms_[0].params.empty();
}

Rational JetPolynomial::constant_value() const {
    if (terms_.empty())
        return Rational(0);
    if (!is_constant())
        throw ValidationError("polynomial is not constant: " + str());
    return terms_[0].coeff;
}

bool JetPolynomial::operator==(const JetPolynomial& o) const {
    check_ring(o);
    if (terms_.size() != o.terms_.size())
        return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].coeff != o.terms_[i].coeff || Monomial::compare_key(terms_[i], o.terms_[i]) != 0)
            return false;
    return true;
}

JetPolynomial JetPolynomial::operator-() const {
    JetPolynomial r = *this;
    for (auto& m : r.terms_)
        m.coeff = -m.coeff;
    return r;
}

JetPolynomial& JetPolynomial::operator+=(const JetPolynomial& o) {
    check_ring(o);
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize(terms_);
    return *this;
}

JetPolynomial& JetPolynomial::operator-=(const JetPolynomial& o) {
    return *this += -o;
}

namespace {

template <typename K>
void merge_powers(std::vector<std::pair<K, std::uint32_t>>& dst,
                  const std::vector<std::pair<K, std::uint32_t>>& src) {
    std::vector<std::pair<K, std::uint32_t>> out;
    out.reserve(dst.size() + src.size());
    std::size_t i = 0, j = 0;
    while (i < dst.size() && j < src.size()) {
        if (dst[i].first < src[j].first)
            out.push_back(dst[i++]);
        else if (src[j].first < dst[i].first)
            out.push_back(src[j++]);
        else {
            out.emplace_back(dst[i].first, dst[i].second + src[j].second);
            ++i;
            ++j;
        }
    }
    for (; i < dst.size(); ++i)
        out.push_back(dst[i]);
    for (; j < src.size(); ++j)
        out.push_back(src[j]);
    dst = std::move(out);
}

} // namespace

JetPolynomial operator*(const JetPolynomial& a, const JetPolynomial& b) {
    a.check_ring(b);
    JetPolynomial r(a.ring_);
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ma : a.terms_) {
        for (const auto& mb : b.terms_) {
            Monomial m;
            m.coeff = ma.coeff * mb.coeff;
            m.jets = ma.jets;
            merge_powers(m.jets, mb.jets);
            m.z = {ma.z[0] + mb.z[0], ma.z[1] + mb.z[1]};
            m.params = ma.params;
            merge_powers(m.params, mb.params);
            r.terms_.push_back(std::move(m));
        }
    }
    JetPolynomial::normalize(r.terms_);
    return r;
}

JetPolynomial operator*(const Rational& c, const JetPolynomial& p) {
    if (c == 0)
        return JetPolynomial(p.ring_);
    JetPolynomial r = p;
    for (auto& m : r.terms_)
        m.coeff *= c;
    return r;
}

JetPolynomial JetPolynomial::pow(unsigned e) const {
    JetPolynomial r = constant(Rational(1), ring_);
    for (unsigned i = 0; i < e; ++i)
        r *= *this;
    return r;
}

JetPolynomial JetPolynomial::total_derivative(Axis ax) const {
    JetPolynomial r(ring_);
    for (const auto& m : terms_) {
        // Leibniz over jet factors.
        for (std::size_t k = 0; k < m.jets.size(); ++k) {
            Monomial d = m;
            const auto [jc, e] = m.jets[k];
            d.coeff *= long(e);
            if (e == 1)
                d.jets.erase(d.jets.begin() + long(k));
            else
                d.jets[k].second = e - 1;
            JetCoordinate bumped{jc.field, jc.order.bumped(ax)};
            merge_powers(d.jets, {{bumped, 1u}});
            r.terms_.push_back(std::move(d));
        }
        // Explicit z dependence.
        if (ax != Axis::T) {
            const int zi = (ax == Axis::Z1) ? 0 : 1;
            if (m.z[zi] > 0) {
                Monomial d = m;
                d.coeff *= long(m.z[zi]);
                d.z[zi] -= 1;
                r.terms_.push_back(std::move(d));
            }
        }
    }
    normalize(r.terms_);
    return r;
}

JetPolynomial JetPolynomial::total_derivative(const MultiIndex& word) const {
    JetPolynomial r = *this;
    for (int i = 0; i < word.t; ++i)
        r = r.total_derivative(Axis::T);
    for (int i = 0; i < word.z1; ++i)
        r = r.total_derivative(Axis::Z1);
    for (int i = 0; i < word.z2; ++i)
        r = r.total_derivative(Axis::Z2);
    return r;
}

JetPolynomial JetPolynomial::partial(const JetCoordinate& jc) const {
    JetPolynomial r(ring_);
    for (const auto& m : terms_) {
        for (std::size_t k = 0; k < m.jets.size(); ++k) {
            if (m.jets[k].first != jc)
                continue;
            Monomial d = m;
            const std::uint32_t e = m.jets[k].second;
            d.coeff *= long(e);
            if (e == 1)
                d.jets.erase(d.jets.begin() + long(k));
            else
                d.jets[k].second = e - 1;
            r.terms_.push_back(std::move(d));
            break;
        }
    }
    normalize(r.terms_);
    return r;
}

bool JetPolynomial::contains(const JetCoordinate& jc) const {
    for (const auto& m : terms_)
        for (const auto& [c, e] : m.jets)
            if (c == jc)
                return true;
    return false;
}

std::vector<JetCoordinate> JetPolynomial::coordinates(Field f) const {
    std::vector<JetCoordinate> out;
    for (const auto& m : terms_)
        for (const auto& [c, e] : m.jets)
            if (c.field == f)
                out.push_back(c);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<JetCoordinate> JetPolynomial::coordinates() const {
    auto out = coordinates(Field::U);
    auto vs = coordinates(Field::V);
    out.insert(out.end(), vs.begin(), vs.end());
    return out;
}

bool JetPolynomial::has_z() const {
    for (const auto& m : terms_)
        if (m.z[0] > 0 || m.z[1] > 0)
            return true;
    return false;
}

bool JetPolynomial::has_params() const {
    for (const auto& m : terms_)
        if (!m.params.empty())
            return true;
    return false;
}

int JetPolynomial::max_t_order(Field f) const {
    int mo = -1;
    for (const auto& m : terms_)
        for (const auto& [c, e] : m.jets)
            if (c.field == f)
                mo = std::max(mo, int(c.order.t));
    return mo;
}

JetPolynomial JetPolynomial::lambda_component(unsigned k) const {
    const int idx = ring_->index_of("lambda");
    if (idx < 0)
        throw RingMismatchError("ring has no 'lambda' parameter");
    JetPolynomial r(ring_);
    for (const auto& m : terms_) {
        unsigned deg = 0;
        for (const auto& [pi, e] : m.params)
            if (int(pi) == idx)
                deg = e;
        if (deg != k)
            continue;
        Monomial d = m;
        std::erase_if(d.params, [&](const auto& pe) { return pe.first == idx; });
        r.terms_.push_back(std::move(d));
    }
    normalize(r.terms_);
    return r;
}

unsigned JetPolynomial::lambda_degree() const {
    const int idx = ring_->index_of("lambda");
    unsigned deg = 0;
    for (const auto& m : terms_)
        for (const auto& [pi, e] : m.params)
            if (int(pi) == idx)
                deg = std::max(deg, e);
    return deg;
}

// ---------------------------------------------------------------------------
// Printing

std::string JetPolynomial::str() const {
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& m : terms_) {
        const bool neg = m.coeff < 0;
        Rational mag = neg ? Rational(-m.coeff) : m.coeff;
        if (first) {
            if (neg)
                os << '-';
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        std::vector<std::string> factors;
        const bool bare = m.jets.empty() && m.z[0] == 0 && m.z[1] == 0 && m.params.empty();
        if (mag != 1 || bare)
            factors.push_back(to_string(mag));
        for (const auto& [jc, e] : m.jets) {
            std::string f = jc.name();
            if (e > 1)
                f += "^" + std::to_string(e);
            factors.push_back(std::move(f));
        }
        for (int zi = 0; zi < 2; ++zi) {
            if (m.z[zi] > 0) {
                std::string f = zi == 0 ? "z1" : "z2";
                if (m.z[zi] > 1)
                    f += "^" + std::to_string(m.z[zi]);
                factors.push_back(std::move(f));
            }
        }
        for (const auto& [pi, e] : m.params) {
            std::string f = ring_->param_name(pi);
            if (e > 1)
                f += "^" + std::to_string(e);
            factors.push_back(std::move(f));
        }
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i)
                os << '*';
            os << factors[i];
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Parsing (grammar of str(): sum of products of signed factors)

namespace {

struct Lexer {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c))
            throw ValidationError(std::string("parse error: expected '") + c + "' at offset " +
                                  std::to_string(pos) + " in polynomial text");
    }
    long integer() {
        skip_ws();
        bool neg = accept('-');
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
            ++pos;
        if (pos == start)
            throw ValidationError("parse error: expected integer at offset " + std::to_string(pos));
        long v = std::stol(std::string(s.substr(start, pos - start)));
        return neg ? -v : v;
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (pos == start)
            throw ValidationError("parse error: expected identifier at offset " +
                                  std::to_string(pos));
        return std::string(s.substr(start, pos - start));
    }
};

} // namespace

JetPolynomial JetPolynomial::parse(std::string_view text, std::shared_ptr<const Ring> ring) {
    Lexer lx{text};
    JetPolynomial result(ring);
    bool first_term = true;
    while (!lx.eof()) {
        int sign = 1;
        if (lx.accept('-'))
            sign = -1;
        else if (lx.accept('+'))
            sign = 1;
        else if (!first_term)
            throw ValidationError("parse error: expected '+' or '-' between terms");
        first_term = false;

        JetPolynomial term = constant(Rational(sign), ring);
        bool expect_factor = true;
        while (expect_factor) {
            JetPolynomial factor(ring);
            char c = lx.peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                long num = lx.integer();
                if (lx.accept('/')) {
                    long den = lx.integer();
                    factor = constant(rat(num, den), ring);
                } else {
                    factor = constant(rat(num), ring);
                }
            } else {
                std::string id = lx.ident();
                if ((id == "u" || id == "v") && lx.peek() == '[') {
                    lx.expect('[');
                    long t = lx.integer();
                    lx.expect(',');
                    long d1 = lx.integer();
                    lx.expect(',');
                    long d2 = lx.integer();
                    lx.expect(']');
                    JetCoordinate jc{id == "u" ? Field::U : Field::V,
                                     MultiIndex{std::uint16_t(t), std::uint16_t(d1),
                                                std::uint16_t(d2)}};
                    factor = coordinate(jc, ring);
                } else if (id == "z1") {
                    factor = zvar(1, ring);
                } else if (id == "z2") {
                    factor = zvar(2, ring);
                } else {
                    factor = parameter(id, ring);
                }
            }
            if (lx.accept('^')) {
                long e = lx.integer();
                if (e < 0)
                    throw ValidationError("parse error: negative exponent");
                factor = factor.pow(unsigned(e));
            }
            term *= factor;
            expect_factor = lx.accept('*');
        }
        result += term;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

// With prolong, a coordinate matches a key when it is a derivative
// prolongation of it (same field, componentwise >= multi-index).
bool rule_matches(const JetCoordinate& coord, const JetCoordinate& key, bool prolong) {
    if (coord.field != key.field)
        return false;
    if (prolong)
        return coord.order.covers(key.order);
    return coord.order == key.order;
}

} // namespace

JetPolynomial JetPolynomial::substitute(const Substitution& s) const {
    for (std::size_t i = 0; i < s.jets.size(); ++i)
        for (std::size_t j = i + 1; j < s.jets.size(); ++j)
            if (s.jets[i].key == s.jets[j].key)
                throw ValidationError("substitution keys must be distinct");
    // A rule whose right side contains (a prolongation match of) its own key
    // can never terminate.
    for (const auto& r : s.jets)
        for (const auto& c : r.value.coordinates())
            if (rule_matches(c, r.key, s.prolong))
                throw CycleError("substitution rule for " + r.key.name() +
                                 " reintroduces its own key");
    for (const auto& r : s.params)
        if (!r.value.is_zero() && r.value.ring()->index_of(r.name) >= 0) {
            for (const auto& m : r.value.terms())
                for (const auto& [pi, e] : m.params)
                    if (r.value.ring()->param_name(pi) == r.name)
                        throw CycleError("parameter rule for " + r.name +
                                         " reintroduces its own key");
        }

    JetPolynomial cur = *this;
    // Prolonged replacements D^beta(value) are shared across occurrences.
    std::map<std::pair<std::size_t, JetCoordinate>, JetPolynomial> repl_cache;
    const int max_rounds = 256;
    for (int round = 0; round < max_rounds; ++round) {
        bool changed = false;
        std::vector<Monomial> out;
        out.reserve(cur.terms_.size());
        for (const auto& m : cur.terms_) {
            std::size_t jet_rule = s.jets.size(), jet_pos = 0;
            for (std::size_t k = 0; k < m.jets.size() && jet_rule == s.jets.size(); ++k)
                for (std::size_t ri = 0; ri < s.jets.size(); ++ri)
                    if (rule_matches(m.jets[k].first, s.jets[ri].key, s.prolong)) {
                        jet_rule = ri;
                        jet_pos = k;
                        break;
                    }
            bool param_hit = false;
            for (const auto& [pi, e] : m.params)
                for (const auto& r : s.params)
                    if (ring_->param_name(pi) == r.name)
                        param_hit = true;
            if (jet_rule == s.jets.size() && !param_hit) {
                out.push_back(m); // untouched monomial
                continue;
            }
            changed = true;
            JetPolynomial piece = constant(m.coeff, ring_);
            {
                Monomial shell;
                shell.coeff = Rational(1);
                shell.z = m.z;
                JetPolynomial sp(ring_);
                sp.terms_.push_back(std::move(shell));
                piece *= sp;
            }
            for (const auto& [pi, e] : m.params) {
                const std::string& pname = ring_->param_name(pi);
                const JetPolynomial* rule = nullptr;
                for (const auto& r : s.params)
                    if (r.name == pname)
                        rule = &r.value;
                piece *= (rule ? *rule : parameter(pname, ring_)).pow(e);
            }
            for (std::size_t k = 0; k < m.jets.size(); ++k) {
                const auto& [jc, e] = m.jets[k];
                if (k == jet_pos && jet_rule < s.jets.size()) {
                    auto key = std::pair(jet_rule, jc);
                    auto it = repl_cache.find(key);
                    if (it == repl_cache.end()) {
                        JetPolynomial repl = s.jets[jet_rule].value.total_derivative(
                            jc.order.minus(s.jets[jet_rule].key.order));
                        it = repl_cache.emplace(key, std::move(repl)).first;
                    }
                    piece *= it->second.pow(e);
                } else {
                    piece *= coordinate(jc, ring_).pow(e);
                }
            }
            out.insert(out.end(), piece.terms_.begin(), piece.terms_.end());
        }
        if (!changed)
            return cur;
        normalize(out);
        cur.terms_ = std::move(out);
    }
    throw CycleError("substitution did not reach a fixpoint");
}

JetPolynomial JetPolynomial::substitute_jet(const JetCoordinate& key, const JetPolynomial& value,
                                            bool prolong) const {
    Substitution s;
    s.jets.push_back({key, value});
    s.prolong = prolong;
    return substitute(s);
}

// ---------------------------------------------------------------------------
// Builders

namespace jets {

JetCoordinate uc(int t, int z1, int z2) {
    return JetCoordinate{Field::U,
                         MultiIndex{std::uint16_t(t), std::uint16_t(z1), std::uint16_t(z2)}};
}

JetCoordinate vc(int t, int z1, int z2) {
    return JetCoordinate{Field::V,
                         MultiIndex{std::uint16_t(t), std::uint16_t(z1), std::uint16_t(z2)}};
}

JetPolynomial u(int t, int z1, int z2) {
    return JetPolynomial::coordinate(uc(t, z1, z2));
}

JetPolynomial v(int t, int z1, int z2) {
    return JetPolynomial::coordinate(vc(t, z1, z2));
}

JetPolynomial z1() {
    return JetPolynomial::zvar(1);
}
JetPolynomial z2() {
    return JetPolynomial::zvar(2);
}
JetPolynomial lam() {
    return JetPolynomial::parameter("lambda");
}
JetPolynomial s0() {
    return JetPolynomial::parameter("s0");
}
JetPolynomial num(long n, long d) {
    return JetPolynomial::constant(rat(n, d));
}

} // namespace jets

} // namespace mave
