#include "mave/diffop.hpp"

#include <algorithm>
#include <sstream>

#include "mave/errors.hpp"

namespace mave {

namespace {

unsigned long binom(unsigned n, unsigned k) {
    if (k > n)
        return 0;
    unsigned long r = 1;
    for (unsigned i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

Rational multi_binom(const MultiIndex& a, const MultiIndex& g) {
    return Rational(long(binom(a.t, g.t) * binom(a.z1, g.z1) * binom(a.z2, g.z2)));
}

} // namespace

LocalOperator LocalOperator::identity(std::shared_ptr<const Ring> ring) {
    LocalOperator op(ring);
    op.add_term(JetPolynomial::constant(Rational(1), ring), MultiIndex{});
    return op;
}

LocalOperator LocalOperator::derivative(const MultiIndex& word,
                                        std::shared_ptr<const Ring> ring) {
    LocalOperator op(ring);
    op.add_term(JetPolynomial::constant(Rational(1), ring), word);
    return op;
}

LocalOperator LocalOperator::derivative(Axis ax, std::shared_ptr<const Ring> ring) {
    return derivative(MultiIndex{}.bumped(ax), std::move(ring));
}

LocalOperator LocalOperator::multiplication(const JetPolynomial& p) {
    LocalOperator op(p.ring());
    op.add_term(p, MultiIndex{});
    return op;
}

LocalOperator LocalOperator::term(const JetPolynomial& coeff, const MultiIndex& word) {
    LocalOperator op(coeff.ring());
    op.add_term(coeff, word);
    return op;
}

void LocalOperator::add_term(const JetPolynomial& coeff, const MultiIndex& word) {
    if (coeff.is_zero())
        return;
    auto it = terms_.find(word);
    if (it == terms_.end()) {
        terms_.emplace(word, coeff);
    } else {
        it->second += coeff;
        if (it->second.is_zero())
            terms_.erase(it);
    }
}

JetPolynomial LocalOperator::coefficient(const MultiIndex& word) const {
    auto it = terms_.find(word);
    return it == terms_.end() ? JetPolynomial(ring_) : it->second;
}

bool LocalOperator::is_constant_coefficient() const {
    for (const auto& [w, p] : terms_)
        if (!p.coordinates().empty() || p.has_z())
            return false;
    return true;
}

int LocalOperator::max_order() const {
    int m = 0;
    for (const auto& [w, p] : terms_)
        m = std::max(m, w.total());
    return m;
}

bool LocalOperator::operator==(const LocalOperator& o) const {
    if (terms_.size() != o.terms_.size())
        return false;
    auto it = terms_.begin();
    auto jt = o.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt)
        if (it->first != jt->first || !(it->second == jt->second))
            return false;
    return true;
}

LocalOperator LocalOperator::operator-() const {
    LocalOperator r(ring_);
    for (const auto& [w, p] : terms_)
        r.terms_.emplace(w, -p);
    return r;
}

LocalOperator& LocalOperator::operator+=(const LocalOperator& o) {
    for (const auto& [w, p] : o.terms_)
        add_term(p, w);
    return *this;
}

LocalOperator& LocalOperator::operator-=(const LocalOperator& o) {
    for (const auto& [w, p] : o.terms_)
        add_term(-p, w);
    return *this;
}

LocalOperator operator*(const Rational& c, const LocalOperator& op) {
    LocalOperator r(op.ring());
    if (c == 0)
        return r;
    for (const auto& [w, p] : op.terms())
        r.add_term(c * p, w);
    return r;
}

LocalOperator operator*(const JetPolynomial& p, const LocalOperator& op) {
    LocalOperator r(op.ring());
    for (const auto& [w, q] : op.terms())
        r.add_term(p * q, w);
    return r;
}

JetPolynomial LocalOperator::apply(const JetPolynomial& q) const {
    JetPolynomial r(ring_);
    for (const auto& [w, p] : terms_)
        r += p * q.total_derivative(w);
    return r;
}

LocalOperator LocalOperator::compose(const LocalOperator& o) const {
    LocalOperator r(ring_);
    for (const auto& [a, p] : terms_) {
        for (const auto& [b, q] : o.terms_) {
            // D^a o (q D^b) = sum_{g<=a} C(a,g) D^g(q) D^{a-g+b}
            for (std::uint16_t gt = 0; gt <= a.t; ++gt)
                for (std::uint16_t g1 = 0; g1 <= a.z1; ++g1)
                    for (std::uint16_t g2 = 0; g2 <= a.z2; ++g2) {
                        MultiIndex g{gt, g1, g2};
                        JetPolynomial c = multi_binom(a, g) * p * q.total_derivative(g);
                        r.add_term(c, a.minus(g).plus(b));
                    }
        }
    }
    return r;
}

LocalOperator LocalOperator::adjoint() const {
    LocalOperator r(ring_);
    for (const auto& [a, p] : terms_) {
        const Rational sign = (a.total() % 2 == 0) ? Rational(1) : Rational(-1);
        // (p D^a)* = (-1)^|a| D^a o p
        for (std::uint16_t gt = 0; gt <= a.t; ++gt)
            for (std::uint16_t g1 = 0; g1 <= a.z1; ++g1)
                for (std::uint16_t g2 = 0; g2 <= a.z2; ++g2) {
                    MultiIndex g{gt, g1, g2};
                    JetPolynomial c = sign * multi_binom(a, g) * p.total_derivative(g);
                    r.add_term(c, a.minus(g));
                }
    }
    return r;
}

std::string LocalOperator::str() const {
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [w, p] = *it;
        std::string cs = p.str();
        bool multi = p.terms().size() > 1;
        bool neg = !multi && cs.size() && cs[0] == '-';
        if (first) {
            if (neg)
                os << '-';
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        if (neg)
            cs = cs.substr(1);
        const bool ident = (w == MultiIndex{});
        if (multi)
            cs = "(" + cs + ")";
        if (ident) {
            os << cs;
        } else if (cs == "1") {
            os << "D" << w.str();
        } else {
            os << cs << "*D" << w.str();
        }
    }
    return os.str();
}

LocalOperator commutator(const LocalOperator& a, const LocalOperator& b) {
    return a.compose(b) - b.compose(a);
}

LocalOperator nabla(const Rational& c1, const Rational& c2, std::shared_ptr<const Ring> ring) {
    LocalOperator op(ring);
    op += c1 * LocalOperator::derivative(Axis::Z1, ring);
    op += c2 * LocalOperator::derivative(Axis::Z2, ring);
    return op;
}

LeftDivision left_divide_nabla(const LocalOperator& op, const Rational& d1, const Rational& d2) {
    if (d1 == 0 && d2 == 0)
        throw ValidationError("nabla direction must be nonzero");
    const Axis pivot = (d1 != 0) ? Axis::Z1 : Axis::Z2;
    const Rational dp = (d1 != 0) ? d1 : d2;
    const LocalOperator nab = nabla(d1, d2, op.ring());

    LocalOperator quotient(op.ring());
    LocalOperator work = op;
    for (;;) {
        // Reduce the word maximal in (total order, pivot exponent, lex) among
        // those carrying the pivot axis; every step strictly decreases that
        // maximum, so the loop terminates with a pivot-free remainder.
        const MultiIndex* best = nullptr;
        for (const auto& [w, p] : work.terms()) {
            if (w.component(pivot) == 0)
                continue;
            if (!best || w.total() > best->total() ||
                (w.total() == best->total() &&
                 (w.component(pivot) > best->component(pivot) ||
                  (w.component(pivot) == best->component(pivot) && *best < w))))
                best = &w;
        }
        if (!best)
            break;
        const MultiIndex beta = *best;
        const JetPolynomial q = work.coefficient(beta);
        const JetPolynomial m = Rational(1 / dp) * q;
        const MultiIndex gamma = beta.bumped(pivot, -1);
        quotient += LocalOperator::term(m, gamma);
        work -= nab.compose(LocalOperator::term(m, gamma));
    }
    return LeftDivision{std::move(quotient), std::move(work)};
}

// ---------------------------------------------------------------------------
// LinearDiffOperator

LinearDiffOperator::LinearDiffOperator(LocalOperator local)
    : ring_(local.ring()), local_(std::move(local)) {}

LinearDiffOperator LinearDiffOperator::nabla_inverse(const Rational& d1, const Rational& d2,
                                                     const LocalOperator& inner) {
    LinearDiffOperator op(inner.ring());
    op.nonlocal_.push_back(NonlocalTerm{d1, d2, inner});
    op.normalize();
    return op;
}

void LinearDiffOperator::normalize() {
    std::vector<NonlocalTerm> scaled;
    for (auto& nt : nonlocal_) {
        if (nt.inner.is_zero())
            continue;
        if (nt.dir1 == 0 && nt.dir2 == 0)
            throw ValidationError("nonlocal direction must be nonzero");
        // nabla_{s d}^{-1} = (1/s) nabla_d^{-1}: scale first nonzero component to 1.
        const Rational s = (nt.dir1 != 0) ? nt.dir1 : nt.dir2;
        scaled.push_back(NonlocalTerm{nt.dir1 / s, nt.dir2 / s, Rational(1 / s) * nt.inner});
    }
    std::sort(scaled.begin(), scaled.end(), [](const NonlocalTerm& a, const NonlocalTerm& b) {
        return std::pair(a.dir1, a.dir2) < std::pair(b.dir1, b.dir2);
    });
    nonlocal_.clear();
    for (auto& nt : scaled) {
        if (!nonlocal_.empty() && nonlocal_.back().dir1 == nt.dir1 &&
            nonlocal_.back().dir2 == nt.dir2)
            nonlocal_.back().inner += nt.inner;
        else
            nonlocal_.push_back(std::move(nt));
    }
    // Extract the exactly divisible part of each inner operator; this realizes
    // nabla o nabla^{-1} = nabla^{-1} o nabla = 1 eagerly and canonically.
    std::vector<NonlocalTerm> kept;
    for (auto& nt : nonlocal_) {
        LeftDivision d = left_divide_nabla(nt.inner, nt.dir1, nt.dir2);
        local_ += d.quotient;
        if (!d.remainder.is_zero())
            kept.push_back(NonlocalTerm{nt.dir1, nt.dir2, std::move(d.remainder)});
    }
    nonlocal_ = std::move(kept);
}

bool LinearDiffOperator::operator==(const LinearDiffOperator& o) const {
    if (!(local_ == o.local_) || nonlocal_.size() != o.nonlocal_.size())
        return false;
    for (std::size_t i = 0; i < nonlocal_.size(); ++i)
        if (nonlocal_[i].dir1 != o.nonlocal_[i].dir1 || nonlocal_[i].dir2 != o.nonlocal_[i].dir2 ||
            !(nonlocal_[i].inner == o.nonlocal_[i].inner))
            return false;
    return true;
}

LinearDiffOperator LinearDiffOperator::operator-() const {
    LinearDiffOperator r = *this;
    r.local_ = -r.local_;
    for (auto& nt : r.nonlocal_)
        nt.inner = -nt.inner;
    return r;
}

LinearDiffOperator& LinearDiffOperator::operator+=(const LinearDiffOperator& o) {
    local_ += o.local_;
    nonlocal_.insert(nonlocal_.end(), o.nonlocal_.begin(), o.nonlocal_.end());
    normalize();
    return *this;
}

LinearDiffOperator& LinearDiffOperator::operator-=(const LinearDiffOperator& o) {
    return *this += -o;
}

LinearDiffOperator operator*(const Rational& c, const LinearDiffOperator& op) {
    LinearDiffOperator r(op.ring());
    if (c == 0)
        return r;
    r = op;
    r.local_ = c * r.local_;
    for (auto& nt : r.nonlocal_)
        nt.inner = c * nt.inner;
    return r;
}

JetPolynomial LinearDiffOperator::apply(const JetPolynomial& q) const {
    if (!nonlocal_.empty())
        throw UnsupportedOperationError(
            "cannot apply nonlocal operator symbolically; offending term Ninv(" +
            to_string(nonlocal_[0].dir1) + "," + to_string(nonlocal_[0].dir2) + ")∘(" +
            nonlocal_[0].inner.str() + ")");
    return local_.apply(q);
}

LinearDiffOperator LinearDiffOperator::compose(const LinearDiffOperator& o) const {
    if (!nonlocal_.empty() && !o.nonlocal_.empty())
        throw NormalizationError("composition would exceed nonlocal depth 1");
    LinearDiffOperator r(ring_);
    r.local_ = local_.compose(o.local_);
    for (const auto& nt : o.nonlocal_) {
        // left factor must commute with nabla^{-1}
        if (!local_.is_zero()) {
            if (!local_.is_constant_coefficient())
                throw NormalizationError(
                    "variable-coefficient operator cannot pass through nabla^{-1}: " +
                    local_.str());
            r.nonlocal_.push_back(NonlocalTerm{nt.dir1, nt.dir2, local_.compose(nt.inner)});
        }
    }
    for (const auto& nt : nonlocal_)
        r.nonlocal_.push_back(NonlocalTerm{nt.dir1, nt.dir2, nt.inner.compose(o.local_)});
    r.normalize();
    return r;
}

LinearDiffOperator LinearDiffOperator::adjoint() const {
    LinearDiffOperator r(ring_);
    r.local_ = local_.adjoint();
    for (const auto& nt : nonlocal_) {
        if (!nt.inner.is_constant_coefficient())
            throw UnsupportedOperationError(
                "adjoint of nonlocal term with variable-coefficient inner operator: Ninv∘(" +
                nt.inner.str() + ")");
        // (nabla^{-1} o A)* = A* o (nabla^{-1})* = -nabla^{-1} o A*
        r.nonlocal_.push_back(NonlocalTerm{nt.dir1, nt.dir2, -nt.inner.adjoint()});
    }
    r.normalize();
    return r;
}

std::string LinearDiffOperator::str() const {
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    if (!local_.is_zero()) {
        os << local_.str();
        first = false;
    }
    for (const auto& nt : nonlocal_) {
        if (!first)
            os << " + ";
        first = false;
        os << "Ninv(" << to_string(nt.dir1) << "," << to_string(nt.dir2) << ")∘(" << nt.inner.str()
           << ")";
    }
    return os.str();
}

LinearDiffOperator commutator(const LinearDiffOperator& a, const LinearDiffOperator& b) {
    return a.compose(b) - b.compose(a);
}

OperatorEquality operator_equal(const LinearDiffOperator& a, const LinearDiffOperator& b) {
    LinearDiffOperator d = a - b;
    return OperatorEquality{d.is_zero(), d};
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(LinearDiffOperator a11, LinearDiffOperator a12,
                               LinearDiffOperator a21, LinearDiffOperator a22) {
    e_[0][0] = std::move(a11);
    e_[0][1] = std::move(a12);
    e_[1][0] = std::move(a21);
    e_[1][1] = std::move(a22);
}

bool OperatorMatrix::is_local() const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!e_[i][j].is_local())
                return false;
    return true;
}

bool OperatorMatrix::operator==(const OperatorMatrix& o) const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!(e_[i][j] == o.e_[i][j]))
                return false;
    return true;
}

OperatorMatrix OperatorMatrix::compose(const OperatorMatrix& o) const {
    OperatorMatrix r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.e_[i][j] = e_[i][0].compose(o.e_[0][j]) + e_[i][1].compose(o.e_[1][j]);
    return r;
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& o) const {
    OperatorMatrix r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.e_[i][j] = e_[i][j] - o.e_[i][j];
    return r;
}

OperatorMatrix OperatorMatrix::identity(std::shared_ptr<const Ring> ring) {
    OperatorMatrix r;
    r.e_[0][0] = LocalOperator::identity(ring);
    r.e_[1][1] = LocalOperator::identity(ring);
    r.e_[0][1] = LinearDiffOperator(ring);
    r.e_[1][0] = LinearDiffOperator(ring);
    return r;
}

std::string OperatorMatrix::str() const {
    std::ostringstream os;
    os << "[[" << e_[0][0].str() << ", " << e_[0][1].str() << "], [" << e_[1][0].str() << ", "
       << e_[1][1].str() << "]]";
    return os.str();
}

bool is_skew_adjoint(const OperatorMatrix& J) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!(J.at(j, i).adjoint() == -J.at(i, j)))
                return false;
    return true;
}

} // namespace mave
