#include "cadmin/cad1d.hpp"

#include <algorithm>

namespace cadmin {

namespace {

struct AtomPoly {
    Formula atom;
    UniPoly poly;
};

bool holds_with(const Formula& set, const std::vector<AtomPoly>& atoms,
                const std::function<int(const UniPoly&)>& sign) {
    return set.evaluate([&](const Formula& a) {
        for (const auto& ap : atoms)
            if (ap.atom == a)
                return sign(ap.poly);
        throw std::logic_error("unregistered atom");
    });
}

// A rational root a/b of p has b dividing the leading coefficient of p with
// integer coefficients, so once the interval is narrower than 1/lead^2 the
// simplest rational inside is the only candidate.
AlgebraicNumber exact_if_rational(const AlgebraicNumber& r) {
    if (r.is_rational())
        return r;
    Integer den = 1;
    for (const auto& c : r.defining().coeffs())
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    Rational lead = abs(r.defining().leading() * den);
    AlgebraicNumber t = r.refined(1 / (2 * lead * lead));
    if (t.is_rational())
        return t;
    Rational c = simplest_between(t.lo(), t.hi());
    return r.defining().sign_at(c) == 0 ? AlgebraicNumber::rational(c) : r;
}

// Shrinks the isolating intervals until consecutive roots are separated by
// a gap.
void separate(std::vector<AlgebraicNumber>& roots) {
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        while (!(roots[i].hi() < roots[i + 1].lo())) {
            roots[i] = roots[i].refined(roots[i].width() / 2);
            roots[i + 1] = roots[i + 1].refined(roots[i + 1].width() / 2);
        }
    }
}

}  // namespace

Cad1dResult minimum_cad_1d(const Formula& set) {
    if (set.max_var() > 1)
        throw std::invalid_argument("formula uses variables other than x1");
    std::vector<AtomPoly> atoms;
    set.for_each_atom([&](const Formula& a) {
        auto p = to_unipoly(Expr::sub(a.lhs(), a.rhs()), 1);
        if (!p)
            throw std::invalid_argument("atom is not a polynomial in x1: " + a.to_sexpr());
        atoms.push_back({a, *p});
    });

    UniPoly product = UniPoly::constant(1);
    for (const auto& ap : atoms)
        if (ap.poly.degree() > 0)
            product = product * ap.poly;
    std::vector<AlgebraicNumber> roots = isolate_roots(product.squarefree_part());
    for (auto& r : roots)
        r = exact_if_rational(r);
    separate(roots);

    // Sector i lies below root i; sector roots.size() lies above the last.
    std::vector<Rational> sector_samples;
    if (roots.empty()) {
        sector_samples.push_back(Rational(0));
    } else {
        sector_samples.push_back(Rational(floor(roots.front().lo()) - 1));
        for (std::size_t i = 0; i + 1 < roots.size(); ++i)
            sector_samples.push_back(simplest_between(roots[i].hi(), roots[i + 1].lo()));
        sector_samples.push_back(Rational(ceil(roots.back().hi()) + 1));
    }

    std::vector<bool> sector_label, root_label;
    for (const auto& s : sector_samples)
        sector_label.push_back(holds_with(set, atoms, [&](const UniPoly& p) { return p.sign_at(s); }));
    for (const auto& r : roots)
        root_label.push_back(holds_with(set, atoms, [&](const UniPoly& p) { return sign_at(p, r); }));

    std::vector<AlgebraicNumber> kept;
    std::vector<bool> labels{sector_label[0]};
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (root_label[i] == sector_label[i] && root_label[i] == sector_label[i + 1])
            continue;
        // Describe the root by the squarefree part of an atom polynomial that
        // vanishes there: the isolating interval remains isolating for it.
        AlgebraicNumber r = roots[i];
        if (!r.is_rational()) {
            for (const auto& ap : atoms) {
                if (ap.poly.degree() > 0 && sign_at(ap.poly, r) == 0) {
                    r = AlgebraicNumber(ap.poly.squarefree_part(), r.lo(), r.hi());
                    break;
                }
            }
        }
        kept.push_back(r);
        labels.push_back(root_label[i]);
        labels.push_back(sector_label[i + 1]);
    }

    SectionStack stack;
    for (const auto& r : kept)
        stack.functions.push_back(Expr::root(r));
    Cad cad(1, StackMap{{CellIndex(), stack}});
    LeafLabeling leaf_labels;
    for (std::size_t i = 0; i < labels.size(); ++i)
        leaf_labels.emplace(CellIndex{static_cast<int>(i) + 1}, labels[i]);
    return {cad, leaf_labels, kept};
}

}  // namespace cadmin
