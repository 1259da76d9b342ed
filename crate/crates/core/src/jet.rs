//! Jets: truncated formal power series in `z^1..z^m, zbar^1..zbar^m`
//! about the chart's base point, with exact coefficients and an explicit
//! accuracy bound.
//!
//! A jet with accuracy `a` trusts every coefficient of total degree
//! strictly below `a`; all higher terms are unknown. An exact polynomial
//! carries infinite accuracy. This makes differentiation follow the clean
//! rule `accuracy -> accuracy - 1` and turns every identity check into an
//! exact coefficient comparison on the trusted range.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Trusted-degree bound of a jet. `Exact` means the stored terms are the
/// whole function (an exact polynomial).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Accuracy {
    Finite(u32),
    Exact,
}

impl Accuracy {
    pub fn is_exact(self) -> bool {
        matches!(self, Accuracy::Exact)
    }

    /// Is a coefficient of total degree `deg` trusted?
    pub fn trusts(self, deg: u32) -> bool {
        match self {
            Accuracy::Finite(a) => deg < a,
            Accuracy::Exact => true,
        }
    }

    /// Accuracy after one differentiation. Errors when nothing would be
    /// trusted about the derivative.
    pub fn after_derive(self) -> Result<Accuracy> {
        match self {
            Accuracy::Exact => Ok(Accuracy::Exact),
            Accuracy::Finite(0) => Err(Error::InsufficientAccuracy { degree: 0, accuracy: 0 }),
            Accuracy::Finite(a) => Ok(Accuracy::Finite(a - 1)),
        }
    }
}

impl PartialOrd for Accuracy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Accuracy {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Accuracy::Exact, Accuracy::Exact) => Ordering::Equal,
            (Accuracy::Exact, Accuracy::Finite(_)) => Ordering::Greater,
            (Accuracy::Finite(_), Accuracy::Exact) => Ordering::Less,
            (Accuracy::Finite(a), Accuracy::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Debug for Accuracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Accuracy::Finite(a) => write!(f, "{}", a),
            Accuracy::Exact => write!(f, "exact"),
        }
    }
}

/// Exponent pair of a base monomial `z^beta * zbar^gamma`.
///
/// Ordered graded-lexicographically with the holomorphic block first, so
/// map iteration is the canonical term order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BaseExp {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

impl BaseExp {
    pub fn zero(dim: usize) -> Self {
        BaseExp { z: vec![0; dim], zbar: vec![0; dim] }
    }

    pub fn new(z: Vec<u32>, zbar: Vec<u32>) -> Self {
        BaseExp { z, zbar }
    }

    pub fn degree(&self) -> u32 {
        self.z.iter().sum::<u32>() + self.zbar.iter().sum::<u32>()
    }

    pub fn is_constant(&self) -> bool {
        self.z.iter().all(|&e| e == 0) && self.zbar.iter().all(|&e| e == 0)
    }
}

impl PartialOrd for BaseExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BaseExp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.z.cmp(&other.z))
            .then_with(|| self.zbar.cmp(&other.zbar))
    }
}

impl fmt::Debug for BaseExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^{:?} zb^{:?}", self.z, self.zbar)
    }
}

/// A coordinate direction on the chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `d/dz^k`, zero-based index.
    Z(usize),
    /// `d/dzbar^l`, zero-based index.
    ZBar(usize),
}

/// Truncated Taylor expansion of a function germ at the base point.
///
/// Invariants: no stored term is zero, and no stored term has total degree
/// at or above a finite accuracy bound.
#[derive(Clone, PartialEq, Eq)]
pub struct Jet {
    dim: usize,
    accuracy: Accuracy,
    terms: BTreeMap<BaseExp, Scalar>,
}

impl Jet {
    pub fn zero(dim: usize) -> Self {
        Jet { dim, accuracy: Accuracy::Exact, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, value: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(BaseExp::zero(dim), value);
        }
        Jet { dim, accuracy: Accuracy::Exact, terms }
    }

    pub fn one(dim: usize) -> Self {
        Jet::constant(dim, Scalar::one())
    }

    /// The coordinate function `z^k` (zero-based `k`).
    pub fn var_z(dim: usize, k: usize) -> Self {
        assert!(k < dim, "holomorphic index out of range");
        let mut z = vec![0; dim];
        z[k] = 1;
        Jet::monomial(dim, BaseExp::new(z, vec![0; dim]), Scalar::one())
    }

    /// The coordinate function `zbar^l` (zero-based `l`).
    pub fn var_zbar(dim: usize, l: usize) -> Self {
        assert!(l < dim, "antiholomorphic index out of range");
        let mut zbar = vec![0; dim];
        zbar[l] = 1;
        Jet::monomial(dim, BaseExp::new(vec![0; dim], zbar), Scalar::one())
    }

    pub fn monomial(dim: usize, exp: BaseExp, coeff: Scalar) -> Self {
        assert_eq!(exp.z.len(), dim);
        assert_eq!(exp.zbar.len(), dim);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Jet { dim, accuracy: Accuracy::Exact, terms }
    }

    /// Build from raw terms, pruning zeros and terms beyond the accuracy.
    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (BaseExp, Scalar)>,
        accuracy: Accuracy,
    ) -> Self {
        let mut jet = Jet { dim, accuracy, terms: BTreeMap::new() };
        for (exp, coeff) in terms {
            assert_eq!(exp.z.len(), dim);
            assert_eq!(exp.zbar.len(), dim);
            jet.add_term(exp, coeff);
        }
        jet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn accuracy(&self) -> Accuracy {
        self.accuracy
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BaseExp, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest stored total degree, `None` for the zero jet.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    fn add_term(&mut self, exp: BaseExp, coeff: Scalar) {
        if coeff.is_zero() || !self.accuracy.trusts(exp.degree()) {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &Jet) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    /// Stored coefficient at a trusted degree, zero when absent.
    pub fn coefficient(&self, exp: &BaseExp) -> Result<Scalar> {
        let deg = exp.degree();
        if !self.accuracy.trusts(deg) {
            let Accuracy::Finite(a) = self.accuracy else { unreachable!() };
            return Err(Error::InsufficientAccuracy { degree: deg, accuracy: a });
        }
        Ok(self.terms.get(exp).cloned().unwrap_or_else(Scalar::zero))
    }

    /// Coefficient lookup without the trust check; untrusted degrees read
    /// as zero. Internal helpers only.
    pub fn coefficient_unchecked(&self, exp: &BaseExp) -> Scalar {
        self.terms.get(exp).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient_unchecked(&BaseExp::zero(self.dim))
    }

    /// Re-truncate to a (possibly lower) accuracy.
    pub fn truncate(&self, accuracy: Accuracy) -> Jet {
        let accuracy = self.accuracy.min(accuracy);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| accuracy.trusts(e.degree()))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Jet { dim: self.dim, accuracy, terms }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_dim(other)?;
        let accuracy = self.accuracy.min(other.accuracy);
        let mut out = Jet { dim: self.dim, accuracy, terms: BTreeMap::new() };
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        Jet { dim: self.dim, accuracy: self.accuracy, terms }
    }

    pub fn scale(&self, factor: &Scalar) -> Jet {
        if factor.is_zero() {
            let mut out = Jet::zero(self.dim);
            out.accuracy = self.accuracy;
            return out;
        }
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect();
        Jet { dim: self.dim, accuracy: self.accuracy, terms }
    }

    /// Pointwise product; product terms at or above the joint accuracy
    /// are discarded.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_dim(other)?;
        let accuracy = self.accuracy.min(other.accuracy);
        let mut out = Jet { dim: self.dim, accuracy, terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let deg = ea.degree() + eb.degree();
                if !accuracy.trusts(deg) {
                    continue;
                }
                let exp = BaseExp::new(
                    ea.z.iter().zip(&eb.z).map(|(x, y)| x + y).collect(),
                    ea.zbar.iter().zip(&eb.zbar).map(|(x, y)| x + y).collect(),
                );
                out.add_term(exp, ca * cb);
            }
        }
        Ok(out)
    }

    /// Exact term-wise partial derivative.
    pub fn derive(&self, dir: Direction) -> Result<Jet> {
        let index = match dir {
            Direction::Z(k) | Direction::ZBar(k) => k,
        };
        if index >= self.dim {
            return Err(Error::IndexOutOfRange { index, dim: self.dim });
        }
        let accuracy = self.accuracy.after_derive()?;
        let mut out = Jet { dim: self.dim, accuracy, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let mut e = e.clone();
            let slot = match dir {
                Direction::Z(k) => &mut e.z[k],
                Direction::ZBar(l) => &mut e.zbar[l],
            };
            if *slot == 0 {
                continue;
            }
            let factor = Scalar::from_int(*slot as i64);
            *slot -= 1;
            out.add_term(e, &c.clone() * &factor);
        }
        Ok(out)
    }

    /// Iterated derivative `d^{|bz|+|bzbar|} / dz^bz dzbar^bzbar`.
    pub fn derive_multi(&self, bz: &[u32], bzbar: &[u32]) -> Result<Jet> {
        let mut out = self.clone();
        for (k, &n) in bz.iter().enumerate() {
            for _ in 0..n {
                out = out.derive(Direction::Z(k))?;
            }
        }
        for (l, &n) in bzbar.iter().enumerate() {
            for _ in 0..n {
                out = out.derive(Direction::ZBar(l))?;
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse modulo terms of degree >= `target`, via the
    /// geometric series in the degree-positive part.
    pub fn invert(&self, target: u32) -> Result<Jet> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        if let Accuracy::Finite(a) = self.accuracy {
            if a < target {
                return Err(Error::InsufficientAccuracy { degree: target, accuracy: a });
            }
        }
        let target_acc = Accuracy::Finite(target);
        let c0_inv = c0.recip()?;
        // u = c0^{-1} * (self - c0) has no constant term, so u^n raises the
        // minimum degree by n and the series ends before n = target.
        let u = self
            .truncate(target_acc)
            .sub(&Jet::constant(self.dim, c0))?
            .scale(&c0_inv);
        let mut result = Jet::constant(self.dim, Scalar::one()).truncate(target_acc);
        let mut power = result.clone();
        loop {
            power = power.mul(&u)?.neg();
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result.scale(&c0_inv))
    }

    /// Exact equality of all coefficients trusted by both jets.
    pub fn agrees_with(&self, other: &Jet) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let shared = self.accuracy.min(other.accuracy);
        let within = |jet: &Jet| {
            jet.terms
                .iter()
                .filter(move |(e, _)| shared.trusts(e.degree()))
        };
        let a: Vec<_> = within(self).collect();
        let b: Vec<_> = within(other).collect();
        a == b
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, c)) in self.terms.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({})", c)?;
                for (k, &n) in e.z.iter().enumerate() {
                    if n > 0 {
                        write!(f, "*z{}^{}", k + 1, n)?;
                    }
                }
                for (l, &n) in e.zbar.iter().enumerate() {
                    if n > 0 {
                        write!(f, "*zb{}^{}", l + 1, n)?;
                    }
                }
            }
        }
        write!(f, " [acc {:?}]", self.accuracy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Jet {
        Jet::var_z(1, 0)
    }

    fn zb() -> Jet {
        Jet::var_zbar(1, 0)
    }

    #[test]
    fn product_of_coordinates() {
        let p = z().mul(&zb()).unwrap();
        assert_eq!(p, Jet::monomial(1, BaseExp::new(vec![1], vec![1]), Scalar::one()));
    }

    #[test]
    fn accuracy_propagates_through_mul() {
        // (1 + z) at accuracy 3 times (1 - z) at accuracy 2: the z^2 term
        // is beyond the joint accuracy and must be dropped.
        let a = Jet::one(1).add(&z()).unwrap().truncate(Accuracy::Finite(3));
        let b = Jet::one(1).sub(&z()).unwrap().truncate(Accuracy::Finite(2));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.accuracy(), Accuracy::Finite(2));
        assert_eq!(p, Jet::one(1).truncate(Accuracy::Finite(2)));
    }

    #[test]
    fn subtraction_cancels_to_empty() {
        let p = z().mul(&zb()).unwrap();
        let d = p.sub(&p).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
    }

    #[test]
    fn derive_term_wise() {
        // d/dzbar (z zbar + z^2 zbar^2) = z + 2 z^2 zbar
        let f = Jet::from_terms(
            1,
            [
                (BaseExp::new(vec![1], vec![1]), Scalar::one()),
                (BaseExp::new(vec![2], vec![2]), Scalar::one()),
            ],
            Accuracy::Exact,
        );
        let df = f.derive(Direction::ZBar(0)).unwrap();
        let expected = Jet::from_terms(
            1,
            [
                (BaseExp::new(vec![1], vec![0]), Scalar::one()),
                (BaseExp::new(vec![2], vec![1]), Scalar::from_int(2)),
            ],
            Accuracy::Exact,
        );
        assert_eq!(df, expected);
    }

    #[test]
    fn derive_kills_independent_variable() {
        let f = Jet::monomial(1, BaseExp::new(vec![0], vec![3]), Scalar::one());
        assert!(f.derive(Direction::Z(0)).unwrap().is_zero());
    }

    #[test]
    fn derive_lowers_accuracy() {
        let f = z().truncate(Accuracy::Finite(4));
        assert_eq!(f.derive(Direction::Z(0)).unwrap().accuracy(), Accuracy::Finite(3));
    }

    #[test]
    fn derive_at_zero_accuracy_is_an_error() {
        let f = z().truncate(Accuracy::Finite(0));
        assert!(matches!(
            f.derive(Direction::Z(0)),
            Err(Error::InsufficientAccuracy { .. })
        ));
    }

    #[test]
    fn derive_bad_index() {
        assert!(matches!(z().derive(Direction::Z(1)), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn invert_one() {
        let inv = Jet::one(1).invert(5).unwrap();
        assert_eq!(inv, Jet::one(1).truncate(Accuracy::Finite(5)));
    }

    #[test]
    fn invert_geometric_series() {
        // (1 + 4 z zbar)^{-1} = 1 - 4 z zbar + 16 z^2 zbar^2 - ... below degree 5
        let f = Jet::one(1)
            .add(&z().mul(&zb()).unwrap().scale(&Scalar::from_int(4)))
            .unwrap();
        let inv = f.invert(5).unwrap();
        let expected = Jet::from_terms(
            1,
            [
                (BaseExp::zero(1), Scalar::one()),
                (BaseExp::new(vec![1], vec![1]), Scalar::from_int(-4)),
                (BaseExp::new(vec![2], vec![2]), Scalar::from_int(16)),
            ],
            Accuracy::Finite(5),
        );
        assert_eq!(inv, expected);
        // multiply back: 1 on the trusted range
        let check = f.mul(&inv).unwrap();
        assert!(check.agrees_with(&Jet::one(1)));
    }

    #[test]
    fn invert_without_constant_term_fails() {
        let f = z().add(&zb()).unwrap();
        assert_eq!(f.invert(3), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn invert_insufficient_accuracy() {
        let f = Jet::one(1).truncate(Accuracy::Finite(2));
        assert!(matches!(f.invert(5), Err(Error::InsufficientAccuracy { .. })));
    }

    #[test]
    fn coefficient_queries() {
        // z zbar + (1/2) z^2
        let f = Jet::from_terms(
            1,
            [
                (BaseExp::new(vec![1], vec![1]), Scalar::one()),
                (BaseExp::new(vec![2], vec![0]), Scalar::ratio(1, 2)),
            ],
            Accuracy::Exact,
        );
        assert_eq!(f.coefficient(&BaseExp::new(vec![2], vec![0])).unwrap(), Scalar::ratio(1, 2));
        assert_eq!(f.coefficient(&BaseExp::new(vec![0], vec![1])).unwrap(), Scalar::zero());
        let g = f.truncate(Accuracy::Finite(2));
        assert_eq!(
            g.coefficient(&BaseExp::new(vec![1], vec![1])),
            Err(Error::InsufficientAccuracy { degree: 2, accuracy: 2 })
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        prop_compose! {
            fn arb_exp(dim: usize)(z in proptest::collection::vec(0u32..3, dim),
                                    zbar in proptest::collection::vec(0u32..3, dim))
                                    -> BaseExp {
                BaseExp::new(z, zbar)
            }
        }

        prop_compose! {
            fn arb_jet(dim: usize)(terms in proptest::collection::vec(
                (arb_exp(dim), -9i64..=9), 0..6)) -> Jet {
                Jet::from_terms(
                    dim,
                    terms.into_iter().map(|(e, n)| (e, Scalar::from_int(n))),
                    Accuracy::Exact,
                )
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn ring_axioms(a in arb_jet(2), b in arb_jet(2), c in arb_jet(2)) {
                let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
                let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(&ab_c, &a_bc);
                prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
                let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
                let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(
                    a.add(&b).unwrap().add(&c).unwrap(),
                    a.add(&b.add(&c).unwrap()).unwrap()
                );
            }

            #[test]
            fn derivatives_commute(a in arb_jet(2)) {
                let zk_then_zl = a.derive(Direction::Z(0)).unwrap().derive(Direction::ZBar(1)).unwrap();
                let zl_then_zk = a.derive(Direction::ZBar(1)).unwrap().derive(Direction::Z(0)).unwrap();
                prop_assert_eq!(zk_then_zl, zl_then_zk);
            }

            #[test]
            fn inverse_multiplies_back_to_one(a in arb_jet(2), c in 1i64..9, target in 1u32..6) {
                // force an invertible constant term
                let a = a.add(&Jet::constant(2, Scalar::from_int(c))).unwrap();
                prop_assume!(!a.constant_term().is_zero());
                let inv = a.invert(target).unwrap();
                prop_assert_eq!(inv.accuracy(), Accuracy::Finite(target));
                prop_assert!(a.mul(&inv).unwrap().agrees_with(&Jet::one(2)));
            }

            #[test]
            fn accuracy_monotonicity(a in arb_jet(2), b in arb_jet(2), acc in 1u32..5) {
                // no operation reports a coefficient beyond its declared accuracy
                let a = a.truncate(Accuracy::Finite(acc));
                for op in [a.add(&b).unwrap(), a.mul(&b).unwrap()] {
                    if let Accuracy::Finite(bound) = op.accuracy() {
                        prop_assert!(op.max_degree().map_or(true, |d| d < bound));
                    }
                }
            }
        }
    }
}
