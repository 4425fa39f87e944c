//! Supernumbers `X = Σ_I X_I σ^I` inside a skeleton `ℭ_L` truncated above degree `D`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::gindex::{merge_sign, metric_weight, GIndex, MAX_GENERATORS};
use crate::scalar::{Dual, Float, Scalar};

/// Generator bound `L` and degree cutoff `D` of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Skeleton {
    l: u32,
    d: u32,
}

impl Skeleton {
    pub fn new(l: u32, d: u32) -> Result<Self> {
        if l > MAX_GENERATORS {
            return Err(Error::Skeleton(format!(
                "skeleton bound {l} exceeds the library limit {MAX_GENERATORS}"
            )));
        }
        if d > l {
            return Err(Error::Skeleton(format!("cutoff {d} exceeds skeleton bound {l}")));
        }
        Ok(Skeleton { l, d })
    }

    /// `ℭ_L` without truncation.
    pub fn full(l: u32) -> Result<Self> {
        Skeleton::new(l, l)
    }

    pub fn l(self) -> u32 {
        self.l
    }

    pub fn d(self) -> u32 {
        self.d
    }

    pub fn admits(self, i: GIndex) -> bool {
        i.within(self.l) && i.degree() <= self.d
    }

    /// Context of a binary operation: the larger bound and the smaller cutoff.
    pub fn join(self, other: Skeleton) -> Skeleton {
        Skeleton {
            l: self.l.max(other.l),
            d: self.d.min(other.d),
        }
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={}, D={}", self.l, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Undefined,
}

/// Sparse supernumber over the scalar carrier `S`.
///
/// Zero coefficients are never stored, so two values are equal exactly when
/// their coefficient maps agree.
#[derive(Clone, Debug)]
pub struct Supernumber<S> {
    sk: Skeleton,
    terms: BTreeMap<GIndex, S>,
}

impl<S: Scalar> PartialEq for Supernumber<S> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<S: Scalar> Supernumber<S> {
    pub fn zero(sk: Skeleton) -> Self {
        Supernumber { sk, terms: BTreeMap::new() }
    }

    pub fn scalar(sk: Skeleton, c: S) -> Self {
        let mut x = Supernumber::zero(sk);
        x.accumulate(GIndex::EMPTY, c);
        x
    }

    pub fn one(sk: Skeleton) -> Self {
        Supernumber::scalar(sk, S::one())
    }

    pub fn from_i64(sk: Skeleton, v: i64) -> Self {
        Supernumber::scalar(sk, S::from_i64(v))
    }

    /// `c · σ^I`.
    pub fn monomial(sk: Skeleton, i: GIndex, c: S) -> Result<Self> {
        if !i.within(sk.l) {
            return Err(Error::Skeleton(format!("blade {i} lies outside skeleton {sk}")));
        }
        let mut x = Supernumber::zero(sk);
        if i.degree() <= sk.d {
            x.accumulate(i, c);
        }
        Ok(x)
    }

    /// The generator `σ_k`.
    pub fn generator(sk: Skeleton, k: u32) -> Result<Self> {
        Supernumber::monomial(sk, GIndex::single(k)?, S::one())
    }

    /// Builds a value from `(I, X_I)` pairs, summing repeated blades and
    /// dropping those above the cutoff.
    pub fn from_terms(sk: Skeleton, terms: impl IntoIterator<Item = (GIndex, S)>) -> Result<Self> {
        let mut x = Supernumber::zero(sk);
        for (i, c) in terms {
            if !i.within(sk.l) {
                return Err(Error::Skeleton(format!("blade {i} lies outside skeleton {sk}")));
            }
            if i.degree() <= sk.d {
                x.accumulate(i, c);
            }
        }
        Ok(x)
    }

    fn accumulate(&mut self, i: GIndex, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(i) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn skeleton(&self) -> Skeleton {
        self.sk
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GIndex, &S)> {
        self.terms.iter()
    }

    pub fn indices(&self) -> impl Iterator<Item = GIndex> + '_ {
        self.terms.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-homes the value in skeleton `sk`, discarding blades above its cutoff.
    pub fn embed(&self, sk: Skeleton) -> Result<Self> {
        Supernumber::from_terms(sk, self.terms.iter().map(|(i, c)| (*i, c.clone())))
    }

    /// `proj_I(X) = X_I`.
    pub fn coeff(&self, i: GIndex) -> S {
        self.terms.get(&i).cloned().unwrap_or_else(S::zero)
    }

    pub fn body(&self) -> S {
        self.coeff(GIndex::EMPTY)
    }

    pub fn soul(&self) -> Self {
        self.filter(|i| !i.is_empty())
    }

    fn filter(&self, keep: impl Fn(GIndex) -> bool) -> Self {
        Supernumber {
            sk: self.sk,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    /// Degree-`j` component.
    pub fn grade_project(&self, j: u32) -> Self {
        self.filter(|i| i.degree() == j)
    }

    /// `π_ev` or `π_od`; the undefined parity projects to zero.
    pub fn parity_project(&self, p: Parity) -> Self {
        match p {
            Parity::Even => self.filter(|i| i.is_even()),
            Parity::Odd => self.filter(|i| !i.is_even()),
            Parity::Undefined => Supernumber::zero(self.sk),
        }
    }

    /// Parity of a homogeneous value; zero counts as even.
    pub fn parity_of(&self) -> Parity {
        let has_even = self.terms.keys().any(|i| i.is_even());
        let has_odd = self.terms.keys().any(|i| !i.is_even());
        match (has_even, has_odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Undefined,
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity_of() == Parity::Even
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|i| !i.is_even())
    }

    /// `p_{L'}`: drops every blade using a generator above `L'`.
    pub fn skeleton_project(&self, l: u32) -> Result<Self> {
        if l > self.sk.l {
            return Err(Error::Skeleton(format!(
                "cannot project skeleton L={} onto the larger skeleton L={l}",
                self.sk.l
            )));
        }
        let sk = Skeleton::new(l, self.sk.d.min(l))?;
        let mut out = Supernumber::zero(sk);
        for (i, c) in &self.terms {
            if i.within(l) {
                out.terms.insert(*i, c.clone());
            }
        }
        Ok(out)
    }

    /// Keeps degrees `≤ d` and lowers the cutoff accordingly.
    pub fn truncate(&self, d: u32) -> Self {
        let d = d.min(self.sk.d);
        let mut out = self.filter(|i| i.degree() <= d);
        out.sk = Skeleton { l: self.sk.l, d };
        out
    }

    /// `dist(X) = Σ_I 2^{-r(I)} |X_I| / (1 + |X_I|)`.
    pub fn dist(&self) -> f64 {
        self.terms
            .iter()
            .map(|(i, c)| {
                let a = c.modulus();
                metric_weight(*i).to_f64() * a / (1.0 + a)
            })
            .fold(0.0, |acc, w| acc + w)
    }

    pub fn dist_pair(&self, other: &Self) -> f64 {
        (self - other).dist()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::modulus).fold(0.0, f64::max)
    }

    /// Whether the body is real, i.e. `X ∈ ℜ`.
    pub fn reality_check(&self) -> bool {
        self.body().is_real()
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Supernumber::zero(self.sk);
        for (i, v) in &self.terms {
            out.accumulate(*i, v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Supernumber::one(self.sk);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Smallest degree among soul terms, `None` for a pure body.
    pub fn min_soul_degree(&self) -> Option<u32> {
        self.terms.keys().filter(|i| !i.is_empty()).map(|i| i.degree()).min()
    }

    /// Applies `f` to every coefficient.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Supernumber<T> {
        let mut out = Supernumber::zero(self.sk);
        for (i, c) in &self.terms {
            out.accumulate(*i, f(c));
        }
        out
    }

    pub fn to_float(&self) -> Supernumber<Float> {
        self.map(Scalar::to_float)
    }

    /// `X + ε·V` over dual-number coefficients.
    pub fn with_tangent(&self, v: &Self) -> Supernumber<Dual<S>> {
        let sk = self.sk.join(v.sk);
        let mut out = Supernumber::zero(sk);
        for (i, c) in &self.terms {
            out.accumulate(*i, Dual::constant(c.clone()));
        }
        for (i, c) in &v.terms {
            out.accumulate(*i, Dual::new(S::zero(), c.clone()));
        }
        out
    }

    /// Coefficient-wise comparison with tolerance `tol` (exact carriers ignore it).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let keys: std::collections::BTreeSet<GIndex> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter()
            .all(|i| self.coeff(i).approx_eq(&other.coeff(i), tol))
    }

    fn add_ref(&self, rhs: &Self, negate: bool) -> Self {
        let sk = self.sk.join(rhs.sk);
        let mut out = Supernumber::zero(sk);
        for (i, c) in &self.terms {
            if i.degree() <= sk.d {
                out.accumulate(*i, c.clone());
            }
        }
        for (i, c) in &rhs.terms {
            if i.degree() <= sk.d {
                out.accumulate(*i, if negate { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let sk = self.sk.join(rhs.sk);
        let mut out = Supernumber::zero(sk);
        for (j, a) in &self.terms {
            for (k, b) in &rhs.terms {
                if j.degree() + k.degree() > sk.d {
                    continue;
                }
                if let Some((sign, i)) = merge_sign(*j, *k) {
                    out.accumulate(i, sign.apply(a.clone() * b.clone()));
                }
            }
        }
        out
    }
}

impl<S: Scalar> Supernumber<Dual<S>> {
    /// Splits `X + ε·V` into `(X, V)`.
    pub fn split_tangent(&self) -> (Supernumber<S>, Supernumber<S>) {
        (self.map(|d| d.re.clone()), self.map(|d| d.eps.clone()))
    }
}

impl<S: Scalar> Add<&Supernumber<S>> for &Supernumber<S> {
    type Output = Supernumber<S>;
    fn add(self, rhs: &Supernumber<S>) -> Supernumber<S> {
        self.add_ref(rhs, false)
    }
}

impl<S: Scalar> Sub<&Supernumber<S>> for &Supernumber<S> {
    type Output = Supernumber<S>;
    fn sub(self, rhs: &Supernumber<S>) -> Supernumber<S> {
        self.add_ref(rhs, true)
    }
}

impl<S: Scalar> Mul<&Supernumber<S>> for &Supernumber<S> {
    type Output = Supernumber<S>;
    fn mul(self, rhs: &Supernumber<S>) -> Supernumber<S> {
        self.mul_ref(rhs)
    }
}

impl<S: Scalar> Neg for &Supernumber<S> {
    type Output = Supernumber<S>;
    fn neg(self) -> Supernumber<S> {
        self.map(|c| -c.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<S: Scalar> $tr<Supernumber<S>> for Supernumber<S> {
            type Output = Supernumber<S>;
            fn $method(self, rhs: Supernumber<S>) -> Supernumber<S> {
                (&self).$method(&rhs)
            }
        }
        impl<S: Scalar> $tr<&Supernumber<S>> for Supernumber<S> {
            type Output = Supernumber<S>;
            fn $method(self, rhs: &Supernumber<S>) -> Supernumber<S> {
                (&self).$method(rhs)
            }
        }
        impl<S: Scalar> $tr<Supernumber<S>> for &Supernumber<S> {
            type Output = Supernumber<S>;
            fn $method(self, rhs: Supernumber<S>) -> Supernumber<S> {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Scalar> Neg for Supernumber<S> {
    type Output = Supernumber<S>;
    fn neg(self) -> Supernumber<S> {
        -&self
    }
}

pub(crate) fn format_scalar<S: Scalar>(c: &S) -> String {
    let (re, im) = c.format();
    let re_zero = re == "0";
    let im_zero = im == "0";
    match (re_zero, im_zero) {
        (_, true) => re,
        (true, false) => format!("{im}i"),
        (false, false) => {
            if im.starts_with('-') {
                format!("({re}{im}i)")
            } else {
                format!("({re}+{im}i)")
            }
        }
    }
}

impl<S: Scalar> fmt::Display for Supernumber<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.terms.iter().enumerate() {
            let mut coef = format_scalar(c);
            let negative = coef.starts_with('-');
            if negative {
                coef.remove(0);
            }
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if i.is_empty() {
                write!(f, "{coef}")?;
            } else {
                if coef != "1" {
                    write!(f, "{coef}·")?;
                }
                for g in i.gens() {
                    write!(f, "σ{g}")?;
                }
            }
        }
        Ok(())
    }
}
