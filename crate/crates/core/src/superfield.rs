//! Supersmooth functions `u(x, θ) = Σ_a θ^a f̃_a(x)` and their calculus.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::continuation::continue_valued;
use crate::error::{Error, EvalError, Result};
use crate::gindex::{EvenMulti, GIndex, OddMulti, Sign};
use crate::scalar::{Rational, Scalar};
use crate::smoothfn::{PolyMap, SmoothMap, SupernumberValuedMap};
use crate::superspace::{basis_direction, CoordIndex, SuperPoint};
use crate::supernumber::{Skeleton, Supernumber};

/// A map from points of `ℜ_L^{m|n}` to supernumbers that can be evaluated on
/// any scalar carrier.
pub trait SuperFunction: Sync {
    /// `(m, n)`.
    fn dims(&self) -> (usize, usize);
    fn eval<S: Scalar>(&self, x: &SuperPoint<S>) -> Result<Supernumber<S>>;

    /// Short label used in reports.
    fn name(&self) -> String;

    /// The expansion behind this function, when it is known symbolically.
    fn as_superfield(&self) -> Option<&Superfield> {
        None
    }
}

/// `u = Σ_a θ^a f̃_a(x)` with the odd monomial on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct Superfield {
    m: usize,
    n: usize,
    coeffs: BTreeMap<OddMulti, SupernumberValuedMap>,
}

fn check_dims(m: usize, n: usize, a: OddMulti, f: &SupernumberValuedMap) -> Result<()> {
    if a.n() != n {
        return Err(Error::Domain(format!("odd multi-index {a} does not have {n} entries")));
    }
    if f.arity() != m {
        return Err(EvalError::Arity { expected: m, got: f.arity() }.into());
    }
    Ok(())
}

fn collect_coeffs(
    m: usize,
    n: usize,
    coeffs: impl IntoIterator<Item = (OddMulti, SupernumberValuedMap)>,
) -> Result<BTreeMap<OddMulti, SupernumberValuedMap>> {
    let mut map = BTreeMap::new();
    for (a, f) in coeffs {
        check_dims(m, n, a, &f)?;
        if map.contains_key(&a) {
            return Err(Error::Domain(format!("coefficient {a} given twice")));
        }
        if !f.is_zero() {
            map.insert(a, f);
        }
    }
    Ok(map)
}

/// Warns when `θ^a f_a` do not share one parity.
fn warn_if_inhomogeneous(coeffs: &BTreeMap<OddMulti, SupernumberValuedMap>) {
    let valued = coeffs
        .values()
        .any(|f| f.components().any(|(i, _)| !i.is_empty()));
    if !valued {
        return;
    }
    let mut parities = Vec::new();
    for (a, f) in coeffs {
        match f.homogeneous_parity() {
            Some(even) => parities.push((a.degree() % 2 == 0) == even),
            None => {
                log::warn!("coefficient {a} mixes even and odd blades; the superfield is not homogeneous");
                return;
            }
        }
    }
    if parities.windows(2).any(|w| w[0] != w[1]) {
        log::warn!("terms θ^a f_a have different parities; the superfield is not homogeneous");
    }
}

/// `θ^a = θ_{s_1} θ_{s_2} ⋯` with `s_1 < s_2 < …`.
fn odd_monomial<S: Scalar>(a: OddMulti, theta: &[Supernumber<S>], sk: Skeleton) -> Supernumber<S> {
    let mut acc = Supernumber::one(sk);
    for s in a.support() {
        acc = &acc * &theta[s - 1];
        if acc.is_zero() {
            break;
        }
    }
    acc
}

impl Superfield {
    pub fn new(m: usize, n: usize, coeffs: impl IntoIterator<Item = (OddMulti, SupernumberValuedMap)>) -> Result<Self> {
        let coeffs = collect_coeffs(m, n, coeffs)?;
        warn_if_inhomogeneous(&coeffs);
        Ok(Superfield { m, n, coeffs })
    }

    /// Superfield with scalar-valued coefficients.
    pub fn from_scalar(m: usize, n: usize, coeffs: impl IntoIterator<Item = (OddMulti, SmoothMap)>) -> Result<Self> {
        Superfield::new(m, n, coeffs.into_iter().map(|(a, f)| (a, SupernumberValuedMap::scalar(f))))
    }

    pub fn zero(m: usize, n: usize) -> Self {
        Superfield { m, n, coeffs: BTreeMap::new() }
    }

    /// `u = x_j` (1-based).
    pub fn even_coordinate(m: usize, n: usize, j: usize) -> Self {
        let f = SmoothMap::Poly(PolyMap::variable(m, j - 1));
        Superfield::from_scalar(m, n, [(OddMulti::zero(n), f)]).expect("dimensions agree")
    }

    /// `u = θ_s` (1-based).
    pub fn odd_coordinate(m: usize, n: usize, s: usize) -> Self {
        let f = SmoothMap::constant(m, <crate::scalar::Exact as Scalar>::one());
        Superfield::from_scalar(m, n, [(OddMulti::unit(n, s), f)]).expect("dimensions agree")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&OddMulti, &SupernumberValuedMap)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, a: OddMulti) -> Option<&SupernumberValuedMap> {
        self.coeffs.get(&a)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest total degree of the polynomial coefficients, `None` if some
    /// coefficient is not polynomial.
    pub fn polynomial_degree(&self) -> Option<u32> {
        let mut deg = 0;
        for f in self.coeffs.values() {
            for (_, g) in f.components() {
                deg = deg.max(g.as_poly()?.total_degree().unwrap_or(0));
            }
        }
        Some(deg)
    }

    /// `∂_{x_j} u` (1-based): coefficient-wise differentiation.
    pub fn partial_even(&self, j: usize) -> Result<Superfield> {
        if j == 0 || j > self.m {
            return Err(Error::Domain(format!("no even variable x_{j} in ℜ^{{{}|{}}}", self.m, self.n)));
        }
        let alpha = EvenMulti::unit(self.m, j - 1);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(a, f)| Ok((*a, f.partial(&alpha)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Superfield { m: self.m, n: self.n, coeffs: collect_coeffs(self.m, self.n, coeffs)? })
    }

    /// Left derivative `∂_{θ_s} u` (1-based): `θ^a f_a ↦ (-1)^{l(a)} θ^{a-e_s} f_a`
    /// with `l(a) = Σ_{j<s} a_j`.
    pub fn partial_odd_left(&self, s: usize) -> Result<Superfield> {
        if s == 0 || s > self.n {
            return Err(Error::Domain(format!("no odd variable θ_{s} in ℜ^{{{}|{}}}", self.m, self.n)));
        }
        let coeffs = self.coeffs.iter().filter(|(a, _)| a.get(s)).map(|(a, f)| {
            let sign = Sign::from_parity(a.count_before(s) % 2 == 1);
            (a.toggled(s), negate_if(f, sign))
        });
        Ok(Superfield { m: self.m, n: self.n, coeffs: collect_coeffs(self.m, self.n, coeffs)? })
    }

    /// `∂_θ^a u`, differentiating in `θ_{s_1}` first, then `θ_{s_2}`, and so on.
    pub fn partial_odd_multi(&self, a: OddMulti) -> Result<Superfield> {
        let mut u = self.clone();
        for s in a.support() {
            u = u.partial_odd_left(s)?;
        }
        Ok(u)
    }

    pub fn partial_even_multi(&self, alpha: &EvenMulti) -> Result<Superfield> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(a, f)| Ok((*a, f.partial(alpha)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Superfield { m: self.m, n: self.n, coeffs: collect_coeffs(self.m, self.n, coeffs)? })
    }

    /// Right-ordered form `Σ_a f_a θ^a` of the same function.
    pub fn to_right(&self) -> RightSuperfield {
        RightSuperfield { m: self.m, n: self.n, coeffs: reorder(&self.coeffs) }
    }

    /// `f̃_a(x)` for every `a`, in skeleton `sk`.
    pub fn continued_coefficients<S: Scalar>(&self, x: &[Supernumber<S>], sk: Skeleton) -> Result<BTreeMap<OddMulti, Supernumber<S>>> {
        let mut out = BTreeMap::new();
        for (a, f) in &self.coeffs {
            let v = continue_valued(f, x, sk)?;
            if !v.is_zero() {
                out.insert(*a, v);
            }
        }
        Ok(out)
    }
}

fn negate_if(f: &SupernumberValuedMap, sign: Sign) -> SupernumberValuedMap {
    if !sign.is_minus() {
        return f.clone();
    }
    let minus = -<crate::scalar::Exact as Scalar>::one();
    let comps = f.components().map(|(i, g)| (*i, scale_map(g, &minus)));
    SupernumberValuedMap::new(f.arity(), comps).expect("arity preserved")
}

fn scale_map(g: &SmoothMap, c: &crate::scalar::Exact) -> SmoothMap {
    match g {
        SmoothMap::Poly(p) => SmoothMap::Poly(p.scale(c)),
        SmoothMap::Analytic(a) => {
            let mut a = a.clone();
            a.scale = a.scale.clone() * c.clone();
            SmoothMap::Analytic(a)
        }
        SmoothMap::Custom(_) => {
            // Negation of an opaque map is expressed as a product with a constant polynomial.
            SmoothMap::Custom(std::sync::Arc::new(Scaled { inner: g.clone(), c: c.clone() }))
        }
    }
}

#[derive(Debug)]
struct Scaled {
    inner: SmoothMap,
    c: crate::scalar::Exact,
}

impl crate::smoothfn::SmoothFunction for Scaled {
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn eval_exact(&self, q: &[crate::scalar::Exact]) -> std::result::Result<crate::scalar::Exact, EvalError> {
        Ok(self.inner.eval(q)? * self.c.clone())
    }

    fn eval_float(&self, q: &[crate::scalar::Float]) -> std::result::Result<crate::scalar::Float, EvalError> {
        Ok(self.inner.eval(q)? * self.c.to_float())
    }

    fn partial(&self, alpha: &EvenMulti) -> std::result::Result<SmoothMap, EvalError> {
        Ok(scale_map(&self.inner.partial(alpha)?, &self.c))
    }
}

/// `θ^a f_a = (-1)^{|a||I|} f_{a,I} σ^I θ^a` blade by blade.
fn reorder(coeffs: &BTreeMap<OddMulti, SupernumberValuedMap>) -> BTreeMap<OddMulti, SupernumberValuedMap> {
    let minus = -<crate::scalar::Exact as Scalar>::one();
    coeffs
        .iter()
        .map(|(a, f)| {
            let comps = f.components().map(|(i, g)| {
                if (a.degree() * i.degree()) % 2 == 1 {
                    (*i, scale_map(g, &minus))
                } else {
                    (*i, g.clone())
                }
            });
            (*a, SupernumberValuedMap::new(f.arity(), comps).expect("arity preserved"))
        })
        .collect()
}

impl SuperFunction for Superfield {
    fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn name(&self) -> String {
        format!("superfield on R^{}|{}", self.m, self.n)
    }

    fn as_superfield(&self) -> Option<&Superfield> {
        Some(self)
    }

    fn eval<S: Scalar>(&self, x: &SuperPoint<S>) -> Result<Supernumber<S>> {
        check_point(self.m, self.n, x)?;
        let sk = x.skeleton();
        let mut acc = Supernumber::zero(sk);
        for (a, f) in &self.coeffs {
            let theta_a = odd_monomial(*a, x.odd(), sk);
            if theta_a.is_zero() {
                continue;
            }
            acc = &acc + &(&theta_a * &continue_valued(f, x.even(), sk)?);
        }
        Ok(acc)
    }
}

fn check_point<S: Scalar>(m: usize, n: usize, x: &SuperPoint<S>) -> Result<()> {
    if x.m() != m || x.n() != n {
        return Err(Error::Domain(format!(
            "point of ℜ^{{{}|{}}} passed to a function on ℜ^{{{m}|{n}}}",
            x.m(),
            x.n()
        )));
    }
    Ok(())
}

/// `u = Σ_a f_a(x) θ^a` with the odd monomial on the right.
#[derive(Clone, Debug, PartialEq)]
pub struct RightSuperfield {
    m: usize,
    n: usize,
    coeffs: BTreeMap<OddMulti, SupernumberValuedMap>,
}

impl RightSuperfield {
    pub fn new(m: usize, n: usize, coeffs: impl IntoIterator<Item = (OddMulti, SupernumberValuedMap)>) -> Result<Self> {
        Ok(RightSuperfield { m, n, coeffs: collect_coeffs(m, n, coeffs)? })
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&OddMulti, &SupernumberValuedMap)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, a: OddMulti) -> Option<&SupernumberValuedMap> {
        self.coeffs.get(&a)
    }

    /// Right derivative `u ∂⃖_{θ_s}`: `f_a θ^a ↦ (-1)^{r(a)} f_a θ^{a-e_s}` with
    /// `r(a) = Σ_{j>s} a_j`.
    pub fn partial_odd_right(&self, s: usize) -> Result<RightSuperfield> {
        if s == 0 || s > self.n {
            return Err(Error::Domain(format!("no odd variable θ_{s} in ℜ^{{{}|{}}}", self.m, self.n)));
        }
        let coeffs = self.coeffs.iter().filter(|(a, _)| a.get(s)).map(|(a, f)| {
            let sign = Sign::from_parity(a.count_after(s) % 2 == 1);
            (a.toggled(s), negate_if(f, sign))
        });
        Ok(RightSuperfield { m: self.m, n: self.n, coeffs: collect_coeffs(self.m, self.n, coeffs)? })
    }

    /// Left-ordered form of the same function.
    pub fn to_left(&self) -> Superfield {
        Superfield { m: self.m, n: self.n, coeffs: reorder(&self.coeffs) }
    }
}

impl SuperFunction for RightSuperfield {
    fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn name(&self) -> String {
        format!("right superfield on R^{}|{}", self.m, self.n)
    }

    fn eval<S: Scalar>(&self, x: &SuperPoint<S>) -> Result<Supernumber<S>> {
        check_point(self.m, self.n, x)?;
        let sk = x.skeleton();
        let mut acc = Supernumber::zero(sk);
        for (a, f) in &self.coeffs {
            let theta_a = odd_monomial(*a, x.odd(), sk);
            if theta_a.is_zero() {
                continue;
            }
            acc = &acc + &(&continue_valued(f, x.even(), sk)? * &theta_a);
        }
        Ok(acc)
    }
}

/// How coordinate derivatives of a function on superspace are taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeMethod {
    /// Exact forward derivative with dual-number coefficients.
    Dual,
    /// `(F(X + hE) - F(X - hE)) / 2h`, optionally with one Richardson step.
    CentralDifference { h: f64, richardson: bool },
}

/// Default step for central differences.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

impl DerivativeMethod {
    /// Dual numbers on exact carriers, central differences on floats.
    pub fn default_for<S: Scalar>() -> Self {
        if S::EXACT {
            DerivativeMethod::Dual
        } else {
            DerivativeMethod::CentralDifference { h: DEFAULT_FD_STEP, richardson: false }
        }
    }
}

fn scalar_from_f64<S: Scalar>(v: f64) -> Result<S> {
    let r = BigRational::from_float(v).ok_or_else(|| Error::Config(format!("step {v} is not finite")))?;
    Ok(S::from_rational(&r))
}

/// `d/dt F(X + t V)|_{t=0}`.
pub fn directional<F: SuperFunction, S: Scalar>(
    f: &F,
    x: &SuperPoint<S>,
    v: &SuperPoint<S>,
    method: DerivativeMethod,
) -> Result<Supernumber<S>> {
    match method {
        DerivativeMethod::Dual => {
            let lifted = x.with_tangent(v)?;
            Ok(f.eval(&lifted)?.split_tangent().1)
        }
        DerivativeMethod::CentralDifference { h, richardson } => {
            let central = |h: f64| -> Result<Supernumber<S>> {
                let hs: S = scalar_from_f64(h)?;
                let plus = f.eval(&x.add_scaled(v, &hs)?)?;
                let minus = f.eval(&x.add_scaled(v, &-hs)?)?;
                Ok((&plus - &minus).scale(&scalar_from_f64(0.5 / h)?))
            };
            let d1 = central(h)?;
            if !richardson {
                return Ok(d1);
            }
            let d2 = central(h / 2.0)?;
            let four_thirds: S = S::from_rational(&crate::scalar::ratio(4, 3));
            let third: S = S::from_rational(&crate::scalar::ratio(1, 3));
            Ok(&d2.scale(&four_thirds) - &d1.scale(&third))
        }
    }
}

/// `∂F/∂X_{A,I} = d/dt F(X + t E_{A,I})|_{t=0}`.
pub fn coord_partial<F: SuperFunction, S: Scalar>(
    f: &F,
    x: &SuperPoint<S>,
    c: CoordIndex,
    method: DerivativeMethod,
) -> Result<Supernumber<S>> {
    let (m, n) = f.dims();
    let e = basis_direction::<S>(c, m, n, x.skeleton())?;
    directional(f, x, &e, method)
}

/// `Σ_j y_j ∂_{x_j} u(X) + Σ_s ω_s ∂_{θ_s} u(X)`, checked against the
/// derivative of `t ↦ u(X + tY)`.
pub fn gateaux_derivative<S: Scalar>(u: &Superfield, x: &SuperPoint<S>, y: &SuperPoint<S>, tol: f64) -> Result<Supernumber<S>> {
    let mut rhs = Supernumber::zero(x.skeleton());
    for j in 1..=u.m {
        rhs = &rhs + &(&y.even()[j - 1] * &u.partial_even(j)?.eval(x)?);
    }
    for s in 1..=u.n {
        rhs = &rhs + &(&y.odd()[s - 1] * &u.partial_odd_left(s)?.eval(x)?);
    }
    let lhs = directional(u, x, y, DerivativeMethod::Dual)?;
    if !lhs.approx_eq(&rhs, tol) {
        return Err(Error::Consistency(format!(
            "d/dt u(X+tY) = {lhs} disagrees with the partial-derivative sum {rhs}"
        )));
    }
    Ok(rhs)
}

/// Taylor partial sum of a superfield compared with its value at `X + Y`.
#[derive(Clone, Debug)]
pub struct SuperTaylor<S> {
    pub partial_sum: Supernumber<S>,
    pub value: Supernumber<S>,
    pub defect: Supernumber<S>,
}

/// `Σ_{p ≤ N} Σ_{|α|+|a|=p} (1/α!) y^α ω^a ∂_x^α ∂_θ^a u(X)`.
pub fn taylor_superfield<S: Scalar>(u: &Superfield, x: &SuperPoint<S>, y: &SuperPoint<S>, order: u32) -> Result<SuperTaylor<S>> {
    let sk = x.skeleton().join(y.skeleton());
    let x = x.embed(sk)?;
    let y = y.embed(sk)?;
    let mut partial_sum = Supernumber::zero(sk);
    for a in OddMulti::all(u.n) {
        if a.degree() > order {
            continue;
        }
        let omega_a = odd_monomial(a, y.odd(), sk);
        if omega_a.is_zero() {
            continue;
        }
        let du = u.partial_odd_multi(a)?;
        if du.is_zero() {
            continue;
        }
        for alpha in EvenMulti::up_to(u.m, order - a.degree()) {
            let mut y_alpha = Supernumber::one(sk);
            for (yj, &k) in y.even().iter().zip(&alpha.0) {
                y_alpha = &y_alpha * &yj.pow(k);
            }
            if y_alpha.is_zero() {
                continue;
            }
            let d = du.partial_even_multi(&alpha)?.eval(&x)?;
            let inv = S::from_rational(&(Rational::one() / Rational::from_integer(alpha.factorial().into())));
            partial_sum = &partial_sum + &(&(&y_alpha * &omega_a) * &d).scale(&inv);
        }
    }
    let value = u.eval(&x.add(&y)?)?;
    let defect = &value - &partial_sum;
    Ok(SuperTaylor { partial_sum, value, defect })
}

/// Coefficients `f̃_a(x)` read off a function evaluated with fresh odd generators.
#[derive(Clone, Debug)]
pub struct Extraction<S> {
    pub coeffs: BTreeMap<OddMulti, Supernumber<S>>,
}

impl<S: Scalar> Extraction<S> {
    pub fn coeff(&self, a: OddMulti) -> Option<&Supernumber<S>> {
        self.coeffs.get(&a)
    }
}

/// Evaluates `F(x, θ*)` with `θ*_k = σ_{L+k}` and recovers every `f̃_a(x)`.
///
/// `F` is called on the skeleton `(L + n, min(D + n, L + n))`; the returned
/// coefficients live in `x`'s skeleton.
pub fn superfield_extract<F: SuperFunction, S: Scalar>(f: &F, x: &[Supernumber<S>], sk: Skeleton) -> Result<Extraction<S>> {
    let (m, n) = f.dims();
    if x.len() != m {
        return Err(EvalError::Arity { expected: m, got: x.len() }.into());
    }
    let wide_l = sk.l() as usize + n;
    if wide_l > crate::gindex::MAX_GENERATORS as usize {
        return Err(Error::Config(format!(
            "extraction needs {n} fresh generators beyond L={} but the library stops at {}",
            sk.l(),
            crate::gindex::MAX_GENERATORS
        )));
    }
    let wide = Skeleton::new(wide_l as u32, (sk.d() as usize + n).min(wide_l) as u32)?;
    let theta = (1..=n)
        .map(|k| Supernumber::generator(wide, sk.l() + k as u32))
        .collect::<Result<Vec<_>>>()?;
    let point = SuperPoint::new(wide, x.to_vec(), theta)?;
    let value = f.eval(&point)?;
    let fresh_mask = GIndex::top(wide_l as u32).mask() & !GIndex::top(sk.l()).mask();
    let mut coeffs: BTreeMap<OddMulti, Vec<(GIndex, S)>> = BTreeMap::new();
    for (k, c) in value.terms() {
        let fresh = GIndex::from_mask(k.mask() & fresh_mask);
        let base = GIndex::from_mask(k.mask() & !fresh_mask);
        let bits = (fresh.mask() >> sk.l()) as u32;
        let a = OddMulti::from_bits(n, bits);
        let sign = Sign::from_parity((a.degree() * base.degree()) % 2 == 1);
        coeffs.entry(a).or_default().push((base, sign.apply(c.clone())));
    }
    let coeffs = coeffs
        .into_iter()
        .map(|(a, terms)| Ok((a, Supernumber::from_terms(sk, terms)?)))
        .collect::<Result<BTreeMap<_, _>>>()?
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(Extraction { coeffs })
}

/// Settings for [`integrate_path`].
#[derive(Clone, Copy, Debug)]
pub struct PathOptions {
    /// Degree of the interpolating polynomial tried first.
    pub max_degree: u32,
    /// Absolute tolerance of the polynomial test and of adaptive quadrature (floats only).
    pub tol: f64,
    pub max_depth: u32,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { max_degree: 8, tol: 1e-10, max_depth: 40 }
    }
}

/// Lagrange basis on the nodes `k/d`: values at `s` and integrals over `[0, 1]`.
fn lagrange(d: u32, s: &Rational) -> (Vec<Rational>, Vec<Rational>) {
    let nodes: Vec<Rational> = (0..=d).map(|k| crate::scalar::ratio(k as i64, d as i64)).collect();
    let mut values = Vec::new();
    let mut integrals = Vec::new();
    for (k, sk) in nodes.iter().enumerate() {
        // coefficients of Π_{j≠k} (s - s_j) / (s_k - s_j), lowest degree first
        let mut poly = vec![Rational::one()];
        for (j, sj) in nodes.iter().enumerate() {
            if j == k {
                continue;
            }
            let denom = sk - sj;
            let mut next = vec![Rational::zero(); poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c / &denom;
                next[p] -= c * sj / &denom;
            }
            poly = next;
        }
        let mut value = Rational::zero();
        let mut power = Rational::one();
        let mut integral = Rational::zero();
        for (p, c) in poly.iter().enumerate() {
            value += c * &power;
            power *= s;
            integral += c / Rational::from_integer((p as i64 + 1).into());
        }
        values.push(value);
        integrals.push(integral);
    }
    (values, integrals)
}

/// `∫_a^b φ(t) dt`, componentwise. Integrands that agree with their degree-`d`
/// interpolant at a probe node are integrated exactly; otherwise float
/// carriers fall back to adaptive Simpson quadrature.
pub fn integrate_path<S: Scalar>(
    phi: impl Fn(&S) -> Result<Supernumber<S>>,
    a: &S,
    b: &S,
    opts: &PathOptions,
) -> Result<Supernumber<S>> {
    let d = opts.max_degree.max(1);
    let width = b.clone() - a.clone();
    let at = |s: &Rational| -> Result<Supernumber<S>> { phi(&(a.clone() + width.clone() * S::from_rational(s))) };
    let samples = (0..=d)
        .map(|k| at(&crate::scalar::ratio(k as i64, d as i64)))
        .collect::<Result<Vec<_>>>()?;
    let probe = crate::scalar::ratio(1, 2 * d as i64);
    let (values, integrals) = lagrange(d, &probe);
    let sk = samples[0].skeleton();
    let mut interp = Supernumber::zero(sk);
    let mut integral = Supernumber::zero(sk);
    for ((v, w), sample) in values.iter().zip(&integrals).zip(&samples) {
        interp = &interp + &sample.scale(&S::from_rational(v));
        integral = &integral + &sample.scale(&S::from_rational(w));
    }
    if interp.approx_eq(&at(&probe)?, opts.tol) {
        return Ok(integral.scale(&width));
    }
    if S::EXACT {
        return Err(EvalError::inexact("path integral of a non-polynomial integrand").into());
    }
    let fa = phi(a)?;
    let fb = phi(b)?;
    let mid = scalar_from_f64::<S>(0.5)? * (a.clone() + b.clone());
    let fm = phi(&mid)?;
    let whole = simpson(&fa, &fm, &fb, &width);
    adaptive(&phi, a.clone(), b.clone(), fa, fm, fb, whole, opts.tol, opts.max_depth)
}

fn simpson<S: Scalar>(fa: &Supernumber<S>, fm: &Supernumber<S>, fb: &Supernumber<S>, width: &S) -> Supernumber<S> {
    let sixth = S::from_rational(&crate::scalar::ratio(1, 6));
    let four = S::from_i64(4);
    (&(fa + &fm.scale(&four)) + fb).scale(&(width.clone() * sixth))
}

#[allow(clippy::too_many_arguments)]
fn adaptive<S: Scalar>(
    phi: &impl Fn(&S) -> Result<Supernumber<S>>,
    a: S,
    b: S,
    fa: Supernumber<S>,
    fm: Supernumber<S>,
    fb: Supernumber<S>,
    whole: Supernumber<S>,
    tol: f64,
    depth: u32,
) -> Result<Supernumber<S>> {
    let half = scalar_from_f64::<S>(0.5)?;
    let m = half.clone() * (a.clone() + b.clone());
    let lm = half.clone() * (a.clone() + m.clone());
    let rm = half * (m.clone() + b.clone());
    let flm = phi(&lm)?;
    let frm = phi(&rm)?;
    let left = simpson(&fa, &flm, &fm, &(m.clone() - a.clone()));
    let right = simpson(&fm, &frm, &fb, &(b.clone() - m.clone()));
    let both = &left + &right;
    let err = (&both - &whole).max_abs();
    if depth == 0 || err <= 15.0 * tol {
        let correction = (&both - &whole).scale(&S::from_rational(&crate::scalar::ratio(1, 15)));
        return Ok(&both + &correction);
    }
    let l = adaptive(phi, a, m.clone(), fa, flm, fm.clone(), left, tol / 2.0, depth - 1)?;
    let r = adaptive(phi, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(&l + &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact, Exact, Float};
    use crate::smoothfn::{AnalyticKind, AnalyticMap};
    use num_complex::Complex64;

    fn sk(l: u32) -> Skeleton {
        Skeleton::full(l).unwrap()
    }

    fn gen(l: u32, k: u32) -> Supernumber<Exact> {
        Supernumber::generator(sk(l), k).unwrap()
    }

    fn num(l: u32, v: i64) -> Supernumber<Exact> {
        Supernumber::from_i64(sk(l), v)
    }

    fn poly(m: usize, terms: &[(&[u32], i64)]) -> SmoothMap {
        SmoothMap::Poly(PolyMap::from_terms(m, terms.iter().map(|(e, c)| (e.to_vec(), exact(*c, 1)))).unwrap())
    }

    fn om(a: &[u8]) -> OddMulti {
        OddMulti::from_slice(a).unwrap()
    }

    /// `θ1θ2 g` with `g = q_1`.
    fn theta12_g() -> Superfield {
        Superfield::from_scalar(1, 2, [(om(&[1, 1]), poly(1, &[(&[1], 1)]))]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let u = Superfield::from_scalar(0, 2, [(om(&[1, 1]), SmoothMap::constant(0, exact(1, 1)))]).unwrap();
        let x = SuperPoint::new(sk(2), vec![], vec![gen(2, 1), gen(2, 2)]).unwrap();
        assert_eq!(u.eval(&x).unwrap(), &gen(2, 1) * &gen(2, 2));

        let u = Superfield::even_coordinate(1, 0, 1);
        let x1 = &num(2, 3) + &(&gen(2, 1) * &gen(2, 2));
        let x = SuperPoint::new(sk(2), vec![x1.clone()], vec![]).unwrap();
        assert_eq!(u.eval(&x).unwrap(), x1);

        let u = Superfield::from_scalar(1, 1, [(om(&[1]), poly(1, &[(&[2], 1)]))]).unwrap();
        let s34 = &gen(4, 3) * &gen(4, 4);
        let x = SuperPoint::new(sk(4), vec![&num(4, 2) + &s34], vec![gen(4, 1)]).unwrap();
        let expected = &(&gen(4, 1) * &num(4, 4)) + &(&(&gen(4, 1) * &s34) * &num(4, 4));
        assert_eq!(u.eval(&x).unwrap(), expected);
    }

    #[test]
    fn even_partial_examples() {
        let u = Superfield::from_scalar(1, 1, [(om(&[1]), poly(1, &[(&[2], 1)]))]).unwrap();
        let expected = Superfield::from_scalar(1, 1, [(om(&[1]), poly(1, &[(&[1], 2)]))]).unwrap();
        assert_eq!(u.partial_even(1).unwrap(), expected);
        let c = Superfield::from_scalar(1, 1, [(om(&[0]), SmoothMap::constant(1, exact(3, 1)))]).unwrap();
        assert!(c.partial_even(1).unwrap().is_zero());
        let v = Superfield::from_scalar(2, 1, [(om(&[1]), poly(2, &[(&[2, 3], 1), (&[1, 0], 5)]))]).unwrap();
        assert_eq!(
            v.partial_even(1).unwrap().partial_even(2).unwrap(),
            v.partial_even(2).unwrap().partial_even(1).unwrap()
        );
    }

    #[test]
    fn left_odd_partial_examples() {
        let u = theta12_g();
        let g = poly(1, &[(&[1], 1)]);
        let minus_g = poly(1, &[(&[1], -1)]);
        assert_eq!(u.partial_odd_left(2).unwrap(), Superfield::from_scalar(1, 2, [(om(&[1, 0]), minus_g)]).unwrap());
        assert_eq!(u.partial_odd_left(1).unwrap(), Superfield::from_scalar(1, 2, [(om(&[0, 1]), g.clone())]).unwrap());
        let v = Superfield::from_scalar(1, 2, [(om(&[0, 1]), g)]).unwrap();
        assert!(v.partial_odd_left(1).unwrap().is_zero());
        assert!(u.partial_odd_left(3).is_err());
    }

    #[test]
    fn right_odd_partial_examples() {
        let g = poly(1, &[(&[1], 1)]);
        let r = RightSuperfield::new(1, 2, [(om(&[1, 1]), g.clone().into())]).unwrap();
        let minus_g: SupernumberValuedMap = poly(1, &[(&[1], -1)]).into();
        assert_eq!(r.partial_odd_right(1).unwrap().coeff(om(&[0, 1])), Some(&minus_g));
        let gg: SupernumberValuedMap = g.clone().into();
        assert_eq!(r.partial_odd_right(2).unwrap().coeff(om(&[1, 0])), Some(&gg));
        let r2 = RightSuperfield::new(1, 2, [(om(&[0, 1]), g.into())]).unwrap();
        assert!(r2.partial_odd_right(1).unwrap().coeffs().next().is_none());
    }

    #[test]
    fn right_and_left_forms_agree_on_evaluation() {
        let odd_valued = SupernumberValuedMap::new(1, [(GIndex::from_gens(&[3]).unwrap(), poly(1, &[(&[2], 1)]))]).unwrap();
        let u = Superfield::new(1, 2, [(om(&[1, 0]), odd_valued), (om(&[1, 1]), poly(1, &[(&[1], 2)]).into())]).unwrap();
        let x = SuperPoint::new(sk(5), vec![&num(5, 1) + &(&gen(5, 4) * &gen(5, 5))], vec![gen(5, 1), &gen(5, 2) + &gen(5, 5)])
            .unwrap();
        assert_eq!(u.eval(&x).unwrap(), u.to_right().eval(&x).unwrap());
        assert_eq!(u.to_right().to_left(), u);
    }

    #[test]
    fn gateaux_examples() {
        let u = Superfield::from_scalar(1, 0, [(OddMulti::zero(0), poly(1, &[(&[2], 1)]))]).unwrap();
        let x = SuperPoint::new(sk(2), vec![&num(2, 3) + &(&gen(2, 1) * &gen(2, 2))], vec![]).unwrap();
        let y = SuperPoint::new(sk(2), vec![num(2, 2)], vec![]).unwrap();
        let d = gateaux_derivative(&u, &x, &y, 0.0).unwrap();
        assert_eq!(d, &(&x.even()[0] * &y.even()[0]) * &num(2, 2));

        let u = Superfield::odd_coordinate(0, 1, 1);
        let x = SuperPoint::new(sk(3), vec![], vec![gen(3, 1)]).unwrap();
        let w = &gen(3, 2) + &gen(3, 3);
        let y = SuperPoint::new(sk(3), vec![], vec![w.clone()]).unwrap();
        assert_eq!(gateaux_derivative(&u, &x, &y, 0.0).unwrap(), w);

        let u = Superfield::from_scalar(0, 2, [(om(&[1, 1]), SmoothMap::constant(0, exact(1, 1)))]).unwrap();
        let x = SuperPoint::new(sk(4), vec![], vec![gen(4, 1), gen(4, 2)]).unwrap();
        let y = SuperPoint::new(sk(4), vec![], vec![gen(4, 3), Supernumber::zero(sk(4))]).unwrap();
        assert_eq!(gateaux_derivative(&u, &x, &y, 0.0).unwrap(), &gen(4, 3) * &gen(4, 2));
    }

    #[test]
    fn coordinate_partial_examples() {
        let x = SuperPoint::new(sk(3), vec![&num(3, 2) + &(&gen(3, 1) * &gen(3, 2))], vec![gen(3, 3)]).unwrap();
        let u = Superfield::even_coordinate(1, 1, 1);
        let c = CoordIndex::new(1, GIndex::from_gens(&[1, 2]).unwrap());
        assert_eq!(coord_partial(&u, &x, c, DerivativeMethod::Dual).unwrap(), &gen(3, 1) * &gen(3, 2));
        let u = Superfield::odd_coordinate(1, 1, 1);
        let c = CoordIndex::new(2, GIndex::from_gens(&[1]).unwrap());
        assert_eq!(coord_partial(&u, &x, c, DerivativeMethod::Dual).unwrap(), gen(3, 1));
        let u = Superfield::from_scalar(1, 1, [(om(&[0]), poly(1, &[(&[2], 1)]))]).unwrap();
        let x = SuperPoint::new(sk(3), vec![num(3, 2)], vec![Supernumber::zero(sk(3))]).unwrap();
        let c = CoordIndex::new(1, GIndex::EMPTY);
        assert_eq!(coord_partial(&u, &x, c, DerivativeMethod::Dual).unwrap(), num(3, 4));
        let fd = coord_partial(
            &u,
            &x.to_float(),
            c,
            DerivativeMethod::CentralDifference { h: 1e-3, richardson: true },
        )
        .unwrap();
        assert!((fd.body() - Complex64::new(4.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn taylor_examples() {
        let u = Superfield::from_scalar(1, 1, [(om(&[1]), poly(1, &[(&[1], 1)]))]).unwrap();
        let x = SuperPoint::new(sk(4), vec![&num(4, 1) + &(&gen(4, 1) * &gen(4, 2))], vec![gen(4, 3)]).unwrap();
        let y = SuperPoint::new(sk(4), vec![&num(4, 2) + &(&gen(4, 2) * &gen(4, 4))], vec![&gen(4, 4) - &gen(4, 1)]).unwrap();
        for n in 2..4 {
            assert!(taylor_superfield(&u, &x, &y, n).unwrap().defect.is_zero());
        }
        let zero = SuperPoint::<Exact>::zero(sk(4), 1, 1);
        let t = taylor_superfield(&u, &x, &zero, 0).unwrap();
        assert_eq!(t.partial_sum, u.eval(&x).unwrap());

        let u = Superfield::from_scalar(1, 0, [(OddMulti::zero(0), poly(1, &[(&[2], 1)]))]).unwrap();
        let x = SuperPoint::new(sk(4), vec![num(4, 1)], vec![]).unwrap();
        let yv = &num(4, 2) + &(&gen(4, 1) * &gen(4, 2));
        let y = SuperPoint::new(sk(4), vec![yv.clone()], vec![]).unwrap();
        assert_eq!(taylor_superfield(&u, &x, &y, 1).unwrap().defect, &yv * &yv);
    }

    #[test]
    fn extraction_examples() {
        let one = SmoothMap::constant(1, exact(1, 1));
        let u = Superfield::from_scalar(1, 2, [(om(&[1, 1]), one), (om(&[0, 1]), poly(1, &[(&[1], 1)]))]).unwrap();
        let x1 = &num(2, 3) + &(&gen(2, 1) * &gen(2, 2));
        let e = superfield_extract(&u, std::slice::from_ref(&x1), sk(2)).unwrap();
        assert_eq!(e.coeff(om(&[1, 1])), Some(&num(2, 1)));
        assert_eq!(e.coeff(om(&[0, 1])), Some(&x1));
        assert_eq!(e.coeffs.len(), 2);

        let c = Superfield::from_scalar(1, 2, [(om(&[0, 0]), SmoothMap::constant(1, exact(5, 1)))]).unwrap();
        let e = superfield_extract(&c, &[x1], sk(2)).unwrap();
        assert_eq!(e.coeffs.len(), 1);
        assert_eq!(e.coeff(om(&[0, 0])), Some(&num(2, 5)));

        let u = Superfield::from_scalar(1, 1, [(om(&[1]), poly(1, &[(&[2], 1)]))]).unwrap();
        let e = superfield_extract(&u, &[num(3, 2)], sk(3)).unwrap();
        assert_eq!(e.coeff(om(&[1])), Some(&num(3, 4)));
    }

    #[test]
    fn extraction_handles_odd_valued_coefficients() {
        let odd_valued = SupernumberValuedMap::new(1, [(GIndex::from_gens(&[2]).unwrap(), poly(1, &[(&[1], 1)]))]).unwrap();
        let u = Superfield::new(1, 2, [(om(&[1, 0]), odd_valued)]).unwrap();
        let x1 = &num(3, 3) + &(&gen(3, 1) * &gen(3, 3));
        let e = superfield_extract(&u, std::slice::from_ref(&x1), sk(3)).unwrap();
        let expected = u.continued_coefficients(&[x1], sk(3)).unwrap();
        assert_eq!(e.coeffs, expected);
    }

    #[test]
    fn extraction_needs_fresh_generators() {
        let u = Superfield::odd_coordinate(0, 2, 1);
        assert!(matches!(superfield_extract::<_, Exact>(&u, &[], sk(63)), Err(Error::Config(_))));
    }

    #[test]
    fn path_integral_examples() {
        let s = sk(2);
        let a = num(2, 3);
        let b = gen(2, 1);
        let phi = |t: &Exact| -> Result<Supernumber<Exact>> { Ok(&a + &b.scale(t)) };
        let got = integrate_path(phi, &exact(0, 1), &exact(1, 1), &PathOptions::default()).unwrap();
        assert_eq!(got, &a + &b.scale(&exact(1, 2)));

        // ∫_0^1 d/dt (t² σ1) dt = σ1
        let dphi = |t: &Exact| -> Result<Supernumber<Exact>> { Ok(gen(2, 1).scale(&(t.clone() * exact(2, 1)))) };
        let got = integrate_path(dphi, &exact(0, 1), &exact(1, 1), &PathOptions::default()).unwrap();
        assert_eq!(got, gen(2, 1));

        // Constants factor out on either side.
        let c = &num(2, 1) + &(&gen(2, 1) * &gen(2, 2));
        let left = integrate_path(|t| Ok(&c * &b.scale(t)), &exact(0, 1), &exact(2, 1), &PathOptions::default()).unwrap();
        let plain = integrate_path(|t| Ok(b.scale(t)), &exact(0, 1), &exact(2, 1), &PathOptions::default()).unwrap();
        assert_eq!(left, &c * &plain);
        let right = integrate_path(|t| Ok(&b.scale(t) * &gen(2, 2)), &exact(0, 1), &exact(2, 1), &PathOptions::default()).unwrap();
        assert_eq!(right, &plain * &gen(2, 2));
        assert!(Supernumber::<Exact>::zero(s).is_zero());
    }

    #[test]
    fn path_integral_falls_back_to_quadrature() {
        let s = sk(2);
        let phi = |t: &Float| -> Result<Supernumber<Float>> {
            Ok(Supernumber::scalar(s, Complex64::exp(*t)) + Supernumber::generator(s, 1)?.scale(&Complex64::cos(*t)))
        };
        let got = integrate_path(phi, &Complex64::new(0.0, 0.0), &Complex64::new(1.0, 0.0), &PathOptions::default()).unwrap();
        assert!((got.body().re - (1f64.exp() - 1.0)).abs() < 1e-9);
        assert!((got.coeff(GIndex::single(1).unwrap()).re - 1f64.sin()).abs() < 1e-9);
        let e = SmoothMap::Analytic(AnalyticMap::unary(AnalyticKind::Exp));
        let bad = |t: &Exact| -> Result<Supernumber<Exact>> { Ok(Supernumber::scalar(s, e.eval(std::slice::from_ref(t))?)) };
        assert!(integrate_path(bad, &exact(0, 1), &exact(1, 1), &PathOptions::default()).is_err());
    }

    #[test]
    fn fundamental_theorem_along_a_superfield_path() {
        let u = Superfield::from_scalar(1, 2, [
            (om(&[0, 0]), poly(1, &[(&[3], 1), (&[1], -2)])),
            (om(&[1, 1]), poly(1, &[(&[2], 1)])),
            (om(&[0, 1]), poly(1, &[(&[1], 3)])),
        ])
        .unwrap();
        let x = SuperPoint::new(sk(4), vec![&num(4, 1) + &(&gen(4, 1) * &gen(4, 2))], vec![gen(4, 3), gen(4, 4)]).unwrap();
        let y = SuperPoint::new(sk(4), vec![&num(4, 2) + &(&gen(4, 3) * &gen(4, 4))], vec![gen(4, 1), &gen(4, 2) + &gen(4, 3)])
            .unwrap();
        let integrand = |t: &Exact| gateaux_derivative(&u, &x.add_scaled(&y, t)?, &y, 0.0);
        let got = integrate_path(integrand, &exact(0, 1), &exact(1, 1), &PathOptions::default()).unwrap();
        assert_eq!(got, &u.eval(&x.add(&y).unwrap()).unwrap() - &u.eval(&x).unwrap());
    }
}
