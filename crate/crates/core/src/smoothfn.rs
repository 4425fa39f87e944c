//! Smooth coefficient functions `f: ℝ^m → ℂ` with exact derivative oracles.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::EvalError;
use crate::gindex::{EvenMulti, GIndex};
use crate::scalar::{Exact, Float, Rational, Scalar};

/// A user-supplied smooth function. Implementors provide their own derivative
/// oracle; nothing in the library differentiates a black box numerically.
pub trait SmoothFunction: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;

    /// Exact evaluation. Functions without closed forms over the rationals
    /// keep the default, which asks the caller to switch to float mode.
    fn eval_exact(&self, _q: &[Exact]) -> Result<Exact, EvalError> {
        Err(EvalError::inexact("user function"))
    }

    fn eval_float(&self, q: &[Float]) -> Result<Float, EvalError>;

    fn partial(&self, alpha: &EvenMulti) -> Result<SmoothMap, EvalError>;

    /// Highest derivative order the oracle supports; `None` means unbounded.
    fn reliable_order(&self) -> Option<usize> {
        None
    }
}

/// Multivariate polynomial with exact coefficients, keyed by exponent vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMap {
    arity: usize,
    terms: BTreeMap<Vec<u32>, Exact>,
}

impl PolyMap {
    pub fn zero(arity: usize) -> Self {
        PolyMap { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Exact) -> Self {
        PolyMap::monomial(vec![0; arity], c)
    }

    /// The coordinate function `q_j` (0-based).
    pub fn variable(arity: usize, j: usize) -> Self {
        let mut e = vec![0; arity];
        e[j] = 1;
        PolyMap::monomial(e, <Exact as Scalar>::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Exact) -> Self {
        let mut p = PolyMap::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Vec<u32>, Exact)>) -> Result<Self, EvalError> {
        let mut p = PolyMap::zero(arity);
        for (e, c) in terms {
            if e.len() != arity {
                return Err(EvalError::Arity { expected: arity, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Exact) {
        if Scalar::is_zero(&c) {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if Scalar::is_zero(o.get()) {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Exact)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> PolyMap {
        PolyMap {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &PolyMap) -> PolyMap {
        assert_eq!(self.arity, other.arity, "polynomial arity mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PolyMap {
        self.scale(&-<Exact as Scalar>::one())
    }

    pub fn sub(&self, other: &PolyMap) -> PolyMap {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Exact) -> PolyMap {
        let mut out = PolyMap::zero(self.arity);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &PolyMap) -> PolyMap {
        assert_eq!(self.arity, other.arity, "polynomial arity mismatch");
        let mut out = PolyMap::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> PolyMap {
        let mut acc = PolyMap::constant(self.arity, <Exact as Scalar>::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn partial(&self, alpha: &EvenMulti) -> PolyMap {
        assert_eq!(alpha.arity(), self.arity, "multi-index arity mismatch");
        let mut out = PolyMap::zero(self.arity);
        'terms: for (e, c) in &self.terms {
            let mut factor = BigInt::one();
            let mut ne = e.clone();
            for (j, &a) in alpha.0.iter().enumerate() {
                if a > e[j] {
                    continue 'terms;
                }
                for k in 0..a {
                    factor *= BigInt::from(e[j] - k);
                }
                ne[j] = e[j] - a;
            }
            let f = Complex::new(Rational::from_integer(factor), Rational::zero());
            out.add_term(ne, c * f);
        }
        out
    }

    /// Substitutes `q_i ↦ Σ_j a_{ij} p_j + b_i`; the result has arity `a_{i}.len()`.
    pub fn compose_affine(&self, rows: &[(Vec<Exact>, Exact)]) -> PolyMap {
        assert_eq!(rows.len(), self.arity, "one affine row per variable");
        let new_arity = rows.first().map_or(0, |r| r.0.len());
        let images: Vec<PolyMap> = rows
            .iter()
            .map(|(a, b)| {
                let mut p = PolyMap::constant(new_arity, b.clone());
                for (j, c) in a.iter().enumerate() {
                    p = p.add(&PolyMap::variable(new_arity, j).scale(c));
                }
                p
            })
            .collect();
        let mut out = PolyMap::zero(new_arity);
        for (e, c) in &self.terms {
            let mut term = PolyMap::constant(new_arity, c.clone());
            for (i, &k) in e.iter().enumerate() {
                term = term.mul(&images[i].pow(k));
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval<S: Scalar>(&self, q: &[S]) -> Result<S, EvalError> {
        if q.len() != self.arity {
            return Err(EvalError::Arity { expected: self.arity, got: q.len() });
        }
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut term = S::from_exact(c);
            for (x, &k) in q.iter().zip(e) {
                if k > 0 {
                    term = term * x.powi(k);
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }
}

/// Elementary function `g` applied to an affine form of the coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum AnalyticKind {
    Exp,
    Sin,
    Cos,
    Log,
    Recip,
}

impl AnalyticKind {
    pub fn name(self) -> &'static str {
        match self {
            AnalyticKind::Exp => "exp",
            AnalyticKind::Sin => "sin",
            AnalyticKind::Cos => "cos",
            AnalyticKind::Log => "log",
            AnalyticKind::Recip => "recip",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => AnalyticKind::Exp,
            "sin" => AnalyticKind::Sin,
            "cos" => AnalyticKind::Cos,
            "log" => AnalyticKind::Log,
            "recip" => AnalyticKind::Recip,
            _ => return None,
        })
    }
}

/// `scale · g^{(order)}(Σ_j coeffs_j q_j + offset)`.
///
/// Derivatives stay in the family, so the oracle is exact and total.
#[derive(Clone, PartialEq, Debug)]
pub struct AnalyticMap {
    pub kind: AnalyticKind,
    pub coeffs: Vec<Exact>,
    pub offset: Exact,
    pub order: u32,
    pub scale: Exact,
}

impl AnalyticMap {
    pub fn new(kind: AnalyticKind, coeffs: Vec<Exact>, offset: Exact) -> Self {
        AnalyticMap {
            kind,
            coeffs,
            offset,
            order: 0,
            scale: <Exact as Scalar>::one(),
        }
    }

    /// `g(q_1)` for a one-variable primitive.
    pub fn unary(kind: AnalyticKind) -> Self {
        AnalyticMap::new(kind, vec![<Exact as Scalar>::one()], <Exact as Scalar>::zero())
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn partial(&self, alpha: &EvenMulti) -> AnalyticMap {
        assert_eq!(alpha.arity(), self.arity(), "multi-index arity mismatch");
        let mut scale = self.scale.clone();
        for (c, &a) in self.coeffs.iter().zip(&alpha.0) {
            scale *= Scalar::powi(c, a);
        }
        AnalyticMap {
            kind: self.kind,
            coeffs: self.coeffs.clone(),
            offset: self.offset.clone(),
            order: self.order + alpha.total(),
            scale,
        }
    }

    fn argument<S: Scalar>(&self, q: &[S]) -> S {
        let mut u = S::from_exact(&self.offset);
        for (c, x) in self.coeffs.iter().zip(q) {
            if !Scalar::is_zero(c) {
                u = u + S::from_exact(c) * x.clone();
            }
        }
        u
    }

    /// Value of the affine argument at a real point.
    pub fn argument_f64(&self, q: &[f64]) -> f64 {
        let mut u = self.offset.to_float().re;
        for (c, x) in self.coeffs.iter().zip(q) {
            u += c.to_float().re * x;
        }
        u
    }

    pub fn eval<S: Scalar>(&self, q: &[S]) -> Result<S, EvalError> {
        if q.len() != self.arity() {
            return Err(EvalError::Arity { expected: self.arity(), got: q.len() });
        }
        let u = self.argument(q);
        let k = self.order;
        let value = match self.kind {
            AnalyticKind::Exp => u.exp()?,
            AnalyticKind::Sin => match k % 4 {
                0 => u.sin()?,
                1 => u.cos()?,
                2 => -u.sin()?,
                _ => -u.cos()?,
            },
            AnalyticKind::Cos => match k % 4 {
                0 => u.cos()?,
                1 => -u.sin()?,
                2 => -u.cos()?,
                _ => u.sin()?,
            },
            AnalyticKind::Log => {
                if u.real_sign() != Some(std::cmp::Ordering::Greater) {
                    return Err(EvalError::domain("log", "argument must be real and positive"));
                }
                if k == 0 {
                    u.ln()?
                } else {
                    // (k-1)! (-1)^{k-1} u^{-k}
                    let c = signed_factorial(k - 1, (k - 1) % 2 == 1);
                    S::from_rational(&c) * u.recip()?.powi(k)
                }
            }
            AnalyticKind::Recip => {
                // k! (-1)^k u^{-(k+1)}
                let c = signed_factorial(k, k % 2 == 1);
                S::from_rational(&c) * u.recip()?.powi(k + 1)
            }
        };
        Ok(S::from_exact(&self.scale) * value)
    }
}

fn signed_factorial(k: u32, negative: bool) -> Rational {
    let mut f = BigInt::one();
    for j in 2..=k {
        f *= BigInt::from(j);
    }
    let r = Rational::from_integer(f);
    if negative {
        -r
    } else {
        r
    }
}

/// A coefficient function of the superfield calculus.
#[derive(Clone, Debug)]
pub enum SmoothMap {
    Poly(PolyMap),
    Analytic(AnalyticMap),
    Custom(Arc<dyn SmoothFunction>),
}

impl PartialEq for SmoothMap {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SmoothMap::Poly(a), SmoothMap::Poly(b)) => a == b,
            (SmoothMap::Analytic(a), SmoothMap::Analytic(b)) => a == b,
            (SmoothMap::Custom(a), SmoothMap::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl From<PolyMap> for SmoothMap {
    fn from(p: PolyMap) -> Self {
        SmoothMap::Poly(p)
    }
}

impl From<AnalyticMap> for SmoothMap {
    fn from(a: AnalyticMap) -> Self {
        SmoothMap::Analytic(a)
    }
}

impl SmoothMap {
    pub fn constant(arity: usize, c: Exact) -> Self {
        SmoothMap::Poly(PolyMap::constant(arity, c))
    }

    pub fn arity(&self) -> usize {
        match self {
            SmoothMap::Poly(p) => p.arity(),
            SmoothMap::Analytic(a) => a.arity(),
            SmoothMap::Custom(f) => f.arity(),
        }
    }

    pub fn as_poly(&self) -> Option<&PolyMap> {
        match self {
            SmoothMap::Poly(p) => Some(p),
            _ => None,
        }
    }

    /// Whether the map is the zero polynomial.
    pub fn is_zero_poly(&self) -> bool {
        matches!(self, SmoothMap::Poly(p) if p.is_zero())
    }

    pub fn eval<S: Scalar>(&self, q: &[S]) -> Result<S, EvalError> {
        match self {
            SmoothMap::Poly(p) => p.eval(q),
            SmoothMap::Analytic(a) => a.eval(q),
            SmoothMap::Custom(f) => {
                if q.len() != f.arity() {
                    return Err(EvalError::Arity { expected: f.arity(), got: q.len() });
                }
                S::eval_custom(f.as_ref(), q)
            }
        }
    }

    pub fn partial(&self, alpha: &EvenMulti) -> Result<SmoothMap, EvalError> {
        if alpha.arity() != self.arity() {
            return Err(EvalError::Arity { expected: self.arity(), got: alpha.arity() });
        }
        if alpha.is_zero() {
            return Ok(self.clone());
        }
        Ok(match self {
            SmoothMap::Poly(p) => SmoothMap::Poly(p.partial(alpha)),
            SmoothMap::Analytic(a) => SmoothMap::Analytic(a.partial(alpha)),
            SmoothMap::Custom(f) => {
                if let Some(limit) = f.reliable_order() {
                    if alpha.total() as usize > limit {
                        return Err(EvalError::OrderExceeded {
                            requested: alpha.total() as usize,
                            reliable: limit,
                        });
                    }
                }
                f.partial(alpha)?
            }
        })
    }

    /// Checks that the closed segment `[a, b]` lies in the domain.
    pub fn check_segment(&self, a: &[f64], b: &[f64]) -> Result<(), EvalError> {
        match self {
            SmoothMap::Poly(_) => Ok(()),
            SmoothMap::Analytic(m) => {
                let (ua, ub) = (m.argument_f64(a), m.argument_f64(b));
                let ok = match m.kind {
                    AnalyticKind::Log => ua > 0.0 && ub > 0.0,
                    AnalyticKind::Recip => ua * ub > 0.0,
                    _ => true,
                };
                if ok {
                    Ok(())
                } else {
                    Err(EvalError::domain(
                        m.kind.name(),
                        format!("segment from {a:?} to {b:?} leaves the domain"),
                    ))
                }
            }
            SmoothMap::Custom(f) => {
                for k in 0..=8 {
                    let t = k as f64 / 8.0;
                    let q: Vec<Float> = a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| Complex::new(x + t * (y - x), 0.0))
                        .collect();
                    f.eval_float(&q)?;
                }
                Ok(())
            }
        }
    }
}

/// Central finite-difference estimate of `∂^α f(q)` compared with the oracle.
///
/// Each direction uses the centred stencil `Σ_i (-1)^i C(k,i) f(q + (k/2 - i)h e_j) / h^k`,
/// which has `O(h²)` error for every order `k`.
pub fn finite_diff_check(f: &SmoothMap, alpha: &EvenMulti, q: &[f64], h: f64) -> Result<f64, EvalError> {
    if q.len() != f.arity() {
        return Err(EvalError::Arity { expected: f.arity(), got: q.len() });
    }
    let mut stencil: Vec<(Vec<f64>, f64)> = vec![(q.to_vec(), 1.0)];
    for (j, &k) in alpha.0.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(stencil.len() * (k as usize + 1));
        for (point, weight) in &stencil {
            let mut binom = 1.0;
            for i in 0..=k {
                let mut p = point.clone();
                p[j] += (k as f64 / 2.0 - i as f64) * h;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                next.push((p, weight * sign * binom / h.powi(k as i32)));
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
        }
        stencil = next;
    }
    let mut estimate = Complex::new(0.0, 0.0);
    for (point, weight) in stencil {
        let z: Vec<Float> = point.iter().map(|&x| Complex::new(x, 0.0)).collect();
        estimate += f.eval(&z)? * weight;
    }
    let zq: Vec<Float> = q.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let oracle = f.partial(alpha)?.eval(&zq)?;
    Ok((estimate - oracle).norm())
}

/// `f(q) = Σ_I f_I(q) σ^I`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupernumberValuedMap {
    arity: usize,
    components: BTreeMap<GIndex, SmoothMap>,
}

impl SupernumberValuedMap {
    pub fn new(arity: usize, components: impl IntoIterator<Item = (GIndex, SmoothMap)>) -> Result<Self, EvalError> {
        let mut map = BTreeMap::new();
        for (i, f) in components {
            if f.arity() != arity {
                return Err(EvalError::Arity { expected: arity, got: f.arity() });
            }
            if !f.is_zero_poly() {
                map.insert(i, f);
            }
        }
        Ok(SupernumberValuedMap { arity, components: map })
    }

    pub fn scalar(f: SmoothMap) -> Self {
        let arity = f.arity();
        let mut components = BTreeMap::new();
        if !f.is_zero_poly() {
            components.insert(GIndex::EMPTY, f);
        }
        SupernumberValuedMap { arity, components }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn components(&self) -> impl Iterator<Item = (&GIndex, &SmoothMap)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Parity of the component blades, `None` when mixed.
    pub fn homogeneous_parity(&self) -> Option<bool> {
        let mut parities = self.components.keys().map(|i| i.is_even());
        let first = parities.next()?;
        parities.all(|p| p == first).then_some(first)
    }

    pub fn partial(&self, alpha: &EvenMulti) -> Result<SupernumberValuedMap, EvalError> {
        let comps = self
            .components
            .iter()
            .map(|(i, f)| Ok((*i, f.partial(alpha)?)))
            .collect::<Result<Vec<_>, EvalError>>()?;
        SupernumberValuedMap::new(self.arity, comps)
    }

    pub fn check_segment(&self, a: &[f64], b: &[f64]) -> Result<(), EvalError> {
        self.components.values().try_for_each(|f| f.check_segment(a, b))
    }
}

impl From<SmoothMap> for SupernumberValuedMap {
    fn from(f: SmoothMap) -> Self {
        SupernumberValuedMap::scalar(f)
    }
}
