//! Grassmann continuation `f ↦ f̃` of smooth functions to even supernumber
//! arguments, and Taylor expansion of continued functions.

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, EvalError, Result};
use crate::gindex::EvenMulti;
use crate::scalar::{Dual, Scalar};
use crate::smoothfn::{AnalyticMap, SmoothMap, SupernumberValuedMap};
use crate::supernumber::{Parity, Skeleton, Supernumber};

fn check_even_args<S: Scalar>(arity: usize, x: &[Supernumber<S>]) -> Result<()> {
    if x.len() != arity {
        return Err(EvalError::Arity { expected: arity, got: x.len() }.into());
    }
    for (j, xj) in x.iter().enumerate() {
        if xj.parity_of() != Parity::Even {
            return Err(Error::Domain(format!(
                "continuation argument x_{} = {xj} is not even",
                j + 1
            )));
        }
        if !xj.reality_check() {
            return Err(Error::Domain(format!(
                "continuation argument x_{} has a non-real body",
                j + 1
            )));
        }
    }
    Ok(())
}

/// `1/α!` on any carrier.
fn inverse_factorial<S: Scalar>(alpha: &EvenMulti) -> S {
    let f = BigRational::from_integer(alpha.factorial().into());
    S::from_rational(&(BigRational::one() / f))
}

/// `x_S^α` for every `α` with `|α| ≤ ⌊D/2⌋`, skipping products that vanish.
fn soul_monomials<S: Scalar>(souls: &[Supernumber<S>], sk: Skeleton) -> Vec<(EvenMulti, Supernumber<S>)> {
    let m = souls.len();
    let order = sk.d() / 2;
    // powers[j][k] = s_j^k
    let powers: Vec<Vec<Supernumber<S>>> = souls
        .iter()
        .map(|s| {
            let mut v = vec![Supernumber::one(sk)];
            for k in 1..=order as usize {
                let next = &v[k - 1] * s;
                v.push(next);
            }
            v
        })
        .collect();
    let mut out = Vec::new();
    for alpha in EvenMulti::up_to(m, order) {
        let mut prod = Supernumber::one(sk);
        for (j, &a) in alpha.0.iter().enumerate() {
            if a > 0 {
                prod = &prod * &powers[j][a as usize];
            }
            if prod.is_zero() {
                break;
            }
        }
        if !prod.is_zero() {
            out.push((alpha, prod));
        }
    }
    out
}

/// `f̃(x) = Σ_{|α| ≤ ⌊D/2⌋} (1/α!) ∂^α f(x_B) x_S^α`, computed in skeleton `sk`.
///
/// Every soul of an even argument starts in degree 2, so the sum is exact
/// once it reaches half the cutoff.
pub fn grassmann_continue<S: Scalar>(f: &SmoothMap, x: &[Supernumber<S>], sk: Skeleton) -> Result<Supernumber<S>> {
    check_even_args(f.arity(), x)?;
    let x: Vec<Supernumber<S>> = x.iter().map(|v| v.embed(sk)).collect::<Result<_>>()?;
    let body: Vec<S> = x.iter().map(Supernumber::body).collect();
    let souls: Vec<Supernumber<S>> = x.iter().map(Supernumber::soul).collect();
    let mut acc = Supernumber::zero(sk);
    for (alpha, mono) in soul_monomials(&souls, sk) {
        let c = f.partial(&alpha)?.eval(&body)? * inverse_factorial::<S>(&alpha);
        acc = &acc + &mono.scale(&c);
    }
    Ok(acc)
}

/// Continuation of `f(q) = Σ_I f_I(q) σ^I`, assembled as `Σ_I σ^I f̃_I(x)`.
pub fn continue_valued<S: Scalar>(
    f: &SupernumberValuedMap,
    x: &[Supernumber<S>],
    sk: Skeleton,
) -> Result<Supernumber<S>> {
    check_even_args(f.arity(), x)?;
    let mut acc = Supernumber::zero(sk);
    for (i, fi) in f.components() {
        let blade = Supernumber::monomial(sk, *i, S::one())?;
        if blade.is_zero() {
            continue;
        }
        acc = &acc + &(&blade * &grassmann_continue(fi, x, sk)?);
    }
    Ok(acc)
}

/// One-variable continuation `Σ_n (1/n!) f^{(n)}(z_B) z_S^n` of an analytic primitive.
pub fn continue_analytic<S: Scalar>(f: &AnalyticMap, z: &Supernumber<S>) -> Result<Supernumber<S>> {
    if f.arity() != 1 {
        return Err(EvalError::Arity { expected: 1, got: f.arity() }.into());
    }
    grassmann_continue(&SmoothMap::Analytic(f.clone()), std::slice::from_ref(z), z.skeleton())
}

/// `∂_{x_j} f̃(x)` (0-based `j`), computed as `(∂_{q_j} f)~(x)` and checked
/// against the derivative of `t ↦ f̃(x + t e_j)` taken with dual numbers.
pub fn continuation_partial<S: Scalar>(
    f: &SmoothMap,
    x: &[Supernumber<S>],
    j: usize,
    sk: Skeleton,
    tol: f64,
) -> Result<Supernumber<S>> {
    if j >= f.arity() {
        return Err(Error::Domain(format!("no variable x_{} for arity {}", j + 1, f.arity())));
    }
    let value = grassmann_continue(&f.partial(&EvenMulti::unit(f.arity(), j))?, x, sk)?;
    let lifted: Vec<Supernumber<Dual<S>>> = x
        .iter()
        .enumerate()
        .map(|(k, xk)| {
            let dir = if k == j { Supernumber::one(sk) } else { Supernumber::zero(sk) };
            xk.with_tangent(&dir)
        })
        .collect();
    let (_, tangent) = grassmann_continue(f, &lifted, sk)?.split_tangent();
    if !tangent.approx_eq(&value, tol) {
        return Err(Error::Consistency(format!(
            "∂_{{x_{}}} of the continuation is {tangent} but the continued derivative is {value}",
            j + 1
        )));
    }
    Ok(value)
}

/// `d/dt f̃(x + t y)|_{t=0}` and `Σ_j y_j ∂_{x_j} f̃(x)`, in that order.
pub fn directional_derivative<S: Scalar>(
    f: &SmoothMap,
    x: &[Supernumber<S>],
    y: &[Supernumber<S>],
    sk: Skeleton,
) -> Result<(Supernumber<S>, Supernumber<S>)> {
    check_even_args(f.arity(), y)?;
    let lifted: Vec<Supernumber<Dual<S>>> = x.iter().zip(y).map(|(a, b)| a.with_tangent(b)).collect();
    let (_, lhs) = grassmann_continue(f, &lifted, sk)?.split_tangent();
    let mut rhs = Supernumber::zero(sk);
    for (j, yj) in y.iter().enumerate() {
        let d = grassmann_continue(&f.partial(&EvenMulti::unit(f.arity(), j))?, x, sk)?;
        rhs = &rhs + &(yj * &d);
    }
    Ok((lhs, rhs))
}

/// Result of comparing a Taylor partial sum with the continued value.
#[derive(Clone, Debug)]
pub struct TaylorReport<S> {
    pub partial_sum: Supernumber<S>,
    pub value: Supernumber<S>,
    /// `f̃(x + y) - partial_sum`.
    pub defect: Supernumber<S>,
    /// Whether the remainder is expected to vanish (polynomial of degree ≤ N).
    pub expected_exact: bool,
}

impl<S: Scalar> TaylorReport<S> {
    pub fn is_exact(&self, tol: f64) -> bool {
        self.defect.approx_eq(&Supernumber::zero(self.defect.skeleton()), tol)
    }
}

/// `Σ_{|α| ≤ N} (1/α!) ∂_x^α f̃(x) y^α` compared with `f̃(x + y)`.
pub fn taylor_expand_continued<S: Scalar>(
    f: &SmoothMap,
    x: &[Supernumber<S>],
    y: &[Supernumber<S>],
    order: u32,
    sk: Skeleton,
) -> Result<TaylorReport<S>> {
    check_even_args(f.arity(), x)?;
    check_even_args(f.arity(), y)?;
    let a: Vec<f64> = x.iter().map(|v| v.body().to_float().re).collect();
    let b: Vec<f64> = a.iter().zip(y).map(|(p, v)| p + v.body().to_float().re).collect();
    f.check_segment(&a, &b)?;
    let mut partial_sum = Supernumber::zero(sk);
    for alpha in EvenMulti::up_to(f.arity(), order) {
        let mut mono = Supernumber::one(sk);
        for (yj, &k) in y.iter().zip(&alpha.0) {
            mono = &mono * &yj.pow(k);
        }
        if mono.is_zero() {
            continue;
        }
        let d = grassmann_continue(&f.partial(&alpha)?, x, sk)?;
        partial_sum = &partial_sum + &(&d * &mono).scale(&inverse_factorial::<S>(&alpha));
    }
    let shifted: Vec<Supernumber<S>> = x.iter().zip(y).map(|(p, v)| p + v).collect();
    let value = grassmann_continue(f, &shifted, sk)?;
    let defect = &value - &partial_sum;
    let expected_exact = matches!(f, SmoothMap::Poly(p) if p.total_degree().unwrap_or(0) <= order);
    Ok(TaylorReport { partial_sum, value, defect, expected_exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gindex::GIndex;
    use crate::scalar::{exact, Exact};
    use crate::smoothfn::{AnalyticKind, PolyMap};

    fn sk(l: u32) -> Skeleton {
        Skeleton::full(l).unwrap()
    }

    fn s12(l: u32) -> Supernumber<Exact> {
        Supernumber::monomial(sk(l), GIndex::from_gens(&[1, 2]).unwrap(), exact(1, 1)).unwrap()
    }

    fn mono(e: u32) -> SmoothMap {
        SmoothMap::Poly(PolyMap::monomial(vec![e], exact(1, 1)))
    }

    fn num(v: i64) -> Supernumber<Exact> {
        Supernumber::from_i64(sk(4), v)
    }

    #[test]
    fn continuation_examples() {
        let q = Supernumber::scalar(sk(4), exact(3, 2));
        let x = &q + &s12(4);
        let got = grassmann_continue(&mono(2), std::slice::from_ref(&x), sk(4)).unwrap();
        let expected = &(&q * &q) + &(&(&q * &s12(4)) * &num(2));
        assert_eq!(got, expected);

        let x = &num(2) + &s12(4);
        let got = grassmann_continue(&mono(3), std::slice::from_ref(&x), sk(4)).unwrap();
        assert_eq!(got, &num(8) + &(&s12(4) * &num(12)));

        let c = SmoothMap::constant(1, exact(7, 3));
        assert_eq!(grassmann_continue(&c, std::slice::from_ref(&x), sk(4)).unwrap(), Supernumber::scalar(sk(4), exact(7, 3)));
        assert_eq!(grassmann_continue(&mono(1), std::slice::from_ref(&x), sk(4)).unwrap(), x);
    }

    #[test]
    fn continuation_needs_long_expansions_for_large_souls() {
        // s = σ1σ2 + σ3σ4 has s^2 = 2σ1σ2σ3σ4, so q^3 picks up a degree-4 term.
        let s = &s12(4) + &Supernumber::monomial(sk(4), GIndex::from_gens(&[3, 4]).unwrap(), exact(1, 1)).unwrap();
        let x = &num(1) + &s;
        let got = grassmann_continue(&mono(3), std::slice::from_ref(&x), sk(4)).unwrap();
        assert_eq!(got, &(&x * &x) * &x);
    }

    #[test]
    fn continuation_rejects_bad_arguments() {
        let odd = Supernumber::<Exact>::generator(sk(2), 1).unwrap();
        assert!(grassmann_continue(&mono(2), &[odd], sk(2)).is_err());
        let log = SmoothMap::Analytic(AnalyticMap::unary(AnalyticKind::Log));
        assert!(grassmann_continue(&log, &[s12(2)], sk(2)).is_err());
    }

    #[test]
    fn partial_examples() {
        let q = Supernumber::scalar(sk(4), exact(3, 2));
        let x = &q + &s12(4);
        let d = continuation_partial(&mono(2), std::slice::from_ref(&x), 0, sk(4), 0.0).unwrap();
        assert_eq!(d, &x * &num(2));

        let q1q2 = SmoothMap::Poly(PolyMap::monomial(vec![1, 1], exact(1, 1)));
        let x2 = &num(5) - &s12(4);
        assert_eq!(continuation_partial(&q1q2, &[x.clone(), x2], 1, sk(4), 0.0).unwrap(), x);

        let c = SmoothMap::constant(1, exact(2, 1));
        assert!(continuation_partial(&c, &[x], 0, sk(4), 0.0).unwrap().is_zero());
    }

    #[test]
    fn taylor_examples() {
        let x = vec![&num(2) + &s12(4)];
        let y = vec![&num(1) + &Supernumber::monomial(sk(4), GIndex::from_gens(&[3, 4]).unwrap(), exact(1, 1)).unwrap()];
        let r = taylor_expand_continued(&mono(3), &x, &y, 3, sk(4)).unwrap();
        assert!(r.expected_exact && r.defect.is_zero());
        let r = taylor_expand_continued(&mono(3), &x, &y, 2, sk(4)).unwrap();
        assert_eq!(r.defect, y[0].pow(3));
        let zero = vec![Supernumber::zero(sk(4))];
        for n in 0..4 {
            let r = taylor_expand_continued(&mono(3), &x, &zero, n, sk(4)).unwrap();
            assert_eq!(r.partial_sum, grassmann_continue(&mono(3), &x, sk(4)).unwrap());
        }
    }

    #[test]
    fn analytic_examples() {
        let exp = AnalyticMap::unary(AnalyticKind::Exp);
        assert_eq!(continue_analytic(&exp, &s12(4)).unwrap(), &num(1) + &s12(4));
        let sin = AnalyticMap::unary(AnalyticKind::Sin);
        assert!(continue_analytic(&sin, &Supernumber::<Exact>::zero(sk(4))).unwrap().is_zero());

        let skf = sk(4);
        let a = Supernumber::scalar(skf, num_complex::Complex64::new(0.3, 0.0));
        let s = s12(4).to_float();
        let z = &a + &s;
        let e1 = continue_analytic(&exp, &z).unwrap();
        let e2 = continue_analytic(&exp, &-&z).unwrap();
        assert!((&e1 * &e2).approx_eq(&Supernumber::one(skf), 1e-12));
    }

    #[test]
    fn directional_formula() {
        let f = SmoothMap::Poly(
            PolyMap::from_terms(2, [(vec![2, 1], exact(1, 1)), (vec![0, 3], exact(-2, 1))]).unwrap(),
        );
        let x = vec![&num(1) + &s12(4), &num(-2) + &s12(4)];
        let y = vec![
            &num(3) + &Supernumber::monomial(sk(4), GIndex::from_gens(&[3, 4]).unwrap(), exact(1, 1)).unwrap(),
            num(1),
        ];
        let (lhs, rhs) = directional_derivative(&f, &x, &y, sk(4)).unwrap();
        assert_eq!(lhs, rhs);
    }
}
