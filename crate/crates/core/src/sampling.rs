//! Seeded random supernumbers, points, polynomials and superfields.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gindex::{GIndex, OddMulti};
use crate::scalar::{ratio, Exact, Rational};
use crate::smoothfn::{PolyMap, SmoothMap};
use crate::superfield::Superfield;
use crate::superspace::SuperPoint;
use crate::supernumber::{Parity, Skeleton, Supernumber};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ 5` and `q ∈ {1, 2, 3}`.
pub fn small_rational(rng: &mut SampleRng) -> Rational {
    ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

/// A small exact complex number; real when `real` is set.
pub fn small_exact(rng: &mut SampleRng, real: bool) -> Exact {
    let im = if real || rng.gen_bool(0.5) { Rational::from_integer(0.into()) } else { small_rational(rng) };
    Exact::new(small_rational(rng), im)
}

/// Supernumber with at most `max_terms` random blades of the requested parity.
pub fn supernumber(rng: &mut SampleRng, sk: Skeleton, parity: Parity, max_terms: usize) -> Supernumber<Exact> {
    let blades: Vec<GIndex> = GIndex::enumerate(sk.l(), sk.d())
        .into_iter()
        .filter(|i| match parity {
            Parity::Even => i.is_even(),
            Parity::Odd => !i.is_even(),
            Parity::Undefined => true,
        })
        .collect();
    let count = rng.gen_range(0..=max_terms.min(blades.len()));
    let terms: Vec<(GIndex, Exact)> = blades
        .choose_multiple(rng, count)
        .map(|i| (*i, small_exact(rng, i.is_empty())))
        .collect();
    Supernumber::from_terms(sk, terms).expect("blades lie in the skeleton")
}

/// Point of `ℜ_L^{m|n}` with real bodies in `[-2, 2]`.
pub fn point(rng: &mut SampleRng, sk: Skeleton, m: usize, n: usize, max_terms: usize) -> SuperPoint<Exact> {
    let even = (0..m)
        .map(|_| {
            let soul = supernumber(rng, sk, Parity::Even, max_terms).soul();
            let body = Supernumber::scalar(sk, Exact::new(ratio(rng.gen_range(-6..=6), 3), Rational::from_integer(0.into())));
            &body + &soul
        })
        .collect();
    let odd = (0..n).map(|_| supernumber(rng, sk, Parity::Odd, max_terms)).collect();
    SuperPoint::new(sk, even, odd).expect("sampled point has the right parities")
}

/// Polynomial in `m` variables of total degree at most `max_degree`.
pub fn polynomial(rng: &mut SampleRng, m: usize, max_degree: u32, max_terms: usize) -> PolyMap {
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms = (0..count).map(|_| {
        let total = rng.gen_range(0..=max_degree);
        let mut exps = vec![0u32; m];
        if m > 0 {
            for _ in 0..total {
                exps[rng.gen_range(0..m)] += 1;
            }
        }
        (exps, small_exact(rng, true))
    });
    PolyMap::from_terms(m, terms).expect("arity matches")
}

/// Even superfield `Σ θ^a f_a` with real polynomial coefficients on the even-degree monomials.
pub fn superfield(rng: &mut SampleRng, m: usize, n: usize, max_degree: u32) -> Superfield {
    let mut coeffs: Vec<(OddMulti, SmoothMap)> = Vec::new();
    for a in OddMulti::all(n) {
        if a.degree() % 2 == 0 && rng.gen_bool(0.7) {
            coeffs.push((a, SmoothMap::Poly(polynomial(rng, m, max_degree, 3))));
        }
    }
    Superfield::from_scalar(m, n, coeffs).expect("dimensions agree")
}

/// Superfield with polynomial coefficients on every `θ^a`, mixing parities.
pub fn mixed_superfield(rng: &mut SampleRng, m: usize, n: usize, max_degree: u32) -> Superfield {
    let mut coeffs: Vec<(OddMulti, SmoothMap)> = Vec::new();
    for a in OddMulti::all(n) {
        if rng.gen_bool(0.7) {
            coeffs.push((a, SmoothMap::Poly(polynomial(rng, m, max_degree, 3))));
        }
    }
    Superfield::new(m, n, coeffs.into_iter().map(|(a, f)| (a, f.into()))).expect("dimensions agree")
}

/// Random `(L, D)` with `lo ≤ L ≤ hi` and `D = L` half of the time.
pub fn skeleton(rng: &mut SampleRng, lo: u32, hi: u32) -> Skeleton {
    let l = rng.gen_range(lo..=hi);
    let d = if rng.gen_bool(0.5) { l } else { rng.gen_range(0..=l) };
    Skeleton::new(l, d).expect("d ≤ l")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_samples() {
        let sk = Skeleton::full(4).unwrap();
        let a = point(&mut rng(7), sk, 2, 2, 5);
        let b = point(&mut rng(7), sk, 2, 2, 5);
        assert_eq!(a, b);
        assert_eq!(superfield(&mut rng(3), 2, 3, 4), superfield(&mut rng(3), 2, 3, 4));
    }

    #[test]
    fn sampled_parities() {
        let sk = Skeleton::full(5).unwrap();
        let mut r = rng(11);
        for _ in 0..50 {
            assert!(supernumber(&mut r, sk, Parity::Odd, 6).is_odd());
            assert!(supernumber(&mut r, sk, Parity::Even, 6).is_even());
        }
    }
}
