//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use supersmooth::characterize::{
    cr_check, dual_represent, equivalence_suite, even_linearity_check, solve_sigma, CheckOptions, DualMap, DualOutcome,
    SigmaObstruction, SigmaOutcome, SuiteOptions,
};
use supersmooth::continuation::{continuation_partial, grassmann_continue};
use supersmooth::fixtures::Fixture;
use supersmooth::gindex::{GIndex, OddMulti};
use supersmooth::json::to_pretty;
use supersmooth::sampling::{self, SampleRng};
use supersmooth::scalar::{exact, Exact, Float, Scalar};
use supersmooth::smoothfn::{AnalyticKind, AnalyticMap, PolyMap, SmoothMap};
use supersmooth::superfield::{superfield_extract, taylor_superfield, DerivativeMethod, Superfield};
use supersmooth::superspace::annihilator_solve;
use supersmooth::suite::{run_standard, Mode, StandardConfig};
use supersmooth::supernumber::{Parity, Skeleton, Supernumber};

type Sn = Supernumber<Exact>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn full(l: u32) -> Skeleton {
    Skeleton::full(l).unwrap()
}

fn term_map<S: Scalar>(x: &Supernumber<S>) -> BTreeMap<GIndex, S> {
    x.terms().map(|(i, c)| (*i, c.clone())).collect()
}

// ---------------------------------------------------------------- oracles

/// Dense coefficient vector indexed by generator bitmask.
fn dense(x: &Sn, l: u32) -> Vec<Exact> {
    let mut v = vec![<Exact as Scalar>::zero(); 1usize << l];
    for (i, c) in x.terms() {
        v[i.mask() as usize] = c.clone();
    }
    v
}

/// Sign of `σ^a σ^b` obtained by bubble-sorting the concatenated generator list.
fn sort_sign(a: u64, b: u64) -> i64 {
    let mut gens: Vec<u32> = (0..64).filter(|k| a >> k & 1 == 1).chain((0..64).filter(|k| b >> k & 1 == 1)).collect();
    let mut swaps = 0;
    for pass in 0..gens.len() {
        for k in 0..gens.len().saturating_sub(pass + 1) {
            if gens[k] > gens[k + 1] {
                gens.swap(k, k + 1);
                swaps += 1;
            }
        }
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

fn dense_mul(x: &[Exact], y: &[Exact], cutoff: u32) -> Vec<Exact> {
    let mut out = vec![<Exact as Scalar>::zero(); x.len()];
    for (a, ca) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (b, cb) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if a & b != 0 || (a | b).count_ones() > cutoff {
                continue;
            }
            let p = ca.clone() * cb.clone();
            out[a | b] = if sort_sign(a as u64, b as u64) > 0 { out[a | b].clone() + p } else { out[a | b].clone() - p };
        }
    }
    out
}

/// `Π_j x_j^{e_j}` summed over the terms of `p`, by plain supernumber arithmetic.
fn substitute(p: &PolyMap, x: &[Sn], sk: Skeleton) -> Sn {
    let mut acc = Sn::zero(sk);
    for (exps, c) in p.terms() {
        let mut mono = Sn::scalar(sk, c.clone());
        for (xj, &e) in x.iter().zip(exps) {
            for _ in 0..e {
                mono = &mono * &xj.embed(sk).unwrap();
            }
        }
        acc = &acc + &mono;
    }
    acc
}

/// `ω_{s1} ω_{s2} ⋯` over the support of `a` in increasing order.
fn odd_product(a: OddMulti, omega: &[Sn], sk: Skeleton) -> Sn {
    let mut acc = Sn::one(sk);
    for s in a.support() {
        acc = &acc * &omega[s - 1];
    }
    acc
}

fn scalar_poly(u: &Superfield, a: OddMulti) -> Option<PolyMap> {
    let f = u.coeff(a)?;
    let mut out = PolyMap::zero(u.m());
    for (blade, g) in f.components() {
        assert!(blade.is_empty(), "sampled superfields have scalar coefficients");
        out = out.add(g.as_poly().expect("polynomial coefficient"));
    }
    Some(out)
}

/// Exact derivative at `t = 0` of a polynomial of degree `≤ d`, from its
/// values at `t = 0, 1, ..., d`, via `Σ_k (-1)^{k+1} Δ^k / k`.
fn newton_derivative(values: &[Sn]) -> Sn {
    let sk = values[0].skeleton();
    let mut diffs = values.to_vec();
    let mut acc = Sn::zero(sk);
    for k in 1..values.len() {
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        let c = exact(if k % 2 == 1 { 1 } else { -1 }, k as i64);
        acc = &acc + &diffs[0].scale(&c);
    }
    acc
}

// ---------------------------------------------------------------- criteria

fn algebra_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = sampling::rng(101);
    let mut mismatches = 0;
    let pairs = 10_000;
    for _ in 0..pairs {
        let l = rng.gen_range(2..=8u32);
        let d = if rng.gen_bool(0.7) { l } else { rng.gen_range(0..=l) };
        let sk = Skeleton::new(l, d).unwrap();
        let x = sampling::supernumber(&mut rng, sk, Parity::Undefined, 16);
        let y = sampling::supernumber(&mut rng, sk, Parity::Undefined, 16);
        if dense(&(&x * &y), l) != dense_mul(&dense(&x, l), &dense(&y, l), d) {
            mismatches += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < 60.0,
        format!("{pairs} pairs, L in 2..8, {mismatches} mismatches, {secs:.2} s"),
    )
}

fn ring_axioms() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = sampling::rng(202);
    let mut failures: BTreeMap<&str, usize> = BTreeMap::new();
    let mut fail = |name: &'static str, ok: bool| {
        let e = failures.entry(name).or_insert(0);
        if !ok {
            *e += 1;
        }
    };
    let any = |rng: &mut SampleRng, sk| sampling::supernumber(rng, sk, Parity::Undefined, 10);
    for _ in 0..CASES {
        let sk = sampling::skeleton(&mut rng, 1, 7);
        let (x, y, z) = (any(&mut rng, sk), any(&mut rng, sk), any(&mut rng, sk));
        fail("associativity", &(&x * &y) * &z == &x * &(&y * &z));
        fail("distributivity", &x * &(&y + &z) == &(&x * &y) + &(&x * &z) && &(&x + &y) * &z == &(&x * &z) + &(&y * &z));

        let p = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let q = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let (hx, hy) = (sampling::supernumber(&mut rng, sk, p, 10), sampling::supernumber(&mut rng, sk, q, 10));
        let swapped = &hy * &hx;
        let expected = if p == Parity::Odd && q == Parity::Odd { -swapped } else { swapped };
        fail("graded commutativity", &hx * &hy == expected);

        let (j, k) = (rng.gen_range(0..=sk.d()), rng.gen_range(0..=sk.d()));
        let prod = &x.grade_project(j) * &y.grade_project(k);
        fail("grading", prod.terms().all(|(i, _)| i.degree() == j + k));

        let big_l = sk.l() + rng.gen_range(1..=2);
        let big = Skeleton::new(big_l, (sk.d() + rng.gen_range(0..=2)).min(big_l)).unwrap();
        let (bx, by) = (any(&mut rng, big), any(&mut rng, big));
        let l = rng.gen_range(0..=big.l());
        let lhs = (&bx * &by).skeleton_project(l).unwrap();
        let rhs = &bx.skeleton_project(l).unwrap() * &by.skeleton_project(l).unwrap();
        fail("projection homomorphism", term_map(&lhs) == term_map(&rhs));

        let wide = full(sk.l());
        let (wx, wy) = (any(&mut rng, wide), any(&mut rng, wide));
        let d = rng.gen_range(0..=wide.l());
        let cut = Skeleton::new(wide.l(), d).unwrap();
        let lowered = |v: &Sn| Sn::from_terms(cut, v.terms().filter(|(i, _)| i.degree() <= d).map(|(i, c)| (*i, c.clone()))).unwrap();
        fail("cutoff quotient", term_map(&(&wx * &wy).truncate(d)) == term_map(&(&lowered(&wx) * &lowered(&wy))));
    }
    let total: usize = failures.values().sum();
    let detail = failures.iter().map(|(k, v)| format!("{k} {v}/{CASES}")).collect::<Vec<_>>().join(", ");
    outcome(total == 0 && failures.len() == 6, format!("failures: {detail}"))
}

fn continuation_coherence() -> Outcome {
    let mut rng = sampling::rng(303);
    let cases = 300;
    let (mut value_bad, mut partial_bad, mut product_bad) = (0, 0, 0);
    for _ in 0..cases {
        let m = rng.gen_range(1..=3);
        let sk = sampling::skeleton(&mut rng, 1, 6);
        let x: Vec<Sn> = sampling::point(&mut rng, sk, m, 0, 8).even().to_vec();
        let f = sampling::polynomial(&mut rng, m, 5, 4);
        let g = sampling::polynomial(&mut rng, m, 5, 4);
        let fm = SmoothMap::Poly(f.clone());
        let ft = grassmann_continue(&fm, &x, sk).unwrap();
        if ft != substitute(&f, &x, sk) {
            value_bad += 1;
        }
        let j = rng.gen_range(0..m);
        let samples: Vec<Sn> = (0..=5)
            .map(|t| {
                let mut shifted = x.clone();
                shifted[j] = &shifted[j] + &Sn::from_i64(sk, t);
                grassmann_continue(&fm, &shifted, sk).unwrap()
            })
            .collect();
        let df = SmoothMap::Poly(f.partial(&supersmooth::gindex::EvenMulti::unit(m, j)));
        let continued_derivative = grassmann_continue(&df, &x, sk).unwrap();
        let checked = continuation_partial(&fm, &x, j, sk, 0.0);
        if newton_derivative(&samples) != continued_derivative || checked.map(|v| v != continued_derivative).unwrap_or(true) {
            partial_bad += 1;
        }
        let fg = grassmann_continue(&SmoothMap::Poly(f.mul(&g)), &x, sk).unwrap();
        if fg != &ft * &grassmann_continue(&SmoothMap::Poly(g), &x, sk).unwrap() {
            product_bad += 1;
        }
    }
    outcome(
        value_bad + partial_bad + product_bad == 0,
        format!("{cases} cases: value {value_bad}, partial {partial_bad}, product {product_bad} mismatches"),
    )
}

fn total_degree(u: &Superfield) -> Option<u32> {
    OddMulti::all(u.n())
        .into_iter()
        .filter_map(|a| scalar_poly(u, a).and_then(|p| p.total_degree()).map(|d| d + a.degree()))
        .max()
}

fn taylor_exactness() -> Outcome {
    let mut rng = sampling::rng(404);
    let cases = 200;
    let (mut exact_bad, mut leading_bad, mut tested_leading) = (0, 0, 0);
    for _ in 0..cases {
        let (m, n) = (rng.gen_range(1..=2), rng.gen_range(0..=3));
        let u = sampling::mixed_superfield(&mut rng, m, n, 3);
        let Some(t) = total_degree(&u) else { continue };
        let sk = sampling::skeleton(&mut rng, 1, 5);
        let x = sampling::point(&mut rng, sk, m, n, 6);
        let y = sampling::point(&mut rng, sk, m, n, 6);
        for order in [t, t + 1] {
            if !taylor_superfield(&u, &x, &y, order).unwrap().defect.is_zero() {
                exact_bad += 1;
            }
        }
        if t == 0 {
            continue;
        }
        tested_leading += 1;
        let mut leading = Sn::zero(sk);
        for a in OddMulti::all(n) {
            if let Some(p) = scalar_poly(&u, a) {
                if a.degree() <= t {
                    let h = p.homogeneous_part(t - a.degree());
                    leading = &leading + &(&odd_product(a, y.odd(), sk) * &substitute(&h, y.even(), sk));
                }
            }
        }
        if taylor_superfield(&u, &x, &y, t - 1).unwrap().defect != leading {
            leading_bad += 1;
        }
    }
    outcome(
        exact_bad + leading_bad == 0 && tested_leading > 0,
        format!("{cases} superfields: {exact_bad} nonzero defects at N >= degree, {leading_bad}/{tested_leading} leading-term mismatches at N = degree - 1"),
    )
}

fn roundtrip() -> Outcome {
    let mut rng = sampling::rng(505);
    let count = 200;
    let (mut suite_bad, mut extract_bad) = (0, 0);
    for k in 0..count {
        let (m, n) = (rng.gen_range(1..=2), rng.gen_range(0..=3));
        let u = if k % 4 == 3 { sampling::mixed_superfield(&mut rng, m, n, 3) } else { sampling::superfield(&mut rng, m, n, 4) };
        let l = rng.gen_range(1..=6);
        let d = if rng.gen_bool(0.75) { l } else { rng.gen_range(0..=l) };
        let sk = Skeleton::new(l, d).unwrap();
        let x = sampling::point(&mut rng, sk, m, n, 6);
        let report = equivalence_suite(&u, std::slice::from_ref(&x), &SuiteOptions::default()).unwrap();
        if !report.pass {
            suite_bad += 1;
        }
        let got: BTreeMap<OddMulti, Sn> = superfield_extract(&u, x.even(), sk).unwrap().coeffs;
        let want: BTreeMap<OddMulti, Sn> = OddMulti::all(n)
            .into_iter()
            .filter_map(|a| scalar_poly(&u, a).map(|p| (a, substitute(&p, x.even(), sk))))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        if got != want {
            extract_bad += 1;
        }
    }
    let mut fixture_bad = Vec::new();
    let mut fixture_points = 0;
    for fixture in [Fixture::body_coordinate(), Fixture::soul_killing(), Fixture::coordinate_swap()] {
        for _ in 0..5 {
            let sk = full(rng.gen_range(4..=6));
            let x = sampling::point(&mut rng, sk, 1, 0, 8);
            let report = cr_check(&fixture, &x, &CheckOptions::default()).unwrap();
            let documented = fixture.documented_violations(&x);
            fixture_points += 1;
            if documented.is_empty() {
                continue;
            }
            if report.pass || report.residual <= 0.0 || report.violated_pairs() != documented {
                fixture_bad.push(format!("{fixture:?} at {x}"));
            }
        }
    }
    outcome(
        suite_bad + extract_bad == 0 && fixture_bad.is_empty(),
        format!(
            "{count} superfields: {suite_bad} suite failures, {extract_bad} extraction mismatches; {} of {fixture_points} fixture points off their documented pairs",
            fixture_bad.len()
        ),
    )
}

/// First pair `i ≤ j` with a nonzero compatibility defect.
fn first_incompatible(sk: Skeleton, a: &[Sn]) -> Option<(u32, u32, Sn)> {
    let s = |k: u32| Sn::generator(sk, k).unwrap();
    for i in 1..=sk.l() {
        for j in i..=sk.l() {
            let ai = &a[i as usize - 1];
            let defect = if i == j { &s(i) * ai } else { &(&s(j) * ai) + &(&s(i) * &a[j as usize - 1]) };
            if !defect.is_zero() {
                return Some((i, j, defect));
            }
        }
    }
    None
}

fn sigma_division() -> Outcome {
    let mut rng = sampling::rng(606);
    let cases = 1000;
    let (mut round_bad, mut reject_bad, mut rejected) = (0, 0, 0);
    for _ in 0..cases {
        let sk = sampling::skeleton(&mut rng, 1, 7);
        let f = sampling::supernumber(&mut rng, sk, Parity::Undefined, 12);
        let a: Vec<Sn> = (1..=sk.l()).map(|i| &Sn::generator(sk, i).unwrap() * &f).collect();
        match solve_sigma(sk, &a, 0.0).unwrap() {
            SigmaOutcome::Solved(sol) => {
                let delta = &sol.f - &f;
                let top = GIndex::top(sk.l());
                let lost = delta.terms().all(|(i, _)| if sk.d() == sk.l() { *i == top } else { i.degree() >= sk.d() });
                let recomputed = (1..=sk.l()).all(|i| &Sn::generator(sk, i).unwrap() * &sol.f == a[i as usize - 1]);
                if !lost || !recomputed || !sol.ambiguity.admits(&delta, 0.0) {
                    round_bad += 1;
                }
            }
            SigmaOutcome::Infeasible(_) => round_bad += 1,
        }

        // Add c·σ^K to A_i with i ∉ K and |K| < D, so σ_i A_i stops vanishing.
        let l = rng.gen_range(1..=7);
        let sk = Skeleton::new(l, rng.gen_range(1..=l)).unwrap();
        let f = sampling::supernumber(&mut rng, sk, Parity::Undefined, 12);
        let a: Vec<Sn> = (1..=l).map(|i| &Sn::generator(sk, i).unwrap() * &f).collect();
        let i = rng.gen_range(1..=l);
        let candidates: Vec<GIndex> = GIndex::enumerate(l, sk.d() - 1).into_iter().filter(|k| !k.contains(i)).collect();
        let k = candidates[rng.gen_range(0..candidates.len())];
        let mut bad = a.clone();
        let c = loop {
            let c = sampling::small_exact(&mut rng, false);
            if !c.is_zero() {
                break c;
            }
        };
        bad[i as usize - 1] = &bad[i as usize - 1] + &Sn::monomial(sk, k, c).unwrap();
        let Some((ei, ej, defect)) = first_incompatible(sk, &bad) else {
            reject_bad += 1;
            continue;
        };
        rejected += 1;
        match solve_sigma(sk, &bad, 0.0).unwrap() {
            SigmaOutcome::Infeasible(SigmaObstruction::Incompatible { i, j, defect: got }) if (i, j) == (ei, ej) && got == defect => {}
            _ => reject_bad += 1,
        }
    }
    outcome(
        round_bad == 0 && reject_bad == 0 && rejected >= 1000,
        format!("{cases} round trips with {round_bad} failures; {rejected} corrupted inputs with {reject_bad} wrong verdicts"),
    )
}

fn masuda_counterexample() -> Outcome {
    let map = DualMap::masuda();
    let mut notes = Vec::new();
    let mut ok = true;
    for l in [2] {
        let sk = full(l);
        let blades = GIndex::enumerate(l, l);
        let f = |x: &Sn| map.apply(x).unwrap();
        let mut linear = true;
        for e in blades.iter().filter(|e| e.is_even()) {
            let se = Sn::monomial(sk, *e, <Exact as Scalar>::one()).unwrap();
            for i in blades.iter().filter(|i| !i.is_even()) {
                let si = Sn::monomial(sk, *i, <Exact as Scalar>::one()).unwrap();
                if f(&(&se * &si)) != &se * &f(&si) {
                    linear = false;
                }
            }
        }
        let library_linear = even_linearity_check(&map, sk).unwrap().is_none();
        let s1 = Sn::generator(sk, 1).unwrap();
        let s12 = &s1 * &Sn::generator(sk, 2).unwrap();
        let verdict = match dual_represent(&map, sk).unwrap() {
            DualOutcome::Counterexample { obstruction } => {
                let text = obstruction.to_string();
                let hit = matches!(&obstruction, SigmaObstruction::Incompatible { i: 1, j: 1, defect } if *defect == s12)
                    && &s1 * &f(&s1) == s12;
                if l == 2 {
                    notes.push(format!("L=2 obstruction \"{text}\""));
                }
                hit && text == "σ1·A1 = σ1σ2 ≠ 0"
            }
            _ => false,
        };
        ok &= linear && library_linear && verdict;
    }
    outcome(ok, format!("even-linear by basis check and not representable; {}", notes.join("")))
}

fn annihilator_structure() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for l in 1..=6 {
        let sk = full(l);
        let top = GIndex::top(l);
        let blades = GIndex::enumerate(l, l);
        for m in 0..=2 {
            for n in 0..=2 {
                if m + n == 0 {
                    continue;
                }
                checked += 1;
                let ann = annihilator_solve(m, n, l).unwrap();
                // Each basis vector is a nonzero multiple of σ^top in exactly one odd slot.
                let mut slots = BTreeSet::new();
                let shaped = ann.basis.iter().all(|v| {
                    let support: Vec<usize> = (0..m + n).filter(|a| !v[*a].is_zero()).collect();
                    support.len() == 1
                        && support[0] >= m
                        && v[support[0]].terms().all(|(i, _)| *i == top)
                        && slots.insert(support[0])
                });
                // The expected vectors pair to zero with every graded basis direction.
                let annihilates = (m..m + n).all(|s| {
                    let mut slots = vec![Sn::zero(sk); m + n];
                    slots[s] = Sn::monomial(sk, top, <Exact as Scalar>::one()).unwrap();
                    (0..m + n).all(|a| {
                        blades
                            .iter()
                            .filter(|i| i.is_even() == (a < m))
                            .all(|i| (&Sn::monomial(sk, *i, <Exact as Scalar>::one()).unwrap() * &slots[a]).is_zero())
                    })
                });
                let graded = if l % 2 == 1 { n } else { 0 };
                if !(shaped && ann.dimension() == n && annihilates && ann.graded_dimension == graded) {
                    bad.push(format!("(m,n,L)=({m},{n},{l})"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} shapes, mismatches: {}", if bad.is_empty() { "none".into() } else { bad.join(" ") }))
}

fn float_sanity() -> Outcome {
    let cubic = Superfield::from_scalar(
        2,
        2,
        [
            (OddMulti::zero(2), SmoothMap::Poly(PolyMap::from_terms(2, [(vec![3, 0], exact(1, 1)), (vec![1, 2], exact(-2, 1))]).unwrap())),
            (OddMulti::from_bits(2, 0b11), SmoothMap::Poly(PolyMap::from_terms(2, [(vec![0, 3], exact(1, 2)), (vec![1, 0], exact(3, 1))]).unwrap())),
        ],
    )
    .unwrap();
    let expo = Superfield::from_scalar(
        2,
        2,
        [
            (OddMulti::zero(2), SmoothMap::Analytic(AnalyticMap::new(AnalyticKind::Exp, vec![exact(1, 1), exact(1, 2)], exact(0, 1)))),
            (OddMulti::from_bits(2, 0b11), SmoothMap::Analytic(AnalyticMap::new(AnalyticKind::Exp, vec![exact(-1, 1), exact(0, 1)], exact(1, 3)))),
        ],
    )
    .unwrap();
    let mut rng = sampling::rng(909);
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    let mut ok = true;
    for (name, u) in [("cubic", &cubic), ("exp", &expo)] {
        let sk = full(4);
        let x = sampling::point(&mut rng, sk, 2, 2, 6).to_float();
        let exact_pass = cr_check(u, &sampling::point(&mut rng, sk, 2, 2, 6), &CheckOptions::default()).unwrap().pass;
        let r = cr_check(u, &x, &CheckOptions::default()).unwrap();
        worst = worst.max(r.residual.max(r.max_abs));
        ok &= exact_pass && r.pass && r.residual <= 1e-6 && r.max_abs <= 1e-6;
        let at = |h: f64| {
            let opts = CheckOptions { method: Some(DerivativeMethod::CentralDifference { h, richardson: false }), ..CheckOptions::default() };
            cr_check::<_, Float>(u, &x, &opts).unwrap().max_abs
        };
        let ratio = at(1e-2) / at(5e-3);
        ok &= (3.0..=5.0).contains(&ratio);
        ratios.push(format!("{name} {ratio:.3}"));
    }
    outcome(ok, format!("largest default-step residual {worst:.2e}; residual ratio at h = 1e-2 vs 5e-3: {}", ratios.join(", ")))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for run in 0..2 {
        let cfg = StandardConfig { seed: 2024, mode: Mode::Exact, ..StandardConfig::default() };
        let report = run_standard(&cfg).unwrap();
        let path = dir.path().join(format!("run{run}.json"));
        std::fs::write(&path, to_pretty(&report)).unwrap();
        bytes.push(std::fs::read(&path).unwrap());
    }
    outcome(bytes[0] == bytes[1], format!("two seeded runs, {} bytes each, identical: {}", bytes[0].len(), bytes[0] == bytes[1]))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("algebra oracle equivalence", algebra_oracle),
        ("ring and graded axioms", ring_axioms),
        ("continuation coherence", continuation_coherence),
        ("Taylor exactness", taylor_exactness),
        ("superfield round trip", roundtrip),
        ("sigma division", sigma_division),
        ("self-duality counterexample", masuda_counterexample),
        ("annihilator structure", annihilator_structure),
        ("float-mode sanity", float_sanity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag}: {name}: {} ({:.1} s)", k + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
