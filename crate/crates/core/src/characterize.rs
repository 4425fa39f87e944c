//! Checks of superdifferentiability: the Cauchy–Riemann system, witness
//! recovery, `σ`-division, the self-duality construction, projectability and
//! the combined equivalence suite.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gindex::{merge_sign, GIndex};
use crate::sampling;
use crate::scalar::{Exact, Scalar};
use crate::superfield::{coord_partial, directional, superfield_extract, DerivativeMethod, SuperFunction};
use crate::superspace::{enumerate_coords, CoordIndex, SuperPoint};
use crate::supernumber::{Parity, Skeleton, Supernumber};

/// Default tolerance of float-mode checks.
pub const DEFAULT_CHECK_TOL: f64 = 1e-6;

/// Settings shared by the pointwise checks.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// `None` picks dual numbers on exact carriers and central differences on floats.
    pub method: Option<DerivativeMethod>,
    /// Float-mode bound on the largest defect coefficient.
    pub tol: f64,
    /// Maximum number of coordinates per slot.
    pub coord_cap: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { method: None, tol: DEFAULT_CHECK_TOL, coord_cap: None }
    }
}

impl CheckOptions {
    pub fn method_for<S: Scalar>(&self) -> DerivativeMethod {
        self.method.unwrap_or_else(DerivativeMethod::default_for::<S>)
    }
}

/// Exact carriers need an identically zero value; floats a small one.
pub fn negligible<S: Scalar>(x: &Supernumber<S>, tol: f64) -> bool {
    if S::EXACT {
        x.is_zero()
    } else {
        x.max_abs() <= tol
    }
}

fn mode_name<S: Scalar>() -> &'static str {
    if S::EXACT {
        "exact"
    } else {
        "float"
    }
}

fn check_shape<F: SuperFunction, S: Scalar>(f: &F, x: &SuperPoint<S>) -> Result<(usize, usize)> {
    let (m, n) = f.dims();
    if x.m() != m || x.n() != n {
        return Err(Error::Domain(format!(
            "{} is defined on R^{m}|{n} but the point has shape {}|{}",
            f.name(),
            x.m(),
            x.n()
        )));
    }
    Ok((m, n))
}

fn is_evaluation_error(e: &Error) -> bool {
    matches!(e, Error::Eval(_) | Error::Domain(_))
}

/// Which family of Cauchy–Riemann identities a pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrRule {
    /// `∂F/∂X_{A,I} = σ^I ∂F/∂X_{A,∅}`.
    EvenSlot,
    /// `σ^K ∂F/∂X_{A,J} + σ^J ∂F/∂X_{A,K} = 0`.
    OddSlot,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrViolation {
    pub rule: CrRule,
    pub first: CoordIndex,
    pub second: CoordIndex,
    pub dist: f64,
    pub max_abs: f64,
    pub defect: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedCoordinate {
    pub coord: CoordIndex,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrReport {
    pub pass: bool,
    pub mode: &'static str,
    /// Largest metric distance of a defect.
    pub residual: f64,
    /// Largest coefficient modulus of a defect.
    pub max_abs: f64,
    pub coordinates: usize,
    pub pairs: usize,
    pub violations: Vec<CrViolation>,
    pub skipped: Vec<SkippedCoordinate>,
}

impl CrReport {
    pub fn violated_pairs(&self) -> std::collections::BTreeSet<(CoordIndex, CoordIndex)> {
        self.violations.iter().map(|v| (v.first, v.second)).collect()
    }
}

/// Verifies the Cauchy–Riemann identities for every coordinate pair of `x`'s skeleton.
pub fn cr_check<F: SuperFunction, S: Scalar>(f: &F, x: &SuperPoint<S>, opts: &CheckOptions) -> Result<CrReport> {
    let (m, _) = check_shape(f, x)?;
    let sk = x.skeleton();
    let method = opts.method_for::<S>();
    let coords = enumerate_coords(m, x.n(), sk, opts.coord_cap);
    let partials: Vec<(CoordIndex, Result<Supernumber<S>>)> =
        coords.par_iter().map(|c| (*c, coord_partial(f, x, *c, method))).collect();
    let mut by_slot: BTreeMap<usize, Vec<(CoordIndex, Supernumber<S>)>> = BTreeMap::new();
    let mut skipped = Vec::new();
    for (c, r) in partials {
        match r {
            Ok(d) => by_slot.entry(c.slot).or_default().push((c, d)),
            Err(e) if is_evaluation_error(&e) => skipped.push(SkippedCoordinate { coord: c, reason: e.to_string() }),
            Err(e) => return Err(e),
        }
    }

    let mut pairs: Vec<(CrRule, CoordIndex, CoordIndex, Supernumber<S>)> = Vec::new();
    for (slot, ds) in &by_slot {
        if *slot <= m {
            let Some((_, base)) = ds.iter().find(|(c, _)| c.index.is_empty()) else {
                continue;
            };
            for (c, d) in ds.iter().filter(|(c, _)| !c.index.is_empty()) {
                let sigma = Supernumber::monomial(sk, c.index, S::one())?;
                pairs.push((CrRule::EvenSlot, *c, CoordIndex::new(*slot, GIndex::EMPTY), d - &(&sigma * base)));
            }
        } else {
            for (k, (cj, dj)) in ds.iter().enumerate() {
                for (ck, dk) in &ds[k..] {
                    let sj = Supernumber::monomial(sk, cj.index, S::one())?;
                    let sk_ = Supernumber::monomial(sk, ck.index, S::one())?;
                    pairs.push((CrRule::OddSlot, *cj, *ck, &(&sk_ * dj) + &(&sj * dk)));
                }
            }
        }
    }

    let mut residual: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut violations = Vec::new();
    for (rule, first, second, defect) in &pairs {
        let (dist, abs) = (defect.dist(), defect.max_abs());
        residual = residual.max(dist);
        max_abs = max_abs.max(abs);
        if !negligible(defect, opts.tol) {
            violations.push(CrViolation { rule: *rule, first: *first, second: *second, dist, max_abs: abs, defect: defect.to_string() });
        }
    }
    Ok(CrReport {
        pass: violations.is_empty(),
        mode: mode_name::<S>(),
        residual,
        max_abs,
        coordinates: coords.len(),
        pairs: pairs.len(),
        violations,
        skipped,
    })
}

/// The set of valid `F` in `A_i = σ_i F` beyond the returned representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ambiguity {
    /// `F + λ σ_1⋯σ_L`.
    TopBlade { l: u32 },
    /// `F + G` for any `G` whose blades all have degree at least `d`.
    DegreeAtLeast { d: u32 },
}

impl Ambiguity {
    fn for_skeleton(sk: Skeleton) -> Self {
        if sk.d() == sk.l() {
            Ambiguity::TopBlade { l: sk.l() }
        } else {
            Ambiguity::DegreeAtLeast { d: sk.d() }
        }
    }

    /// Whether `delta` lies in the ambiguity class.
    pub fn admits<S: Scalar>(&self, delta: &Supernumber<S>, tol: f64) -> bool {
        let rest = match *self {
            Ambiguity::TopBlade { l } => {
                let top = GIndex::top(l);
                let keep: Vec<(GIndex, S)> = delta.terms().filter(|(i, _)| **i != top).map(|(i, c)| (*i, c.clone())).collect();
                Supernumber::from_terms(delta.skeleton(), keep).expect("subset of terms")
            }
            Ambiguity::DegreeAtLeast { d } => delta.filter_degree_below(d),
        };
        negligible(&rest, tol)
    }
}

impl fmt::Display for Ambiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambiguity::TopBlade { l: 0 } => write!(f, "F + λ"),
            Ambiguity::TopBlade { l } => {
                write!(f, "F + λ·")?;
                for k in 1..=*l {
                    write!(f, "σ{k}")?;
                }
                Ok(())
            }
            Ambiguity::DegreeAtLeast { d } => write!(f, "F + (any terms of degree ≥ {d})"),
        }
    }
}

trait DegreeFilter {
    fn filter_degree_below(&self, d: u32) -> Self;
}

impl<S: Scalar> DegreeFilter for Supernumber<S> {
    fn filter_degree_below(&self, d: u32) -> Self {
        let keep: Vec<(GIndex, S)> = self.terms().filter(|(i, _)| i.degree() < d).map(|(i, c)| (*i, c.clone())).collect();
        Supernumber::from_terms(self.skeleton(), keep).expect("subset of terms")
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct SigmaSolution<S: Scalar> {
    /// Representative with the ambiguous blades set to zero.
    pub f: Supernumber<S>,
    pub ambiguity: Ambiguity,
}

/// Why `{A_i}` is not of the form `{σ_i F}`.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
#[serde(bound(serialize = ""))]
pub enum SigmaObstruction<S: Scalar> {
    /// `σ_j A_i + σ_i A_j ≠ 0`, or `σ_i A_i ≠ 0` when `i = j`.
    Incompatible { i: u32, j: u32, defect: Supernumber<S> },
    /// Two candidate coefficients of `F` at `blade` disagree.
    Contradiction { blade: GIndex, i: u32, j: u32 },
}

impl<S: Scalar> fmt::Display for SigmaObstruction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaObstruction::Incompatible { i, j, defect } if i == j => write!(f, "σ{i}·A{i} = {defect} ≠ 0"),
            SigmaObstruction::Incompatible { i, j, defect } => write!(f, "σ{j}·A{i} + σ{i}·A{j} = {defect} ≠ 0"),
            SigmaObstruction::Contradiction { blade, i, j } => {
                write!(f, "A{i} and A{j} prescribe different coefficients of F at {blade}")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
#[serde(bound(serialize = ""))]
pub enum SigmaOutcome<S: Scalar> {
    Solved(SigmaSolution<S>),
    Infeasible(SigmaObstruction<S>),
}

impl<S: Scalar> SigmaOutcome<S> {
    pub fn solution(&self) -> Option<&SigmaSolution<S>> {
        match self {
            SigmaOutcome::Solved(s) => Some(s),
            SigmaOutcome::Infeasible(_) => None,
        }
    }
}

/// Finds `F` with `A_i = σ_i F` for `i = 1..L`, where `L = a.len()`.
pub fn solve_sigma<S: Scalar>(sk: Skeleton, a: &[Supernumber<S>], tol: f64) -> Result<SigmaOutcome<S>> {
    if a.len() != sk.l() as usize {
        return Err(Error::Domain(format!("solve_sigma needs one entry per generator: {} given for L={}", a.len(), sk.l())));
    }
    let a = a.iter().map(|x| x.embed(sk)).collect::<Result<Vec<_>>>()?;
    let sigma = |k: u32| Supernumber::<S>::generator(sk, k).expect("generator within skeleton");
    for i in 1..=sk.l() {
        for j in i..=sk.l() {
            let defect = if i == j {
                &sigma(i) * &a[i as usize - 1]
            } else {
                &(&sigma(j) * &a[i as usize - 1]) + &(&sigma(i) * &a[j as usize - 1])
            };
            if !negligible(&defect, tol) {
                return Ok(SigmaOutcome::Infeasible(SigmaObstruction::Incompatible { i, j, defect }));
            }
        }
    }
    // A_i = σ_i Σ_{J ∌ i} b_J σ^J, and σ_i σ^J = (-1)^{#{j ∈ J : j < i}} σ^{J ∪ i}.
    let mut b: BTreeMap<GIndex, BTreeMap<u32, S>> = BTreeMap::new();
    for (k, ai) in a.iter().enumerate() {
        let i = k as u32 + 1;
        for (blade, c) in ai.terms() {
            if !blade.contains(i) {
                continue;
            }
            let j = blade.without(i);
            let sign = crate::gindex::Sign::from_parity(j.count_below(i) % 2 == 1);
            b.entry(j).or_default().insert(i, sign.apply(c.clone()));
        }
    }
    let mut terms = Vec::new();
    for (blade, by_i) in &b {
        if blade.degree() + 1 > sk.d() {
            continue;
        }
        let (&i0, v0) = by_i.iter().next().expect("nonempty");
        for i in (1..=sk.l()).filter(|i| !blade.contains(*i)) {
            let vi = by_i.get(&i).cloned().unwrap_or_else(S::zero);
            let diff = Supernumber::scalar(sk, vi - v0.clone());
            if !negligible(&diff, tol) {
                return Ok(SigmaOutcome::Infeasible(SigmaObstruction::Contradiction { blade: *blade, i: i0.min(i), j: i0.max(i) }));
            }
        }
        terms.push((*blade, v0.clone()));
    }
    let f = Supernumber::from_terms(sk, terms)?;
    Ok(SigmaOutcome::Solved(SigmaSolution { f, ambiguity: Ambiguity::for_skeleton(sk) }))
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct G1Witness<S: Scalar> {
    /// `F_j = ∂F/∂X_{j,∅}` for the even slots.
    pub even: Vec<Supernumber<S>>,
    /// `F_{m+s}` recovered by `σ`-division for the odd slots.
    pub odd: Vec<SigmaSolution<S>>,
}

impl<S: Scalar> G1Witness<S> {
    /// `Σ_j y_j F_j + Σ_s ω_s F_{m+s}`.
    pub fn apply(&self, y: &SuperPoint<S>) -> Supernumber<S> {
        let mut acc = Supernumber::zero(y.skeleton());
        for (yj, fj) in y.even().iter().zip(&self.even) {
            acc = &acc + &(yj * fj);
        }
        for (ws, fs) in y.odd().iter().zip(&self.odd) {
            acc = &acc + &(ws * &fs.f);
        }
        acc
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = ""))]
pub struct G1Certificate<S: Scalar> {
    pub slot: usize,
    pub obstruction: SigmaObstruction<S>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
#[serde(bound(serialize = ""))]
pub enum G1Outcome<S: Scalar> {
    Witness(G1Witness<S>),
    Infeasible(G1Certificate<S>),
}

/// Recovers the witnesses `F_A` of superdifferentiability at `x`.
pub fn g1_witness<F: SuperFunction, S: Scalar>(f: &F, x: &SuperPoint<S>, opts: &CheckOptions) -> Result<G1Outcome<S>> {
    let (m, n) = check_shape(f, x)?;
    let sk = x.skeleton();
    let method = opts.method_for::<S>();
    let even = (1..=m)
        .into_par_iter()
        .map(|slot| coord_partial(f, x, CoordIndex::new(slot, GIndex::EMPTY), method))
        .collect::<Result<Vec<_>>>()?;
    let mut odd = Vec::with_capacity(n);
    for slot in m + 1..=m + n {
        if sk.d() == 0 {
            odd.push(SigmaSolution { f: Supernumber::zero(sk), ambiguity: Ambiguity::DegreeAtLeast { d: 0 } });
            continue;
        }
        let a = (1..=sk.l())
            .into_par_iter()
            .map(|i| coord_partial(f, x, CoordIndex::new(slot, GIndex::single(i)?), method))
            .collect::<Result<Vec<_>>>()?;
        match solve_sigma(sk, &a, opts.tol)? {
            SigmaOutcome::Solved(s) => odd.push(s),
            SigmaOutcome::Infeasible(obstruction) => {
                return Ok(G1Outcome::Infeasible(G1Certificate { slot, obstruction }));
            }
        }
    }
    Ok(G1Outcome::Witness(G1Witness { even, odd }))
}

/// An `ℜ_ev`-linear map from odd supernumbers to supernumbers, given by its
/// values on odd blades.
#[derive(Clone, Debug, PartialEq)]
pub enum DualMap {
    /// `f(X) = X·u`.
    RightMultiply(Supernumber<Exact>),
    /// `f(σ^I)` for listed odd blades, zero elsewhere, extended linearly.
    BasisTable(BTreeMap<GIndex, Supernumber<Exact>>),
}

impl DualMap {
    /// `f(X_1σ_1 + X_2σ_2) = X_1σ_2`.
    pub fn masuda() -> Self {
        let sk = Skeleton::full(2).expect("small skeleton");
        let s1 = GIndex::single(1).expect("valid blade");
        DualMap::BasisTable(BTreeMap::from([(s1, Supernumber::generator(sk, 2).expect("generator"))]))
    }

    pub fn apply(&self, x: &Supernumber<Exact>) -> Result<Supernumber<Exact>> {
        if !x.parity_project(Parity::Even).is_zero() {
            return Err(Error::Domain(format!("{x} is not odd")));
        }
        let sk = x.skeleton();
        match self {
            DualMap::RightMultiply(u) => {
                let wide = sk.join(u.skeleton());
                Ok((&x.embed(wide)? * &u.embed(wide)?).embed_within(sk))
            }
            DualMap::BasisTable(images) => {
                let mut acc = Supernumber::zero(sk);
                for (i, c) in x.terms() {
                    if let Some(img) = images.get(i) {
                        acc = &acc + &img.embed_within(sk).scale(c);
                    }
                }
                Ok(acc)
            }
        }
    }
}

trait EmbedWithin {
    fn embed_within(&self, sk: Skeleton) -> Self;
}

impl<S: Scalar> EmbedWithin for Supernumber<S> {
    /// Drops blades outside `sk` and re-homes the rest.
    fn embed_within(&self, sk: Skeleton) -> Self {
        let keep: Vec<(GIndex, S)> = self.terms().filter(|(i, _)| sk.admits(**i)).map(|(i, c)| (*i, c.clone())).collect();
        Supernumber::from_terms(sk, keep).expect("blades admitted")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearityFailure {
    pub even: GIndex,
    pub odd: GIndex,
    /// `f(σ^E σ^I)`.
    pub lhs: Supernumber<Exact>,
    /// `σ^E f(σ^I)`.
    pub rhs: Supernumber<Exact>,
}

/// Checks `f(σ^E σ^I) = σ^E f(σ^I)` for every even blade `E` and odd blade `I` of `sk`.
pub fn even_linearity_check(f: &DualMap, sk: Skeleton) -> Result<Option<LinearityFailure>> {
    let blades = GIndex::enumerate(sk.l(), sk.d());
    let images: BTreeMap<GIndex, Supernumber<Exact>> = blades
        .iter()
        .filter(|i| !i.is_even())
        .map(|i| Ok((*i, f.apply(&Supernumber::monomial(sk, *i, <Exact as Scalar>::one())?)?)))
        .collect::<Result<_>>()?;
    for e in blades.iter().filter(|e| e.is_even() && !e.is_empty()) {
        let sigma_e = Supernumber::monomial(sk, *e, <Exact as Scalar>::one())?;
        for (i, img) in &images {
            let lhs = match merge_sign(*e, *i) {
                Some((sign, k)) if sk.admits(k) => images[&k].scale(&sign.apply(<Exact as Scalar>::one())),
                _ => Supernumber::zero(sk),
            };
            let rhs = &sigma_e * img;
            if lhs != rhs {
                return Ok(Some(LinearityFailure { even: *e, odd: *i, lhs, rhs }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DualOutcome {
    /// `f(X) = X·u` on every odd blade.
    Represented { u: SigmaSolution<Exact> },
    /// The values `f_i = f(σ_i)` admit no `u` with `f_i = σ_i u`.
    Counterexample { obstruction: SigmaObstruction<Exact> },
    /// The samples are not `ℜ_ev`-linear.
    NotEvenLinear { failure: LinearityFailure },
    /// `u` from the generators fails on a higher odd blade.
    RepresentationFailure { blade: GIndex, expected: Supernumber<Exact>, got: Supernumber<Exact> },
}

/// Looks for `u` with `f(X) = X·u` on the odd part of skeleton `sk`.
pub fn dual_represent(f: &DualMap, sk: Skeleton) -> Result<DualOutcome> {
    if let Some(failure) = even_linearity_check(f, sk)? {
        return Ok(DualOutcome::NotEvenLinear { failure });
    }
    let fi = (1..=sk.l())
        .map(|i| f.apply(&Supernumber::generator(sk, i)?))
        .collect::<Result<Vec<_>>>()?;
    let u = match solve_sigma(sk, &fi, 0.0)? {
        SigmaOutcome::Solved(u) => u,
        SigmaOutcome::Infeasible(obstruction) => return Ok(DualOutcome::Counterexample { obstruction }),
    };
    for i in GIndex::enumerate(sk.l(), sk.d()).into_iter().filter(|i| !i.is_even()) {
        let x = Supernumber::monomial(sk, i, <Exact as Scalar>::one())?;
        let expected = f.apply(&x)?;
        let got = &x * &u.f;
        if expected != got {
            return Ok(DualOutcome::RepresentationFailure { blade: i, expected, got });
        }
    }
    Ok(DualOutcome::Represented { u })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectabilityWitness {
    pub sample: usize,
    pub z: String,
    pub w: String,
    pub difference: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectabilityPair {
    pub lower: u32,
    pub upper: u32,
    pub samples: usize,
    pub pass: bool,
    pub skipped: usize,
    pub witness: Option<ProjectabilityWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectabilityReport {
    pub pass: bool,
    pub pairs: Vec<ProjectabilityPair>,
}

/// For sampled `Z, W ∈ ℜ_{L′}^{m|n}` with `p_L Z = p_L W`, checks `p_L F(Z) = p_L F(W)`.
pub fn projectability_check<F: SuperFunction, S: Scalar>(
    f: &F,
    pairs: &[(u32, u32)],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ProjectabilityReport> {
    let (m, n) = f.dims();
    let mut out = Vec::new();
    for (p, &(lower, upper)) in pairs.iter().enumerate() {
        if lower >= upper {
            return Err(Error::Config(format!("skeleton pair ({lower}, {upper}) must satisfy L < L'")));
        }
        let sk = Skeleton::full(upper)?;
        let mut rng = sampling::rng(seed ^ ((p as u64 + 1) << 32));
        let draws: Vec<(SuperPoint<Exact>, SuperPoint<Exact>)> = (0..samples)
            .map(|_| (sampling::point(&mut rng, sk, m, n, 8), sampling::point(&mut rng, sk, m, n, 8)))
            .collect();
        let results: Vec<Result<Option<ProjectabilityWitness>>> = draws
            .par_iter()
            .enumerate()
            .map(|(k, (z, r))| {
                let z: SuperPoint<S> = z.map(S::from_exact);
                let r: SuperPoint<S> = r.map(S::from_exact);
                let low = r.skeleton_project(lower)?.embed(sk)?;
                let w = z.skeleton_project(lower)?.embed(sk)?.add(&r.sub(&low)?)?;
                let fz = f.eval(&z)?.skeleton_project(lower)?;
                let fw = f.eval(&w)?.skeleton_project(lower)?;
                let diff = &fz - &fw;
                Ok((!negligible(&diff, tol)).then(|| ProjectabilityWitness {
                    sample: k,
                    z: z.to_string(),
                    w: w.to_string(),
                    difference: diff.to_string(),
                }))
            })
            .collect();
        let mut witness = None;
        let mut skipped = 0;
        for r in results {
            match r {
                Ok(Some(w)) if witness.is_none() => witness = Some(w),
                Ok(_) => {}
                Err(e) if is_evaluation_error(&e) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        out.push(ProjectabilityPair { lower, upper, samples, pass: witness.is_none(), skipped, witness });
    }
    Ok(ProjectabilityReport { pass: out.iter().all(|p| p.pass), pairs: out })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        })
    }
}

/// One line of a consolidated report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub sample: Option<usize>,
    pub status: Status,
    pub residual: f64,
    pub max_abs: f64,
    pub witnesses: Vec<String>,
}

impl CheckRecord {
    fn new(name: &str, anchor: &str, sample: Option<usize>) -> Self {
        CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            sample,
            status: Status::Pass,
            residual: 0.0,
            max_abs: 0.0,
            witnesses: Vec::new(),
        }
    }

    fn measure<S: Scalar>(&mut self, defect: &Supernumber<S>, tol: f64) {
        self.residual = self.residual.max(defect.dist());
        self.max_abs = self.max_abs.max(defect.max_abs());
        if !negligible(defect, tol) {
            self.status = Status::Fail;
        }
    }

    fn fail(&mut self, witness: String) {
        self.status = Status::Fail;
        self.witnesses.push(witness);
    }
}

pub const ANCHOR_CR: &str = "(d) Cauchy-Riemann equations";
pub const ANCHOR_G1: &str = "(b) G1 expansion with witnesses F_A";
pub const ANCHOR_EVEN_LINEAR: &str = "(c) even-linear Gateaux differential";
pub const ANCHOR_EXPANSION: &str = "(e) superfield expansion";

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub subject: String,
    pub mode: &'static str,
    pub samples: usize,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn from_checks(subject: String, mode: &'static str, samples: usize, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.status != Status::Fail);
        SuiteReport { subject, mode, samples, checks, pass }
    }

    /// Names of the theorem conditions with at least one failing check.
    pub fn violated_anchors(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.anchor.as_str()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Plain-text table, one row per check.
    pub fn to_table(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "subject: {} ({} mode, {} samples)", self.subject, self.mode, self.samples);
        let _ = writeln!(s, "{:<20} {:<40} {:>6} {:>8} {:>12} {:>12}", "check", "condition", "sample", "status", "residual", "max |defect|");
        for c in &self.checks {
            let sample = c.sample.map_or_else(|| "-".to_string(), |k| k.to_string());
            let _ = writeln!(
                s,
                "{:<20} {:<40} {:>6} {:>8} {:>12.3e} {:>12.3e}",
                c.name, c.anchor, sample, c.status.to_string(), c.residual, c.max_abs
            );
            for w in c.witnesses.iter().take(5) {
                let _ = writeln!(s, "    {w}");
            }
            if c.witnesses.len() > 5 {
                let _ = writeln!(s, "    ... {} more", c.witnesses.len() - 5);
            }
        }
        let _ = writeln!(s, "overall: {}", if self.pass { "pass" } else { "FAIL" });
        s
    }
}

/// Settings of [`equivalence_suite`].
#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteOptions {
    pub check: CheckOptions,
    /// Seed of the directions `Y` and even scalars `λ`.
    pub seed: u64,
}

/// Runs the Cauchy–Riemann check, witness recovery, the Gâteaux expansion,
/// even-linearity of the differential and extraction at every sample.
pub fn equivalence_suite<F: SuperFunction, S: Scalar>(f: &F, samples: &[SuperPoint<S>], opts: &SuiteOptions) -> Result<SuiteReport> {
    let per_sample: Vec<Result<Vec<CheckRecord>>> =
        samples.par_iter().enumerate().map(|(k, x)| suite_at(f, x, k, opts)).collect();
    let mut checks = Vec::new();
    for r in per_sample {
        checks.extend(r?);
    }
    Ok(SuiteReport::from_checks(f.name(), mode_name::<S>(), samples.len(), checks))
}

fn suite_at<F: SuperFunction, S: Scalar>(f: &F, x: &SuperPoint<S>, k: usize, opts: &SuiteOptions) -> Result<Vec<CheckRecord>> {
    let (m, n) = check_shape(f, x)?;
    let sk = x.skeleton();
    let tol = opts.check.tol;
    let method = opts.check.method_for::<S>();
    let mut out = Vec::new();

    let cr = cr_check(f, x, &opts.check)?;
    let mut rec = CheckRecord::new("cauchy-riemann", ANCHOR_CR, Some(k));
    rec.residual = cr.residual;
    rec.max_abs = cr.max_abs;
    for v in &cr.violations {
        rec.fail(format!("{} vs {}: {}", v.first, v.second, v.defect));
    }
    for s in &cr.skipped {
        rec.witnesses.push(format!("skipped {}: {}", s.coord, s.reason));
    }
    out.push(rec);

    let mut rec = CheckRecord::new("g1-witness", ANCHOR_G1, Some(k));
    let witness = match g1_witness(f, x, &opts.check)? {
        G1Outcome::Witness(w) => Some(w),
        G1Outcome::Infeasible(c) => {
            rec.fail(format!("slot {}: {}", c.slot, c.obstruction));
            None
        }
    };
    if let (Some(w), Some(u)) = (&witness, f.as_superfield()) {
        for j in 1..=m {
            let expected = u.partial_even(j)?.eval(x)?;
            let defect = &w.even[j - 1] - &expected;
            rec.measure(&defect, tol);
            if !negligible(&defect, tol) {
                rec.witnesses.push(format!("F{j} differs from the x{j}-derivative by {defect}"));
            }
        }
        for s in 1..=n {
            let expected = u.partial_odd_left(s)?.eval(x)?;
            let sol = &w.odd[s - 1];
            let delta = &sol.f - &expected;
            if !sol.ambiguity.admits(&delta, tol) {
                rec.fail(format!("F{} differs from the θ{s}-derivative by {delta}, outside {}", m + s, sol.ambiguity));
            }
        }
    }
    if let Some(w) = &witness {
        for (s, sol) in w.odd.iter().enumerate() {
            rec.witnesses.push(format!("F{} = {} (up to {})", m + s + 1, sol.f, sol.ambiguity));
        }
    }
    out.push(rec);

    let mut rng = sampling::rng(opts.seed.wrapping_add(k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let exact_sk = Skeleton::new(sk.l(), sk.d())?;
    let y: SuperPoint<S> = sampling::point(&mut rng, exact_sk, m, n, 6).map(S::from_exact);
    let lambda: Supernumber<S> = sampling::supernumber(&mut rng, exact_sk, Parity::Even, 4).map(S::from_exact);

    let mut rec = CheckRecord::new("gateaux", ANCHOR_G1, Some(k));
    match &witness {
        Some(w) => {
            let d = directional(f, x, &y, method)?;
            let defect = &d - &w.apply(&y);
            rec.measure(&defect, tol);
            if rec.status == Status::Fail {
                rec.witnesses.push(format!("d F(X; Y) - Σ Y_A F_A = {defect}"));
            }
        }
        None => rec.status = Status::Skipped,
    }
    out.push(rec);

    let mut rec = CheckRecord::new("even-linear", ANCHOR_EVEN_LINEAR, Some(k));
    let scaled = SuperPoint::new(
        sk,
        y.even().iter().map(|v| &lambda * v).collect(),
        y.odd().iter().map(|v| &lambda * v).collect(),
    )?;
    let d1 = directional(f, x, &y, method)?;
    let d2 = directional(f, x, &scaled, method)?;
    let defect = &d2 - &(&lambda * &d1);
    rec.measure(&defect, tol);
    if rec.status == Status::Fail {
        rec.witnesses.push(format!("d F(X; λY) - λ d F(X; Y) = {defect} for λ = {lambda}"));
    }
    out.push(rec);

    let mut rec = CheckRecord::new("extract", ANCHOR_EXPANSION, Some(k));
    match superfield_extract(f, x.even(), sk) {
        Ok(e) => {
            let mut rebuilt = Supernumber::zero(sk);
            for (a, c) in &e.coeffs {
                let mut theta_a = Supernumber::one(sk);
                for s in a.support() {
                    theta_a = &theta_a * &x.odd()[s - 1];
                }
                rebuilt = &rebuilt + &(&theta_a * c);
            }
            let defect = &f.eval(x)? - &rebuilt;
            rec.measure(&defect, tol);
            if !negligible(&defect, tol) {
                rec.witnesses.push(format!("F(X) - Σ θ^a f_a(x) = {defect}"));
            }
            if let Some(u) = f.as_superfield() {
                let expected = u.continued_coefficients(x.even(), sk)?;
                let keys: std::collections::BTreeSet<_> = expected.keys().chain(e.coeffs.keys()).copied().collect();
                for a in keys {
                    let zero = Supernumber::zero(sk);
                    let got = e.coeffs.get(&a).unwrap_or(&zero);
                    let want = expected.get(&a).unwrap_or(&zero);
                    let defect = got - want;
                    rec.measure(&defect, tol);
                    if !negligible(&defect, tol) {
                        rec.witnesses.push(format!("coefficient {a}: extracted {got}, expected {want}"));
                    }
                }
            }
        }
        Err(Error::Config(reason)) => {
            rec.status = Status::Skipped;
            rec.witnesses.push(reason);
        }
        Err(e) => return Err(e),
    }
    out.push(rec);
    Ok(out)
}
