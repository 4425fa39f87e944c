//! The seeded end-to-end suite: random superfields through the equivalence
//! checks, the canonical non-examples, `σ`-division, self-duality, the
//! annihilator and projectability, gathered into one report.

use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::characterize::{
    cr_check, dual_represent, equivalence_suite, even_linearity_check, projectability_check, solve_sigma, CheckOptions,
    CheckRecord, DualMap, DualOutcome, SigmaObstruction, SigmaOutcome, Status, SuiteOptions, SuiteReport,
};
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::gindex::GIndex;
use crate::sampling;
use crate::scalar::{Exact, Float, Scalar};
use crate::superfield::SuperFunction;
use crate::superspace::{annihilator_solve, Annihilator, SuperPoint};
use crate::supernumber::{Parity, Skeleton, Supernumber};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Config(format!("unknown mode \"{other}\" (expected exact or float)"))),
        }
    }
}

/// Sections of the standard suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Equivalence,
    Fixtures,
    Sigma,
    Dual,
    Annihilator,
    Projectability,
}

impl Section {
    pub const ALL: [Section; 6] = [
        Section::Equivalence,
        Section::Fixtures,
        Section::Sigma,
        Section::Dual,
        Section::Annihilator,
        Section::Projectability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::Equivalence => "equivalence",
            Section::Fixtures => "fixtures",
            Section::Sigma => "sigma",
            Section::Dual => "dual",
            Section::Annihilator => "annihilator",
            Section::Projectability => "projectability",
        }
    }
}

impl FromStr for Section {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Section::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite section \"{s}\"")))
    }
}

/// Sizes and settings of a standard run.
#[derive(Clone, Debug)]
pub struct StandardConfig {
    pub seed: u64,
    pub mode: Mode,
    /// Largest skeleton used by the random sections.
    pub max_l: u32,
    pub superfields: usize,
    pub points_per_superfield: usize,
    pub sigma_cases: usize,
    pub projectability_samples: usize,
    pub check: CheckOptions,
    pub sections: Vec<Section>,
}

impl Default for StandardConfig {
    fn default() -> Self {
        StandardConfig {
            seed: 1,
            mode: Mode::Exact,
            max_l: 4,
            superfields: 8,
            points_per_superfield: 2,
            sigma_cases: 50,
            projectability_samples: 8,
            check: CheckOptions::default(),
            sections: Section::ALL.to_vec(),
        }
    }
}

fn record(name: &str, anchor: &str) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        anchor: anchor.into(),
        sample: None,
        status: Status::Pass,
        residual: 0.0,
        max_abs: 0.0,
        witnesses: Vec::new(),
    }
}

fn fail(rec: &mut CheckRecord, why: String) {
    rec.status = Status::Fail;
    rec.witnesses.push(why);
}

/// Runs the selected sections and returns one consolidated report.
pub fn run_standard(cfg: &StandardConfig) -> Result<SuiteReport> {
    if cfg.max_l < 2 {
        return Err(Error::Config("the standard suite needs a skeleton with at least 2 generators".into()));
    }
    let mut checks = Vec::new();
    for (k, section) in cfg.sections.iter().enumerate() {
        let seed = cfg.seed.wrapping_mul(1000).wrapping_add(k as u64);
        match section {
            Section::Equivalence => equivalence_section(cfg, seed, &mut checks)?,
            Section::Fixtures => fixture_section(cfg, &mut checks)?,
            Section::Sigma => sigma_section(cfg, seed, &mut checks)?,
            Section::Dual => dual_section(cfg, seed, &mut checks)?,
            Section::Annihilator => annihilator_section(cfg, &mut checks)?,
            Section::Projectability => projectability_section(cfg, seed, &mut checks)?,
        }
    }
    let mode = match cfg.mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    };
    Ok(SuiteReport::from_checks(format!("standard suite, seed {}", cfg.seed), mode, cfg.superfields, checks))
}

fn equivalence_section(cfg: &StandardConfig, seed: u64, out: &mut Vec<CheckRecord>) -> Result<()> {
    let mut rng = sampling::rng(seed);
    for k in 0..cfg.superfields {
        let m = rng.gen_range(0..=2);
        let n = rng.gen_range(0..=3);
        let u = sampling::superfield(&mut rng, m, n, 4);
        let sk = sampling::skeleton(&mut rng, 1, cfg.max_l);
        let points: Vec<SuperPoint<Exact>> =
            (0..cfg.points_per_superfield).map(|_| sampling::point(&mut rng, sk, m, n, 5)).collect();
        let opts = SuiteOptions { check: cfg.check, seed: seed ^ k as u64 };
        let report = match cfg.mode {
            Mode::Exact => equivalence_suite(&u, &points, &opts)?,
            Mode::Float => {
                let fp: Vec<SuperPoint<Float>> = points.iter().map(SuperPoint::to_float).collect();
                equivalence_suite(&u, &fp, &opts)?
            }
        };
        for mut c in report.checks {
            c.name = format!("superfield {k}: {}", c.name);
            out.push(c);
        }
    }
    Ok(())
}

fn fixture_point(f: &Fixture, max_l: u32) -> Result<SuperPoint<Exact>> {
    let (m, n) = f.dims();
    let l = f.min_skeleton().l().max(max_l.min(4));
    let sk = Skeleton::full(l)?;
    let mut rng = sampling::rng(u64::from(l));
    let mut x = sampling::point(&mut rng, sk, m, n, 6);
    if m > 0 && x.even()[0].body().is_zero() {
        x = SuperPoint::new(sk, x.even().iter().map(|v| v + &Supernumber::one(sk)).collect(), x.odd().to_vec())?;
    }
    Ok(x)
}

fn fixture_section(cfg: &StandardConfig, out: &mut Vec<CheckRecord>) -> Result<()> {
    let fixtures = [Fixture::body_coordinate(), Fixture::soul_killing(), Fixture::coordinate_swap(), Fixture::Masuda];
    for f in fixtures {
        let x = fixture_point(&f, cfg.max_l)?;
        let mut rec = record(&format!("rejects {f}"), "(d) Cauchy-Riemann equations");
        let report = match cfg.mode {
            Mode::Exact => cr_check(&f, &x, &cfg.check)?,
            Mode::Float => cr_check(&f, &x.to_float(), &cfg.check)?,
        };
        rec.residual = report.residual;
        rec.max_abs = report.max_abs;
        let expected = f.documented_violations(&x);
        let got = report.violated_pairs();
        if report.pass {
            fail(&mut rec, "Cauchy-Riemann check passed on a non-superdifferentiable map".into());
        } else if got != expected {
            fail(&mut rec, format!("violations at {got:?}, documented {expected:?}"));
        }
        rec.witnesses.extend(report.violations.iter().take(4).map(|v| format!("{} vs {}: {}", v.first, v.second, v.defect)));
        out.push(rec);
    }
    Ok(())
}

fn sigma_section(cfg: &StandardConfig, seed: u64, out: &mut Vec<CheckRecord>) -> Result<()> {
    let mut rng = sampling::rng(seed);
    let mut round_trip = record("solve-sigma round trip", "(b) odd witnesses by sigma-division");
    let mut rejects = record("solve-sigma rejects incompatible data", "(b) odd witnesses by sigma-division");
    for case in 0..cfg.sigma_cases {
        let sk = sampling::skeleton(&mut rng, 1, cfg.max_l);
        let f = sampling::supernumber(&mut rng, sk, Parity::Undefined, 6);
        let a: Vec<Supernumber<Exact>> = (1..=sk.l()).map(|i| &Supernumber::generator(sk, i).expect("generator") * &f).collect();
        match solve_sigma(sk, &a, 0.0)? {
            SigmaOutcome::Solved(sol) => {
                if !sol.ambiguity.admits(&(&sol.f - &f), 0.0) {
                    fail(&mut round_trip, format!("case {case}: recovered {} from F = {f}", sol.f));
                }
            }
            SigmaOutcome::Infeasible(o) => fail(&mut round_trip, format!("case {case}: {o} for F = {f}")),
        }
        // A blade of A_i without σ_i and below the cutoff makes σ_i A_i nonzero.
        if sk.d() == 0 {
            continue;
        }
        let i = rng.gen_range(1..=sk.l());
        let stray: Vec<GIndex> = GIndex::enumerate(sk.l(), sk.d() - 1).into_iter().filter(|b| !b.contains(i)).collect();
        let b = stray[rng.gen_range(0..stray.len())];
        let mut bad = a.clone();
        bad[i as usize - 1] = &bad[i as usize - 1] + &Supernumber::monomial(sk, b, <Exact as Scalar>::one())?;
        match solve_sigma(sk, &bad, 0.0)? {
            SigmaOutcome::Infeasible(SigmaObstruction::Incompatible { i: p, j: q, defect }) => {
                let sigma = |k: u32| Supernumber::<Exact>::generator(sk, k).expect("generator");
                let recomputed = if p == q {
                    &sigma(p) * &bad[p as usize - 1]
                } else {
                    &(&sigma(q) * &bad[p as usize - 1]) + &(&sigma(p) * &bad[q as usize - 1])
                };
                if recomputed.is_zero() || recomputed != defect {
                    fail(&mut rejects, format!("case {case}: pair ({p},{q}) is not a violation"));
                }
            }
            SigmaOutcome::Infeasible(o) => fail(&mut rejects, format!("case {case}: unexpected obstruction {o}")),
            SigmaOutcome::Solved(_) => fail(&mut rejects, format!("case {case}: corrupted data was accepted")),
        }
    }
    out.push(round_trip);
    out.push(rejects);
    Ok(())
}

fn dual_section(cfg: &StandardConfig, seed: u64, out: &mut Vec<CheckRecord>) -> Result<()> {
    let sk2 = Skeleton::full(2)?;
    let mut rec = record("Masuda map is not self-dual at L=2", "self-duality needs infinitely many generators");
    if let Some(f) = even_linearity_check(&DualMap::masuda(), sk2)? {
        fail(&mut rec, format!("map is not even-linear at {} x {}", f.even, f.odd));
    }
    match dual_represent(&DualMap::masuda(), sk2)? {
        DualOutcome::Counterexample { obstruction } => rec.witnesses.push(obstruction.to_string()),
        other => fail(&mut rec, format!("expected a counterexample, got {}", serde_json::to_string(&other).unwrap_or_default())),
    }
    out.push(rec);

    let mut rec = record("right multiplication is recovered", "self-duality needs infinitely many generators");
    let mut rng = sampling::rng(seed);
    for case in 0..cfg.sigma_cases.min(20) {
        let sk = sampling::skeleton(&mut rng, 1, cfg.max_l);
        let u = sampling::supernumber(&mut rng, sk, Parity::Undefined, 6);
        match dual_represent(&DualMap::RightMultiply(u.clone()), sk)? {
            DualOutcome::Represented { u: got } => {
                if !got.ambiguity.admits(&(&got.f - &u), 0.0) {
                    fail(&mut rec, format!("case {case}: recovered {} for u = {u}", got.f));
                }
            }
            other => fail(&mut rec, format!("case {case}: {}", serde_json::to_string(&other).unwrap_or_default())),
        }
    }
    out.push(rec);
    Ok(())
}

/// Whether each odd slot contributes exactly the line of the top blade and even slots nothing.
pub fn annihilator_has_top_blade_structure(a: &Annihilator) -> bool {
    let top = GIndex::top(a.l);
    let mut odd_slots_seen = Vec::new();
    for v in &a.basis {
        let nonzero: Vec<usize> = (0..v.len()).filter(|s| !v[*s].is_zero()).collect();
        let [slot] = nonzero[..] else { return false };
        if slot < a.m || v[slot].indices().any(|i| i != top) {
            return false;
        }
        odd_slots_seen.push(slot);
    }
    odd_slots_seen.sort_unstable();
    odd_slots_seen == (a.m..a.m + a.n).collect::<Vec<_>>()
}

fn annihilator_section(cfg: &StandardConfig, out: &mut Vec<CheckRecord>) -> Result<()> {
    let mut rec = record("annihilator of the pairing", "odd slots leave the top blade undetermined");
    for m in 0..=2 {
        for n in 0..=2 {
            for l in 0..=cfg.max_l.min(6) {
                let a = annihilator_solve(m, n, l)?;
                if !annihilator_has_top_blade_structure(&a) {
                    fail(&mut rec, format!("(m,n,L)=({m},{n},{l}): dimension {}", a.dimension()));
                }
            }
        }
    }
    out.push(rec);
    Ok(())
}

fn projectability_section(cfg: &StandardConfig, seed: u64, out: &mut Vec<CheckRecord>) -> Result<()> {
    let samples = cfg.projectability_samples;
    let pairs = [(1, 2), (2, cfg.max_l.max(3))];
    let mut rec = record("superfields are projectable", "projectable through finite skeletons");
    let mut rng = sampling::rng(seed);
    for k in 0..3 {
        let (m, n) = (rng.gen_range(1..=2), rng.gen_range(0..=2));
        let u = sampling::superfield(&mut rng, m, n, 3);
        let r = match cfg.mode {
            Mode::Exact => projectability_check::<_, Exact>(&u, &pairs, samples, seed + k, 0.0)?,
            Mode::Float => projectability_check::<_, Float>(&u, &pairs, samples, seed + k, cfg.check.tol)?,
        };
        for p in r.pairs.iter().filter(|p| !p.pass) {
            fail(&mut rec, format!("superfield {k} at L={} < L'={}", p.lower, p.upper));
        }
    }
    out.push(rec);

    let mut rec = record("probe X[1,[1,2]] is caught at L=1", "projectable through finite skeletons");
    let probe = Fixture::projectable_probe();
    let r = projectability_check::<_, Exact>(&probe, &[(1, 2), (2, 3)], samples, seed, 0.0)?;
    match (r.pairs[0].pass, r.pairs[1].pass) {
        (false, true) => {
            if let Some(w) = &r.pairs[0].witness {
                rec.witnesses.push(format!("sample {}: p_1 F(Z) - p_1 F(W) = {}", w.sample, w.difference));
            }
        }
        (a, b) => fail(&mut rec, format!("expected fail at (1,2) and pass at (2,3), got {a} and {b}")),
    }
    out.push(rec);
    Ok(())
}
