use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use supersmooth::characterize::{
    cr_check, dual_represent, equivalence_suite, g1_witness, solve_sigma, CrReport, DualOutcome, G1Outcome, SigmaOutcome,
    SuiteOptions,
};
use supersmooth::continuation::continue_valued;
use supersmooth::error::{Error, Result};
use supersmooth::fixtures::Subject;
use supersmooth::gindex::GIndex;
use supersmooth::json::{dual_map_from_value, subject_from_value, superfield_from_value, supernumber_from_value, valued_from_value};
use supersmooth::sampling;
use supersmooth::scalar::{Exact, Float, Scalar};
use supersmooth::superfield::{coord_partial, directional, superfield_extract, taylor_superfield, SuperFunction};
use supersmooth::superspace::{CoordIndex, SuperPoint};
use supersmooth::suite::{run_standard, Mode, Section, StandardConfig};
use supersmooth::supernumber::{Skeleton, Supernumber};

use crate::io::{emit, emit_json, read_even_args, read_point, read_points, read_supernumber, read_value};
use crate::{Command, RunConfig, Verdict};

macro_rules! by_mode {
    ($cfg:expr, $f:ident ( $($arg:expr),* )) => {
        match $cfg.mode {
            Mode::Exact => $f::<Exact>($($arg),*),
            Mode::Float => $f::<Float>($($arg),*),
        }
    };
}

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Verdict> {
    match cmd {
        Command::Mul { inputs } => by_mode!(cfg, fold(cfg, inputs, true)),
        Command::Add { inputs } => by_mode!(cfg, fold(cfg, inputs, false)),
        Command::Dist { x, y } => by_mode!(cfg, dist(cfg, x, y.as_deref())),
        Command::Project { x } => by_mode!(cfg, project(cfg, x)),
        Command::Continue { function, point } => by_mode!(cfg, continuation(cfg, function, point)),
        Command::Derive { function, point, coord, direction } => {
            by_mode!(cfg, derive(cfg, function, point, coord.as_deref(), direction.as_deref()))
        }
        Command::Taylor { superfield, point, direction, order } => by_mode!(cfg, taylor(cfg, superfield, point, direction, *order)),
        Command::Extract { function, point } => by_mode!(cfg, extract(cfg, function, point)),
        Command::CrCheck { function, points } => by_mode!(cfg, check_cr(cfg, function, points)),
        Command::Witness { function, point } => by_mode!(cfg, witness(cfg, function, point)),
        Command::SolveSigma { family } => by_mode!(cfg, sigma(cfg, family)),
        Command::Dual { map } => dual(cfg, map),
        Command::Suite { function: Some(f), points, samples } => by_mode!(cfg, suite_on(cfg, f, points.as_deref(), *samples)),
        Command::Suite { function: None, .. } => standard(cfg),
    }
}

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn read_subject(path: &Path) -> Result<Subject> {
    subject_from_value(&read_value(path)?)
}

fn fold<S: Scalar>(cfg: &RunConfig, inputs: &[PathBuf], multiply: bool) -> Result<Verdict> {
    if inputs.is_empty() {
        return Err(Error::Config("at least one input is required".into()));
    }
    let xs = inputs.iter().map(|p| read_supernumber::<S>(p, cfg.skeleton)).collect::<Result<Vec<_>>>()?;
    let xs = match cfg.skeleton {
        Some(sk) => xs.iter().map(|x| x.embed(sk)).collect::<Result<Vec<_>>>()?,
        None => {
            let sk = xs[0].skeleton();
            if let Some((k, x)) = xs.iter().enumerate().find(|(_, x)| x.skeleton() != sk) {
                return Err(Error::Skeleton(format!(
                    "{} lives in skeleton {} but {} lives in {}; pass --skeleton to embed both",
                    inputs[0].display(),
                    sk,
                    inputs[k].display(),
                    x.skeleton()
                )));
            }
            xs
        }
    };
    let mut acc = xs[0].clone();
    for x in &xs[1..] {
        acc = if multiply { &acc * x } else { &acc + x };
    }
    emit_json(cfg, &acc)?;
    Ok(Verdict::Pass)
}

fn dist<S: Scalar>(cfg: &RunConfig, x: &Path, y: Option<&Path>) -> Result<Verdict> {
    let x = read_supernumber::<S>(x, cfg.skeleton)?;
    let d = match y {
        Some(y) => {
            let y = read_supernumber::<S>(y, Some(x.skeleton()))?;
            let sk = x.skeleton().join(y.skeleton());
            x.embed(sk)?.dist_pair(&y.embed(sk)?)
        }
        None => x.dist(),
    };
    emit(cfg, &format!("{d}"), &json!({ "dist": d }))?;
    Ok(Verdict::Pass)
}

fn project<S: Scalar>(cfg: &RunConfig, x: &Path) -> Result<Verdict> {
    let sk = cfg.skeleton.ok_or_else(|| Error::Config("project needs --skeleton".into()))?;
    let x = read_supernumber::<S>(x, None)?;
    if sk.l() > x.skeleton().l() {
        return Err(Error::Config(format!("cannot project skeleton L={} onto the larger L={}", x.skeleton().l(), sk.l())));
    }
    emit_json(cfg, &x.skeleton_project(sk.l())?)?;
    Ok(Verdict::Pass)
}

fn continuation<S: Scalar>(cfg: &RunConfig, function: &Path, point: &Path) -> Result<Verdict> {
    let f = valued_from_value(&read_value(function)?)?;
    let (args, sk) = read_even_args::<S>(point, cfg.skeleton)?;
    emit_json(cfg, &continue_valued(&f, &args, sk)?)?;
    Ok(Verdict::Pass)
}

fn parse_coord(s: &str) -> Result<CoordIndex> {
    let (slot, index) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("coordinate {s:?} must look like A:[I], e.g. 2:[1,3]")))?;
    let slot = slot.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad slot in coordinate {s:?}")))?;
    Ok(CoordIndex::new(slot, index.parse::<GIndex>()?))
}

fn derive<S: Scalar>(cfg: &RunConfig, function: &Path, point: &Path, coord: Option<&str>, direction: Option<&Path>) -> Result<Verdict> {
    let f = read_subject(function)?;
    let x = read_point::<S>(point)?;
    let method = cfg.check.method_for::<S>();
    let value = match (coord, direction) {
        (Some(c), _) => coord_partial(&f, &x, parse_coord(c)?, method)?,
        (None, Some(d)) => directional(&f, &x, &read_point::<S>(d)?, method)?,
        (None, None) => return Err(Error::Config("derive needs --coord or --direction".into())),
    };
    emit_json(cfg, &value)?;
    Ok(Verdict::Pass)
}

#[derive(Serialize)]
#[serde(bound(serialize = ""))]
struct TaylorOut<S: Scalar> {
    order: u32,
    partial_sum: Supernumber<S>,
    value: Supernumber<S>,
    defect: Supernumber<S>,
}

fn taylor<S: Scalar>(cfg: &RunConfig, superfield: &Path, point: &Path, direction: &Path, order: Option<u32>) -> Result<Verdict> {
    let u = superfield_from_value(&read_value(superfield)?)?;
    let x = read_point::<S>(point)?;
    let y = read_point::<S>(direction)?;
    let order = order.or_else(|| u.polynomial_degree()).unwrap_or(3);
    let t = taylor_superfield(&u, &x, &y, order)?;
    let text = format!("order {order}\npartial sum: {}\nvalue:       {}\ndefect:      {}", t.partial_sum, t.value, t.defect);
    emit(cfg, &text, &TaylorOut { order, partial_sum: t.partial_sum, value: t.value, defect: t.defect })?;
    Ok(Verdict::Pass)
}

fn extract<S: Scalar>(cfg: &RunConfig, function: &Path, point: &Path) -> Result<Verdict> {
    let f = read_subject(function)?;
    let x = read_point::<S>(point)?;
    let e = superfield_extract(&f, x.even(), x.skeleton())?;
    let mut text = String::new();
    let mut coeffs = Vec::new();
    for (a, c) in &e.coeffs {
        let _ = writeln!(text, "θ^{a}: {c}");
        coeffs.push(json!({ "a": a, "value": c }));
    }
    if e.coeffs.is_empty() {
        text.push_str("all coefficients vanish\n");
    }
    emit(cfg, &text, &json!({ "coeffs": coeffs }))?;
    Ok(Verdict::Pass)
}

fn cr_table(k: usize, r: &CrReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "point {k}: {} ({} mode, {} coordinates, {} pairs, residual {:.3e}, max |defect| {:.3e})",
        if r.pass { "pass" } else { "FAIL" },
        r.mode,
        r.coordinates,
        r.pairs,
        r.residual,
        r.max_abs
    );
    for v in &r.violations {
        let _ = writeln!(s, "    {} / {}: defect {}", v.first, v.second, v.defect);
    }
    for sk in &r.skipped {
        let _ = writeln!(s, "    skipped {}: {}", sk.coord, sk.reason);
    }
    s
}

fn check_cr<S: Scalar>(cfg: &RunConfig, function: &Path, points: &Path) -> Result<Verdict> {
    let f = read_subject(function)?;
    let points = read_points::<S>(points)?;
    let reports = points.iter().map(|x| cr_check(&f, x, &cfg.check)).collect::<Result<Vec<_>>>()?;
    let text: String = reports.iter().enumerate().map(|(k, r)| cr_table(k, r)).collect();
    let pass = reports.iter().all(|r| r.pass);
    emit(cfg, &text, &json!({ "subject": f.name(), "pass": pass, "points": reports }))?;
    Ok(verdict(pass))
}

fn witness<S: Scalar>(cfg: &RunConfig, function: &Path, point: &Path) -> Result<Verdict> {
    let f = read_subject(function)?;
    let x = read_point::<S>(point)?;
    let outcome = g1_witness(&f, &x, &cfg.check)?;
    let mut text = String::new();
    let pass = match &outcome {
        G1Outcome::Witness(w) => {
            for (j, fj) in w.even.iter().enumerate() {
                let _ = writeln!(text, "F_{} = {fj}", j + 1);
            }
            for (s, fs) in w.odd.iter().enumerate() {
                let _ = writeln!(text, "F_{} = {}  (up to {})", x.m() + s + 1, fs.f, fs.ambiguity);
            }
            true
        }
        G1Outcome::Infeasible(c) => {
            let _ = writeln!(text, "no witness for slot {}: {}", c.slot, c.obstruction);
            false
        }
    };
    emit(cfg, &text, &outcome)?;
    Ok(verdict(pass))
}

fn sigma<S: Scalar>(cfg: &RunConfig, family: &Path) -> Result<Verdict> {
    let items = match read_value(family)? {
        Value::Array(items) => items,
        Value::Object(mut obj) => match obj.remove("A") {
            Some(Value::Array(items)) => items,
            _ => return Err(Error::Parse("solve-sigma input must be an array or {\"A\": [...]}".into())),
        },
        _ => return Err(Error::Parse("solve-sigma input must be an array or {\"A\": [...]}".into())),
    };
    let a = items.iter().map(|v| supernumber_from_value::<S>(v, cfg.skeleton)).collect::<Result<Vec<_>>>()?;
    let sk = match cfg.skeleton {
        Some(sk) => sk,
        None => a.iter().map(Supernumber::skeleton).reduce(Skeleton::join).unwrap_or(Skeleton::full(0)?),
    };
    let outcome = solve_sigma(sk, &a, cfg.check.tol)?;
    let (text, pass) = match &outcome {
        SigmaOutcome::Solved(s) => (format!("F = {}  (up to {})", s.f, s.ambiguity), true),
        SigmaOutcome::Infeasible(o) => (format!("infeasible: {o}"), false),
    };
    emit(cfg, &text, &outcome)?;
    Ok(verdict(pass))
}

fn dual(cfg: &RunConfig, map: &Path) -> Result<Verdict> {
    if cfg.mode == Mode::Float {
        log::warn!("dual maps are always handled exactly; --mode float is ignored");
    }
    let sk = cfg.skeleton.unwrap_or(Skeleton::full(2)?);
    let f = dual_map_from_value(&read_value(map)?, sk)?;
    let outcome = dual_represent(&f, sk)?;
    let (text, pass) = match &outcome {
        DualOutcome::Represented { u } => (format!("f(X) = X·u with u = {}  (up to {})", u.f, u.ambiguity), true),
        DualOutcome::Counterexample { obstruction } => (format!("not right multiplication: {obstruction}"), false),
        DualOutcome::NotEvenLinear { failure } => (
            format!("not even-linear: f(σ^E σ^I) = {} but σ^E f(σ^I) = {} for E = {}, I = {}", failure.lhs, failure.rhs, failure.even, failure.odd),
            false,
        ),
        DualOutcome::RepresentationFailure { blade, expected, got } => {
            (format!("u fails at {blade}: f = {expected} but X·u = {got}"), false)
        }
    };
    emit(cfg, &text, &outcome)?;
    Ok(verdict(pass))
}

fn suite_on<S: Scalar>(cfg: &RunConfig, function: &Path, points: Option<&Path>, samples: usize) -> Result<Verdict> {
    let f = read_subject(function)?;
    let (m, n) = f.dims();
    let points: Vec<SuperPoint<S>> = match points {
        Some(p) => read_points(p)?,
        None => {
            let sk = cfg.skeleton.unwrap_or(Skeleton::full(3)?);
            let mut rng = sampling::rng(cfg.seed);
            (0..samples).map(|_| sampling::point(&mut rng, sk, m, n, 6).map(S::from_exact)).collect()
        }
    };
    let report = equivalence_suite(&f, &points, &SuiteOptions { check: cfg.check, seed: cfg.seed })?;
    emit(cfg, &report.to_table(), &report)?;
    Ok(verdict(report.pass))
}

fn standard(cfg: &RunConfig) -> Result<Verdict> {
    let sections = if cfg.sections.is_empty() {
        Section::ALL.to_vec()
    } else {
        cfg.sections.iter().map(|s| s.parse()).collect::<Result<Vec<Section>>>()?
    };
    let mut run = StandardConfig { seed: cfg.seed, mode: cfg.mode, check: cfg.check, sections, ..StandardConfig::default() };
    if let Some(sk) = cfg.skeleton {
        run.max_l = sk.l();
    }
    let report = run_standard(&run)?;
    emit(cfg, &report.to_table(), &report)?;
    Ok(verdict(report.pass))
}
