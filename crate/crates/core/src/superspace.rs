//! Points of superspace `ℜ_L^{m|n}`, their real coordinates `X_{A,I}`, the
//! pairing `⟨Y|X⟩` and superdomains.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gindex::GIndex;
use crate::linalg::{Echelon, SparseRow};
use crate::scalar::{Dual, Exact, Float, Scalar};
use crate::supernumber::{Parity, Skeleton, Supernumber};

/// `X = (x, θ)` with `m` even and `n` odd supernumber slots.
#[derive(Clone, Debug)]
pub struct SuperPoint<S> {
    sk: Skeleton,
    even: Vec<Supernumber<S>>,
    odd: Vec<Supernumber<S>>,
}

impl<S: Scalar> PartialEq for SuperPoint<S> {
    fn eq(&self, other: &Self) -> bool {
        self.even == other.even && self.odd == other.odd
    }
}

impl<S: Scalar> SuperPoint<S> {
    /// Validates slot parities and real bodies, re-homing every slot in `sk`.
    pub fn new(sk: Skeleton, even: Vec<Supernumber<S>>, odd: Vec<Supernumber<S>>) -> Result<Self> {
        let even = even
            .into_iter()
            .enumerate()
            .map(|(j, x)| {
                if x.parity_of() != Parity::Even {
                    return Err(Error::Domain(format!("even slot x_{} = {x} is not even", j + 1)));
                }
                if !x.reality_check() {
                    return Err(Error::Domain(format!("even slot x_{} has a non-real body", j + 1)));
                }
                x.embed(sk)
            })
            .collect::<Result<Vec<_>>>()?;
        let odd = odd
            .into_iter()
            .enumerate()
            .map(|(k, t)| {
                if !t.is_odd() {
                    return Err(Error::Domain(format!("odd slot θ_{} = {t} is not odd", k + 1)));
                }
                t.embed(sk)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SuperPoint { sk, even, odd })
    }

    pub fn zero(sk: Skeleton, m: usize, n: usize) -> Self {
        SuperPoint {
            sk,
            even: vec![Supernumber::zero(sk); m],
            odd: vec![Supernumber::zero(sk); n],
        }
    }

    /// A point with real bodies `q` and no soul.
    pub fn from_body(sk: Skeleton, q: &[S], n: usize) -> Result<Self> {
        let even = q.iter().map(|v| Supernumber::scalar(sk, v.clone())).collect();
        SuperPoint::new(sk, even, vec![Supernumber::zero(sk); n])
    }

    pub fn skeleton(&self) -> Skeleton {
        self.sk
    }

    pub fn m(&self) -> usize {
        self.even.len()
    }

    pub fn n(&self) -> usize {
        self.odd.len()
    }

    pub fn even(&self) -> &[Supernumber<S>] {
        &self.even
    }

    pub fn odd(&self) -> &[Supernumber<S>] {
        &self.odd
    }

    /// Slot `X_A`, 1-based over `x_1, …, x_m, θ_1, …, θ_n`.
    pub fn slot(&self, a: usize) -> Option<&Supernumber<S>> {
        if a == 0 {
            None
        } else if a <= self.m() {
            self.even.get(a - 1)
        } else {
            self.odd.get(a - 1 - self.m())
        }
    }

    fn slot_mut(&mut self, a: usize) -> &mut Supernumber<S> {
        let m = self.m();
        if a <= m {
            &mut self.even[a - 1]
        } else {
            &mut self.odd[a - 1 - m]
        }
    }

    /// `π_B(x)`.
    pub fn body(&self) -> Vec<S> {
        self.even.iter().map(Supernumber::body).collect()
    }

    pub fn body_f64(&self) -> Vec<f64> {
        self.even.iter().map(|x| x.body().to_float().re).collect()
    }

    /// `X + t·Y` for a scalar `t`.
    pub fn add_scaled(&self, dir: &SuperPoint<S>, t: &S) -> Result<Self> {
        self.check_shape(dir)?;
        let comb = |a: &[Supernumber<S>], b: &[Supernumber<S>]| -> Vec<Supernumber<S>> {
            a.iter().zip(b).map(|(x, y)| x + &y.scale(t)).collect()
        };
        Ok(SuperPoint {
            sk: self.sk.join(dir.sk),
            even: comb(&self.even, &dir.even),
            odd: comb(&self.odd, &dir.odd),
        })
    }

    pub fn add(&self, other: &SuperPoint<S>) -> Result<Self> {
        self.add_scaled(other, &S::one())
    }

    pub fn sub(&self, other: &SuperPoint<S>) -> Result<Self> {
        self.add_scaled(other, &-S::one())
    }

    fn check_shape(&self, other: &SuperPoint<S>) -> Result<()> {
        if self.m() != other.m() || self.n() != other.n() {
            return Err(Error::Domain(format!(
                "points of ℜ^{{{}|{}}} and ℜ^{{{}|{}}} cannot be combined",
                self.m(),
                self.n(),
                other.m(),
                other.n()
            )));
        }
        Ok(())
    }

    /// Applies `p_{L'}` slot by slot.
    pub fn skeleton_project(&self, l: u32) -> Result<Self> {
        let proj = |v: &[Supernumber<S>]| v.iter().map(|x| x.skeleton_project(l)).collect::<Result<Vec<_>>>();
        Ok(SuperPoint {
            sk: Skeleton::new(l, self.sk.d().min(l))?,
            even: proj(&self.even)?,
            odd: proj(&self.odd)?,
        })
    }

    pub fn embed(&self, sk: Skeleton) -> Result<Self> {
        let emb = |v: &[Supernumber<S>]| v.iter().map(|x| x.embed(sk)).collect::<Result<Vec<_>>>();
        Ok(SuperPoint { sk, even: emb(&self.even)?, odd: emb(&self.odd)? })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> SuperPoint<T> {
        SuperPoint {
            sk: self.sk,
            even: self.even.iter().map(|x| x.map(f)).collect(),
            odd: self.odd.iter().map(|x| x.map(f)).collect(),
        }
    }

    /// `X + ε·V` over dual-number coefficients.
    pub fn with_tangent(&self, v: &SuperPoint<S>) -> Result<SuperPoint<Dual<S>>> {
        self.check_shape(v)?;
        let lift = |a: &[Supernumber<S>], b: &[Supernumber<S>]| -> Vec<Supernumber<Dual<S>>> {
            a.iter().zip(b).map(|(x, y)| x.with_tangent(y)).collect()
        };
        Ok(SuperPoint {
            sk: self.sk.join(v.sk),
            even: lift(&self.even, &v.even),
            odd: lift(&self.odd, &v.odd),
        })
    }

    pub fn to_float(&self) -> SuperPoint<Float> {
        self.map(Scalar::to_float)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.m() == other.m()
            && self.n() == other.n()
            && self.even.iter().zip(&other.even).all(|(a, b)| a.approx_eq(b, tol))
            && self.odd.iter().zip(&other.odd).all(|(a, b)| a.approx_eq(b, tol))
    }
}

impl<S: Scalar> fmt::Display for SuperPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, x) in self.even.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "; ")?;
        for (k, t) in self.odd.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// Real coordinate `X_{A,I}`: slot `A` (1-based) and blade `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoordIndex {
    pub slot: usize,
    pub index: GIndex,
}

impl CoordIndex {
    pub fn new(slot: usize, index: GIndex) -> Self {
        CoordIndex { slot, index }
    }

    pub fn is_even_slot(self, m: usize) -> bool {
        self.slot <= m
    }

    /// Checks slot range, skeleton membership and the parity rule.
    pub fn validate(self, m: usize, n: usize, sk: Skeleton) -> Result<()> {
        if self.slot == 0 || self.slot > m + n {
            return Err(Error::Domain(format!(
                "slot {} outside 1..={} of ℜ^{{{m}|{n}}}",
                self.slot,
                m + n
            )));
        }
        if !sk.admits(self.index) {
            return Err(Error::Domain(format!(
                "blade {} outside skeleton {sk}",
                self.index
            )));
        }
        if self.index.is_even() != self.is_even_slot(m) {
            let kind = if self.is_even_slot(m) { "even" } else { "odd" };
            return Err(Error::Domain(format!(
                "blade {} has the wrong parity for {kind} slot {}",
                self.index, self.slot
            )));
        }
        Ok(())
    }
}

impl fmt::Display for CoordIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X[{},{}]", self.slot, self.index)
    }
}

/// `E_{A,I} = σ^I 𝖊_A`.
pub fn basis_direction<S: Scalar>(c: CoordIndex, m: usize, n: usize, sk: Skeleton) -> Result<SuperPoint<S>> {
    c.validate(m, n, sk)?;
    let mut p = SuperPoint::zero(sk, m, n);
    *p.slot_mut(c.slot) = Supernumber::monomial(sk, c.index, S::one())?;
    Ok(p)
}

pub fn coord_get<S: Scalar>(x: &SuperPoint<S>, c: CoordIndex) -> Result<S> {
    let slot = x
        .slot(c.slot)
        .ok_or_else(|| Error::Domain(format!("point has no slot {}", c.slot)))?;
    Ok(slot.coeff(c.index))
}

/// Replaces `X_{A,I}` by `v`. Even-slot bodies must stay real.
pub fn coord_set<S: Scalar>(x: &SuperPoint<S>, c: CoordIndex, v: S) -> Result<SuperPoint<S>> {
    c.validate(x.m(), x.n(), x.skeleton())?;
    if c.is_even_slot(x.m()) && c.index.is_empty() && !v.is_real() {
        return Err(Error::Domain(format!("body coordinate {c} must be real")));
    }
    let mut out = x.clone();
    let slot = out.slot_mut(c.slot);
    let old = slot.coeff(c.index);
    let delta = Supernumber::monomial(slot.skeleton(), c.index, v - old)?;
    *slot = &*slot + &delta;
    Ok(out)
}

/// `⟨Y|X⟩ = Σ_j y_j x_j + Σ_k ω_k θ_k`.
pub fn pairing<S: Scalar>(y: &SuperPoint<S>, x: &SuperPoint<S>) -> Result<Supernumber<S>> {
    x.check_shape(y)?;
    let mut acc = Supernumber::zero(x.sk.join(y.sk));
    for (a, b) in y.even.iter().zip(&x.even).chain(y.odd.iter().zip(&x.odd)) {
        acc = &acc + &(a * b);
    }
    Ok(acc)
}

/// `dist_{m|n}(X - Y)`: the sum of the slot-wise metrics.
pub fn dist_mn<S: Scalar>(x: &SuperPoint<S>, y: &SuperPoint<S>) -> Result<f64> {
    let d = x.sub(y)?;
    Ok(d.even.iter().chain(&d.odd).map(Supernumber::dist).fold(0.0, |acc, w| acc + w))
}

/// Coordinates of `ℜ_L^{m|n}` admitted by `sk`, slot by slot, each slot in
/// canonical blade order. `cap` bounds the number of coordinates per slot.
pub fn enumerate_coords(m: usize, n: usize, sk: Skeleton, cap: Option<usize>) -> Vec<CoordIndex> {
    let mut out = Vec::new();
    for slot in 1..=m + n {
        let even = slot <= m;
        let mut taken = 0usize;
        'degrees: for deg in 0..=sk.d() {
            if (deg % 2 == 0) != even {
                continue;
            }
            for i in Combinations::new(sk.l(), deg) {
                if cap.is_some_and(|c| taken >= c) {
                    break 'degrees;
                }
                out.push(CoordIndex::new(slot, i));
                taken += 1;
            }
        }
    }
    out
}

/// All `k`-subsets of `{1, …, l}` in lexicographic order.
pub struct Combinations {
    l: u32,
    current: Option<Vec<u32>>,
}

impl Combinations {
    pub fn new(l: u32, k: u32) -> Self {
        Combinations {
            l,
            current: (k <= l).then(|| (1..=k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = GIndex;

    fn next(&mut self) -> Option<GIndex> {
        let cur = self.current.as_mut()?;
        let item = GIndex::from_gens(cur).expect("combination stays within 64 generators");
        let k = cur.len();
        let mut pos = k;
        while pos > 0 && cur[pos - 1] == self.l - (k - pos) as u32 {
            pos -= 1;
        }
        if pos == 0 {
            self.current = None;
        } else {
            cur[pos - 1] += 1;
            for j in pos..k {
                cur[j] = cur[j - 1] + 1;
            }
        }
        Some(item)
    }
}

/// Finite union of open boxes in `ℝ^m`; a point belongs when its body does.
#[derive(Clone, Debug, PartialEq)]
pub struct Superdomain {
    m: usize,
    boxes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Superdomain {
    pub fn whole(m: usize) -> Self {
        Superdomain {
            m,
            boxes: vec![(vec![f64::NEG_INFINITY; m], vec![f64::INFINITY; m])],
        }
    }

    pub fn from_boxes(m: usize, boxes: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        for (lo, hi) in &boxes {
            if lo.len() != m || hi.len() != m {
                return Err(Error::Domain(format!("box corners must have {m} entries")));
            }
            if lo.iter().zip(hi).any(|(a, b)| a >= b) {
                return Err(Error::Domain(format!("box {lo:?}..{hi:?} is empty")));
            }
        }
        Ok(Superdomain { m, boxes })
    }

    pub fn contains_body(&self, q: &[f64]) -> bool {
        q.len() == self.m
            && self
                .boxes
                .iter()
                .any(|(lo, hi)| q.iter().zip(lo.iter().zip(hi)).all(|(x, (a, b))| a < x && x < b))
    }

    pub fn contains<S: Scalar>(&self, x: &SuperPoint<S>) -> bool {
        self.contains_body(&x.body_f64())
    }
}

/// Solution of `⟨Y|X⟩ = 0 for all Y ∈ ℜ_L^{m|n}` over unconstrained slot values.
#[derive(Clone, Debug)]
pub struct Annihilator {
    pub m: usize,
    pub n: usize,
    pub l: u32,
    /// Basis vectors, each listing the `m + n` slot values.
    pub basis: Vec<Vec<Supernumber<Exact>>>,
    /// Dimension after intersecting with the graded coordinate space.
    pub graded_dimension: usize,
}

impl Annihilator {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Solves the annihilator by exact elimination. Each slot ranges over all of
/// `𝔅_L`; the test vectors `Y` range over the graded superspace.
pub fn annihilator_solve(m: usize, n: usize, l: u32) -> Result<Annihilator> {
    if l > 16 {
        return Err(Error::Config(format!(
            "annihilator elimination over 2^{l} coordinates per slot is not supported"
        )));
    }
    let sk = Skeleton::full(l)?;
    let blades = GIndex::enumerate(l, l);
    let width = blades.len();
    let column = |slot: usize, i: GIndex| slot * width + blades.binary_search(&i).expect("blade enumerated");
    let mut system = Echelon::new();
    for slot in 0..m + n {
        let even = slot < m;
        for &j in blades.iter().filter(|j| j.is_even() == even) {
            // Coefficient of σ^K in σ^J X_A is ±X_{A,K∖J} when J ⊆ K.
            let mut rows: std::collections::BTreeMap<GIndex, SparseRow> = Default::default();
            for &i in &blades {
                if let Some((sign, k)) = crate::gindex::merge_sign(j, i) {
                    rows.entry(k)
                        .or_default()
                        .insert(column(slot, i), crate::scalar::ratio(sign.as_i32() as i64, 1));
                }
            }
            for row in rows.into_values() {
                system.insert(row);
            }
        }
    }
    let mut basis = Vec::new();
    for v in system.nullspace((m + n) * width) {
        let mut slots = vec![Supernumber::<Exact>::zero(sk); m + n];
        for (col, r) in v {
            let (slot, i) = (col / width, blades[col % width]);
            let term = Supernumber::monomial(sk, i, Exact::new(r, num_traits::Zero::zero()))?;
            slots[slot] = &slots[slot] + &term;
        }
        basis.push(slots);
    }
    let graded_dimension = basis
        .iter()
        .filter(|slots| {
            slots.iter().enumerate().all(|(a, x)| {
                if a < m {
                    x.parity_of() == Parity::Even
                } else {
                    x.is_odd()
                }
            })
        })
        .count();
    Ok(Annihilator { m, n, l, basis, graded_dimension })
}
