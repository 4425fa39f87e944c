//! Named black-box functions on superspace used as positive and negative
//! controls by the characterization checks.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gindex::GIndex;
use crate::scalar::{Exact, Scalar};
use crate::superfield::{SuperFunction, Superfield};
use crate::superspace::{coord_get, CoordIndex, SuperPoint};
use crate::supernumber::{Skeleton, Supernumber};

/// Functions evaluated directly on coordinates rather than through an expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Fixture {
    /// `F(X) = c`.
    Constant { m: usize, n: usize, value: String },
    /// `F(X) = X_{slot,∅}`, the body of an even slot returned as a scalar.
    BodyCoordinate { m: usize, n: usize, slot: usize },
    /// `F(X) = (π_B x_slot)²`: the square of an even slot with its soul removed.
    SoulKilling { m: usize, n: usize, slot: usize },
    /// `F(X) = x_slot` with the coefficients at the even blades `i` and `j` exchanged.
    CoordinateSwap { m: usize, n: usize, slot: usize, i: GIndex, j: GIndex },
    /// On `ℜ^{0|1}`: `F(θ) = θ_{(1)} σ₂`, which needs `L ≥ 2`.
    Masuda,
    /// `F(X) = X_{1,(1,2)}` returned as a scalar.
    ProjectableProbe { m: usize, n: usize },
}

impl Fixture {
    pub fn body_coordinate() -> Self {
        Fixture::BodyCoordinate { m: 1, n: 0, slot: 1 }
    }

    pub fn soul_killing() -> Self {
        Fixture::SoulKilling { m: 1, n: 0, slot: 1 }
    }

    /// Swaps the blades `[1,2]` and `[3,4]` of `x₁`, so `L ≥ 4` is needed.
    pub fn coordinate_swap() -> Self {
        let i = GIndex::from_gens(&[1, 2]).expect("valid blade");
        let j = GIndex::from_gens(&[3, 4]).expect("valid blade");
        Fixture::CoordinateSwap { m: 1, n: 0, slot: 1, i, j }
    }

    pub fn projectable_probe() -> Self {
        Fixture::ProjectableProbe { m: 1, n: 0 }
    }

    /// Checks slot ranges and blade parities.
    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.dims();
        let even_slot = |slot: usize| {
            if slot == 0 || slot > m {
                Err(Error::Config(format!("fixture slot {slot} is not an even slot of R^{m}|{n}")))
            } else {
                Ok(())
            }
        };
        match self {
            Fixture::Constant { value, .. } => Exact::parse(value, "0").map(|_| ()),
            Fixture::BodyCoordinate { slot, .. } | Fixture::SoulKilling { slot, .. } => even_slot(*slot),
            Fixture::CoordinateSwap { slot, i, j, .. } => {
                even_slot(*slot)?;
                if i.is_empty() || j.is_empty() || !i.is_even() || !j.is_even() || i == j {
                    return Err(Error::Config(format!(
                        "coordinate swap needs two distinct nonempty even blades, got {i} and {j}"
                    )));
                }
                Ok(())
            }
            Fixture::Masuda => Ok(()),
            Fixture::ProjectableProbe { m, .. } => {
                if *m == 0 {
                    return Err(Error::Config("projectable probe needs an even slot".into()));
                }
                Ok(())
            }
        }
    }

    /// Coordinate pairs where the Cauchy–Riemann defect is nonzero at `x`.
    /// Even-slot pairs are `(X_{A,I}, X_{A,∅})`; odd-slot pairs are `(X_{A,J}, X_{A,K})`
    /// with `J ≤ K`.
    pub fn documented_violations<S: Scalar>(&self, x: &SuperPoint<S>) -> BTreeSet<(CoordIndex, CoordIndex)> {
        let sk = x.skeleton();
        let even_blades = |slot: usize| -> BTreeSet<(CoordIndex, CoordIndex)> {
            GIndex::enumerate(sk.l(), sk.d())
                .into_iter()
                .filter(|i| i.is_even() && !i.is_empty())
                .map(|i| (CoordIndex::new(slot, i), CoordIndex::new(slot, GIndex::EMPTY)))
                .collect()
        };
        match self {
            Fixture::Constant { .. } => BTreeSet::new(),
            Fixture::BodyCoordinate { slot, .. } => even_blades(*slot),
            Fixture::SoulKilling { slot, .. } => {
                if x.even()[slot - 1].body().is_zero() {
                    BTreeSet::new()
                } else {
                    even_blades(*slot)
                }
            }
            Fixture::CoordinateSwap { slot, i, j, .. } => [*i, *j]
                .into_iter()
                .filter(|b| sk.admits(*b))
                .map(|b| (CoordIndex::new(*slot, b), CoordIndex::new(*slot, GIndex::EMPTY)))
                .collect(),
            // ∂F/∂X_{1,(1)} = σ2 and every other partial vanishes, so the defect at
            // (X_{1,(1)}, X_{1,K}) is σ^K σ2 (doubled when K = (1)).
            Fixture::Masuda => {
                let s1 = GIndex::single(1).expect("valid blade");
                GIndex::enumerate(sk.l(), sk.d())
                    .into_iter()
                    .filter(|k| !k.is_even() && !k.contains(2) && k.degree() < sk.d())
                    .map(|k| (CoordIndex::new(1, s1), CoordIndex::new(1, k)))
                    .collect()
            }
            Fixture::ProjectableProbe { .. } => {
                let probe = GIndex::from_gens(&[1, 2]).expect("valid blade");
                if sk.admits(probe) {
                    BTreeSet::from([(CoordIndex::new(1, probe), CoordIndex::new(1, GIndex::EMPTY))])
                } else {
                    BTreeSet::new()
                }
            }
        }
    }

    /// Smallest skeleton on which the fixture is defined.
    pub fn min_skeleton(&self) -> Skeleton {
        let l = match self {
            Fixture::CoordinateSwap { i, j, .. } => i.max_generator().max(j.max_generator()),
            Fixture::Masuda => 2,
            _ => 0,
        };
        Skeleton::full(l).expect("small skeleton")
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::Constant { value, .. } => write!(f, "constant {value}"),
            Fixture::BodyCoordinate { slot, .. } => write!(f, "body-coordinate X[{slot},[]]"),
            Fixture::SoulKilling { slot, .. } => write!(f, "soul-killing (body x{slot})^2"),
            Fixture::CoordinateSwap { slot, i, j, .. } => write!(f, "coordinate-swap x{slot} {i}<->{j}"),
            Fixture::Masuda => write!(f, "masuda X[1,[1]]·σ2"),
            Fixture::ProjectableProbe { .. } => write!(f, "projectable-probe X[1,[1,2]]"),
        }
    }
}

impl SuperFunction for Fixture {
    fn dims(&self) -> (usize, usize) {
        match self {
            Fixture::Constant { m, n, .. }
            | Fixture::BodyCoordinate { m, n, .. }
            | Fixture::SoulKilling { m, n, .. }
            | Fixture::CoordinateSwap { m, n, .. }
            | Fixture::ProjectableProbe { m, n } => (*m, *n),
            Fixture::Masuda => (0, 1),
        }
    }

    fn name(&self) -> String {
        self.to_string()
    }

    fn eval<S: Scalar>(&self, x: &SuperPoint<S>) -> Result<Supernumber<S>> {
        let (m, n) = self.dims();
        if x.m() != m || x.n() != n {
            return Err(Error::Domain(format!(
                "fixture {self} lives on R^{m}|{n}, point has shape {}|{}",
                x.m(),
                x.n()
            )));
        }
        self.validate()?;
        let sk = x.skeleton();
        match self {
            Fixture::Constant { value, .. } => Ok(Supernumber::scalar(sk, S::from_exact(&Exact::parse(value, "0")?))),
            Fixture::BodyCoordinate { slot, .. } => Ok(Supernumber::scalar(sk, x.even()[slot - 1].body())),
            Fixture::SoulKilling { slot, .. } => {
                let b = x.even()[slot - 1].body();
                Ok(Supernumber::scalar(sk, b.clone() * b))
            }
            Fixture::CoordinateSwap { slot, i, j, .. } => {
                let xa = &x.even()[slot - 1];
                if !sk.admits(*i) || !sk.admits(*j) {
                    return Ok(xa.clone());
                }
                let (ci, cj) = (xa.coeff(*i), xa.coeff(*j));
                let delta = Supernumber::from_terms(sk, [(*i, cj.clone() - ci.clone()), (*j, ci - cj)])?;
                Ok(xa + &delta)
            }
            Fixture::Masuda => {
                if sk.l() < 2 {
                    return Err(Error::Domain("the Masuda map needs at least two generators".into()));
                }
                let c = coord_get(x, CoordIndex::new(1, GIndex::single(1)?))?;
                Ok(Supernumber::generator(sk, 2)?.scale(&c))
            }
            Fixture::ProjectableProbe { .. } => {
                let probe = GIndex::from_gens(&[1, 2])?;
                Ok(Supernumber::scalar(sk, x.even()[0].coeff(probe)))
            }
        }
    }
}

/// A function handed to the checks: a symbolic superfield or a fixture.
#[derive(Clone, Debug, PartialEq)]
pub enum Subject {
    Superfield(Superfield),
    Fixture(Fixture),
}

impl SuperFunction for Subject {
    fn dims(&self) -> (usize, usize) {
        match self {
            Subject::Superfield(u) => u.dims(),
            Subject::Fixture(f) => f.dims(),
        }
    }

    fn eval<S: Scalar>(&self, x: &SuperPoint<S>) -> Result<Supernumber<S>> {
        match self {
            Subject::Superfield(u) => u.eval(x),
            Subject::Fixture(f) => f.eval(x),
        }
    }

    fn name(&self) -> String {
        match self {
            Subject::Superfield(u) => u.name(),
            Subject::Fixture(f) => f.name(),
        }
    }

    fn as_superfield(&self) -> Option<&Superfield> {
        match self {
            Subject::Superfield(u) => Some(u),
            Subject::Fixture(_) => None,
        }
    }
}

impl From<Superfield> for Subject {
    fn from(u: Superfield) -> Self {
        Subject::Superfield(u)
    }
}

impl From<Fixture> for Subject {
    fn from(f: Fixture) -> Self {
        Subject::Fixture(f)
    }
}
