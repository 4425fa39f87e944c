//! Basis monomials `σ^I`, the rank encoding of generator sets, and the sign
//! bookkeeping of monomial products.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest generator position the library can represent.
pub const MAX_GENERATORS: u32 = 64;

/// A finite set of Grassmann generators `{i_1 < i_2 < …}` naming the monomial
/// `σ^I = σ_{i_1} σ_{i_2} ⋯`. Generator `k` (1-based) is bit `k - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GIndex(u64);

/// Sign produced by reordering generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        Sign::from_parity(self.is_minus() != other.is_minus())
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn apply<T: std::ops::Neg<Output = T>>(self, value: T) -> T {
        match self {
            Sign::Plus => value,
            Sign::Minus => -value,
        }
    }
}

impl GIndex {
    /// The empty index `0̃`, i.e. the unit monomial.
    pub const EMPTY: GIndex = GIndex(0);

    pub fn from_mask(mask: u64) -> Self {
        GIndex(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// Single generator `(k)`.
    pub fn single(k: u32) -> Result<Self> {
        check_generator(k)?;
        Ok(GIndex(1u64 << (k - 1)))
    }

    /// Builds an index from a strictly increasing generator list.
    pub fn from_gens(gens: &[u32]) -> Result<Self> {
        let mut mask = 0u64;
        let mut last = 0u32;
        for &k in gens {
            check_generator(k)?;
            if k <= last {
                return Err(Error::Domain(format!(
                    "generator list {gens:?} must be strictly increasing"
                )));
            }
            last = k;
            mask |= 1u64 << (k - 1);
        }
        Ok(GIndex(mask))
    }

    /// The full index `{1, …, l}` naming the top blade `σ_1⋯σ_l`.
    pub fn top(l: u32) -> Self {
        if l >= 64 {
            GIndex(u64::MAX)
        } else {
            GIndex((1u64 << l) - 1)
        }
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_even(self) -> bool {
        self.degree().is_multiple_of(2)
    }

    pub fn contains(self, k: u32) -> bool {
        (1..=MAX_GENERATORS).contains(&k) && self.0 & (1u64 << (k - 1)) != 0
    }

    /// Highest generator used, 0 for the empty index.
    pub fn max_generator(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    /// Whether every generator lies in `{1, …, l}`.
    pub fn within(self, l: u32) -> bool {
        self.max_generator() <= l
    }

    pub fn is_disjoint(self, other: GIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: GIndex) -> GIndex {
        GIndex(self.0 | other.0)
    }

    pub fn without(self, k: u32) -> GIndex {
        if (1..=MAX_GENERATORS).contains(&k) {
            GIndex(self.0 & !(1u64 << (k - 1)))
        } else {
            self
        }
    }

    pub fn with(self, k: u32) -> GIndex {
        GIndex(self.0 | (1u64 << (k - 1)))
    }

    /// Number of generators of `self` strictly greater than `k`.
    pub fn count_above(self, k: u32) -> u32 {
        if k >= 64 {
            0
        } else {
            (self.0 >> k).count_ones()
        }
    }

    /// Number of generators of `self` strictly less than `k`.
    pub fn count_below(self, k: u32) -> u32 {
        if k <= 1 {
            0
        } else {
            (self.0 & ((1u64 << (k - 1)) - 1)).count_ones()
        }
    }

    /// Generators in ascending order.
    pub fn gens(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let k = rest.trailing_zeros() + 1;
            rest &= rest - 1;
            Some(k)
        })
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.gens().collect()
    }

    /// All indices inside `{1, …, l}` with degree at most `max_degree`, in
    /// canonical order.
    pub fn enumerate(l: u32, max_degree: u32) -> Vec<GIndex> {
        assert!(l <= 20, "enumerating 2^{l} monomials is not supported");
        let mut out: Vec<GIndex> = (0u64..(1u64 << l))
            .map(GIndex)
            .filter(|i| i.degree() <= max_degree)
            .collect();
        out.sort();
        out
    }
}

fn check_generator(k: u32) -> Result<()> {
    if k == 0 || k > MAX_GENERATORS {
        return Err(Error::Domain(format!(
            "generator position {k} outside 1..={MAX_GENERATORS}"
        )));
    }
    Ok(())
}

/// Canonical order: by degree, then lexicographically on the ascending
/// generator lists.
impl Ord for GIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                return Ordering::Equal;
            }
            // The lowest differing generator decides: whoever has it sorts first.
            let low = diff & diff.wrapping_neg();
            if self.0 & low != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for GIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (n, k) in self.gens().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for GIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GIndex{self}")
    }
}

impl FromStr for GIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("index {s:?} must be bracketed")))?;
        if inner.trim().is_empty() {
            return Ok(GIndex::EMPTY);
        }
        let gens = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad generator {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GIndex::from_gens(&gens)
    }
}

impl Serialize for GIndex {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let gens = Vec::<u32>::deserialize(d)?;
        GIndex::from_gens(&gens).map_err(serde::de::Error::custom)
    }
}

/// `r(μ) = ½(2^{μ_1} + … + 2^{μ_k})`, a bijection from nonempty generator sets
/// onto the positive integers.
pub fn encode_rank(mu: GIndex) -> Result<BigUint> {
    if mu.is_empty() {
        return Err(Error::Domain("the empty index has no rank".into()));
    }
    // ½·2^{μ} = 2^{μ-1}, which is exactly the bit pattern of the mask.
    Ok(BigUint::from(mu.mask()))
}

/// Inverse of [`encode_rank`].
pub fn decode_rank(r: &BigUint) -> Result<GIndex> {
    if r.is_zero() {
        return Err(Error::Domain("ranks start at 1".into()));
    }
    let mask = r.to_u64().ok_or_else(|| {
        Error::Domain(format!(
            "rank {r} uses generators beyond {MAX_GENERATORS}"
        ))
    })?;
    Ok(GIndex(mask))
}

/// Signed product of monomials: `σ^J σ^K = sign · σ^{J∪K}`, or `None` when a
/// generator repeats. The sign counts the inversions `(j ∈ J, k ∈ K, j > k)`
/// needed to sort the concatenated word.
pub fn merge_sign(j: GIndex, k: GIndex) -> Option<(Sign, GIndex)> {
    if !j.is_disjoint(k) {
        return None;
    }
    let mut inversions = 0u32;
    for g in k.gens() {
        inversions += j.count_above(g);
    }
    Some((Sign::from_parity(inversions % 2 == 1), j.union(k)))
}

/// Exponent of the metric weight `2^{-r(I)}` with `r(I) = 1 + ½ Σ_k 2^k i_k`.
pub fn metric_exponent(i: GIndex) -> u128 {
    1 + i.mask() as u128
}

/// The metric weight `2^{-r(I)}` of a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricWeight {
    pub exponent: u128,
}

impl MetricWeight {
    pub fn to_f64(self) -> f64 {
        if self.exponent > 1100 {
            0.0
        } else {
            (-(self.exponent as f64)).exp2()
        }
    }

    /// Exact value, available while the exponent stays below 2^16.
    pub fn to_rational(self) -> Option<BigRational> {
        if self.exponent >= 1 << 16 {
            return None;
        }
        let denom = BigInt::one() << (self.exponent as usize);
        Some(BigRational::new(BigInt::one(), denom))
    }
}

pub fn metric_weight(i: GIndex) -> MetricWeight {
    MetricWeight {
        exponent: metric_exponent(i),
    }
}

/// An odd multi-index `a ∈ {0,1}^n` selecting the monomial `θ^a`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct OddMulti {
    n: u32,
    bits: u32,
}

impl OddMulti {
    pub fn zero(n: usize) -> Self {
        OddMulti { n: n as u32, bits: 0 }
    }

    pub fn from_bits(n: usize, bits: u32) -> Self {
        debug_assert!(n <= 31 && (n == 31 || bits < (1 << n)));
        OddMulti { n: n as u32, bits }
    }

    pub fn from_slice(a: &[u8]) -> Result<Self> {
        if a.len() > 31 {
            return Err(Error::Domain("at most 31 odd variables are supported".into()));
        }
        let mut bits = 0u32;
        for (s, &v) in a.iter().enumerate() {
            match v {
                0 => {}
                1 => bits |= 1 << s,
                _ => {
                    return Err(Error::Domain(format!(
                        "odd multi-index entries must be 0 or 1, got {a:?}"
                    )))
                }
            }
        }
        Ok(OddMulti { n: a.len() as u32, bits })
    }

    /// `e_s`, 1-based.
    pub fn unit(n: usize, s: usize) -> Self {
        OddMulti::from_bits(n, 1 << (s - 1))
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn degree(self) -> u32 {
        self.bits.count_ones()
    }

    /// Entry `a_s`, 1-based.
    pub fn get(self, s: usize) -> bool {
        s >= 1 && s <= self.n() && self.bits & (1 << (s - 1)) != 0
    }

    pub fn toggled(self, s: usize) -> Self {
        OddMulti { n: self.n, bits: self.bits ^ (1 << (s - 1)) }
    }

    /// `l(a) = Σ_{j<s} a_j`.
    pub fn count_before(self, s: usize) -> u32 {
        (self.bits & ((1u32 << (s - 1)) - 1)).count_ones()
    }

    /// `r(a) = Σ_{j>s} a_j`.
    pub fn count_after(self, s: usize) -> u32 {
        (self.bits >> s).count_ones()
    }

    pub fn entries(self) -> Vec<u8> {
        (1..=self.n()).map(|s| self.get(s) as u8).collect()
    }

    /// Positions `s` with `a_s = 1`, ascending.
    pub fn support(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (1..=self.n as usize).filter(move |s| bits & (1 << (s - 1)) != 0)
    }

    /// All `2^n` multi-indices in canonical order.
    pub fn all(n: usize) -> Vec<OddMulti> {
        let mut out: Vec<OddMulti> = (0..(1u32 << n)).map(|b| OddMulti::from_bits(n, b)).collect();
        out.sort();
        out
    }
}

impl Ord for OddMulti {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| GIndex(self.bits as u64).cmp(&GIndex(other.bits as u64)))
    }
}

impl PartialOrd for OddMulti {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for OddMulti {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OddMulti {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<u8>::deserialize(d)?;
        OddMulti::from_slice(&entries).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for OddMulti {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (s, e) in self.entries().iter().enumerate() {
            if s > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// An even multi-index `α ∈ ℕ_0^m`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvenMulti(pub Vec<u32>);

impl EvenMulti {
    pub fn zero(m: usize) -> Self {
        EvenMulti(vec![0; m])
    }

    /// Unit vector in direction `j` (0-based).
    pub fn unit(m: usize, j: usize) -> Self {
        let mut v = vec![0; m];
        v[j] = 1;
        EvenMulti(v)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn plus(&self, other: &EvenMulti) -> EvenMulti {
        assert_eq!(self.arity(), other.arity(), "multi-index arity mismatch");
        EvenMulti(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `α! = Π α_j!`.
    pub fn factorial(&self) -> BigUint {
        self.0
            .iter()
            .map(|&a| (1..=a).fold(BigUint::one(), |acc, k| acc * BigUint::from(k)))
            .product()
    }

    /// All multi-indices of arity `m` with `|α| ≤ max_total`, graded by total.
    pub fn up_to(m: usize, max_total: u32) -> Vec<EvenMulti> {
        let mut out = Vec::new();
        for total in 0..=max_total {
            out.extend(Self::with_total(m, total));
        }
        out
    }

    /// All multi-indices of arity `m` with `|α| = total`, lexicographically descending.
    pub fn with_total(m: usize, total: u32) -> Vec<EvenMulti> {
        fn rec(m: usize, rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<EvenMulti>) {
            if prefix.len() + 1 == m {
                prefix.push(rest);
                out.push(EvenMulti(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in (0..=rest).rev() {
                prefix.push(a);
                rec(m, rest - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if m == 0 {
            if total == 0 {
                out.push(EvenMulti(Vec::new()));
            }
            return out;
        }
        rec(m, total, &mut Vec::with_capacity(m), &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(g: &[u32]) -> GIndex {
        GIndex::from_gens(g).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(encode_rank(idx(&[1])).unwrap(), BigUint::from(1u32));
        assert_eq!(encode_rank(idx(&[1, 2])).unwrap(), BigUint::from(3u32));
        assert_eq!(encode_rank(idx(&[3])).unwrap(), BigUint::from(4u32));
        assert!(encode_rank(GIndex::EMPTY).is_err());
        assert_eq!(decode_rank(&BigUint::from(1u32)).unwrap(), idx(&[1]));
        assert_eq!(decode_rank(&BigUint::from(3u32)).unwrap(), idx(&[1, 2]));
        assert_eq!(decode_rank(&BigUint::from(6u32)).unwrap(), idx(&[2, 3]));
        assert!(decode_rank(&BigUint::zero()).is_err());
    }

    #[test]
    fn rank_is_total_up_to_generator_64() {
        let top = idx(&[64]);
        let r = encode_rank(top).unwrap();
        assert_eq!(r, BigUint::one() << 63usize);
        assert_eq!(decode_rank(&r).unwrap(), top);
        assert!(decode_rank(&(BigUint::one() << 64usize)).is_err());
    }

    #[test]
    fn rank_round_trip_exhaustive() {
        for r in 1u32..=(1 << 12) {
            let r = BigUint::from(r);
            assert_eq!(encode_rank(decode_rank(&r).unwrap()).unwrap(), r);
        }
    }

    #[test]
    fn merge_sign_examples() {
        assert_eq!(merge_sign(idx(&[1]), idx(&[2])), Some((Sign::Plus, idx(&[1, 2]))));
        assert_eq!(merge_sign(idx(&[2]), idx(&[1])), Some((Sign::Minus, idx(&[1, 2]))));
        assert_eq!(
            merge_sign(idx(&[1, 3]), idx(&[2])),
            Some((Sign::Minus, idx(&[1, 2, 3])))
        );
        assert_eq!(merge_sign(idx(&[1]), idx(&[1])), None);
    }

    #[test]
    fn metric_weight_examples() {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(metric_weight(GIndex::EMPTY).to_rational().unwrap(), half);
        assert_eq!(
            metric_weight(idx(&[1])).to_rational().unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(4))
        );
        assert_eq!(
            metric_weight(idx(&[1, 2])).to_rational().unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(16))
        );
        assert_eq!(metric_weight(idx(&[64])).to_rational(), None);
        assert_eq!(metric_weight(idx(&[64])).to_f64(), 0.0);
    }

    #[test]
    fn text_form() {
        assert_eq!(idx(&[1, 3]).to_string(), "[1,3]");
        assert_eq!(GIndex::EMPTY.to_string(), "[]");
        assert_eq!("[1, 3]".parse::<GIndex>().unwrap(), idx(&[1, 3]));
        assert_eq!("[]".parse::<GIndex>().unwrap(), GIndex::EMPTY);
        assert!("[3,1]".parse::<GIndex>().is_err());
        assert!("[0]".parse::<GIndex>().is_err());
        assert!("1,3".parse::<GIndex>().is_err());
    }

    #[test]
    fn canonical_order_is_degree_then_lexicographic() {
        let mut v = vec![idx(&[2, 3]), idx(&[1]), GIndex::EMPTY, idx(&[1, 3]), idx(&[2]), idx(&[1, 2])];
        v.sort();
        assert_eq!(
            v,
            vec![GIndex::EMPTY, idx(&[1]), idx(&[2]), idx(&[1, 2]), idx(&[1, 3]), idx(&[2, 3])]
        );
    }

    #[test]
    fn odd_multi_sign_counts() {
        let a = OddMulti::from_slice(&[1, 1, 0, 1]).unwrap();
        assert_eq!(a.count_before(2), 1);
        assert_eq!(a.count_after(2), 1);
        assert_eq!(a.count_before(1), 0);
        assert_eq!(a.count_after(4), 0);
        assert!(OddMulti::from_slice(&[2]).is_err());
    }

    #[test]
    fn even_multi_enumeration() {
        assert_eq!(EvenMulti::with_total(2, 2).len(), 3);
        assert_eq!(EvenMulti::up_to(3, 2).len(), 10);
        assert_eq!(EvenMulti(vec![2, 3]).factorial(), BigUint::from(12u32));
        assert_eq!(EvenMulti::up_to(0, 3), vec![EvenMulti(vec![])]);
    }
}
