//! Exact arithmetic in the local rings `Z/p²` and `F_p[X]/(X²)`.
//!
//! Both rings have maximal ideal `m = (r)` with `r² = 0`. An element is stored
//! as the pair `(a, b)` with `a, b ∈ [0, p)`, meaning `a + b·r`. For `Z/p²` the
//! generator is `r = p`, so the pair encodes the integer `a + b·p`; for the dual
//! numbers `r = X`. Only multiplication (and the carry in addition) tells the
//! two flavors apart.
//!
//! Arithmetic goes through a ring *context* (`RingSpec`, `ResidueField`) that
//! implements [`CoeffRing`]; elements themselves are plain coordinate pairs.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A commutative ring whose elements are small `Copy` values interpreted
/// relative to the context object.
pub trait CoeffRing: Copy + Eq + fmt::Debug {
    type Elem: Copy + Eq + Hash + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, x: Self::Elem, y: Self::Elem) -> Self::Elem;
    fn neg(&self, x: Self::Elem) -> Self::Elem;
    fn mul(&self, x: Self::Elem, y: Self::Elem) -> Self::Elem;
    fn is_unit(&self, x: Self::Elem) -> bool;
    /// `None` for non-units.
    fn inverse(&self, x: Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, x: Self::Elem, y: Self::Elem) -> Self::Elem {
        self.add(x, self.neg(y))
    }

    fn is_zero(&self, x: Self::Elem) -> bool {
        x == self.zero()
    }

    /// Multiply-accumulate `acc + x·y`.
    fn mul_add(&self, acc: Self::Elem, x: Self::Elem, y: Self::Elem) -> Self::Elem {
        self.add(acc, self.mul(x, y))
    }
}

/// Marker for coefficient rings in which every nonzero element is a unit.
pub trait Field: CoeffRing {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}

// p is prime and x ∈ [1, p)
fn inv_mod_prime(x: u32, p: u32) -> u32 {
    pow_mod(x as u64, p as u64 - 2, p as u64) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Integers modulo `p²`, with `r = p`.
    ZModPSquared,
    /// Dual numbers `F_p[X]/(X²)`, with `r = X`.
    DualNumbers,
}

/// One of the supported local rings, parameterized by a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingSpec {
    flavor: Flavor,
    p: u32,
}

/// Upper bound on `p` so that `p²` products fit comfortably in 128-bit
/// intermediates and element indices in `u64`.
pub const MAX_PRIME: u32 = 1 << 31;

impl RingSpec {
    pub fn new(flavor: Flavor, p: u32) -> Result<Self> {
        if p >= MAX_PRIME {
            return Err(Error::domain(format!("p = {p} is too large (limit {MAX_PRIME})")));
        }
        if !is_prime(p) {
            return Err(Error::domain(format!("p = {p} is not prime")));
        }
        Ok(RingSpec { flavor, p })
    }

    /// `Z/p²`.
    pub fn zpsq(p: u32) -> Result<Self> {
        Self::new(Flavor::ZModPSquared, p)
    }

    /// `F_p[X]/(X²)`.
    pub fn dual(p: u32) -> Result<Self> {
        Self::new(Flavor::DualNumbers, p)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of elements, `p²`.
    pub fn order(&self) -> u64 {
        self.p as u64 * self.p as u64
    }

    pub fn residue_field(&self) -> ResidueField {
        ResidueField { p: self.p }
    }

    /// Checked constructor for `a + b·r`.
    pub fn element(&self, a: u32, b: u32) -> Result<RingElement> {
        if a >= self.p || b >= self.p {
            return Err(Error::domain(format!(
                "entry [{a}, {b}] out of range for p = {}",
                self.p
            )));
        }
        Ok(RingElement { a, b })
    }

    /// The fixed generator `r = [0, 1]` of the maximal ideal.
    pub fn r(&self) -> RingElement {
        RingElement { a: 0, b: 1 }
    }

    /// Projection `R → k`.
    pub fn residue(&self, x: RingElement) -> Residue {
        Residue(x.a)
    }

    /// Coefficient section `k → R`, `v ↦ [v, 0]`.
    pub fn lift(&self, v: Residue) -> RingElement {
        RingElement { a: v.0, b: 0 }
    }

    /// `v ↦ r·lift(v) = [0, v]`.
    pub fn times_r(&self, v: Residue) -> RingElement {
        RingElement { a: 0, b: v.0 }
    }

    /// Integer `(-1)^i` as a ring element.
    pub fn sign(&self, i: usize) -> RingElement {
        if i.is_multiple_of(2) {
            self.one()
        } else {
            self.neg(self.one())
        }
    }

    /// Dense index in `[0, p²)`, `a + b·p`. Used for elementwise enumeration.
    pub fn index_of(&self, x: RingElement) -> u64 {
        x.a as u64 + x.b as u64 * self.p as u64
    }

    pub fn from_index(&self, idx: u64) -> RingElement {
        let p = self.p as u64;
        debug_assert!(idx < p * p);
        RingElement {
            a: (idx % p) as u32,
            b: (idx / p) as u32,
        }
    }

    /// Every element of the ring, in index order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    /// The `p` elements of `m`, in order of their `b` coordinate.
    pub fn ideal_elements(&self) -> impl Iterator<Item = RingElement> {
        (0..self.p).map(|b| RingElement { a: 0, b })
    }

    /// Returns an error unless `self == other`.
    pub fn ensure_same(&self, other: &RingSpec) -> Result<()> {
        if self != other {
            return Err(Error::RingMismatch(*self, *other));
        }
        Ok(())
    }

    fn value_zpsq(&self, x: RingElement) -> u64 {
        x.a as u64 + x.b as u64 * self.p as u64
    }
}

impl CoeffRing for RingSpec {
    type Elem = RingElement;

    fn zero(&self) -> RingElement {
        RingElement { a: 0, b: 0 }
    }

    fn one(&self) -> RingElement {
        RingElement { a: 1, b: 0 }
    }

    fn add(&self, x: RingElement, y: RingElement) -> RingElement {
        match self.flavor {
            Flavor::ZModPSquared => {
                let v = (self.value_zpsq(x) + self.value_zpsq(y)) % self.order();
                self.from_index(v)
            }
            Flavor::DualNumbers => RingElement {
                a: ((x.a as u64 + y.a as u64) % self.p as u64) as u32,
                b: ((x.b as u64 + y.b as u64) % self.p as u64) as u32,
            },
        }
    }

    fn neg(&self, x: RingElement) -> RingElement {
        match self.flavor {
            Flavor::ZModPSquared => {
                let n = self.order();
                self.from_index((n - self.value_zpsq(x)) % n)
            }
            Flavor::DualNumbers => RingElement {
                a: (self.p - x.a) % self.p,
                b: (self.p - x.b) % self.p,
            },
        }
    }

    fn mul(&self, x: RingElement, y: RingElement) -> RingElement {
        match self.flavor {
            Flavor::ZModPSquared => {
                let n = self.order() as u128;
                let v = (self.value_zpsq(x) as u128 * self.value_zpsq(y) as u128) % n;
                self.from_index(v as u64)
            }
            Flavor::DualNumbers => {
                let p = self.p as u64;
                let (a1, b1, a2, b2) = (x.a as u64, x.b as u64, y.a as u64, y.b as u64);
                RingElement {
                    a: (a1 * a2 % p) as u32,
                    b: ((a1 * b2 % p + a2 * b1 % p) % p) as u32,
                }
            }
        }
    }

    fn is_unit(&self, x: RingElement) -> bool {
        x.a != 0
    }

    fn inverse(&self, x: RingElement) -> Option<RingElement> {
        if !self.is_unit(x) {
            return None;
        }
        let a_inv = inv_mod_prime(x.a, self.p);
        match self.flavor {
            Flavor::ZModPSquared => {
                // One Newton step lifts a⁻¹ mod p to an inverse mod p².
                let n = self.order() as u128;
                let u0 = a_inv as u128;
                let v = self.value_zpsq(x) as u128;
                let two_minus = (2 + n - (v * u0) % n) % n;
                Some(self.from_index((u0 * two_minus % n) as u64))
            }
            Flavor::DualNumbers => {
                // (a + br)⁻¹ = a⁻¹ − b·a⁻²·r
                let p = self.p as u64;
                let a2 = a_inv as u64 * a_inv as u64 % p;
                let b = (p - x.b as u64 * a2 % p) % p;
                Some(RingElement { a: a_inv, b: b as u32 })
            }
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor {
            Flavor::ZModPSquared => write!(f, "zpsq:{}", self.p),
            Flavor::DualNumbers => write!(f, "dual:{}", self.p),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, p) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("ring spec {s:?} is not of the form <kind>:<p>")))?;
        let p: u32 = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("ring spec {s:?} has a non-numeric prime")))?;
        match kind.trim() {
            "zpsq" => RingSpec::zpsq(p),
            "dual" => RingSpec::dual(p),
            other => Err(Error::Parse(format!("unknown ring kind {other:?}"))),
        }
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `a + b·r` with `a, b ∈ [0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    a: u32,
    b: u32,
}

impl RingElement {
    /// Residue-field coordinate.
    pub fn a(&self) -> u32 {
        self.a
    }

    /// Coordinate along `r`.
    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn pair(&self) -> [u32; 2] {
        [self.a, self.b]
    }
}

/// The residue field `k = R/m = F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueField {
    p: u32,
}

impl ResidueField {
    pub fn new(p: u32) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::domain(format!("p = {p} is not a supported prime")));
        }
        Ok(ResidueField { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn element(&self, v: u32) -> Result<Residue> {
        if v >= self.p {
            return Err(Error::domain(format!("{v} out of range for F_{}", self.p)));
        }
        Ok(Residue(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue(u32);

impl Residue {
    pub fn value(&self) -> u32 {
        self.0
    }
}

impl CoeffRing for ResidueField {
    type Elem = Residue;

    fn zero(&self) -> Residue {
        Residue(0)
    }

    fn one(&self) -> Residue {
        Residue(1 % self.p)
    }

    fn add(&self, x: Residue, y: Residue) -> Residue {
        Residue(((x.0 as u64 + y.0 as u64) % self.p as u64) as u32)
    }

    fn neg(&self, x: Residue) -> Residue {
        Residue((self.p - x.0) % self.p)
    }

    fn mul(&self, x: Residue, y: Residue) -> Residue {
        Residue((x.0 as u64 * y.0 as u64 % self.p as u64) as u32)
    }

    fn is_unit(&self, x: Residue) -> bool {
        x.0 != 0
    }

    fn inverse(&self, x: Residue) -> Option<Residue> {
        (x.0 != 0).then(|| Residue(inv_mod_prime(x.0, self.p)))
    }
}

impl Field for ResidueField {}

#[cfg(test)]
mod tests {
    use super::*;

    const PRIMES: [u32; 3] = [2, 3, 5];

    fn rings() -> Vec<RingSpec> {
        PRIMES
            .iter()
            .flat_map(|&p| [RingSpec::zpsq(p).unwrap(), RingSpec::dual(p).unwrap()])
            .collect()
    }

    fn el(spec: &RingSpec, a: u32, b: u32) -> RingElement {
        spec.element(a, b).unwrap()
    }

    #[test]
    fn r_squares_to_zero() {
        for spec in rings() {
            assert_eq!(spec.mul(spec.r(), spec.r()), spec.zero(), "{spec}");
        }
    }

    #[test]
    fn carry_distinguishes_flavors() {
        let z9 = RingSpec::zpsq(3).unwrap();
        let d3 = RingSpec::dual(3).unwrap();
        assert_eq!(z9.mul(el(&z9, 2, 0), el(&z9, 2, 0)), el(&z9, 1, 1));
        assert_eq!(d3.mul(el(&d3, 2, 0), el(&d3, 2, 0)), el(&d3, 1, 0));
    }

    #[test]
    fn zpsq_matches_integer_arithmetic() {
        for &p in &PRIMES {
            let spec = RingSpec::zpsq(p).unwrap();
            let n = (p * p) as u64;
            for x in 0..n {
                for y in 0..n {
                    let (ex, ey) = (spec.from_index(x), spec.from_index(y));
                    assert_eq!(spec.index_of(spec.add(ex, ey)), (x + y) % n);
                    assert_eq!(spec.index_of(spec.sub(ex, ey)), (x + n - y) % n);
                    assert_eq!(spec.index_of(spec.mul(ex, ey)), x * y % n);
                }
            }
        }
    }

    #[test]
    fn ring_axioms_exhaustive() {
        for spec in rings() {
            let all: Vec<_> = spec.elements().collect();
            for &x in &all {
                for &y in &all {
                    assert_eq!(spec.mul(x, y), spec.mul(y, x));
                    assert_eq!(spec.add(x, y), spec.add(y, x));
                    for &z in &all {
                        assert_eq!(spec.mul(spec.mul(x, y), z), spec.mul(x, spec.mul(y, z)));
                        assert_eq!(spec.mul(x, spec.add(y, z)), spec.add(spec.mul(x, y), spec.mul(x, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn unit_classification() {
        let spec = RingSpec::zpsq(2).unwrap();
        assert!(spec.is_unit(el(&spec, 1, 1)));
        assert!(!spec.is_unit(el(&spec, 0, 1)));
        assert!(!spec.is_unit(spec.zero()));
        // every non-unit is r times a lift
        for spec in rings() {
            for x in spec.elements() {
                let in_m = x == spec.times_r(Residue(x.b()));
                assert!(spec.is_unit(x) ^ in_m, "{spec} {x:?}");
            }
        }
    }

    // Inverse by exhaustive search, independent of the Newton/dual formulas.
    fn brute_inverse(spec: &RingSpec, x: RingElement) -> Option<RingElement> {
        spec.elements().find(|&y| spec.mul(x, y) == spec.one())
    }

    #[test]
    fn inverse_examples() {
        let z4 = RingSpec::zpsq(2).unwrap();
        assert_eq!(z4.inverse(el(&z4, 1, 1)), Some(el(&z4, 1, 1)));
        let z9 = RingSpec::zpsq(3).unwrap();
        assert_eq!(z9.inverse(el(&z9, 1, 1)), Some(el(&z9, 1, 2)));
        let d3 = RingSpec::dual(3).unwrap();
        assert_eq!(d3.inverse(el(&d3, 1, 1)), Some(el(&d3, 1, 2)));
        assert_eq!(d3.inverse(el(&d3, 0, 2)), None);
    }

    #[test]
    fn inverse_agrees_with_search() {
        for spec in rings() {
            for x in spec.elements() {
                assert_eq!(spec.inverse(x), brute_inverse(&spec, x), "{spec} {x:?}");
                if let Some(y) = spec.inverse(x) {
                    assert_eq!(spec.mul(x, y), spec.one());
                }
            }
        }
    }

    #[test]
    fn flavors_agree_without_carry() {
        let z4 = RingSpec::zpsq(2).unwrap();
        let d2 = RingSpec::dual(2).unwrap();
        for x in z4.elements() {
            for y in z4.elements() {
                // a-coordinates in {0,1} never carry when p = 2 except through a·b terms
                let carry_free = x.a() * y.a() < 2 && x.a() * y.b() + x.b() * y.a() < 2;
                if carry_free {
                    assert_eq!(z4.mul(x, y).pair(), d2.mul(x, y).pair());
                }
            }
        }
        let z9 = RingSpec::zpsq(3).unwrap();
        let d3 = RingSpec::dual(3).unwrap();
        assert_ne!(
            z9.mul(el(&z9, 2, 0), el(&z9, 2, 0)).pair(),
            d3.mul(el(&d3, 2, 0), el(&d3, 2, 0)).pair()
        );
    }

    #[test]
    fn residue_lift_times_r() {
        let spec = RingSpec::dual(3).unwrap();
        assert_eq!(spec.residue(el(&spec, 2, 1)), Residue(2));
        assert_eq!(spec.times_r(Residue(1)), el(&spec, 0, 1));
        assert_eq!(spec.lift(Residue(0)), spec.zero());
        for spec in rings() {
            for x in spec.elements() {
                let v = spec.residue(x);
                assert_eq!(spec.residue(spec.lift(v)), v);
                assert_eq!(spec.residue(spec.times_r(v)), Residue(0));
                assert_eq!(spec.mul(spec.r(), x), spec.times_r(v));
            }
        }
    }

    #[test]
    fn spec_strings() {
        assert_eq!("zpsq:2".parse::<RingSpec>().unwrap(), RingSpec::zpsq(2).unwrap());
        assert_eq!("dual:3".parse::<RingSpec>().unwrap().to_string(), "dual:3");
        assert!("zpsq:4".parse::<RingSpec>().is_err());
        assert!("zpsq:1".parse::<RingSpec>().is_err());
        assert!("poly:3".parse::<RingSpec>().is_err());
        assert!("dual".parse::<RingSpec>().is_err());
    }

    #[test]
    fn element_range_checked() {
        let spec = RingSpec::zpsq(3).unwrap();
        assert!(spec.element(3, 0).is_err());
        assert!(spec.element(0, 3).is_err());
    }

    #[test]
    fn residue_field_inverse() {
        let k = ResidueField::new(5).unwrap();
        for v in 1..5 {
            let x = k.element(v).unwrap();
            assert_eq!(k.mul(x, k.inverse(x).unwrap()), k.one());
        }
        assert_eq!(k.inverse(k.zero()), None);
    }
}
