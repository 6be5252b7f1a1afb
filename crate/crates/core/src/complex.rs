//! Bounded, non-negatively graded complexes of finite free `R`-modules.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ring::{CoeffRing, RingElement, RingSpec};
use crate::MatrixR;

/// `X_0 ← X_1 ← … ← X_N`, each `X_n = R^{ranks[n]}`.
///
/// `diffs[n - 1]` is the `ranks[n-1] × ranks[n]` matrix of `d_n`. Trailing zero
/// ranks are trimmed, so two complexes are equal iff they have the same ring,
/// ranks and matrices. The empty complex is the zero complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainComplex {
    ring: RingSpec,
    ranks: Vec<usize>,
    diffs: Vec<MatrixR>,
}

impl ChainComplex {
    /// Checked constructor: shapes must line up and `d∘d = 0`.
    pub fn new(ring: RingSpec, ranks: Vec<usize>, diffs: Vec<MatrixR>) -> Result<Self> {
        let cx = Self::from_parts_unchecked(ring, ranks, diffs)?;
        cx.validate()?;
        Ok(cx)
    }

    /// Shape-checked but without the `d∘d = 0` test. Used to load broken
    /// complexes for diagnosis.
    pub fn from_parts_unchecked(ring: RingSpec, mut ranks: Vec<usize>, mut diffs: Vec<MatrixR>) -> Result<Self> {
        if diffs.len() != ranks.len().saturating_sub(1) {
            return Err(Error::shape(format!(
                "{} degrees need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (idx, d) in diffs.iter().enumerate() {
            let n = idx + 1;
            if d.ring() != ring {
                return Err(Error::RingMismatch(ring, d.ring()));
            }
            if d.shape() != (ranks[n - 1], ranks[n]) {
                return Err(Error::InvalidComplex {
                    degree: n,
                    reason: format!(
                        "d_{n} is {}x{}, expected {}x{}",
                        d.rows(),
                        d.cols(),
                        ranks[n - 1],
                        ranks[n]
                    ),
                });
            }
        }
        while ranks.last() == Some(&0) {
            ranks.pop();
            diffs.pop();
        }
        Ok(ChainComplex { ring, ranks, diffs })
    }

    pub fn empty(ring: RingSpec) -> Self {
        ChainComplex {
            ring,
            ranks: Vec::new(),
            diffs: Vec::new(),
        }
    }

    /// `S^n`: `R` in degree `n`.
    pub fn sphere(ring: RingSpec, n: usize) -> Self {
        let mut ranks = vec![0; n + 1];
        ranks[n] = 1;
        Self::from_diagonal(ring, ranks, |_| ring.zero())
    }

    /// `D^n`: `R` in degrees `n-1` and `n`, joined by the identity.
    pub fn disk(ring: RingSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("disk(0) would reach degree -1"));
        }
        let mut ranks = vec![0; n + 1];
        ranks[n - 1] = 1;
        ranks[n] = 1;
        Ok(Self::from_diagonal(ring, ranks, |_| ring.one()))
    }

    /// `Σ^i E_j`: `R` in degrees `i..=i+j`, every differential `(-1)^i r`.
    pub fn interval(ring: RingSpec, i: usize, j: usize) -> Self {
        let mut ranks = vec![0; i + j + 1];
        for r in &mut ranks[i..] {
            *r = 1;
        }
        let d = ring.mul(ring.sign(i), ring.r());
        Self::from_diagonal(ring, ranks, |_| d)
    }

    // Ranks in {0, 1}; every 1×1 differential gets `entry(n)`.
    fn from_diagonal(ring: RingSpec, ranks: Vec<usize>, entry: impl Fn(usize) -> RingElement) -> Self {
        let diffs = (1..ranks.len())
            .map(|n| {
                let (r, c) = (ranks[n - 1], ranks[n]);
                Matrix::from_fn(ring, r, c, |_, _| entry(n))
            })
            .collect();
        ChainComplex { ring, ranks, diffs }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Rank in degree `n`; zero above the top.
    pub fn rank(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    /// Number of stored degrees, `top + 1` (zero for the empty complex).
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.ranks.len().checked_sub(1)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn diffs(&self) -> &[MatrixR] {
        &self.diffs
    }

    /// `d_n` for any `n ≥ 1`; a zero matrix of the right shape outside the
    /// stored range.
    pub fn differential(&self, n: usize) -> MatrixR {
        assert!(n >= 1, "there is no d_0");
        match self.diffs.get(n - 1) {
            Some(d) => d.clone(),
            None => Matrix::zeros(self.ring, self.rank(n - 1), self.rank(n)),
        }
    }

    /// Lowest degree with nonzero rank.
    pub fn bottom_degree(&self) -> Option<usize> {
        self.ranks.iter().position(|&r| r > 0)
    }

    /// Every differential entry lies in `m`.
    pub fn is_minimal(&self) -> bool {
        self.diffs.iter().all(|d| d.is_minimal())
    }

    /// `Ok` iff shapes align and `d_n ∘ d_{n+1} = 0` everywhere; otherwise the
    /// first failing degree.
    pub fn validate(&self) -> Result<()> {
        for (idx, d) in self.diffs.iter().enumerate() {
            let n = idx + 1;
            if d.shape() != (self.ranks[n - 1], self.ranks[n]) {
                return Err(Error::InvalidComplex {
                    degree: n,
                    reason: "differential has the wrong shape".into(),
                });
            }
        }
        for n in 1..self.diffs.len() {
            let dd = self.diffs[n - 1].matmul(&self.diffs[n])?;
            if !dd.is_zero() {
                return Err(Error::InvalidComplex {
                    degree: n,
                    reason: format!("d_{n} ∘ d_{} ≠ 0", n + 1),
                });
            }
        }
        Ok(())
    }

    /// Homology `H_n ≅ R^a ⊕ k^b` for `n = 0..=top`, read off the interval
    /// decomposition: `(i, 0)` contributes `R` to `H_i`, `(i, j)` with `j ≥ 1`
    /// contributes `k` to `H_i` and to `H_{i+j}`.
    pub fn homology(&self) -> Result<Vec<ModuleDescriptor>> {
        self.validate()?;
        let dec = crate::reduce::decompose(self)?;
        let mut h = vec![ModuleDescriptor::zero(); self.len()];
        for iv in &dec.intervals {
            if iv.j == 0 {
                h[iv.i].free += 1;
            } else {
                h[iv.i].residue += 1;
                h[iv.i + iv.j].residue += 1;
            }
        }
        Ok(h)
    }

    /// Homology by elementwise enumeration of cycles and boundaries. Refuses
    /// when `|R|^(total rank)` exceeds [`BRUTE_HOMOLOGY_LIMIT`].
    pub fn brute_homology(&self) -> Result<Vec<ModuleDescriptor>> {
        self.validate()?;
        let required = (self.ring.order() as u128).saturating_pow(self.total_rank() as u32);
        if required > BRUTE_HOMOLOGY_LIMIT {
            return Err(Error::Guard {
                required,
                budget: BRUTE_HOMOLOGY_LIMIT,
            });
        }
        let spec = self.ring;
        let r = spec.r();
        (0..self.len())
            .map(|n| {
                let cycles: Vec<Vec<RingElement>> = if n == 0 {
                    all_vectors(spec, self.rank(0)).collect()
                } else {
                    let d = self.differential(n);
                    all_vectors(spec, self.rank(n))
                        .filter(|v| d.apply(v).expect("shape").iter().all(|&x| spec.is_zero(x)))
                        .collect()
                };
                let d_above = self.differential(n + 1);
                let boundaries: HashSet<Vec<RingElement>> = all_vectors(spec, self.rank(n + 1))
                    .map(|v| d_above.apply(&v).expect("shape"))
                    .collect();
                let annihilated = cycles
                    .iter()
                    .filter(|v| {
                        let rv: Vec<_> = v.iter().map(|&x| spec.mul(r, x)).collect();
                        boundaries.contains(&rv)
                    })
                    .count();
                let h = cycles.len() / boundaries.len();
                let a = annihilated / boundaries.len();
                ModuleDescriptor::from_cardinalities(spec.p() as u64, h as u64, a as u64)
            })
            .collect()
    }
}

/// Budget for [`ChainComplex::brute_homology`]: `|R|^(total rank)`.
pub const BRUTE_HOMOLOGY_LIMIT: u128 = 1 << 12;

/// All vectors in `R^len`, little-endian in the element index.
pub(crate) fn all_vectors(spec: RingSpec, len: usize) -> impl Iterator<Item = Vec<RingElement>> {
    let q = spec.order();
    let count = q.pow(len as u32);
    (0..count).map(move |mut idx| {
        (0..len)
            .map(|_| {
                let e = spec.from_index(idx % q);
                idx /= q;
                e
            })
            .collect()
    })
}

/// Isomorphism class `R^free ⊕ k^residue`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct ModuleDescriptor {
    pub free: usize,
    pub residue: usize,
}

impl ModuleDescriptor {
    pub fn new(free: usize, residue: usize) -> Self {
        ModuleDescriptor { free, residue }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.residue == 0
    }

    /// `log_p` of the module's cardinality, `2a + b`.
    pub fn log_cardinality(&self) -> usize {
        2 * self.free + self.residue
    }

    /// `log_p` of the `r`-annihilator's cardinality, `a + b`.
    pub fn log_annihilator(&self) -> usize {
        self.free + self.residue
    }

    /// Recover `(a, b)` from `|M| = p^(2a+b)` and `|ann_r M| = p^(a+b)`.
    /// Fails when the cardinalities fit no module of that shape.
    pub fn from_cardinalities(p: u64, module: u64, annihilator: u64) -> Result<Self> {
        let log = |x: u64| -> Option<usize> {
            let mut e = 0;
            let mut v = 1u64;
            while v < x {
                v = v.checked_mul(p)?;
                e += 1;
            }
            (v == x).then_some(e)
        };
        let (Some(h), Some(a)) = (log(module), log(annihilator)) else {
            return Err(Error::domain(format!(
                "cardinalities {module}, {annihilator} are not powers of {p}"
            )));
        };
        if a > h || 2 * a < h {
            return Err(Error::domain(format!(
                "|H| = {p}^{h}, |ann| = {p}^{a} fit no R^a ⊕ k^b"
            )));
        }
        Ok(ModuleDescriptor {
            free: h - a,
            residue: 2 * a - h,
        })
    }
}

impl fmt::Display for ModuleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.free, self.residue) {
            (0, 0) => write!(f, "0"),
            (a, 0) => write!(f, "R^{a}"),
            (0, b) => write!(f, "k^{b}"),
            (a, b) => write!(f, "R^{a} ⊕ k^{b}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    fn z4() -> RingSpec {
        RingSpec::zpsq(2).unwrap()
    }

    fn one_by_one(spec: RingSpec, x: RingElement) -> MatrixR {
        Matrix::from_vec(spec, 1, 1, vec![x]).unwrap()
    }

    const R: ModuleDescriptor = ModuleDescriptor { free: 1, residue: 0 };
    const K: ModuleDescriptor = ModuleDescriptor { free: 0, residue: 1 };
    const ZERO: ModuleDescriptor = ModuleDescriptor { free: 0, residue: 0 };

    #[test]
    fn constructors() {
        let spec = z4();
        let s0 = ChainComplex::sphere(spec, 0);
        assert_eq!(s0.ranks(), &[1]);
        assert!(s0.diffs().is_empty());
        assert_eq!(ChainComplex::sphere(spec, 2).ranks(), &[0, 0, 1]);

        let d1 = ChainComplex::disk(spec, 1).unwrap();
        assert_eq!(d1.ranks(), &[1, 1]);
        assert_eq!(d1.diffs()[0], one_by_one(spec, spec.one()));
        assert!(ChainComplex::disk(spec, 0).is_err());

        assert_eq!(ChainComplex::interval(spec, 0, 0), s0);
        let e02 = ChainComplex::interval(spec, 0, 2);
        assert_eq!(e02.ranks(), &[1, 1, 1]);
        assert!(e02.diffs().iter().all(|d| *d == one_by_one(spec, spec.r())));

        let d3 = RingSpec::dual(3).unwrap();
        let e11 = ChainComplex::interval(d3, 1, 1);
        assert_eq!(e11.ranks(), &[0, 1, 1]);
        assert_eq!(e11.diffs()[1], one_by_one(d3, d3.neg(d3.r())));
    }

    #[test]
    fn validation() {
        let spec = z4();
        assert!(ChainComplex::interval(spec, 0, 3).validate().is_ok());
        assert!(ChainComplex::new(spec, vec![3], vec![]).is_ok());
        let one = one_by_one(spec, spec.one());
        let bad = ChainComplex::from_parts_unchecked(spec, vec![1, 1, 1], vec![one.clone(), one]).unwrap();
        match bad.validate() {
            Err(Error::InvalidComplex { degree, .. }) => assert_eq!(degree, 1),
            other => panic!("{other:?}"),
        }
        assert!(ChainComplex::from_parts_unchecked(spec, vec![1, 2], vec![Matrix::zeros(spec, 1, 1)]).is_err());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let spec = z4();
        let cx = ChainComplex::new(
            spec,
            vec![1, 0, 0],
            vec![Matrix::zeros(spec, 1, 0), Matrix::zeros(spec, 0, 0)],
        )
        .unwrap();
        assert_eq!(cx, ChainComplex::sphere(spec, 0));
        let empty = ChainComplex::new(spec, vec![0], vec![]).unwrap();
        assert_eq!(empty, ChainComplex::empty(spec));
    }

    #[test]
    fn brute_homology_examples() {
        let spec = z4();
        assert_eq!(ChainComplex::sphere(spec, 0).brute_homology().unwrap(), vec![R]);
        assert_eq!(ChainComplex::interval(spec, 0, 1).brute_homology().unwrap(), vec![K, K]);
        assert_eq!(
            ChainComplex::interval(spec, 0, 2).brute_homology().unwrap(),
            vec![K, ZERO, K]
        );
        assert_eq!(
            ChainComplex::disk(spec, 1).unwrap().brute_homology().unwrap(),
            vec![ZERO, ZERO]
        );
    }

    #[test]
    fn brute_homology_guard() {
        let spec = z4();
        let big = ChainComplex::new(spec, vec![7], vec![]).unwrap();
        assert!(matches!(big.brute_homology(), Err(Error::Guard { .. })));
    }

    #[test]
    fn descriptor_extraction() {
        assert_eq!(ModuleDescriptor::from_cardinalities(2, 4, 2).unwrap(), R);
        assert_eq!(ModuleDescriptor::from_cardinalities(3, 3, 3).unwrap(), K);
        assert_eq!(
            ModuleDescriptor::from_cardinalities(2, 32, 8).unwrap(),
            ModuleDescriptor::new(2, 1)
        );
        assert!(ModuleDescriptor::from_cardinalities(2, 6, 2).is_err());
        assert!(ModuleDescriptor::from_cardinalities(2, 8, 1).is_err());
        assert_eq!(ModuleDescriptor::new(2, 1).to_string(), "R^2 ⊕ k^1");
    }
}
