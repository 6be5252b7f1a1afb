//! Splitting a perfect complex into disks and interval complexes.
//!
//! Minimization peels off one disk `D^n` for every unit entry it can pivot on;
//! what is left has every differential in `m`, so `d_n = r·B_n` for matrices
//! `B_n` over `k`. The `B_n` form an arbitrary representation of a linear
//! quiver, and its interval summands are counted by inclusion–exclusion on the
//! ranks of composites `B_{a+1}⋯B_b`.
//!
//! The existence argument (pick the shortest `E_n` admitting a map surjective
//! in degree 0, then split it off with a section) is never run; the rank counts
//! determine the same multiset.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ops::direct_sum_all;
use crate::ring::{CoeffRing, RingSpec};
use crate::{MatrixK, MatrixR};

/// The summand `Σ^i E_j`: `R` in degrees `i..=i+j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub i: usize,
    pub j: usize,
}

impl Interval {
    pub fn new(i: usize, j: usize) -> Self {
        Interval { i, j }
    }

    pub fn end(&self) -> usize {
        self.i + self.j
    }

    pub fn contains(&self, n: usize) -> bool {
        self.i <= n && n <= self.end()
    }
}

/// Per-degree basis change `C_n` with its inverse. The certificates for a
/// complex `X` satisfy `C_{n-1} · d_n · C_n⁻¹ = d_n` of `M ⊕ D^{n_1} ⊕ …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificates {
    pub forward: Vec<MatrixR>,
    pub inverse: Vec<MatrixR>,
}

impl Certificates {
    fn identity(x: &ChainComplex) -> Self {
        let forward: Vec<MatrixR> = x.ranks().iter().map(|&r| Matrix::identity(x.ring(), r)).collect();
        Certificates {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Check that conjugating `x` reproduces `block` exactly and that each
    /// pair multiplies to the identity.
    pub fn verify(&self, x: &ChainComplex, block: &ChainComplex) -> Result<()> {
        if x.ranks().iter().zip(block.ranks()).any(|(a, b)| a != b) || x.len() != block.len() {
            return Err(Error::domain("certificate target has a different rank vector"));
        }
        for n in 0..x.len() {
            let (c, ci) = (&self.forward[n], &self.inverse[n]);
            if c.matmul(ci)? != Matrix::identity(x.ring(), x.rank(n)) {
                return Err(Error::domain(format!("certificate at degree {n} is not invertible")));
            }
        }
        for n in 1..x.len() {
            let conj = self.forward[n - 1]
                .matmul(&x.differential(n))?
                .matmul(&self.inverse[n])?;
            if conj != block.differential(n) {
                return Err(Error::domain(format!("conjugated d_{n} differs from the block form")));
            }
        }
        Ok(())
    }
}

/// Output of [`minimize`].
#[derive(Debug, Clone)]
pub struct Minimized {
    /// The minimal part; all differential entries in `m`.
    pub minimal: ChainComplex,
    /// Degrees `n` of the split disks `D^n`, ascending.
    pub disks: Vec<usize>,
    pub certificates: Certificates,
}

impl Minimized {
    /// `minimal ⊕ D^{n_1} ⊕ D^{n_2} ⊕ …` in the order of `disks`.
    pub fn block_form(&self) -> Result<ChainComplex> {
        let ring = self.minimal.ring();
        let disks = self
            .disks
            .iter()
            .map(|&n| ChainComplex::disk(ring, n))
            .collect::<Result<Vec<_>>>()?;
        direct_sum_all(ring, std::iter::once(&self.minimal).chain(&disks))
    }
}

// Working state: W_n = C_{n-1} d_n C_n⁻¹. A basis change in degree m
// (x' = E x) acts as W_{m+1} ← E W_{m+1}, W_m ← W_m E⁻¹.
struct Work {
    ring: RingSpec,
    ranks: Vec<usize>,
    w: Vec<MatrixR>, // w[n-1] = W_n
    c: Vec<MatrixR>,
    c_inv: Vec<MatrixR>,
}

impl Work {
    fn w_above(&mut self, m: usize) -> Option<&mut MatrixR> {
        self.w.get_mut(m)
    }

    fn w_at(&mut self, m: usize) -> Option<&mut MatrixR> {
        if m == 0 {
            None
        } else {
            self.w.get_mut(m - 1)
        }
    }

    /// x'_dst = x_dst + λ x_src in degree m.
    fn add(&mut self, m: usize, dst: usize, src: usize, lambda: crate::ring::RingElement) {
        let neg = self.ring.neg(lambda);
        if let Some(w) = self.w_above(m) {
            w.add_row_multiple(dst, src, lambda);
        }
        if let Some(w) = self.w_at(m) {
            w.add_col_multiple(src, dst, neg);
        }
        self.c[m].add_row_multiple(dst, src, lambda);
        self.c_inv[m].add_col_multiple(src, dst, neg);
    }

    /// x'_i = u x_i in degree m.
    fn scale(&mut self, m: usize, i: usize, u: crate::ring::RingElement) {
        let u_inv = self.ring.inverse(u).expect("unit");
        if let Some(w) = self.w_above(m) {
            w.scale_row(i, u);
        }
        if let Some(w) = self.w_at(m) {
            w.scale_col(i, u_inv);
        }
        self.c[m].scale_row(i, u);
        self.c_inv[m].scale_col(i, u_inv);
    }
}

/// Split off every embedded disk.
///
/// Pivots are taken in the lowest degree first, then the first unit in
/// row-major order among coordinates not yet split off. Each pivot in `d_n`
/// is normalized to 1 and its row and column are cleared by unit operations
/// propagated to `d_{n-1}` and `d_{n+1}`; `d∘d = 0` then forces the disk to be a
/// direct summand.
pub fn minimize(x: &ChainComplex) -> Result<Minimized> {
    x.validate()?;
    let ring = x.ring();
    let certs = Certificates::identity(x);
    let mut work = Work {
        ring,
        ranks: x.ranks().to_vec(),
        w: x.diffs().to_vec(),
        c: certs.forward,
        c_inv: certs.inverse,
    };
    let len = work.ranks.len();
    let mut alive: Vec<Vec<bool>> = work.ranks.iter().map(|&r| vec![true; r]).collect();
    // (degree n, bottom coordinate in n-1, top coordinate in n)
    let mut split: Vec<(usize, usize, usize)> = Vec::new();

    for n in 1..len {
        loop {
            let pivot = {
                let w = &work.w[n - 1];
                (0..w.rows())
                    .filter(|&i| alive[n - 1][i])
                    .flat_map(|i| (0..w.cols()).map(move |j| (i, j)))
                    .find(|&(i, j)| alive[n][j] && ring.is_unit(w[(i, j)]))
            };
            let Some((u, v)) = pivot else { break };
            let c = work.w[n - 1][(u, v)];
            // Row u of W_n lives in degree n-1: scale it so the pivot is 1.
            work.scale(n - 1, u, ring.inverse(c).unwrap());
            // Clear column v (row operations = basis changes in degree n-1).
            for i in 0..work.ranks[n - 1] {
                if i == u {
                    continue;
                }
                let e = work.w[n - 1][(i, v)];
                if !ring.is_zero(e) {
                    work.add(n - 1, i, u, ring.neg(e));
                }
            }
            // Clear row u (column operations = basis changes in degree n).
            // col_j -= e·col_v is x'_v = x_v + e·x_j.
            for j in 0..work.ranks[n] {
                if j == v {
                    continue;
                }
                let e = work.w[n - 1][(u, j)];
                if !ring.is_zero(e) {
                    work.add(n, v, j, e);
                }
            }
            alive[n - 1][u] = false;
            alive[n][v] = false;
            split.push((n, u, v));
        }
    }

    // New basis order per degree: surviving coordinates first, then one
    // coordinate per disk touching that degree, in split order.
    let mut order: Vec<Vec<usize>> = alive.iter().map(|a| (0..a.len()).filter(|&i| a[i]).collect()).collect();
    let minimal_ranks: Vec<usize> = order.iter().map(|o| o.len()).collect();
    for &(n, u, v) in &split {
        order[n - 1].push(u);
        order[n].push(v);
    }

    let all: Vec<Vec<usize>> = work.ranks.iter().map(|&r| (0..r).collect()).collect();
    let forward = (0..len).map(|m| work.c[m].submatrix(&order[m], &all[m])).collect();
    let inverse = (0..len).map(|m| work.c_inv[m].submatrix(&all[m], &order[m])).collect();

    let min_diffs = (1..len)
        .map(|n| {
            let rows = &order[n - 1][..minimal_ranks[n - 1]];
            let cols = &order[n][..minimal_ranks[n]];
            work.w[n - 1].submatrix(rows, cols)
        })
        .collect();
    let minimal = ChainComplex::new(ring, minimal_ranks, min_diffs)?;
    debug_assert!(minimal.is_minimal());

    Ok(Minimized {
        minimal,
        disks: split.iter().map(|&(n, _, _)| n).collect(),
        certificates: Certificates { forward, inverse },
    })
}

fn ensure_minimal(m: &ChainComplex) -> Result<()> {
    for (idx, d) in m.diffs().iter().enumerate() {
        if let Some((row, col)) = d.find_unit_pivot() {
            return Err(Error::NotMinimal {
                degree: idx + 1,
                row,
                col,
            });
        }
    }
    Ok(())
}

/// `B_n` with `d_n = r·B_n`, for a minimal complex.
fn reductions(m: &ChainComplex) -> Result<Vec<MatrixK>> {
    ensure_minimal(m)?;
    m.diffs().iter().map(|d| d.divide_by_r()).collect()
}

/// Rank table `ρ(a, b) = rank_k(B_{a+1}⋯B_b)` over all `a ≤ b ≤ top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    len: usize,
    table: Vec<usize>,
}

impl RankTable {
    pub fn compute(m: &ChainComplex) -> Result<Self> {
        let b = reductions(m)?;
        let len = m.len();
        let mut table = vec![0; len * len];
        for a in 0..len {
            table[a * len + a] = m.rank(a);
            // running composite B_{a+1}⋯B_bb : X_bb → X_a
            let mut comp: Option<MatrixK> = None;
            for bb in a + 1..len {
                let next = match comp {
                    None => b[bb - 1].clone(),
                    Some(ref c) => c.matmul(&b[bb - 1])?,
                };
                table[a * len + bb] = next.rank();
                comp = Some(next);
            }
        }
        Ok(RankTable { len, table })
    }

    /// `ρ(a, b)`; zero when `a < 0` or `b` is past the top, and for `a > b`.
    pub fn get(&self, a: isize, b: usize) -> usize {
        if a < 0 || b >= self.len || a as usize > b {
            return 0;
        }
        self.table[a as usize * self.len + b]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inclusion–exclusion multiplicity of the interval `[a, b]`, as a signed
    /// integer so that a negative value can be reported rather than wrapped.
    pub fn multiplicity(&self, a: usize, b: usize) -> i64 {
        let a = a as isize;
        self.get(a, b) as i64 - self.get(a - 1, b) as i64 - self.get(a, b + 1) as i64 + self.get(a - 1, b + 1) as i64
    }
}

/// `ρ(a, b)` for a minimal complex.
pub fn composite_rank(m: &ChainComplex, a: usize, b: usize) -> Result<usize> {
    let top = m
        .top_degree()
        .ok_or_else(|| Error::domain("composite_rank of the empty complex"))?;
    if a > b || b > top {
        return Err(Error::domain(format!("need 0 ≤ a ≤ b ≤ {top}, got a = {a}, b = {b}")));
    }
    Ok(RankTable::compute(m)?.get(a as isize, b))
}

/// Interval multiset of a minimal complex, sorted by `(i, j)` with repeats.
pub fn barcode(m: &ChainComplex) -> Result<Vec<Interval>> {
    let rho = RankTable::compute(m)?;
    let mut out = Vec::new();
    for a in 0..rho.len() {
        for b in a..rho.len() {
            let mult = rho.multiplicity(a, b);
            if mult < 0 {
                return Err(Error::domain(format!(
                    "negative multiplicity {mult} for interval [{a}, {b}]"
                )));
            }
            out.extend(std::iter::repeat_n(Interval::new(a, b - a), mult as usize));
        }
    }
    Ok(out)
}

/// `X ≅ ⊕ Σ^i E_j ⊕ ⊕ D^n`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Sorted by `(i, j)`, with repeats.
    pub intervals: Vec<Interval>,
    /// Sorted ascending, with repeats.
    pub disks: Vec<usize>,
    pub certificates: Option<Certificates>,
}

impl PartialEq for Decomposition {
    fn eq(&self, other: &Self) -> bool {
        self.intervals == other.intervals && self.disks == other.disks
    }
}

impl Decomposition {
    pub fn new(mut intervals: Vec<Interval>, mut disks: Vec<usize>) -> Self {
        intervals.sort();
        disks.sort();
        Decomposition {
            intervals,
            disks,
            certificates: None,
        }
    }

    /// Intervals with multiplicities, ascending.
    pub fn interval_counts(&self) -> BTreeMap<Interval, usize> {
        let mut m = BTreeMap::new();
        for &iv in &self.intervals {
            *m.entry(iv).or_insert(0) += 1;
        }
        m
    }

    pub fn disk_counts(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &n in &self.disks {
            *m.entry(n).or_insert(0) += 1;
        }
        m
    }

    /// No interval summands: the complex is contractible.
    pub fn is_contractible(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Ranks predicted by the summands:
    /// `#{intervals covering n} + #{disks at n} + #{disks at n+1}`.
    pub fn rank_vector(&self) -> Vec<usize> {
        let top = self
            .intervals
            .iter()
            .map(|iv| iv.end() + 1)
            .chain(self.disks.iter().map(|&n| n + 1))
            .max()
            .unwrap_or(0);
        (0..top)
            .map(|n| {
                self.intervals.iter().filter(|iv| iv.contains(n)).count()
                    + self.disks.iter().filter(|&&d| d == n || d == n + 1).count()
            })
            .collect()
    }
}

/// Direct sum of the intervals then the disks, in sorted order.
pub fn reconstruct(dec: &Decomposition, ring: RingSpec) -> Result<ChainComplex> {
    let mut parts: Vec<ChainComplex> = dec
        .intervals
        .iter()
        .map(|iv| ChainComplex::interval(ring, iv.i, iv.j))
        .collect();
    for &n in &dec.disks {
        parts.push(ChainComplex::disk(ring, n)?);
    }
    direct_sum_all(ring, &parts)
}

/// Minimize, then read off the barcode. The result is checked against the
/// input: rank vectors must agree and the reconstructed minimal part must have
/// the same full `ρ` table.
pub fn decompose(x: &ChainComplex) -> Result<Decomposition> {
    let min = minimize(x)?;
    let intervals = barcode(&min.minimal)?;
    let mut dec = Decomposition::new(intervals, min.disks.clone());

    if dec.rank_vector() != x.ranks() {
        return Err(Error::domain(format!(
            "rank accounting failed: summands give {:?}, input has {:?}",
            dec.rank_vector(),
            x.ranks()
        )));
    }
    let rebuilt = reconstruct(&Decomposition::new(dec.intervals.clone(), Vec::new()), x.ring())?;
    if rebuilt.ranks() != min.minimal.ranks() || RankTable::compute(&rebuilt)? != RankTable::compute(&min.minimal)? {
        return Err(Error::domain("reconstructed intervals have a different ρ table"));
    }
    dec.certificates = Some(min.certificates);
    Ok(dec)
}
