//! Shift, direct sum, cone, tensor and hom of complexes, plus chain maps.
//!
//! Block orderings are fixed so every output is reproducible: the `Y` block
//! precedes the `X` block in a cone, tensor summands `X_i ⊗ Y_j` are ordered by
//! ascending `i` with Kronecker ordering inside, and hom summands
//! `hom(X_i, Y_{i+n})` by ascending `i`, vectorized row-major.

use crate::complex::{ChainComplex, ModuleDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{LocalSmithForm, Matrix};
use crate::ring::{CoeffRing, RingSpec};
use crate::MatrixR;

/// `f: source → target`, one matrix per degree of the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    mats: Vec<MatrixR>,
}

impl ChainMap {
    /// `mats[n]` has shape `target.rank(n) × source.rank(n)`. Entries past the
    /// source's top degree must be zero-column and are dropped.
    pub fn new(source: ChainComplex, target: ChainComplex, mut mats: Vec<MatrixR>) -> Result<Self> {
        source.ring().ensure_same(&target.ring())?;
        let ring = source.ring();
        if mats.len() < source.len() {
            return Err(Error::shape(format!(
                "chain map needs {} matrices, got {}",
                source.len(),
                mats.len()
            )));
        }
        for (n, m) in mats.iter().enumerate() {
            if m.ring() != ring {
                return Err(Error::RingMismatch(ring, m.ring()));
            }
            if m.shape() != (target.rank(n), source.rank(n)) {
                return Err(Error::InvalidMap {
                    degree: n,
                    reason: format!(
                        "f_{n} is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        target.rank(n),
                        source.rank(n)
                    ),
                });
            }
        }
        mats.truncate(source.len());
        let f = ChainMap { source, target, mats };
        f.check_commutes()?;
        Ok(f)
    }

    /// Caller guarantees shapes and commutation.
    pub(crate) fn from_parts_trusted(source: ChainComplex, target: ChainComplex, mats: Vec<MatrixR>) -> Self {
        debug_assert_eq!(mats.len(), source.len());
        ChainMap { source, target, mats }
    }

    pub fn identity(x: &ChainComplex) -> Self {
        let mats = x.ranks().iter().map(|&r| Matrix::identity(x.ring(), r)).collect();
        ChainMap {
            source: x.clone(),
            target: x.clone(),
            mats,
        }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Result<Self> {
        source.ring().ensure_same(&target.ring())?;
        let mats = (0..source.len())
            .map(|n| Matrix::zeros(source.ring(), target.rank(n), source.rank(n)))
            .collect();
        Ok(ChainMap {
            source: source.clone(),
            target: target.clone(),
            mats,
        })
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn mats(&self) -> &[MatrixR] {
        &self.mats
    }

    pub fn ring(&self) -> RingSpec {
        self.source.ring()
    }

    /// `f_n`, zero-shaped outside the source's range.
    pub fn mat(&self, n: usize) -> MatrixR {
        self.mats
            .get(n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.ring(), self.target.rank(n), self.source.rank(n)))
    }

    /// `d^T_n f_n = f_{n-1} d^S_n` for every `n ≥ 1`.
    pub fn check_commutes(&self) -> Result<()> {
        let top = self.source.len().max(self.target.len());
        for n in 1..top {
            let lhs = self.target.differential(n).matmul(&self.mat(n))?;
            let rhs = self.mat(n - 1).matmul(&self.source.differential(n))?;
            if lhs != rhs {
                return Err(Error::InvalidMap {
                    degree: n,
                    reason: "map does not commute with the differentials".into(),
                });
            }
        }
        Ok(())
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &ChainMap) -> Result<ChainMap> {
        if g.target != self.source {
            return Err(Error::shape(
                "compose: target of the inner map is not the source of the outer",
            ));
        }
        let mats = (0..g.source.len())
            .map(|n| self.mat(n).matmul(&g.mat(n)))
            .collect::<Result<_>>()?;
        Ok(ChainMap {
            source: g.source.clone(),
            target: self.target.clone(),
            mats,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(|m| m.is_zero())
    }
}

// d_n with the convention that d_0 is the 0 × X_0 map.
fn d_or_zero(x: &ChainComplex, n: usize) -> MatrixR {
    if n == 0 {
        Matrix::zeros(x.ring(), 0, x.rank(0))
    } else {
        x.differential(n)
    }
}

/// `Σ^i X`: degrees move up by `i`, differentials pick up `(-1)^i`.
pub fn shift(x: &ChainComplex, i: usize) -> ChainComplex {
    if x.is_empty() {
        return x.clone();
    }
    let ring = x.ring();
    let mut ranks = vec![0; i];
    ranks.extend_from_slice(x.ranks());
    let sign = ring.sign(i);
    let mut diffs: Vec<MatrixR> = (1..=i)
        .map(|n| Matrix::zeros(ring, 0, if n == i { x.rank(0) } else { 0 }))
        .collect();
    diffs.extend(x.diffs().iter().map(|d| d.scale(sign)));
    ChainComplex::from_parts_unchecked(ring, ranks, diffs).expect("shift preserves shapes")
}

/// Inverse of [`shift`]; fails unless degrees below `i` are zero.
pub fn desuspend(x: &ChainComplex, i: usize) -> Result<ChainComplex> {
    if x.ranks().iter().take(i).any(|&r| r > 0) {
        return Err(Error::domain(format!(
            "cannot desuspend by {i}: nonzero module below degree {i}"
        )));
    }
    if x.len() <= i {
        return Ok(ChainComplex::empty(x.ring()));
    }
    let sign = x.ring().sign(i);
    let ranks = x.ranks()[i..].to_vec();
    let diffs = x.diffs()[i..].iter().map(|d| d.scale(sign)).collect();
    ChainComplex::from_parts_unchecked(x.ring(), ranks, diffs)
}

/// `X ⊕ Y` with block-diagonal differentials, `X` first.
pub fn direct_sum(x: &ChainComplex, y: &ChainComplex) -> Result<ChainComplex> {
    x.ring().ensure_same(&y.ring())?;
    let len = x.len().max(y.len());
    let ranks = (0..len).map(|n| x.rank(n) + y.rank(n)).collect();
    let diffs = (1..len)
        .map(|n| x.differential(n).block_diag(&y.differential(n)))
        .collect();
    ChainComplex::from_parts_unchecked(x.ring(), ranks, diffs)
}

/// Direct sum of many complexes, left to right.
pub fn direct_sum_all<'a>(ring: RingSpec, parts: impl IntoIterator<Item = &'a ChainComplex>) -> Result<ChainComplex> {
    parts
        .into_iter()
        .try_fold(ChainComplex::empty(ring), |acc, c| direct_sum(&acc, c))
}

/// Mapping cone: `C(f)_n = Y_n ⊕ X_{n-1}`, `d(y, x) = (d y + f x, -d x)`.
pub fn cone(f: &ChainMap) -> Result<ChainComplex> {
    f.check_commutes()?;
    let (x, y) = (f.source(), f.target());
    let ring = f.ring();
    let len = y.len().max(x.len() + 1);
    let rank = |n: usize| y.rank(n) + if n == 0 { 0 } else { x.rank(n - 1) };
    let ranks: Vec<usize> = (0..len).map(rank).collect();
    let diffs = (1..len)
        .map(|n| {
            let mut d = Matrix::zeros(ring, ranks[n - 1], ranks[n]);
            d.set_block(0, 0, &y.differential(n));
            d.set_block(0, y.rank(n), &f.mat(n - 1));
            d.set_block(y.rank(n - 1), y.rank(n), &d_or_zero(x, n - 1).neg());
            d
        })
        .collect();
    ChainComplex::new(ring, ranks, diffs)
}

/// The canonical inclusion `Y → C(f)`.
pub fn cone_inclusion(f: &ChainMap) -> Result<ChainMap> {
    let c = cone(f)?;
    let y = f.target();
    let mats = (0..y.len())
        .map(|n| {
            let mut m = Matrix::zeros(f.ring(), c.rank(n), y.rank(n));
            m.set_block(0, 0, &Matrix::identity(f.ring(), y.rank(n)));
            m
        })
        .collect();
    ChainMap::new(y.clone(), c, mats)
}

/// Cokernel of [`cone_inclusion`]: the quotient complex on the `X_{n-1}`
/// coordinates. Isomorphic (in fact equal) to `Σ¹X`.
pub fn cone_cokernel(f: &ChainMap) -> Result<ChainComplex> {
    let c = cone(f)?;
    let y = f.target();
    let x = f.source();
    let len = c.len();
    let ranks: Vec<usize> = (0..len).map(|n| if n == 0 { 0 } else { x.rank(n - 1) }).collect();
    let diffs = (1..len)
        .map(|n| {
            let d = c.differential(n);
            let rows: Vec<usize> = (y.rank(n - 1)..d.rows()).collect();
            let cols: Vec<usize> = (y.rank(n)..d.cols()).collect();
            d.submatrix(&rows, &cols)
        })
        .collect();
    ChainComplex::new(f.ring(), ranks, diffs)
}

/// `(X ⊗ Y)_n = ⊕_{i+j=n} X_i ⊗ Y_j`, `d(x⊗y) = dx⊗y + (-1)^i x⊗dy`.
pub fn tensor(x: &ChainComplex, y: &ChainComplex) -> Result<ChainComplex> {
    x.ring().ensure_same(&y.ring())?;
    let ring = x.ring();
    if x.is_empty() || y.is_empty() {
        return Ok(ChainComplex::empty(ring));
    }
    let len = x.len() + y.len() - 1;
    // offsets[n][i] = start of the X_i ⊗ Y_{n-i} block in degree n
    let mut offsets = vec![vec![0usize; x.len() + 1]; len];
    let mut ranks = vec![0usize; len];
    for (n, row) in offsets.iter_mut().enumerate() {
        let mut acc = 0;
        for (i, slot) in row.iter_mut().take(x.len()).enumerate() {
            *slot = acc;
            if n >= i {
                acc += x.rank(i) * y.rank(n - i);
            }
        }
        row[x.len()] = acc;
        ranks[n] = acc;
    }
    let diffs = (1..len)
        .map(|n| {
            let mut d = Matrix::zeros(ring, ranks[n - 1], ranks[n]);
            for i in 0..x.len().min(n + 1) {
                let j = n - i;
                if x.rank(i) * y.rank(j) == 0 {
                    continue;
                }
                let col = offsets[n][i];
                if i >= 1 {
                    let block = x.differential(i).kronecker(&Matrix::identity(ring, y.rank(j)));
                    d.set_block(offsets[n - 1][i - 1], col, &block);
                }
                if j >= 1 {
                    let block = Matrix::identity(ring, x.rank(i))
                        .kronecker(&y.differential(j))
                        .scale(ring.sign(i));
                    d.set_block(offsets[n - 1][i], col, &block);
                }
            }
            d
        })
        .collect();
    ChainComplex::new(ring, ranks, diffs)
}

/// The hom complex `Hom(X, Y)`.
///
/// Degree `n ≥ 1` is `⊕_i hom(X_i, Y_{i+n})` with differential
/// `{d f_i + (-1)^n f_{i-1} d}_i`. Degree 0 is the module of chain maps, which
/// need not be free. `upper` always holds degrees `≥ 1` (with a zero module in
/// degree 0); `full` holds the whole complex when degree 0 is free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomComplex {
    pub upper: ChainComplex,
    pub degree0: ModuleDescriptor,
    /// Isomorphism class of the image of `Hom_1 → Hom_0`.
    pub boundary_image: ModuleDescriptor,
    pub full: Option<ChainComplex>,
}

impl HomComplex {
    /// `log_p` of the cardinality of the image of `Hom_1 → Hom_0`.
    pub fn boundary_image_log_cardinality(&self) -> usize {
        self.boundary_image.log_cardinality()
    }
}

struct HomLayout {
    /// offsets[i] = start of hom(X_i, Y_{i+n}) in the vectorization
    offsets: Vec<usize>,
    rank: usize,
}

fn hom_layout(x: &ChainComplex, y: &ChainComplex, n: usize) -> HomLayout {
    let mut offsets = Vec::with_capacity(x.len());
    let mut acc = 0;
    for i in 0..x.len() {
        offsets.push(acc);
        acc += x.rank(i) * y.rank(i + n);
    }
    HomLayout { offsets, rank: acc }
}

/// Matrix of `f ↦ {a·dY f_i + b·f_{i-1} dX_i}_i` from degree `n` to `n - 1`
/// layouts, where the sign pair is chosen by `signs(i)`.
fn hom_boundary(x: &ChainComplex, y: &ChainComplex, n: usize, signs: impl Fn(usize) -> (i64, i64)) -> MatrixR {
    let ring = x.ring();
    let src = hom_layout(x, y, n);
    let dst = hom_layout(x, y, n - 1);
    let as_elem = |s: i64| if s >= 0 { ring.one() } else { ring.neg(ring.one()) };
    let mut d = Matrix::zeros(ring, dst.rank, src.rank);
    for i in 0..x.len() {
        let (s_post, s_pre) = signs(i);
        let rows = dst.offsets[i];
        // dY_{i+n} ∘ f_i : row-major vec(dY f) = (dY ⊗ I) vec(f)
        if x.rank(i) * y.rank(i + n) > 0 && y.rank(i + n - 1) > 0 {
            let block = y
                .differential(i + n)
                .kronecker(&Matrix::identity(ring, x.rank(i)))
                .scale(as_elem(s_post));
            d.set_block(rows, src.offsets[i], &block);
        }
        // f_{i-1} ∘ dX_i : vec(f dX) = (I ⊗ dXᵀ) vec(f)
        if i >= 1 && x.rank(i - 1) * y.rank(i - 1 + n) > 0 && x.rank(i) > 0 {
            let block = Matrix::identity(ring, y.rank(i - 1 + n))
                .kronecker(&x.differential(i).transpose())
                .scale(as_elem(s_pre));
            d.set_block(rows, src.offsets[i - 1], &block);
        }
    }
    d
}

/// See [`HomComplex`].
///
/// The map into degree 0 is `f ↦ {(-1)^i (d f_i − f_{i-1} d)}_i`: the degree
/// ≥ 1 formula with its sign convention is conjugate to the usual one by
/// `f_i ↦ (-1)^i f_i`, and this twist is what lands boundaries in the chain
/// maps. With `X = S⁰` the twist is trivial and `Hom(S⁰, X) = X` on the nose.
pub fn hom_complex(x: &ChainComplex, y: &ChainComplex) -> Result<HomComplex> {
    x.ring().ensure_same(&y.ring())?;
    let ring = x.ring();
    let top = y.len().saturating_sub(1);
    let upper_ranks: Vec<usize> = (0..=top)
        .map(|n| if n == 0 { 0 } else { hom_layout(x, y, n).rank })
        .collect();
    let mut upper_diffs: Vec<MatrixR> = Vec::new();
    for n in 1..=top {
        if n == 1 {
            upper_diffs.push(Matrix::zeros(ring, 0, upper_ranks[1]));
        } else {
            let sign = if n % 2 == 0 { 1 } else { -1 };
            upper_diffs.push(hom_boundary(x, y, n, |_| (1, sign)));
        }
    }
    let upper = ChainComplex::new(ring, upper_ranks.clone(), upper_diffs.clone())?;

    // Chain maps are the kernel of g ↦ {dY_i g_i − g_{i-1} dX_i}_{i ≥ 1}.
    let g_layout = hom_layout(x, y, 0);
    let constraint = chain_map_constraint(x, y);
    let smith = LocalSmithForm::compute(&constraint);
    let degree0 = ModuleDescriptor::new(g_layout.rank - smith.units - smith.r_entries, smith.r_entries);

    let to_degree0 = if top >= 1 {
        hom_boundary(x, y, 1, |i| if i % 2 == 0 { (1, -1) } else { (-1, 1) })
    } else {
        Matrix::zeros(ring, g_layout.rank, 0)
    };
    let image = LocalSmithForm::compute(&to_degree0);
    let boundary_image = ModuleDescriptor::new(image.units, image.r_entries);

    let full = if degree0.residue == 0 {
        let keep: Vec<usize> = smith.free_kernel_columns().collect();
        let all_cols: Vec<usize> = (0..to_degree0.cols()).collect();
        let coords = smith.q_inv.matmul(&to_degree0)?;
        let outside: Vec<usize> = (0..smith.units + smith.r_entries).collect();
        debug_assert!(coords.submatrix(&outside, &all_cols).is_zero());
        let d1 = coords.submatrix(&keep, &all_cols);
        let mut ranks = upper_ranks;
        if ranks.is_empty() {
            ranks.push(keep.len());
        } else {
            ranks[0] = keep.len();
        }
        let mut diffs = upper_diffs;
        if !diffs.is_empty() {
            diffs[0] = d1;
        }
        Some(ChainComplex::new(ring, ranks, diffs)?)
    } else {
        None
    };

    Ok(HomComplex {
        upper,
        degree0,
        boundary_image,
        full,
    })
}

/// Matrix of `g ↦ {dY_i g_i − g_{i-1} dX_i}_{i ≥ 1}` on `⊕_i hom(X_i, Y_i)`.
pub fn chain_map_constraint(x: &ChainComplex, y: &ChainComplex) -> MatrixR {
    let ring = x.ring();
    let len = x.len().max(y.len());
    let src = hom_layout(x, y, 0);
    let mut row_offsets = Vec::new();
    let mut rows = 0;
    for i in 1..len {
        row_offsets.push(rows);
        rows += y.rank(i - 1) * x.rank(i);
    }
    let mut m = Matrix::zeros(ring, rows, src.rank);
    for i in 1..len {
        let r0 = row_offsets[i - 1];
        if y.rank(i - 1) * x.rank(i) == 0 {
            continue;
        }
        if i < x.len() && x.rank(i) * y.rank(i) > 0 {
            let block = y.differential(i).kronecker(&Matrix::identity(ring, x.rank(i)));
            m.set_block(r0, src.offsets[i], &block);
        }
        if x.rank(i - 1) * y.rank(i - 1) > 0 {
            let block = Matrix::identity(ring, y.rank(i - 1))
                .kronecker(&x.differential(i).transpose())
                .neg();
            m.set_block(r0, src.offsets[i - 1], &block);
        }
    }
    m
}
