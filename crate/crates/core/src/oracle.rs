//! Definition-level checks by brute force over the finite ring.
//!
//! Cellularity with respect to `A` (when `H_0(A) ≠ 0`) is equivalent to the
//! existence of a map from a sum of copies of `A` that is onto on `H_0`. A map
//! out of a direct sum is a family of maps out of the summands, so it suffices
//! to check that the `H_0` images of all single maps `A → Y` jointly generate
//! `H_0(Y)`. Everything here enumerates elements and never touches the
//! decomposition engine, except where a desuspension needs a minimal model.

use std::collections::HashSet;

use serde::Serialize;

use crate::complex::{all_vectors, ChainComplex};
use crate::error::{Error, Result};
use crate::lattice::{is_cellular, min_pair};
use crate::linalg::Matrix;
use crate::ops::{desuspend, ChainMap};
use crate::random;
use crate::reduce::minimize;
use crate::ring::{CoeffRing, RingElement, RingSpec};
use crate::MatrixR;

/// Upper bound on the unpruned candidate count of an enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_search_space: u128,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard {
            max_search_space: 1 << 20,
        }
    }
}

impl SizeGuard {
    pub fn new(max_search_space: u128) -> Self {
        SizeGuard { max_search_space }
    }

    fn check(&self, required: u128) -> Result<()> {
        if required > self.max_search_space {
            return Err(Error::Guard {
                required,
                budget: self.max_search_space,
            });
        }
        Ok(())
    }
}

fn pow_saturating(base: u64, exp: usize) -> u128 {
    (base as u128).saturating_pow(exp.min(u32::MAX as usize) as u32)
}

/// `|R|^(Σ_n X_n·Y_n)`: the number of degreewise matrix tuples.
pub fn candidate_count(x: &ChainComplex, y: &ChainComplex) -> u128 {
    let entries: usize = (0..x.len()).map(|n| x.rank(n) * y.rank(n)).sum();
    pow_saturating(x.ring().order(), entries)
}

fn all_matrices(spec: RingSpec, rows: usize, cols: usize) -> impl Iterator<Item = MatrixR> {
    all_vectors(spec, rows * cols).map(move |v| Matrix::from_vec(spec, rows, cols, v).unwrap())
}

/// Visit every chain map `x → y`, choosing `f_0`, then each `f_n` compatible
/// with `f_{n-1}`.
pub fn for_each_chain_map(
    x: &ChainComplex,
    y: &ChainComplex,
    guard: SizeGuard,
    mut visit: impl FnMut(&[MatrixR]),
) -> Result<()> {
    x.ring().ensure_same(&y.ring())?;
    guard.check(candidate_count(x, y))?;
    let spec = x.ring();
    let len = x.len();
    let candidates: Vec<Vec<MatrixR>> = (0..len)
        .map(|n| all_matrices(spec, y.rank(n), x.rank(n)).collect())
        .collect();
    let dy: Vec<MatrixR> = (1..len).map(|n| y.differential(n)).collect();
    let dx: Vec<MatrixR> = (1..len).map(|n| x.differential(n)).collect();

    fn extend(
        n: usize,
        stack: &mut Vec<MatrixR>,
        candidates: &[Vec<MatrixR>],
        dy: &[MatrixR],
        dx: &[MatrixR],
        visit: &mut dyn FnMut(&[MatrixR]),
    ) {
        if n == candidates.len() {
            visit(stack);
            return;
        }
        let rhs = (n >= 1).then(|| stack[n - 1].matmul(&dx[n - 1]).unwrap());
        for f in &candidates[n] {
            if let Some(rhs) = &rhs {
                if dy[n - 1].matmul(f).unwrap() != *rhs {
                    continue;
                }
            }
            stack.push(f.clone());
            extend(n + 1, stack, candidates, dy, dx, visit);
            stack.pop();
        }
    }

    let mut stack = Vec::with_capacity(len);
    extend(0, &mut stack, &candidates, &dy, &dx, &mut visit);
    Ok(())
}

/// Every chain map `x → y`.
pub fn enumerate_chain_maps(x: &ChainComplex, y: &ChainComplex, guard: SizeGuard) -> Result<Vec<ChainMap>> {
    let mut out = Vec::new();
    for_each_chain_map(x, y, guard, |mats| {
        out.push(ChainMap::from_parts_trusted(x.clone(), y.clone(), mats.to_vec()));
    })?;
    Ok(out)
}

/// Number of chain maps `x → y`, without materializing them.
pub fn count_chain_maps(x: &ChainComplex, y: &ChainComplex, guard: SizeGuard) -> Result<u64> {
    let mut count = 0u64;
    for_each_chain_map(x, y, guard, |_| count += 1)?;
    Ok(count)
}

/// Size of the submodule of `R^dim` generated by `gens`, by closing `{0}`
/// under `s ↦ s + c·g`.
fn span_size(spec: RingSpec, dim: usize, gens: &HashSet<Vec<RingElement>>) -> usize {
    let mut span: HashSet<Vec<RingElement>> = HashSet::new();
    span.insert(vec![spec.zero(); dim]);
    for g in gens {
        if span.contains(g) {
            continue;
        }
        let mut next = HashSet::with_capacity(span.len() * 2);
        for s in &span {
            for c in spec.elements() {
                let v: Vec<RingElement> = s.iter().zip(g).map(|(&a, &b)| spec.mul_add(a, c, b)).collect();
                next.insert(v);
            }
        }
        span = next;
    }
    span.len()
}

fn columns(m: &MatrixR) -> impl Iterator<Item = Vec<RingElement>> + '_ {
    (0..m.cols()).map(move |j| (0..m.rows()).map(|i| m[(i, j)]).collect())
}

/// `H_0(x) ≠ 0`, elementwise: the columns of `d_1` do not span `x_0`.
pub fn h0_nonzero(x: &ChainComplex, guard: SizeGuard) -> Result<bool> {
    let spec = x.ring();
    guard.check(pow_saturating(spec.order(), x.rank(0)))?;
    if x.rank(0) == 0 {
        return Ok(false);
    }
    let gens: HashSet<_> = columns(&x.differential(1)).collect();
    Ok((span_size(spec, x.rank(0), &gens) as u128) < pow_saturating(spec.order(), x.rank(0)))
}

/// Whether the `H_0` images of all chain maps `a → y` generate `H_0(y)`.
pub fn exists_h0_epi(a: &ChainComplex, y: &ChainComplex, guard: SizeGuard) -> Result<bool> {
    a.ring().ensure_same(&y.ring())?;
    if !h0_nonzero(a, guard)? {
        return Err(Error::domain(
            "H_0 of the generator vanishes; desuspend it (and the target) first",
        ));
    }
    let spec = y.ring();
    guard.check(pow_saturating(spec.order(), y.rank(0)))?;
    // H_0(y) = y_0 / im d_1; generate with the boundaries plus every f_0(a_0).
    let mut gens: HashSet<Vec<RingElement>> = columns(&y.differential(1)).collect();
    for_each_chain_map(a, y, guard, |mats| {
        gens.extend(columns(&mats[0]));
    })?;
    Ok(span_size(spec, y.rank(0), &gens) as u128 == pow_saturating(spec.order(), y.rank(0)))
}

/// How the oracle side of a cross-check was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    /// Chain-map enumeration on the given complexes.
    Enumeration,
    /// Enumeration after desuspending both minimal models by `i_A`.
    DesuspendedEnumeration,
    /// `X` starts below `A` after desuspension, so no map can hit `H_0`.
    BottomDegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossCheck {
    pub lattice_verdict: bool,
    pub oracle_verdict: bool,
    pub agree: bool,
    pub method: OracleMethod,
    pub shift: usize,
}

/// Compare `is_cellular(x, a)` against the `H_0`-epimorphism criterion.
pub fn cross_check(x: &ChainComplex, a: &ChainComplex, guard: SizeGuard) -> Result<CrossCheck> {
    x.ring().ensure_same(&a.ring())?;
    let pa = min_pair(a)?.ok_or_else(|| Error::domain("generator is contractible"))?;
    let lattice = is_cellular(x, a)?.holds;
    let shift = pa.i;
    let (oracle, method) = if shift == 0 {
        (exists_h0_epi(a, x, guard)?, OracleMethod::Enumeration)
    } else {
        let mx = minimize(x)?.minimal;
        let ma = minimize(a)?.minimal;
        match mx.bottom_degree() {
            Some(b) if b < shift => (false, OracleMethod::BottomDegree),
            _ => {
                let (dx, da) = (desuspend(&mx, shift)?, desuspend(&ma, shift)?);
                (exists_h0_epi(&da, &dx, guard)?, OracleMethod::DesuspendedEnumeration)
            }
        }
    };
    Ok(CrossCheck {
        lattice_verdict: lattice,
        oracle_verdict: oracle,
        agree: lattice == oracle,
        method,
        shift,
    })
}

/// One line of an agreement report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AgreementEntry {
    pub pair: [String; 2],
    pub lattice_verdict: bool,
    pub oracle_verdict: bool,
    pub agree: bool,
    pub seed: Option<u64>,
}

impl AgreementEntry {
    pub fn new(x: impl Into<String>, a: impl Into<String>, check: &CrossCheck, seed: Option<u64>) -> Self {
        AgreementEntry {
            pair: [x.into(), a.into()],
            lattice_verdict: check.lattice_verdict,
            oracle_verdict: check.oracle_verdict,
            agree: check.agree,
            seed,
        }
    }
}

/// `0 → X → Y → Z → 0` with `Y_n = X_n ⊕ Z_n`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub y: ChainComplex,
    pub inclusion: ChainMap,
    pub projection: ChainMap,
    /// Connecting blocks `h_n: Z_n → X_{n-1}`, `h[n-1]` for `n ≥ 1`.
    pub connecting: Vec<MatrixR>,
    pub seed: u64,
}

/// Build `Y` with `d^Y_n = [[d^X_n, h_n], [0, d^Z_n]]`. Fails if `d∘d ≠ 0`.
pub fn extension_with(x: &ChainComplex, z: &ChainComplex, connecting: Vec<MatrixR>) -> Result<Extension> {
    x.ring().ensure_same(&z.ring())?;
    let spec = x.ring();
    let len = x.len().max(z.len());
    if connecting.len() != len.saturating_sub(1) {
        return Err(Error::shape(format!(
            "need {} connecting blocks, got {}",
            len.saturating_sub(1),
            connecting.len()
        )));
    }
    let ranks: Vec<usize> = (0..len).map(|n| x.rank(n) + z.rank(n)).collect();
    let mut diffs = Vec::with_capacity(len.saturating_sub(1));
    for n in 1..len {
        let h = &connecting[n - 1];
        if h.shape() != (x.rank(n - 1), z.rank(n)) {
            return Err(Error::shape(format!("h_{n} has the wrong shape")));
        }
        let mut d = x.differential(n).block_diag(&z.differential(n));
        d.set_block(0, x.rank(n), h);
        diffs.push(d);
    }
    let y = ChainComplex::new(spec, ranks, diffs)?;
    let inclusion_mats = (0..x.len())
        .map(|n| {
            let mut m = Matrix::zeros(spec, y.rank(n), x.rank(n));
            m.set_block(0, 0, &Matrix::identity(spec, x.rank(n)));
            m
        })
        .collect();
    let projection_mats = (0..y.len())
        .map(|n| {
            let mut m = Matrix::zeros(spec, z.rank(n), y.rank(n));
            m.set_block(0, x.rank(n), &Matrix::identity(spec, z.rank(n)));
            m
        })
        .collect();
    Ok(Extension {
        inclusion: ChainMap::new(x.clone(), y.clone(), inclusion_mats)?,
        projection: ChainMap::new(y.clone(), z.clone(), projection_mats)?,
        y,
        connecting,
        seed: 0,
    })
}

/// Random extension of `Z` by `X`: rejection-sample the connecting blocks,
/// falling back to `h = 0` (the split extension).
pub fn random_extension(x: &ChainComplex, z: &ChainComplex, seed: u64) -> Result<Extension> {
    x.ring().ensure_same(&z.ring())?;
    let spec = x.ring();
    let len = x.len().max(z.len());
    let mut rng = random::rng(seed);
    const ATTEMPTS: usize = 64;
    let zero_blocks = || -> Vec<MatrixR> {
        (1..len)
            .map(|n| Matrix::zeros(spec, x.rank(n - 1), z.rank(n)))
            .collect()
    };
    for _ in 0..ATTEMPTS {
        use rand::Rng;
        let blocks: Vec<MatrixR> = match rng.gen_range(0..8) {
            0 => zero_blocks(),
            1..=4 => (1..len)
                .map(|n| random::ideal_matrix(spec, x.rank(n - 1), z.rank(n), &mut rng))
                .collect(),
            _ => (1..len)
                .map(|n| random::matrix(spec, x.rank(n - 1), z.rank(n), &mut rng))
                .collect(),
        };
        if let Ok(mut ext) = extension_with(x, z, blocks) {
            ext.seed = seed;
            return Ok(ext);
        }
    }
    let mut ext = extension_with(x, z, zero_blocks())?;
    ext.seed = seed;
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::direct_sum;

    fn z4() -> RingSpec {
        RingSpec::zpsq(2).unwrap()
    }

    #[test]
    fn maps_between_spheres() {
        for spec in [z4(), RingSpec::zpsq(3).unwrap(), RingSpec::dual(3).unwrap()] {
            let s0 = ChainComplex::sphere(spec, 0);
            let maps = enumerate_chain_maps(&s0, &s0, SizeGuard::default()).unwrap();
            assert_eq!(maps.len() as u64, spec.order());
        }
    }

    #[test]
    fn maps_e01_to_s0_land_in_m() {
        let spec = z4();
        let maps = enumerate_chain_maps(
            &ChainComplex::interval(spec, 0, 1),
            &ChainComplex::sphere(spec, 0),
            SizeGuard::default(),
        )
        .unwrap();
        assert_eq!(maps.len(), 2);
        assert!(maps.iter().all(|f| !spec.is_unit(f.mats()[0][(0, 0)])));
        for f in &maps {
            f.check_commutes().unwrap();
        }
    }

    #[test]
    fn maps_from_empty() {
        let spec = z4();
        let maps = enumerate_chain_maps(
            &ChainComplex::empty(spec),
            &ChainComplex::interval(spec, 0, 2),
            SizeGuard::default(),
        )
        .unwrap();
        assert_eq!(maps.len(), 1);
        assert!(maps[0].mats().is_empty());
    }

    #[test]
    fn guard_refuses() {
        let spec = z4();
        let x = ChainComplex::new(spec, vec![4], vec![]).unwrap();
        let r = enumerate_chain_maps(&x, &x, SizeGuard::new(1000));
        assert!(matches!(
            r,
            Err(Error::Guard {
                required: 4294967296,
                budget: 1000
            })
        ));
    }

    #[test]
    fn h0_epi_examples() {
        let spec = z4();
        let g = SizeGuard::default();
        let e = |i, j| ChainComplex::interval(spec, i, j);
        assert!(exists_h0_epi(&e(0, 0), &e(0, 1), g).unwrap());
        assert!(!exists_h0_epi(&e(0, 1), &e(0, 0), g).unwrap());
        assert!(exists_h0_epi(&e(0, 2), &ChainComplex::disk(spec, 1).unwrap(), g).unwrap());
        assert!(matches!(exists_h0_epi(&e(1, 0), &e(0, 0), g), Err(Error::Domain(_))));
    }

    #[test]
    fn cross_check_examples() {
        let spec = z4();
        let g = SizeGuard::default();
        let e = |i, j| ChainComplex::interval(spec, i, j);
        let c = cross_check(&e(0, 2), &e(0, 1), g).unwrap();
        assert!(c.agree && c.lattice_verdict && c.oracle_verdict);
        let c = cross_check(&e(0, 0), &e(0, 1), g).unwrap();
        assert!(c.agree && !c.lattice_verdict);
        let c = cross_check(&ChainComplex::disk(spec, 1).unwrap(), &e(0, 0), g).unwrap();
        assert!(c.agree && c.lattice_verdict);
        // shifted generator
        let c = cross_check(&e(2, 0), &e(1, 1), g).unwrap();
        assert_eq!(c.method, OracleMethod::DesuspendedEnumeration);
        assert!(c.agree && c.lattice_verdict);
        let c = cross_check(&e(0, 3), &e(1, 0), g).unwrap();
        assert_eq!(c.method, OracleMethod::BottomDegree);
        assert!(c.agree && !c.lattice_verdict);
    }

    #[test]
    fn explicit_extension() {
        let spec = z4();
        let h = vec![Matrix::from_vec(spec, 1, 1, vec![spec.r()]).unwrap()];
        let ext = extension_with(&ChainComplex::sphere(spec, 0), &ChainComplex::sphere(spec, 1), h).unwrap();
        assert_eq!(ext.y, ChainComplex::interval(spec, 0, 1));
        assert!(ext.projection.compose(&ext.inclusion).unwrap().is_zero());
    }

    #[test]
    fn split_extension_is_sum() {
        let spec = RingSpec::dual(3).unwrap();
        let x = ChainComplex::interval(spec, 0, 2);
        let z = ChainComplex::sphere(spec, 1);
        let blocks = vec![Matrix::zeros(spec, 1, 1), Matrix::zeros(spec, 1, 0)];
        let ext = extension_with(&x, &z, blocks).unwrap();
        assert_eq!(ext.y, direct_sum(&x, &z).unwrap());
    }

    #[test]
    fn random_extensions_validate() {
        let spec = z4();
        let mut g = random::rng(5);
        for seed in 0..30 {
            let x = random::complex_with_disks(spec, 2, 2, 1, &mut g);
            let z = random::complex_with_disks(spec, 2, 2, 1, &mut g);
            let ext = random_extension(&x, &z, seed).unwrap();
            ext.y.validate().unwrap();
            assert_eq!(ext.seed, seed);
        }
    }
}
