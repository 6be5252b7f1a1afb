//! Seeded random complexes, maps and basis changes for tests and the CLI.

use rand::Rng;

use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ops::{direct_sum, ChainMap};
use crate::ring::{CoeffRing, RingElement, RingSpec};
use crate::MatrixR;

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as SeededRng;

pub fn rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

pub fn element<R: Rng>(spec: RingSpec, rng: &mut R) -> RingElement {
    spec.from_index(rng.gen_range(0..spec.order()))
}

pub fn ideal_element<R: Rng>(spec: RingSpec, rng: &mut R) -> RingElement {
    spec.times_r(spec.residue_field().element(rng.gen_range(0..spec.p())).unwrap())
}

pub fn matrix<R: Rng>(spec: RingSpec, rows: usize, cols: usize, rng: &mut R) -> MatrixR {
    Matrix::from_fn(spec, rows, cols, |_, _| element(spec, rng))
}

pub fn ideal_matrix<R: Rng>(spec: RingSpec, rows: usize, cols: usize, rng: &mut R) -> MatrixR {
    Matrix::from_fn(spec, rows, cols, |_, _| ideal_element(spec, rng))
}

/// Random invertible matrix: a product of random elementary operations,
/// together with its inverse.
pub fn invertible<R: Rng>(spec: RingSpec, n: usize, rng: &mut R) -> (MatrixR, MatrixR) {
    let mut m = Matrix::identity(spec, n);
    let mut inv = Matrix::identity(spec, n);
    if n == 0 {
        return (m, inv);
    }
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        match rng.gen_range(0..3) {
            0 if i != j => {
                let c = element(spec, rng);
                m.add_row_multiple(i, j, c);
                inv.add_col_multiple(j, i, spec.neg(c));
            }
            1 => {
                let u = loop {
                    let u = element(spec, rng);
                    if spec.is_unit(u) {
                        break u;
                    }
                };
                m.scale_row(i, u);
                inv.scale_col(i, spec.inverse(u).unwrap());
            }
            _ => {
                m.swap_rows(i, j);
                inv.swap_cols(i, j);
            }
        }
    }
    (m, inv)
}

/// Ranks uniform in `0..=max_rank` over degrees `0..=max_degree`, differential
/// entries uniform in `m`. Always valid and minimal.
pub fn minimal_complex<R: Rng>(spec: RingSpec, max_degree: usize, max_rank: usize, rng: &mut R) -> ChainComplex {
    let ranks: Vec<usize> = (0..=max_degree).map(|_| rng.gen_range(0..=max_rank)).collect();
    let diffs = (1..ranks.len())
        .map(|n| ideal_matrix(spec, ranks[n - 1], ranks[n], rng))
        .collect();
    ChainComplex::new(spec, ranks, diffs).expect("entries in m square to zero")
}

/// Like [`minimal_complex`] but with entries drawn from all of `R`, rejecting
/// until `d∘d = 0`. Gives up after `budget` attempts.
pub fn unrestricted_complex<R: Rng>(
    spec: RingSpec,
    max_degree: usize,
    max_rank: usize,
    budget: usize,
    rng: &mut R,
) -> Result<ChainComplex> {
    for _ in 0..budget {
        let ranks: Vec<usize> = (0..=max_degree).map(|_| rng.gen_range(0..=max_rank)).collect();
        let diffs = (1..ranks.len())
            .map(|n| matrix(spec, ranks[n - 1], ranks[n], rng))
            .collect();
        if let Ok(cx) = ChainComplex::new(spec, ranks, diffs) {
            return Ok(cx);
        }
    }
    Err(Error::domain(format!("no valid complex found in {budget} attempts")))
}

/// Conjugate every differential by random invertible basis changes.
pub fn scramble<R: Rng>(x: &ChainComplex, rng: &mut R) -> ChainComplex {
    let spec = x.ring();
    let changes: Vec<(MatrixR, MatrixR)> = x.ranks().iter().map(|&r| invertible(spec, r, rng)).collect();
    let diffs = (1..x.len())
        .map(|n| {
            x.differential(n)
                .apply_basis_change(&changes[n - 1].0, &changes[n].1)
                .expect("shapes")
        })
        .collect();
    ChainComplex::new(spec, x.ranks().to_vec(), diffs).expect("conjugation preserves d∘d = 0")
}

/// A random minimal complex plus up to `max_disks` disks, scrambled so that
/// the disks are no longer visible as blocks.
pub fn complex_with_disks<R: Rng>(
    spec: RingSpec,
    max_degree: usize,
    max_rank: usize,
    max_disks: usize,
    rng: &mut R,
) -> ChainComplex {
    let mut x = minimal_complex(spec, max_degree, max_rank, rng);
    if max_degree >= 1 {
        for _ in 0..rng.gen_range(0..=max_disks) {
            let n = rng.gen_range(1..=max_degree);
            x = direct_sum(&x, &ChainComplex::disk(spec, n).unwrap()).unwrap();
        }
    }
    scramble(&x, rng)
}

/// A random complex with the given rank vector (entries in `m`), scrambled.
pub fn complex_with_ranks<R: Rng>(spec: RingSpec, ranks: &[usize], rng: &mut R) -> ChainComplex {
    let diffs = (1..ranks.len())
        .map(|n| ideal_matrix(spec, ranks[n - 1], ranks[n], rng))
        .collect();
    let x = ChainComplex::new(spec, ranks.to_vec(), diffs).unwrap();
    scramble(&x, rng)
}

/// Random sum of disks.
pub fn disk_sum<R: Rng>(spec: RingSpec, max_degree: usize, max_disks: usize, rng: &mut R) -> ChainComplex {
    let mut x = ChainComplex::empty(spec);
    for _ in 0..rng.gen_range(1..=max_disks.max(1)) {
        let n = rng.gen_range(1..=max_degree.max(1));
        x = direct_sum(&x, &ChainComplex::disk(spec, n).unwrap()).unwrap();
    }
    scramble(&x, rng)
}

/// Random chain map `x → y` by rejection sampling, falling back to zero.
pub fn chain_map<R: Rng>(x: &ChainComplex, y: &ChainComplex, attempts: usize, rng: &mut R) -> ChainMap {
    let spec = x.ring();
    for _ in 0..attempts {
        let ideal = rng.gen_bool(0.5);
        let mats = (0..x.len())
            .map(|n| {
                if ideal {
                    ideal_matrix(spec, y.rank(n), x.rank(n), rng)
                } else {
                    matrix(spec, y.rank(n), x.rank(n), rng)
                }
            })
            .collect();
        if let Ok(f) = ChainMap::new(x.clone(), y.clone(), mats) {
            return f;
        }
    }
    ChainMap::zero(x, y).expect("same ring")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_produce_valid_complexes() {
        let spec = RingSpec::zpsq(3).unwrap();
        let mut g = rng(7);
        for _ in 0..50 {
            assert!(minimal_complex(spec, 4, 3, &mut g).is_minimal());
            let x = complex_with_disks(spec, 4, 3, 3, &mut g);
            x.validate().unwrap();
        }
    }

    #[test]
    fn invertible_pairs() {
        let spec = RingSpec::dual(5).unwrap();
        let mut g = rng(3);
        for n in 0..5 {
            let (m, inv) = invertible(spec, n, &mut g);
            assert_eq!(m.matmul(&inv).unwrap(), Matrix::identity(spec, n));
            assert!(m.is_invertible());
        }
    }

    #[test]
    fn seeded_is_reproducible() {
        let spec = RingSpec::zpsq(2).unwrap();
        let a = complex_with_disks(spec, 3, 3, 2, &mut rng(11));
        let b = complex_with_disks(spec, 3, 3, 2, &mut rng(11));
        assert_eq!(a, b);
    }
}
