#![allow(dead_code)]

use cellular::random::{self, SeededRng};
use cellular::{ChainComplex, RingSpec};
use proptest::prelude::*;

pub fn rings() -> Vec<RingSpec> {
    ["zpsq:2", "zpsq:3", "dual:2", "dual:3"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

pub fn p2_rings() -> Vec<RingSpec> {
    vec![RingSpec::zpsq(2).unwrap(), RingSpec::dual(2).unwrap()]
}

pub fn ring() -> impl Strategy<Value = RingSpec> {
    prop::sample::select(rings())
}

pub fn small_ring() -> impl Strategy<Value = RingSpec> {
    prop::sample::select(p2_rings())
}

/// Scrambled minimal complex plus disks, up to degree 3 and rank 3.
pub fn complex() -> impl Strategy<Value = ChainComplex> {
    (ring(), any::<u64>()).prop_map(|(spec, seed)| random::complex_with_disks(spec, 3, 3, 2, &mut random::rng(seed)))
}

/// Total rank ≤ 4 over a p = 2 ring, so brute force stays cheap.
pub fn tiny_complex() -> impl Strategy<Value = ChainComplex> {
    (small_ring(), any::<u64>()).prop_map(|(spec, seed)| tiny(spec, &mut random::rng(seed)))
}

pub fn tiny(spec: RingSpec, rng: &mut SeededRng) -> ChainComplex {
    use rand::Rng;
    loop {
        let x = random::complex_with_disks(spec, rng.gen_range(0..=3), 2, 1, rng);
        if x.total_rank() <= 4 {
            return x;
        }
    }
}

pub fn e(spec: RingSpec, i: usize, j: usize) -> ChainComplex {
    ChainComplex::interval(spec, i, j)
}
