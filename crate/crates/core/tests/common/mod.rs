//! Seeded random small codes shared by the property and acceptance tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use mccrepair::codes::{CartesianSet, ExponentSet, MccCode};
use mccrepair::field::{FieldTower, Level};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SMALL_TOWERS: [(u64, usize, usize); 7] =
    [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 1, 4), (2, 2, 2), (5, 1, 1), (7, 1, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Generic,
    Car,
    Acar1,
    Acar2,
}

pub const KINDS: [Kind; 4] = [Kind::Generic, Kind::Car, Kind::Acar1, Kind::Acar2];

pub fn tower(i: usize) -> Arc<FieldTower> {
    let (p, e, t) = SMALL_TOWERS[i % SMALL_TOWERS.len()];
    Arc::new(FieldTower::new(p, e, t).unwrap())
}

/// Random subsets of `K` with the given sizes.
pub fn random_set<R: Rng>(tower: &FieldTower, sizes: &[usize], rng: &mut R) -> CartesianSet {
    let all: Vec<_> = tower.elements(Level::Top).collect();
    let subsets = sizes.iter().map(|&n| all.choose_multiple(rng, n).copied().collect()).collect();
    CartesianSet::new(subsets).unwrap()
}

/// Down-closure of a few random generators inside the box.
pub fn random_decreasing<R: Rng>(sizes: &[usize], rng: &mut R) -> ExponentSet {
    let generators: Vec<Vec<usize>> =
        (0..rng.gen_range(1..=3)).map(|_| sizes.iter().map(|&n| rng.gen_range(0..n)).collect()).collect();
    let points = ExponentSet::full_box(sizes)
        .iter()
        .filter(|a| generators.iter().any(|g| a.iter().zip(g).all(|(x, y)| x <= y)))
        .cloned()
        .collect::<BTreeSet<_>>();
    ExponentSet::new(sizes.len(), points).unwrap()
}

/// A random code of the given kind with length at most `max_len`.
pub fn random_code(kind: Kind, seed: u64, max_len: usize) -> MccCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let tower = tower(rng.gen_range(0..SMALL_TOWERS.len()));
        let qt = tower.order(Level::Top) as usize;
        let edge = tower.q().pow(tower.t() as u32 - 1) as usize;
        let m = rng.gen_range(1..=3);
        let lo = if matches!(kind, Kind::Acar1 | Kind::Acar2) { edge.max(1) } else { 1 };
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(lo..=qt)).collect();
        if sizes.iter().product::<usize>() > max_len {
            continue;
        }
        let mut sorted = sizes.clone();
        sorted.sort();
        let set = random_set(&tower, &sizes, &mut rng);
        let built = match kind {
            Kind::Generic => MccCode::new(tower, set, random_decreasing(&sorted, &mut rng)),
            Kind::Car => {
                let max: usize = sorted.iter().map(|n| n - 1).sum();
                MccCode::car(tower, set, rng.gen_range(0..=max))
            }
            Kind::Acar1 | Kind::Acar2 => {
                let k = sorted.iter().map(|&n| rng.gen_range(0..=n - edge)).collect();
                if kind == Kind::Acar1 {
                    MccCode::acar1(tower, set, k)
                } else {
                    MccCode::acar2(tower, set, k)
                }
            }
        };
        if let Ok(code) = built {
            if code.dimension() > 0 {
                return code;
            }
        }
    }
}
