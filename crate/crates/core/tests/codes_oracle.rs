//! Code constructions checked against enumeration and row reduction.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use mccrepair::codes::*;
use mccrepair::field::{FieldTower, Level};
use mccrepair::oracle;
use mccrepair::report;
use proptest::prelude::*;

fn prefix_set(tower: &FieldTower, sizes: &[usize]) -> CartesianSet {
    let subsets =
        sizes.iter().map(|&n| (0..n as u64).map(|i| tower.element(Level::Top, i).unwrap()).collect()).collect();
    CartesianSet::new(subsets).unwrap()
}

fn f17() -> Arc<FieldTower> {
    Arc::new(FieldTower::new(17, 1, 1).unwrap())
}

fn points(set: &ExponentSet) -> BTreeSet<Vec<usize>> {
    set.iter().cloned().collect()
}

fn grid(a: usize, b: usize) -> BTreeSet<Vec<usize>> {
    (0..a).flat_map(|i| (0..b).map(move |j| vec![i, j])).collect()
}

/// Closed under every componentwise-smaller point, checked directly.
fn brute_force_decreasing(set: &ExponentSet, sizes: &[usize]) -> bool {
    set.iter().all(|a| {
        ExponentSet::full_box(sizes).iter().filter(|b| b.iter().zip(a).all(|(x, y)| x <= y)).all(|b| set.contains(b))
    })
}

#[test]
fn f17_acar1_example() {
    let tower = f17();
    let code = MccCode::acar1(Arc::clone(&tower), prefix_set(&tower, &[6, 7]), vec![2, 2]).unwrap();
    assert!(brute_force_decreasing(code.exponents(), &[6, 7]));
    assert!(code.exponents().is_decreasing());
    assert_eq!(code.dimension(), 22);
    let dual = complement_exponents(code.exponents(), &[6, 7]).unwrap();
    assert_eq!(points(&dual), grid(4, 5));
    assert_eq!(points(&dual_exponents_acar1(&[6, 7], &[2, 2])), grid(4, 5));
    assert!(oracle::check_dual_orthogonality(&code).passed());
    assert!(oracle::check_dimension(&code).passed());
}

#[test]
fn f17_acar2_example() {
    let tower = f17();
    let code = MccCode::acar2(Arc::clone(&tower), prefix_set(&tower, &[6, 7]), vec![2, 5]).unwrap();
    assert_eq!(code.dimension(), 37);
    let dual = complement_exponents(code.exponents(), &[6, 7]).unwrap();
    let expected: BTreeSet<Vec<usize>> =
        [vec![0, 0], vec![1, 0], vec![2, 0], vec![3, 0], vec![0, 1]].into_iter().collect();
    assert_eq!(points(&dual), expected);
    assert_eq!(points(&dual_exponents_acar2(&[6, 7], &[2, 5])), expected);
    assert!(oracle::check_dual_orthogonality(&code).passed());
}

#[test]
fn arm2_over_f7_has_dimension_42() {
    let code = MccCode::arm2(Arc::new(FieldTower::new(7, 1, 1).unwrap()), 2, 3).unwrap();
    assert_eq!(code.dimension(), 42);
    assert!(oracle::check_dimension_against(&code, 42).passed());
}

#[test]
fn arm1_over_f27_squared_has_dimension_648() {
    let code = MccCode::arm1(Arc::new(FieldTower::new(3, 1, 3).unwrap()), 2, 18).unwrap();
    assert_eq!(code.len(), 729);
    assert_eq!(code.dimension(), 648);
}

#[test]
fn maximal_arm1_dimension_is_q_tm_minus_q_t_minus_one_m() {
    for &(p, e, t, m) in &[(2, 1, 2, 2), (2, 1, 3, 2), (3, 1, 2, 2), (2, 1, 2, 3), (2, 2, 2, 2)] {
        let tower = Arc::new(FieldTower::new(p, e, t).unwrap());
        let q = tower.q() as usize;
        let k = q.pow(t as u32) - q.pow(t as u32 - 1);
        let code = MccCode::arm1(tower, m, k).unwrap();
        assert_eq!(code.dimension(), q.pow((t * m) as u32) - q.pow(((t - 1) * m) as u32));
    }
}

#[test]
fn car_total_degree_two_on_a_4_by_5_grid() {
    let expected: BTreeSet<Vec<usize>> =
        [[0, 0], [1, 0], [0, 1], [1, 1], [2, 0], [0, 2]].iter().map(|p| p.to_vec()).collect();
    assert_eq!(points(&car_exponents(&[4, 5], 2)), expected);
}

#[test]
fn evaluating_x_on_f4_lists_the_field_in_order() {
    let tower = Arc::new(FieldTower::new(2, 1, 2).unwrap());
    let code = MccCode::rm(Arc::clone(&tower), 1, 1).unwrap();
    let word = code.evaluate(&Poly::monomial(vec![1], tower.one(Level::Top))).unwrap();
    assert_eq!(word, tower.elements(Level::Top).collect::<Vec<_>>());
}

#[test]
fn lambda_is_minus_one_on_the_full_field() {
    for (p, t) in [(2, 2), (2, 3), (3, 2)] {
        let tower = Arc::new(FieldTower::new(p, 1, t).unwrap());
        let code = MccCode::rm(Arc::clone(&tower), 1, 0).unwrap();
        let minus_one = tower.neg(tower.one(Level::Top));
        let all: Vec<_> = tower.elements(Level::Top).collect();
        for (pos, &s) in all.iter().enumerate() {
            let product =
                all.iter().filter(|&&y| y != s).fold(tower.one(Level::Top), |acc, &y| tower.mul(acc, tower.sub(s, y)));
            assert_eq!(product, minus_one);
            assert_eq!(code.lambda()[pos], minus_one);
        }
    }
}

#[test]
fn vandermonde_rank_on_f8() {
    let code = MccCode::rm(Arc::new(FieldTower::new(2, 1, 3).unwrap()), 1, 2).unwrap();
    assert_eq!(code.dimension(), 3);
    assert_eq!(code.generator_rank(), 3);
}

#[test]
fn acar1_rejects_the_zero_code() {
    let tower = Arc::new(FieldTower::new(2, 1, 2).unwrap());
    let set = CartesianSet::full(&tower, 2).unwrap();
    assert!(matches!(MccCode::acar1(Arc::clone(&tower), set.clone(), vec![0, 0]), Err(CodeError::ZeroCode)));
    let empty = MccCode::new(tower, set, ExponentSet::empty(2)).unwrap();
    assert!(empty.generator_matrix().is_empty());
    assert_eq!(empty.dual_code().unwrap().dimension(), 16);
}

#[test]
fn full_box_dual_is_empty() {
    let tower = Arc::new(FieldTower::new(2, 1, 2).unwrap());
    let code = MccCode::new(Arc::clone(&tower), prefix_set(&tower, &[3, 4]), ExponentSet::full_box(&[3, 4])).unwrap();
    assert_eq!(code.dual_code().unwrap().dimension(), 0);
    assert!(oracle::check_dual_orthogonality(&code).passed());
}

#[test]
fn reed_solomon_edge_disjoint_iff_k_within_cap() {
    for (p, t) in [(2, 3), (3, 2), (2, 2)] {
        let tower = Arc::new(FieldTower::new(p, 1, t).unwrap());
        let qt = tower.order(Level::Top) as usize;
        let cap = qt - qt / tower.q() as usize;
        for k in 1..qt {
            let code = MccCode::rm(Arc::clone(&tower), 1, k - 1).unwrap();
            assert_eq!(code.dimension(), k);
            assert_eq!(code.edge_disjoint(0).unwrap(), k <= cap, "q^t={qt} k={k}");
        }
    }
}

#[test]
fn valid_acar1_codes_are_edge_disjoint_on_every_axis() {
    for seed in 0..40 {
        let code = common::random_code(common::Kind::Acar1, seed, 256);
        for j in 0..code.arity() {
            assert!(code.edge_disjoint(j).unwrap(), "{}", oracle::describe(&code));
        }
    }
}

#[test]
fn corrupted_lambda_breaks_orthogonality_with_a_witness() {
    let tower = f17();
    let code = MccCode::acar1(Arc::clone(&tower), prefix_set(&tower, &[6, 7]), vec![2, 2]).unwrap();
    let mut twist = code.lambda().to_vec();
    twist[5] = code.tower().add(twist[5], code.tower().one(Level::Top));
    let report = oracle::check_dual_orthogonality_with_twist(&code, &twist);
    assert!(report.failed());
    assert!(report.witness.is_some());
}

#[test]
fn an_extra_exponent_breaks_orthogonality() {
    let tower = f17();
    let set = prefix_set(&tower, &[6, 7]);
    let code = MccCode::acar1(Arc::clone(&tower), set.clone(), vec![2, 2]).unwrap();
    let dual = code.dual_code().unwrap().generator_matrix();
    let mut grown: BTreeSet<Vec<usize>> = points(code.exponents());
    grown.insert(vec![2, 2]);
    let bigger = MccCode::new(tower, set, ExponentSet::new(2, grown).unwrap()).unwrap();
    let clash = bigger.generator_matrix().iter().any(|g| dual.iter().any(|h| !bigger.inner_product(g, h).is_zero()));
    assert!(clash);
}

fn enumerated_car_dimension(sizes: &[usize], k: usize) -> usize {
    ExponentSet::full_box(sizes).iter().filter(|a| a.iter().sum::<usize>() <= k).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_is_an_involution(seed in any::<u64>()) {
        let code = common::random_code(common::Kind::Generic, seed, 256);
        let sizes = code.sizes();
        let once = complement_exponents(code.exponents(), &sizes).unwrap();
        prop_assert!(once.is_decreasing());
        let twice = complement_exponents(&once, &sizes).unwrap();
        prop_assert_eq!(&twice, code.exponents());
    }

    #[test]
    fn augmented_duals_equal_the_complement(seed in any::<u64>()) {
        for kind in [common::Kind::Acar1, common::Kind::Acar2] {
            let code = common::random_code(kind, seed, 256);
            let sizes = code.sizes();
            let k = code.family().k_vector(code.arity()).unwrap();
            let closed = if kind == common::Kind::Acar1 {
                dual_exponents_acar1(&sizes, &k)
            } else {
                dual_exponents_acar2(&sizes, &k)
            };
            prop_assert_eq!(closed, complement_exponents(code.exponents(), &sizes).unwrap());
            prop_assert_eq!(code.family().closed_form_dimension(&sizes), Some(code.dimension()));
            let (sz, kv): (Vec<u64>, Vec<u64>) = sizes.iter().zip(&k).map(|(&a, &b)| (a as u64, b as u64)).unzip();
            let formula = if kind == common::Kind::Acar1 {
                report::acar1_dimension(&sz, &kv)
            } else {
                report::acar2_dimension(&sz, &kv)
            };
            prop_assert_eq!(formula as usize, code.dimension());
        }
    }

    #[test]
    fn car_dual_degree_identity(sizes in prop::collection::vec(1usize..8, 1..4), k in 0usize..20) {
        let max: usize = sizes.iter().map(|n| n - 1).sum();
        let k = k % (max + 1);
        let dual = complement_exponents(&car_exponents(&sizes, k), &sizes).unwrap();
        let kd = car_dual_degree(&sizes, k);
        let expected = if kd < 0 { ExponentSet::empty(sizes.len()) } else { car_exponents(&sizes, kd as usize) };
        prop_assert_eq!(dual, expected);
        let sz: Vec<u64> = sizes.iter().map(|&n| n as u64).collect();
        prop_assert_eq!(report::car_dimension(&sz, k as u64) as usize, enumerated_car_dimension(&sizes, k));
    }

    #[test]
    fn random_codes_have_full_rank_and_orthogonal_duals(seed in any::<u64>(), kind in 0usize..4) {
        let code = common::random_code(common::KINDS[kind], seed, 64);
        prop_assert_eq!(code.generator_rank(), code.dimension());
        prop_assert!(oracle::check_dual_orthogonality(&code).passed(), "{}", oracle::describe(&code));
        prop_assert!(brute_force_decreasing(code.exponents(), &code.sizes()));
    }
}
