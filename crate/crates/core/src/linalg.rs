//! Dense Gaussian elimination over any [`FieldArith`], on canonical indices.

use crate::field::FieldArith;

/// Reduce `rows` in place to reduced row echelon form; returns pivot columns.
pub fn row_reduce(field: &dyn FieldArith, rows: &mut Vec<Vec<u64>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            let f = row[c];
            if i == r || f == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = field.sub(*x, field.mul(f, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(field: &dyn FieldArith, mut rows: Vec<Vec<u64>>) -> usize {
    row_reduce(field, &mut rows).len()
}

/// Basis of `{x : M x = 0}` for the `rows × ncols` matrix `M`, one vector per
/// free column in increasing column order.
pub fn kernel(field: &dyn FieldArith, rows: &[Vec<u64>], ncols: usize) -> Vec<Vec<u64>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(field, &mut m);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; ncols];
            v[free] = field.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(m[r][free]);
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert(field: &dyn FieldArith, matrix: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    let n = matrix.len();
    let mut aug: Vec<Vec<u64>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { 0 }));
            r
        })
        .collect();
    let pivots = row_reduce(field, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldTower, Level};

    #[test]
    fn rank_of_zero_and_identity() {
        let tower = FieldTower::new(5, 1, 1).unwrap();
        let f = tower.arith(Level::Mid);
        assert_eq!(rank(f, vec![]), 0);
        assert_eq!(rank(f, vec![vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(rank(f, vec![vec![1, 0], vec![0, 1], vec![1, 1]]), 2);
    }

    #[test]
    fn invert_round_trip_over_f7() {
        let tower = FieldTower::new(7, 1, 1).unwrap();
        let f = tower.arith(Level::Mid);
        let m = vec![vec![2, 3], vec![1, 4]];
        let inv = invert(f, &m).unwrap();
        for (i, row) in m.iter().enumerate() {
            for j in 0..2 {
                let v = row.iter().zip(&inv).fold(0, |acc, (&a, b)| f.add(acc, f.mul(a, b[j])));
                assert_eq!(v, u64::from(i == j));
            }
        }
        assert!(invert(f, &[vec![1, 2], vec![2, 4]]).is_none());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let tower = FieldTower::new(3, 1, 1).unwrap();
        let f = tower.arith(Level::Mid);
        let m = vec![vec![1, 2, 0, 1], vec![0, 0, 1, 2]];
        let ker = kernel(f, &m, 4);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            for row in &m {
                let dot = row.iter().zip(v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                assert_eq!(dot, 0);
            }
        }
    }
}
