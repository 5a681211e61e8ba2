//! Dense exact Gaussian elimination for the small matrices that appear around R-matrices.

use crate::scalars::Field;

/// Reduces `m` to reduced row echelon form in place and returns the pivot columns.
pub fn rref<S: Field>(m: &mut [Vec<S>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = x.mul_ref(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= f.mul_ref(p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Field>(m: &[Vec<S>]) -> usize {
    let mut m = m.to_vec();
    rref(&mut m).len()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<S: Field>(m: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = m.len();
    let mut aug: Vec<Vec<S>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Smallest `k` with `v_k` in the span of `v_0..v_{k-1}`, together with the coefficients.
pub fn first_dependency<S: Field>(vectors: &[Vec<S>]) -> Option<(usize, Vec<S>)> {
    let len = vectors.first()?.len();
    for k in 0..vectors.len() {
        // columns v_0..v_{k-1}, augmented with v_k
        let mut m: Vec<Vec<S>> = (0..len)
            .map(|i| (0..=k).map(|j| vectors[j][i].clone()).collect())
            .collect();
        let piv = rref(&mut m);
        if piv.last() == Some(&k) {
            continue;
        }
        let mut coeffs = vec![S::zero(); k];
        for (row, &c) in piv.iter().enumerate() {
            coeffs[c] = m[row][k].clone();
        }
        return Some((k, coeffs));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn inverse_and_rank() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert_eq!(rank(&[vec![q(1), q(2)], vec![q(2), q(4)]]), 1);
        assert!(inverse(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }

    #[test]
    fn dependency() {
        let v = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(3), q(-2)]];
        let (k, c) = first_dependency(&v).unwrap();
        assert_eq!(k, 2);
        assert_eq!(c, vec![q(3), q(-2)]);
    }
}
