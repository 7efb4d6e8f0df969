//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Q;

/// Reduces `m` to row echelon form in place and returns the pivot columns.
fn echelon(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
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
        let inv = Q::one() / &m[r][c];
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank over the rationals.
pub fn rank_exact(matrix: &[Vec<Q>]) -> usize {
    let mut m = matrix.to_vec();
    echelon(&mut m).len()
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    assert_eq!(b.len(), n, "right-hand side length");
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            assert_eq!(row.len(), n, "square system");
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = echelon(&mut m);
    if pivots.len() < n || pivots.iter().any(|&c| c == n) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn mat(v: &[&[i64]]) -> Vec<Vec<Q>> {
        v.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn identity_and_zero() {
        let id: Vec<Vec<Q>> = (0..4)
            .map(|i| (0..4).map(|j| qi(i64::from(i == j))).collect())
            .collect();
        assert_eq!(rank_exact(&id), 4);
        assert_eq!(rank_exact(&vec![vec![Q::zero(); 5]; 3]), 0);
        assert_eq!(rank_exact(&[]), 0);
    }

    #[test]
    fn dependent_rows() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank_exact(&m), 2);
    }

    #[test]
    fn solves_exactly() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[qi(1), qi(2)]).unwrap();
        assert_eq!(x, vec![q(1, 5), q(3, 5)]);
        assert!(solve(&mat(&[&[1, 2], &[2, 4]]), &[qi(1), qi(2)]).is_none());
    }
}
