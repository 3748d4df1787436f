//! Exact linear solves over the rationals.

use crate::symkernel::Coeff;

/// Solves `a * c = b` by Gaussian elimination.
///
/// Returns one solution (free variables set to zero) or `None` when the
/// system is inconsistent.
pub fn solve(a: &[Vec<Coeff>], b: &[Coeff]) -> Option<Vec<Coeff>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Coeff>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in &mut m[r][c..] {
            *v = &*v * &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *v = &*v - &(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Coeff::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Rank of a matrix given by rows.
pub fn rank(a: &[Vec<Coeff>]) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Coeff>> = a.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r].clone();
        let inv = pivot[c].recip();
        for row in &mut m[r + 1..] {
            if !row[c].is_zero() {
                let f = &row[c] * &inv;
                for (v, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *v = &*v - &(&f * p);
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        let c = |n: i64| Coeff::from_int(n);
        assert_eq!(rank(&[vec![c(1), c(2)], vec![c(2), c(4)]]), 1);
        assert_eq!(rank(&[vec![c(1), c(0)], vec![c(0), c(3)]]), 2);
        assert_eq!(rank(&[]), 0);
    }

    fn q(n: i64) -> Coeff {
        Coeff::from_int(n)
    }

    #[test]
    fn solves_square_system() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve(&a, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![Coeff::new(4, 5), Coeff::new(7, 5)]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        assert!(solve(&a, &[q(1), q(3)]).is_none());
        assert!(solve(&a, &[q(1), q(2)]).is_some());
    }
}
