//! Dense Gaussian elimination over a [`Scalar`].

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// No usable pivot in this column.
    Singular { column: usize },
    /// The best pivot is below the float precision threshold.
    TinyPivot { column: usize },
}

/// Solution of an `n × m` system (`n >= m`) plus the `n - m` leftover
/// right-hand sides, which vanish iff the system is consistent.
#[derive(Debug, Clone)]
pub struct Solution<S> {
    pub x: Vec<S>,
    pub residuals: Vec<S>,
}

/// Solves `a x = b` for full-column-rank `a`.
///
/// Exact scalars pivot on the first nonzero entry; floats use partial
/// pivoting and reject pivots below `2^(-p/2)` times the column's largest
/// original entry.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Solution<S>, SolveError> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<S>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain([rhs.clone()]).collect()).collect();
    let col_scale: Vec<S> = (0..m)
        .map(|c| a.iter().map(|row| row[c].abs()).fold(b[0].zero_like(), |x, y| x.max_of(y)))
        .collect();
    for col in 0..m {
        let pivot = if S::EXACT {
            (col..n).find(|&i| !aug[i][col].is_zero())
        } else {
            (col..n)
                .max_by(|&i, &j| {
                    aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&i| !aug[i][col].is_zero())
        };
        let Some(p) = pivot else { return Err(SolveError::Singular { column: col }) };
        if !S::EXACT && aug[p][col].negligible(&col_scale[col]) {
            return Err(SolveError::TinyPivot { column: col });
        }
        aug.swap(col, p);
        let prow = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone() / &prow[col];
            for (x, y) in row.iter_mut().zip(&prow).skip(col) {
                *x = x.clone() - f.clone() * y;
            }
        }
    }
    let x = (0..m).map(|i| aug[i][m].clone() / &aug[i][i]).collect();
    let residuals = (m..n).map(|i| aug[i][m].clone()).collect();
    Ok(Solution { x, residuals })
}

/// Basis of the right nullspace of `a` (exact arithmetic expected).
pub fn nullspace<S: Scalar>(a: &[Vec<S>], zero: &S) -> Vec<Vec<S>> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<S>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..n).find(|&i| !rows[i][c].negligible(&zero.one_like())) else { continue };
        rows.swap(r, p);
        let inv = zero.one_like() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x = x.clone() * &inv;
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x = x.clone() - f.clone() * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == n {
            break;
        }
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero.clone(); m];
            v[f] = zero.one_like();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&x| rational(x, 1)).collect()).collect()
    }

    #[test]
    fn overdetermined_consistent() {
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b = vec![rational(3, 1), rational(1, 1), rational(4, 1)];
        let s = solve(&a, &b).unwrap();
        assert_eq!(s.x, vec![rational(2, 1), rational(1, 1)]);
        assert_eq!(s.residuals, vec![rational(0, 1)]);
    }

    #[test]
    fn singular_detected() {
        let a = m(&[&[1, 2], &[2, 4]]);
        let b = vec![rational(1, 1), rational(2, 1)];
        assert_eq!(solve(&a, &b).unwrap_err(), SolveError::Singular { column: 1 });
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, &rational(0, 1));
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot: BigRational = a[0].iter().zip(&v).map(|(x, y)| x * y).sum();
            assert_eq!(dot, rational(0, 1));
        }
    }
}
