//! Ratio sequences against the spectral target, and sign-change root
//! localization of α_j(r) and γ_j(r) over an r grid.

use num_rational::BigRational;
use rayon::prelude::*;
use sgpoly::monomials::alpha_sequence;
use sgpoly::spectrum::TargetRatio;
use sgpoly::{Float, LaplacianParams, MonomialTable, Scalar, target_ratio};

use crate::error::{CliError, Result};

/// `(√17 - 3)/4`, where α_j(r) appears to acquire a root as j grows.
pub fn special_root() -> f64 {
    (17f64.sqrt() - 3.0) / 4.0
}

pub fn params_at<S: Scalar>(like: &S, r: f64) -> Result<LaplacianParams<S>> {
    let q = BigRational::from_float(r).ok_or_else(|| CliError::Usage(format!("r={r} is not finite")))?;
    Ok(LaplacianParams::derive(like.lift(&q))?)
}

/// `num / den`, or `None` when the denominator is exactly zero.
pub fn ratio<S: Scalar>(num: &S, den: &S) -> Option<S> {
    (!den.is_zero()).then(|| num.clone() / den)
}

pub fn render_opt<S: Scalar>(v: &Option<S>) -> String {
    v.as_ref().map_or_else(|| "NA".to_string(), Scalar::render)
}

pub fn render_dev(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

#[derive(Clone, Debug)]
pub struct RatioRow<S> {
    pub j: usize,
    /// α_{j+1}/α_j
    pub alpha: Option<S>,
    pub beta: Option<S>,
    pub gamma: Option<S>,
    /// γ_j/α_{j+1}
    pub gamma_alpha: Option<S>,
}

pub fn ratio_rows<S: Scalar>(table: &MonomialTable<S>, jmax: usize) -> Vec<RatioRow<S>> {
    (0..jmax)
        .map(|j| RatioRow {
            j,
            alpha: ratio(table.alpha(j + 1), table.alpha(j)),
            beta: ratio(table.beta(j + 1), table.beta(j)),
            gamma: ratio(table.gamma(j + 1), table.gamma(j)),
            gamma_alpha: ratio(table.gamma(j), table.alpha(j + 1)),
        })
        .collect()
}

/// Everything the conjecture report needs at one r.
#[derive(Clone, Debug)]
pub struct PointReport<S> {
    pub r: f64,
    pub target: TargetRatio,
    pub rows: Vec<RatioRow<S>>,
    pub alpha_last: S,
    pub gamma_last: S,
}

impl<S: Scalar> PointReport<S> {
    pub fn target_f64(&self) -> f64 {
        self.target.target.to_f64()
    }

    /// `|ratio - target| / |target|`
    pub fn deviation(&self, ratio: &Option<S>) -> Option<f64> {
        let t = self.target_f64();
        ratio.as_ref().map(|v| (v.to_f64() - t).abs() / t.abs())
    }

    pub fn last(&self) -> &RatioRow<S> {
        self.rows.last().expect("jmax >= 1")
    }
}

pub fn point_report<S: Scalar>(like: &S, r: f64, jmax: usize, precision: usize) -> Result<PointReport<S>> {
    if jmax == 0 {
        return Err(CliError::Usage("jmax must be at least 1".into()));
    }
    let table = MonomialTable::build(params_at(like, r)?, jmax)?;
    let target = target_ratio(&params_at(&Float::from_i64(0, precision), r)?)?;
    Ok(PointReport {
        r,
        target,
        rows: ratio_rows(&table, jmax),
        alpha_last: table.alpha(jmax).clone(),
        gamma_last: table.gamma(jmax).clone(),
    })
}

pub fn sweep<S: Scalar>(like: &S, rs: &[f64], jmax: usize, precision: usize) -> Result<Vec<PointReport<S>>> {
    rs.par_iter().map(|&r| point_report(like, r, jmax, precision)).collect()
}

/// Boundary value α_j (k=1), β_j (k=2) or γ_j (k=3) at r.
pub fn boundary_value<S: Scalar>(like: &S, k: usize, j: usize, r: f64) -> Result<S> {
    let p = params_at(like, r)?;
    if k == 1 {
        return Ok(alpha_sequence(p, j)?.swap_remove(j));
    }
    Ok(MonomialTable::build(p, j)?.value(k, j).clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootBracket {
    pub k: usize,
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn sequence(&self) -> &'static str {
        ["alpha", "beta", "gamma"][self.k - 1]
    }
}

/// Brackets of width at most `width` around every sign change of the
/// sampled values; an exact zero at a grid point is its own bracket.
pub fn localize_roots<S: Scalar>(
    like: &S,
    k: usize,
    j: usize,
    rs: &[f64],
    values: &[S],
    width: f64,
) -> Result<Vec<RootBracket>> {
    let mut seeds = Vec::new();
    for i in 0..rs.len() {
        if values[i].is_zero() {
            seeds.push((rs[i], rs[i], 0));
        } else if i + 1 < rs.len() && values[i].signum_i32() * values[i + 1].signum_i32() < 0 {
            seeds.push((rs[i], rs[i + 1], values[i].signum_i32()));
        }
    }
    seeds
        .par_iter()
        .map(|&(mut lo, mut hi, s_lo)| {
            while hi - lo > width {
                let mid = 0.5 * (lo + hi);
                let s = boundary_value(like, k, j, mid)?.signum_i32();
                if s == 0 {
                    lo = mid;
                    hi = mid;
                } else if s == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(RootBracket { k, j, lo, hi })
        })
        .collect()
}

/// Samples the boundary value on `rs` and localizes its sign changes.
pub fn scan_roots<S: Scalar>(like: &S, k: usize, j: usize, rs: &[f64], width: f64) -> Result<Vec<RootBracket>> {
    let values: Vec<S> = rs.par_iter().map(|&r| boundary_value(like, k, j, r)).collect::<Result<_>>()?;
    localize_roots(like, k, j, rs, &values, width)
}

pub fn nearest(brackets: &[RootBracket], x: f64) -> Option<&RootBracket> {
    brackets.iter().min_by(|a, b| (a.mid() - x).abs().total_cmp(&(b.mid() - x).abs()))
}

/// Interior grid maximum of `vals` closest to `x`.
pub fn local_max_near(rs: &[f64], vals: &[Option<f64>], x: f64) -> Option<(f64, f64)> {
    (1..rs.len().saturating_sub(1))
        .filter_map(|i| match (vals[i - 1], vals[i], vals[i + 1]) {
            (Some(a), Some(b), Some(c)) if b >= a && b >= c => Some((rs[i], b)),
            _ => None,
        })
        .min_by(|a, b| (a.0 - x).abs().total_cmp(&(b.0 - x).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sgpoly::scalar::rational;

    #[test]
    fn zero_denominator_is_na() {
        let z = rational(0, 1);
        assert_eq!(render_opt(&ratio(&rational(1, 1), &z)), "NA");
        assert_eq!(render_opt(&ratio(&rational(1, 1), &rational(2, 1))), "1/2");
    }

    #[test]
    fn gamma_over_alpha_is_three_at_one() {
        let t = MonomialTable::build(LaplacianParams::derive(rational(1, 1)).unwrap(), 8).unwrap();
        for row in ratio_rows(&t, 8) {
            assert_eq!(row.gamma_alpha, Some(rational(3, 1)));
        }
    }

    #[test]
    fn local_max_picks_nearest_peak() {
        let rs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let v = [Some(0.0), Some(2.0), Some(0.0), Some(1.0), Some(5.0), Some(0.0)];
        assert_eq!(local_max_near(&rs, &v, 1.2), Some((1.0, 2.0)));
        assert_eq!(local_max_near(&rs, &v, 3.8), Some((4.0, 5.0)));
    }
}
