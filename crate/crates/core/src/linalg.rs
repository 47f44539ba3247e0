//! Least squares via Householder QR.

use nalgebra::{DMatrix, DVector};

/// Relative size below which a diagonal entry of `R` counts as zero.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct LsSolution {
    pub coef: Vec<f64>,
    pub rss: f64,
}

/// Failure of [`least_squares`]: the first column (0-based) that is
/// numerically dependent on the preceding ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RankDeficient {
    pub column: usize,
}

/// Minimises `‖y − A c‖²` for a tall, full-column-rank `A`.
pub(crate) fn least_squares(
    design: DMatrix<f64>,
    y: &DVector<f64>,
) -> std::result::Result<LsSolution, RankDeficient> {
    let k = design.ncols();
    debug_assert!(design.nrows() >= k);
    let col_scale: Vec<f64> = (0..k).map(|j| design.column(j).norm()).collect();
    let qr = design.qr();
    let r = qr.r();
    for j in 0..k {
        let reference = col_scale[j].max(f64::MIN_POSITIVE);
        if r[(j, j)].abs() <= RANK_TOL * reference {
            return Err(RankDeficient { column: j });
        }
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let head = qty.rows(0, k).into_owned();
    let coef = r.solve_upper_triangular(&head).ok_or(RankDeficient {
        column: k.saturating_sub(1),
    })?;
    let rss = qty.rows(k, qty.len() - k).norm_squared();
    Ok(LsSolution {
        coef: coef.iter().copied().collect(),
        rss,
    })
}

/// Index of the earlier column most collinear with column `j`.
pub(crate) fn most_collinear_with(design: &DMatrix<f64>, j: usize) -> usize {
    let cj = design.column(j);
    let nj = cj.norm().max(f64::MIN_POSITIVE);
    (0..j)
        .max_by(|&a, &b| {
            let ca = design.column(a);
            let cb = design.column(b);
            let sa = (ca.dot(&cj) / (ca.norm().max(f64::MIN_POSITIVE) * nj)).abs();
            let sb = (cb.dot(&cj) / (cb.norm().max(f64::MIN_POSITIVE) * nj)).abs();
            sa.total_cmp(&sb)
        })
        .unwrap_or(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let sol = least_squares(a, &y).unwrap();
        assert!((sol.coef[0] - 1.0).abs() < 1e-12);
        assert!((sol.coef[1] - 2.0).abs() < 1e-12);
        assert!(sol.rss < 1e-20);
    }

    #[test]
    fn residual_sum_of_squares() {
        let a = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 6.0]);
        let sol = least_squares(a, &y).unwrap();
        assert!((sol.coef[0] - 3.0).abs() < 1e-12);
        assert!((sol.rss - 14.0).abs() < 1e-12);
    }

    #[test]
    fn detects_dependent_column() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, 4.0, 1.0, 3.0, 6.0, 5.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(
            least_squares(a.clone(), &y).unwrap_err(),
            RankDeficient { column: 1 }
        );
        assert_eq!(most_collinear_with(&a, 1), 0);
    }
}
