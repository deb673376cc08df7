//! Least squares for the handful of parameters the flow models need.

/// Relative pivot threshold below which a normal-equation system is treated
/// as rank deficient.
pub(crate) const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Singular;

/// Least-squares solution of `X b = y` through the normal equations
/// `XᵀX b = Xᵀy`. `design[i]` is row `i` of `X`; every row has length `p`.
pub(crate) fn least_squares(design: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>, Singular> {
    debug_assert_eq!(design.len(), y.len());
    let p = design.first().map_or(0, Vec::len);
    if p == 0 || design.len() < p {
        return Err(Singular);
    }
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in design.iter().zip(y) {
        for j in 0..p {
            for k in j..p {
                a[j][k] += row[j] * row[k];
            }
            a[j][p] += row[j] * yi;
        }
    }
    for j in 0..p {
        for k in 0..j {
            a[j][k] = a[k][j];
        }
    }
    solve_augmented(a)
}

/// Gaussian elimination with partial pivoting on an `n × (n+1)` augmented
/// matrix. A pivot smaller than `PIVOT_TOLERANCE` times the largest diagonal
/// entry of the original matrix signals rank deficiency.
fn solve_augmented(mut a: Vec<Vec<f64>>) -> Result<Vec<f64>, Singular> {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Singular);
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() <= PIVOT_TOLERANCE * scale {
            return Err(Singular);
        }
        a.swap(col, pivot_row);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - tail) / a[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let design: Vec<_> = xs.iter().map(|&x| vec![1.0, x]).collect();
        let y: Vec<_> = xs.iter().map(|x| 3.0 + 2.0 * x).collect();
        let b = least_squares(&design, &y).unwrap();
        assert!((b[0] - 3.0).abs() < 1e-12 && (b[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn overdetermined_average() {
        let design = vec![vec![1.0]; 4];
        let b = least_squares(&design, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((b[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_are_singular() {
        let design = vec![vec![1.0, 2.0]; 5];
        assert_eq!(least_squares(&design, &[1.0; 5]), Err(Singular));
        assert_eq!(least_squares(&[vec![1.0, 1.0]], &[1.0]), Err(Singular));
    }
}
