//! Dense solves for the handful of tiny systems in the crate (regression
//! normal equations, multiplier fits).

/// Solves `a x = b` for a row-major `n × n` matrix by Gaussian elimination
/// with complete pivoting.
///
/// A pivot whose magnitude falls below `rel_tol` times the largest initial
/// entry marks the system as rank deficient; the error carries the original
/// column index selected at that step.
pub(crate) fn solve_full_pivot(
    mut a: Vec<f64>,
    mut b: Vec<f64>,
    n: usize,
    rel_tol: f64,
) -> Result<Vec<f64>, usize> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut col_perm: Vec<usize> = (0..n).collect();
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(0);
    }
    for k in 0..n {
        let (mut pr, mut pc, mut best) = (k, k, -1.0);
        for i in k..n {
            for j in k..n {
                let v = a[i * n + j].abs();
                if v > best {
                    best = v;
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= rel_tol * scale {
            return Err(col_perm[k]);
        }
        if pr != k {
            for j in 0..n {
                a.swap(k * n + j, pr * n + j);
            }
            b.swap(k, pr);
        }
        if pc != k {
            for i in 0..n {
                a.swap(i * n + k, i * n + pc);
            }
            col_perm.swap(k, pc);
        }
        let piv = a[k * n + k];
        for i in (k + 1)..n {
            let m = a[i * n + k] / piv;
            if m == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= m * a[k * n + j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut y = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in (k + 1)..n {
            s -= a[k * n + j] * y[j];
        }
        y[k] = s / a[k * n + k];
    }
    let mut x = vec![0.0; n];
    for (k, &c) in col_perm.iter().enumerate() {
        x[c] = y[k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_permuted_system() {
        // x = (1, -2, 3)
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 1.0, 4.0, 0.0, -1.0];
        let b = vec![-1.0, 2.0, 1.0];
        let x = solve_full_pivot(a, b, 3, 1e-12).unwrap();
        for (got, want) in x.iter().zip([1.0, -2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_dependent_column() {
        // third column = first + second
        let a = vec![1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 2.0];
        assert!(solve_full_pivot(a, vec![1.0, 1.0, 2.0], 3, 1e-12).is_err());
    }
}
