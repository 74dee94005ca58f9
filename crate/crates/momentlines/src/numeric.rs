//! Small dense linear algebra helpers.
//!
//! Everything here works on systems of size at most (N+1) x (N+1) for the
//! line counts this crate supports, so plain Gaussian elimination and the
//! naive cofactor determinant are both adequate and easy to audit.

/// Integer power by repeated multiplication.
///
/// Plain left-to-right products keep results identical across platforms,
/// which the rest of the crate relies on for reproducible output.
pub(crate) fn pow_iter(x: f64, k: usize) -> f64 {
    let mut p = 1.0;
    for _ in 0..k {
        p *= x;
    }
    p
}

/// Solves `a * x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot is exactly zero (singular to working
/// precision). `a` is row-major and consumed.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);

        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_values = &upper[col];
        let pivot = pivot_values[col];
        for (offset, row) in lower.iter_mut().enumerate() {
            let factor = row[col] / pivot;
            if factor != 0.0 {
                for (target, &p) in row[col..].iter_mut().zip(&pivot_values[col..]) {
                    *target -= factor * p;
                }
                b[col + 1 + offset] -= factor * b[col];
            }
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Determinant by cofactor expansion along the first row.
///
/// O(n!) — used only as the independent cross-check route against the
/// product formula and the elimination-based solver, never on systems
/// larger than 6x6.
pub fn det_cofactor(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    match n {
        0 => 1.0,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            let mut det = 0.0;
            for col in 0..n {
                if a[0][col] == 0.0 {
                    continue;
                }
                let minor: Vec<Vec<f64>> = (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != col)
                            .map(|c| a[r][c])
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                det += sign * a[0][col] * det_cofactor(&minor);
            }
            det
        }
    }
}
