//! Tiny dense solves used by the weight and local-fit computations.

use crate::scalar::Real;

/// Pivot magnitudes below `PIVOT_RTOL * max|a_ij|` are treated as zero.
pub(crate) const PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Singular;

/// Solves `a x = b` for a row-major `n x n` matrix by Gaussian elimination
/// with partial pivoting. `a` and `b` are overwritten; `b` holds `x` on return.
pub(crate) fn solve_in_place<T: Real>(a: &mut [T], b: &mut [T], n: usize) -> Result<(), Singular> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);

    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Singular);
    }
    let tol = scale * T::lit(PIVOT_RTOL);

    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv_abs > tol) {
            return Err(Singular);
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] = a[r * n + k] - f * v;
            }
            b[r] = b[r] - f * b[col];
        }
    }

    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc = acc - a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    Ok(())
}

/// Least-squares fit `y ≈ Σ c_k φ_k(x)` through the normal equations.
/// `design` is row-major with `cols` basis values per sample.
pub(crate) fn least_squares<T: Real>(design: &[T], y: &[T], cols: usize) -> Result<Vec<T>, Singular> {
    let rows = y.len();
    debug_assert_eq!(design.len(), rows * cols);
    let mut ata = vec![T::zero(); cols * cols];
    let mut aty = vec![T::zero(); cols];
    for r in 0..rows {
        let row = &design[r * cols..(r + 1) * cols];
        for i in 0..cols {
            aty[i] = aty[i] + row[i] * y[r];
            for j in 0..cols {
                ata[i * cols + j] = ata[i * cols + j] + row[i] * row[j];
            }
        }
    }
    solve_in_place(&mut ata, &mut aty, cols)?;
    Ok(aty)
}
