use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Pfaffian of a real antisymmetric matrix by skew Gaussian elimination with pivoting.
pub fn pfaffian(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidSpec(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    let scale = m.amax().max(1.0);
    let asym = (m + m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::NotAntisymmetric(asym));
    }
    Ok(pfaffian_unchecked(m.clone()))
}

/// Same as [`pfaffian`] without validation; consumes its argument as workspace.
pub(crate) fn pfaffian_unchecked(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (mut kp, mut best) = (k + 1, a[(k + 1, k)].abs());
        for i in k + 2..n {
            let v = a[(i, k)].abs();
            if v > best {
                kp = i;
                best = v;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot == 0.0 {
            return 0.0;
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}
