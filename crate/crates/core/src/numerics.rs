//! Small dense linear algebra and a bracketed scalar root finder.

use crate::error::{Error, Result};

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// Returns the determinant of `a`.
pub fn solve4(a: &mut [[f64; 4]; 4], b: &mut [f64; 4]) -> f64 {
    let mut det = 1.0;
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
            det = -det;
        }
        let d = a[col][col];
        det *= d;
        if d == 0.0 {
            return 0.0;
        }
        for row in col + 1..4 {
            let f = a[row][col] / d;
            if f != 0.0 {
                for k in col..4 {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * b[k];
        }
        b[row] = acc / a[row][row];
    }
    det
}

pub fn det4(a: &[[f64; 4]; 4]) -> f64 {
    let mut m = *a;
    let mut b = [0.0; 4];
    solve4(&mut m, &mut b)
}

/// Brent's method on a bracket with `fa`, `fb` of opposite sign.
pub fn brent<F>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, xtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!("bracket [{a}, {b}] does not change sign")));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..max_iter {
        if fb == 0.0 || (b - a).abs() <= xtol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = if lo < b { s > lo && s < b } else { s > b && s < lo };
        let cond = !between
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < xtol)
            || (!mflag && (c - d).abs() < xtol);
        if cond {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa.signum() != fs.signum() {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::NoRoot(format!("no convergence in {max_iter} iterations, bracket [{a}, {b}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve4_recovers_known_solution() {
        let a0 = [[4.0, 1.0, 0.0, 2.0], [1.0, 3.0, 1.0, 0.0], [0.0, 2.0, 5.0, 1.0], [1.0, 0.0, 1.0, 6.0]];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                b[i] += a0[i][j] * x[j];
            }
        }
        let mut a = a0;
        solve4(&mut a, &mut b);
        for i in 0..4 {
            assert!((b[i] - x[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn det_of_permutation_and_diagonal() {
        let p = [[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        assert_eq!(det4(&p), -1.0);
        let d = [[2.0, 0.0, 0.0, 0.0], [0.0, 3.0, 0.0, 0.0], [0.0, 0.0, 4.0, 0.0], [0.0, 0.0, 0.0, 5.0]];
        assert_eq!(det4(&d), 120.0);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let r = brent(f, 0.0, 2.0, -2.0, 6.0, 1e-15, 100).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn brent_rejects_non_bracket() {
        let f = |x: f64| Ok(x * x + 1.0);
        assert!(brent(f, 0.0, 1.0, 1.0, 2.0, 1e-12, 10).is_err());
    }
}
