//! Bargmann (holomorphic) form of pure Gaussian states and the Fock recurrence.
//!
//! A pure state is written `c exp(z^T A z / 2 + b^T z)` in the coherent-state
//! variables `z`, so that `<n|psi>` is the coefficient of `z^n / sqrt(n!)`.

use nalgebra::ComplexField;
use num_complex::Complex64;

use crate::error::{NgError, Result};
use crate::linalg::*;

#[derive(Clone, Debug)]
pub struct BargmannForm {
    pub a: CMat,
    pub b: CVect,
    /// Vacuum amplitude, chosen real and non-negative.
    pub c: Complex64,
}

fn block_parts(cov: &Mat, mean: &Vect) -> (Mat, Mat, Vect, Vect) {
    let n = cov.nrows() / 2;
    let vb = interleaved_to_block(cov);
    let gb = vec_interleaved_to_block(mean);
    (
        vb.view((0, 0), (n, n)).into_owned(),
        vb.view((0, n), (n, n)).into_owned(),
        gb.rows(0, n).into_owned(),
        gb.rows(n, n).into_owned(),
    )
}

/// Bargmann form of a pure state with moments `(cov, mean)`.
pub fn bargmann(cov: &Mat, mean: &Vect) -> Result<BargmannForm> {
    let n = check_square_even(cov)?;
    if n == 0 {
        return Ok(BargmannForm {
            a: CMat::zeros(0, 0),
            b: CVect::zeros(0),
            c: Complex64::new(1.0, 0.0),
        });
    }
    let (vxx, vxp, mx, mp) = block_parts(cov, mean);
    let id = CMat::identity(n, n);
    let w = cinv(&complexify(&vxx))? * (&id - complexify(&vxp) * I);
    let w = csymmetrize(&w);
    let a = csymmetrize(&((&id - &w) * cinv(&(&id + &w))?));
    let g = (&w * cvec(&mx)) * Complex64::new(0.5, 0.0) + cvec(&mp) * (I * 0.5);
    let b = (&id + &a) * g;
    let vi = cov + Mat::identity(2 * n, 2 * n);
    let det = vi.determinant();
    let quad = (mean.transpose() * inv(&vi)? * mean)[(0, 0)];
    let c2 = 2f64.powi(n as i32) / det.sqrt() * (-0.5 * quad).exp();
    Ok(BargmannForm {
        a,
        b,
        c: Complex64::new(c2.sqrt(), 0.0),
    })
}

/// Moments of the (possibly unnormalizable) Gaussian with Bargmann data `(A, b)`.
pub fn moments_from_bargmann(a: &CMat, b: &CVect) -> Result<(Mat, Vect)> {
    let n = a.nrows();
    let id = CMat::identity(n, n);
    let pi = cinv(&(&id + a))?;
    let w = csymmetrize(&(&pi * (&id - a)));
    let (wr, wi) = (re(&w), im(&w));
    if cond(&wr) > 1e12 {
        return Err(NgError::Singular("real part of the Bargmann kernel".into()));
    }
    let vxx = symmetrize(&inv(&wr)?);
    let vxp = -(&vxx * &wi);
    let vpp = symmetrize(&(&wr + &wi * &vxx * &wi));
    let g = &pi * b;
    let mx = (&vxx * g.map(|z| z.re)) * 2.0;
    let mp = g.map(|z| z.im) * 2.0 - &wi * &mx;
    let mut vb = Mat::zeros(2 * n, 2 * n);
    vb.view_mut((0, 0), (n, n)).copy_from(&vxx);
    vb.view_mut((0, n), (n, n)).copy_from(&vxp);
    vb.view_mut((n, 0), (n, n)).copy_from(&vxp.transpose());
    vb.view_mut((n, n), (n, n)).copy_from(&vpp);
    Ok((
        block_to_interleaved(&vb),
        vec_block_to_interleaved(&concat(&mx, &mp)),
    ))
}

/// Row-major strides for `dims`.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Fock amplitudes `G[n] = <n|psi>` on the box `n_i < dims[i]`, row-major.
pub fn fock_amplitudes(form: &BargmannForm, dims: &[usize]) -> Result<Vec<Complex64>> {
    let n = dims.len();
    if form.a.nrows() != n {
        return Err(NgError::Shape(
            "Bargmann dimension does not match cutoffs".into(),
        ));
    }
    let total: usize = dims.iter().product();
    if total == 0 {
        return Ok(vec![]);
    }
    if total > 400_000_000 / 16 {
        return Err(NgError::TooLarge(format!("{total} amplitudes")));
    }
    let st = strides(dims);
    let sqrt: Vec<f64> = (0..=*dims.iter().max().unwrap())
        .map(|k| (k as f64).sqrt())
        .collect();
    let mut g = vec![Complex64::new(0.0, 0.0); total];
    g[0] = form.c;
    let mut idx = vec![0usize; n];
    for flat in 1..total {
        // odometer increment
        let mut d = n - 1;
        loop {
            idx[d] += 1;
            if idx[d] < dims[d] {
                break;
            }
            idx[d] = 0;
            d -= 1;
        }
        let i = idx.iter().position(|&v| v > 0).unwrap();
        let m = flat - st[i];
        let mut val = form.b[i] * g[m];
        for j in 0..n {
            let mj = if j == i { idx[j] - 1 } else { idx[j] };
            if mj > 0 {
                val += form.a[(i, j)] * sqrt[mj] * g[m - st[j]];
            }
        }
        g[flat] = val / sqrt[idx[i]];
    }
    Ok(g)
}

/// Fock amplitudes of a pure Gaussian state on the box given by `dims`.
pub fn gaussian_amplitudes(cov: &Mat, mean: &Vect, dims: &[usize]) -> Result<Vec<Complex64>> {
    fock_amplitudes(&bargmann(cov, mean)?, dims)
}

#[allow(dead_code)]
pub(crate) fn cmax(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.modulus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{GaussianPure, GaussianUnitary};

    #[test]
    fn round_trip_moments() {
        let g = crate::symplectic::random_generator(2, 1, 1.0, 0.5, 3);
        let f = bargmann(&g.cov, &g.mean).unwrap();
        let (c, m) = moments_from_bargmann(&f.a, &f.b).unwrap();
        assert!(max_abs(&(c - &g.cov)) < 1e-10);
        assert!((m - &g.mean).amax() < 1e-10);
    }

    #[test]
    fn coherent_state_amplitudes() {
        let g = GaussianPure::vacuum(1)
            .apply_unitary(
                &GaussianUnitary::displacement(&Vect::from_vec(vec![2.0, 0.0])),
                &[0],
            )
            .unwrap();
        let amps = gaussian_amplitudes(&g.cov, &g.mean, &[8]).unwrap();
        let mut fact = 1.0;
        for (n, z) in amps.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((z.re - (-0.5f64).exp() / fact.sqrt()).abs() < 1e-12);
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn tmss_amplitudes_are_diagonal() {
        let g = GaussianPure::tmss(3.0).unwrap();
        let amps = gaussian_amplitudes(&g.cov, &g.mean, &[6, 6]).unwrap();
        let q = 0.5f64.sqrt();
        let c0 = (1.0 - q * q).sqrt();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { c0 * q.powi(i as i32) } else { 0.0 };
                assert!((amps[i * 6 + j].norm() - want).abs() < 1e-12);
            }
        }
    }
}
