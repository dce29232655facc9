//! Small dense linear-algebra helpers shared by the phase-space modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{NgError, Result};

pub type Mat = DMatrix<f64>;
pub type Vect = DVector<f64>;
pub type CMat = DMatrix<Complex64>;
pub type CVect = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Symplectic form for `n` modes in interleaved ordering.
pub fn omega(n: usize) -> Mat {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(2 * i, 2 * i + 1)] = 1.0;
        m[(2 * i + 1, 2 * i)] = -1.0;
    }
    m
}

/// `diag(1, -1)` repeated over `n` modes.
pub fn zmat(n: usize) -> Mat {
    Mat::from_diagonal(&Vect::from_fn(
        2 * n,
        |i, _| if i % 2 == 0 { 1.0 } else { -1.0 },
    ))
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn csymmetrize(m: &CMat) -> CMat {
    (m + m.transpose()) * Complex64::new(0.5, 0.0)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

pub fn cmax_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.norm()))
}

pub fn check_square_even(m: &Mat) -> Result<usize> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(NgError::Shape(format!(
            "expected an even square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows() / 2)
}

/// Quadrature indices (interleaved) of the listed modes.
pub fn quad_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

pub fn submatrix(m: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn subvector(v: &Vect, idx: &[usize]) -> Vect {
    Vect::from_fn(idx.len(), |i, _| v[idx[i]])
}

/// Permutation taking interleaved order to block order: `block[i] = inter[perm[i]]`.
pub fn block_perm(n: usize) -> Vec<usize> {
    (0..n)
        .map(|i| 2 * i)
        .chain((0..n).map(|i| 2 * i + 1))
        .collect()
}

pub fn interleaved_to_block(m: &Mat) -> Mat {
    let p = block_perm(m.nrows() / 2);
    submatrix(m, &p, &p)
}

pub fn block_to_interleaved(m: &Mat) -> Mat {
    let n = m.nrows() / 2;
    let p = block_perm(n);
    let mut out = Mat::zeros(2 * n, 2 * n);
    for i in 0..2 * n {
        for j in 0..2 * n {
            out[(p[i], p[j])] = m[(i, j)];
        }
    }
    out
}

pub fn vec_interleaved_to_block(v: &Vect) -> Vect {
    subvector(v, &block_perm(v.len() / 2))
}

pub fn vec_block_to_interleaved(v: &Vect) -> Vect {
    let p = block_perm(v.len() / 2);
    let mut out = Vect::zeros(v.len());
    for (i, &pi) in p.iter().enumerate() {
        out[pi] = v[i];
    }
    out
}

/// Eigen-decomposition of a real symmetric matrix with ascending eigenvalues.
pub fn sym_eig(m: &Mat) -> (Vect, Mat) {
    let e = symmetrize(m).symmetric_eigen();
    let n = e.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = Vect::from_fn(n, |i, _| e.eigenvalues[order[i]]);
    let vecs = Mat::from_fn(n, n, |i, j| e.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

pub fn sqrtm_psd(m: &Mat) -> Mat {
    let (w, v) = sym_eig(m);
    let d = Mat::from_diagonal(&w.map(|x| x.max(0.0).sqrt()));
    &v * d * v.transpose()
}

pub fn inv(m: &Mat) -> Result<Mat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| NgError::Singular("matrix inverse".into()))
}

pub fn cinv(m: &CMat) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| NgError::Singular("complex matrix inverse".into()))
}

/// 2-norm condition number; infinite for singular input.
pub fn cond(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let s = m.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn complexify(m: &Mat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn cvec(v: &Vect) -> CVect {
    v.map(|x| Complex64::new(x, 0.0))
}

pub fn re(m: &CMat) -> Mat {
    m.map(|z| z.re)
}

pub fn im(m: &CMat) -> Mat {
    m.map(|z| z.im)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eig(m: &CMat) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Block-diagonal direct sum.
pub fn direct_sum(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = Mat::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

pub fn concat(a: &Vect, b: &Vect) -> Vect {
    Vect::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).cloned())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_order_round_trip() {
        let m = Mat::from_fn(6, 6, |i, j| (i * 6 + j) as f64);
        let b = interleaved_to_block(&m);
        assert_eq!(b[(0, 1)], m[(0, 2)]);
        assert_eq!(b[(3, 0)], m[(1, 0)]);
        assert_eq!(block_to_interleaved(&b), m);
        let v = Vect::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            vec_interleaved_to_block(&v).as_slice(),
            &[1.0, 3.0, 2.0, 4.0]
        );
        assert_eq!(vec_block_to_interleaved(&vec_interleaved_to_block(&v)), v);
    }

    #[test]
    fn omega_is_antisymmetric_involution() {
        let o = omega(3);
        assert_eq!(o.transpose(), -&o);
        assert_eq!(&o * &o, -Mat::identity(6, 6));
    }
}
