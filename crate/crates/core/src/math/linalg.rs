//! Dense complex matrices and a cyclic Jacobi eigensolver for small
//! Hermitian matrices.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

/// Row-major dense complex matrix. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries supplied for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let data = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).map(|(r, c)| f(r, c)).collect();
        Self::new(rows, cols, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |r, c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_fn(values.len(), values.len(), |r, c| Complex64::new(if r == c { values[r] } else { 0.0 }, 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn conj_transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self[(r, c)].conj());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows * rhs.cols];
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out[r * rhs.cols..(r + 1) * rhs.cols].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: self.rows, cols: rhs.cols, data: out })
    }

    /// Gram matrix of the smaller side: AᴴA when rows ≥ cols, AAᴴ otherwise.
    /// Its eigenvalues are the min(rows, cols) squared singular values of A.
    pub fn smaller_gram(&self) -> Self {
        let (inner, outer) = if self.rows >= self.cols { (self.rows, self.cols) } else { (self.cols, self.rows) };
        // entry (i, j) = Σ_k conj(v_k,i) v_k,j where v ranges over the long side
        let at = |k: usize, i: usize| if self.rows >= self.cols { self[(k, i)] } else { self[(i, k)].conj() };
        let mut data = vec![Complex64::new(0.0, 0.0); outer * outer];
        for i in 0..outer {
            for j in i..outer {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..inner {
                    acc += at(k, i).conj() * at(k, j);
                }
                if i == j {
                    acc.im = 0.0;
                }
                data[i * outer + j] = acc;
                data[j * outer + i] = acc.conj();
            }
        }
        Self { rows: outer, cols: outer, data }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

const HERMITIAN_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// Cyclic Jacobi with complex Givens rotations; eigenvectors are not
/// accumulated.
pub fn hermitian_eigenvalues(g: &ComplexMatrix) -> Result<Vec<f64>> {
    if !g.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", g.rows(), g.cols())));
    }
    let n = g.rows();
    let scale = g.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            asym = asym.max((g[(i, j)] - g[(j, i)].conj()).norm());
        }
    }
    if scale > 0.0 && asym > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(asym / scale));
    }

    let mut a = g.clone();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let total: f64 = a.frobenius_norm_sqr();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

/// Annihilates a[p][q] with A ← JᴴAJ, J = diag(1, e^{-iφ}) · [[c, s], [-s, c]].
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e_minus = phase.conj();

    // columns: A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * e_minus * s;
        a[(k, q)] = akp * s + akq * e_minus * c;
    }
    // rows: A ← Jᴴ A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{sample_complex_gaussian, RngState};

    #[test]
    fn identity_and_diagonal() {
        assert_eq!(hermitian_eigenvalues(&ComplexMatrix::identity(3).unwrap()).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(hermitian_eigenvalues(&ComplexMatrix::diagonal(&[2.0, 5.0]).unwrap()).unwrap(), vec![5.0, 2.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2, 1+i], [1-i, 3]]: eigenvalues (5 ± √(1 + 8))/2 = 4, 1
        let g = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(1.0, -1.0),
                Complex64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eigenvalues(&g).unwrap();
        assert!((e[0] - 4.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14, "{e:?}");
    }

    #[test]
    fn rejects_bad_shapes() {
        let r = ComplexMatrix::from_real(2, 3, &[0.0; 6]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&r), Err(Error::Dimension(_))));
        let ns = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&ns), Err(Error::NotHermitian(_))));
        assert!(ComplexMatrix::from_real(0, 2, &[]).is_err());
    }

    /// Determinant by Gaussian elimination with partial pivoting, independent
    /// of the eigen route.
    fn det(m: &ComplexMatrix) -> Complex64 {
        let n = m.rows();
        let mut a: Vec<Vec<Complex64>> = (0..n).map(|r| (0..n).map(|c| m[(r, c)]).collect()).collect();
        let mut d = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm())).unwrap();
            if piv != col {
                a.swap(piv, col);
                d = -d;
            }
            let p = a[col][col];
            d *= p;
            for r in col + 1..n {
                let f = a[r][col] / p;
                for c in col..n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
        d
    }

    #[test]
    fn random_hermitian_trace_and_determinant() {
        for seed in 0..20 {
            let a = sample_complex_gaussian(4, 4, 1.0, RngState::new(seed, 3)).unwrap();
            let h = ComplexMatrix::from_fn(4, 4, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5).unwrap();
            let e = hermitian_eigenvalues(&h).unwrap();
            let tr = h.trace().re;
            let sum: f64 = e.iter().sum();
            assert!((sum - tr).abs() <= 1e-9 * tr.abs().max(1.0));
            let prod: f64 = e.iter().product();
            let d = det(&h).re;
            assert!((prod - d).abs() <= 1e-9 * d.abs().max(1.0), "seed {seed}: {prod} vs {d}");
            assert!(e.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn gram_spectrum_is_nonnegative_and_sums_to_frobenius() {
        for (seed, (r, c)) in [(1u64, (6usize, 3usize)), (2, (3, 6)), (3, (8, 8)), (4, (16, 4))] {
            let a = sample_complex_gaussian(r, c, 1.0, RngState::new(seed, 0)).unwrap();
            let g = a.smaller_gram();
            let full = a.conj_transpose().matmul(&a).unwrap();
            if r >= c {
                for (x, y) in g.as_slice().iter().zip(full.as_slice()) {
                    assert!((x - y).norm() < 1e-12 * a.frobenius_norm_sqr());
                }
            }
            let e = hermitian_eigenvalues(&g).unwrap();
            let fro = a.frobenius_norm_sqr();
            assert!(e.iter().all(|&x| x >= -1e-10 * fro));
            assert!((e.iter().sum::<f64>() - fro).abs() <= 1e-9 * fro);
        }
    }
}
