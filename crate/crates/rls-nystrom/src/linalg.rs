//! Dense symmetric linear algebra on top of the system LAPACK.
//!
//! Everything here is crate-internal plumbing: symmetric eigendecomposition,
//! Cholesky solves with jitter escalation, QR-based orthonormalization, and
//! pivoted Cholesky for rank-revealing square roots. Buffers are passed to
//! LAPACK in column-major order; symmetric inputs need no transposition.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView2};

extern "C" {
    fn dsyevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    fn dpotrf_(uplo: *const u8, n: *const i32, a: *mut f64, lda: *const i32, info: *mut i32);
    fn dpotrs_(
        uplo: *const u8,
        n: *const i32,
        nrhs: *const i32,
        a: *const f64,
        lda: *const i32,
        b: *mut f64,
        ldb: *const i32,
        info: *mut i32,
    );
    fn dpstrf_(
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        piv: *mut i32,
        rank: *mut i32,
        tol: *const f64,
        work: *mut f64,
        info: *mut i32,
    );
    fn dgeqrf_(
        m: *const i32,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        tau: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        info: *mut i32,
    );
    fn dorgqr_(
        m: *const i32,
        n: *const i32,
        k: *const i32,
        a: *mut f64,
        lda: *const i32,
        tau: *const f64,
        work: *mut f64,
        lwork: *const i32,
        info: *mut i32,
    );
}

fn square_buffer(a: &ArrayView2<f64>) -> Vec<f64> {
    // Column-major copy. For the symmetric matrices passed here the row-major
    // layout would be equivalent, but copying explicitly keeps the contract
    // independent of the caller's memory order.
    let (n, m) = a.dim();
    let mut buf = vec![0.0; n * m];
    for j in 0..m {
        for i in 0..n {
            buf[i + j * n] = a[[i, j]];
        }
    }
    buf
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come back in ascending order; `vectors.column(j)` is the
/// eigenvector paired with `values[j]`.
pub struct SymEig {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

pub fn sym_eigh(a: &ArrayView2<f64>) -> Result<SymEig> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::invalid_argument("sym_eigh: matrix must be square"));
    }
    if n == 0 {
        return Ok(SymEig {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
        });
    }
    let mut buf = square_buffer(a);
    let mut w = vec![0.0f64; n];
    let ni = n as i32;
    let mut info = 0i32;
    unsafe {
        let mut wkopt = 0.0f64;
        let mut iwkopt = 0i32;
        dsyevd_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            &mut wkopt,
            &-1,
            &mut iwkopt,
            &-1,
            &mut info,
        );
        let lwork = wkopt as i32;
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        let mut iwork = vec![0i32; iwkopt.max(1) as usize];
        dsyevd_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &iwkopt,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerical(format!("dsyevd failed with info={info}")));
    }
    // buf holds eigenvectors column-major; transpose into a standard-layout
    // array whose column j is eigenvector j.
    let mut vectors = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            vectors[[i, j]] = buf[i + j * n];
        }
    }
    Ok(SymEig {
        values: Array1::from(w),
        vectors,
    })
}

/// Eigenvalues only, ascending.
pub fn sym_eigvals(a: &ArrayView2<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::invalid_argument(
            "sym_eigvals: matrix must be square",
        ));
    }
    if n == 0 {
        return Ok(Array1::zeros(0));
    }
    let mut buf = square_buffer(a);
    let mut w = vec![0.0f64; n];
    let ni = n as i32;
    let mut info = 0i32;
    unsafe {
        let mut wkopt = 0.0f64;
        let mut iwkopt = 0i32;
        dsyevd_(
            b"N".as_ptr(),
            b"L".as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            &mut wkopt,
            &-1,
            &mut iwkopt,
            &-1,
            &mut info,
        );
        let lwork = wkopt as i32;
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        let mut iwork = vec![0i32; iwkopt.max(1) as usize];
        dsyevd_(
            b"N".as_ptr(),
            b"L".as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &iwkopt,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numerical(format!("dsyevd failed with info={info}")));
    }
    Ok(Array1::from(w))
}

/// Cholesky factorization of a symmetric positive-definite matrix, kept in
/// LAPACK's column-major form so `dpotrs` can reuse it directly.
pub struct PsdCholesky {
    n: usize,
    factor: Vec<f64>,
}

impl PsdCholesky {
    fn try_factor(a: &ArrayView2<f64>, jitter: f64) -> Option<Self> {
        let n = a.nrows();
        let mut buf = square_buffer(a);
        for i in 0..n {
            buf[i + i * n] += jitter;
        }
        let ni = n as i32;
        let mut info = 0i32;
        unsafe {
            dpotrf_(b"L".as_ptr(), &ni, buf.as_mut_ptr(), &ni, &mut info);
        }
        (info == 0).then_some(PsdCholesky { n, factor: buf })
    }

    /// Factor with escalating diagonal jitter: first attempt unjittered, then
    /// `base_jitter`, growing tenfold per retry, at most three retries.
    pub fn factor_with_jitter(a: &ArrayView2<f64>, base_jitter: f64) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::invalid_argument("cholesky: matrix must be square"));
        }
        if let Some(f) = Self::try_factor(a, 0.0) {
            return Ok(f);
        }
        let mut jitter = base_jitter;
        for _ in 0..3 {
            if let Some(f) = Self::try_factor(a, jitter) {
                return Ok(f);
            }
            jitter *= 10.0;
        }
        Err(Error::Numerical(format!(
            "cholesky failed after jitter escalation up to {:.3e}",
            jitter / 10.0
        )))
    }

    /// Solve `G x = rhs[i, :]` for every row of `rhs`, returning a matrix of
    /// the same shape. `rhs` must have `n` columns.
    pub fn solve_rows(&self, rhs: &ArrayView2<f64>) -> Result<Array2<f64>> {
        if rhs.ncols() != self.n {
            return Err(Error::invalid_argument("solve_rows: width mismatch"));
        }
        let rows = rhs.nrows();
        if rows == 0 {
            return Ok(Array2::zeros((0, self.n)));
        }
        // A row-major (rows x n) buffer is the column-major transpose, which
        // is exactly the (n x rows) right-hand side dpotrs expects.
        let mut buf: Vec<f64> = Vec::with_capacity(rows * self.n);
        for r in rhs.rows() {
            buf.extend(r.iter());
        }
        let ni = self.n as i32;
        let nrhs = rows as i32;
        let mut info = 0i32;
        unsafe {
            dpotrs_(
                b"L".as_ptr(),
                &ni,
                &nrhs,
                self.factor.as_ptr(),
                &ni,
                buf.as_mut_ptr(),
                &ni,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::Numerical(format!("dpotrs failed with info={info}")));
        }
        Ok(Array2::from_shape_vec((rows, self.n), buf).expect("shape preserved"))
    }

    pub fn solve_vec(&self, v: &Array1<f64>) -> Result<Array1<f64>> {
        let rhs = v.view().insert_axis(ndarray::Axis(0));
        let solved = self.solve_rows(&rhs)?;
        Ok(solved.row(0).to_owned())
    }
}

/// Rank-revealing pivoted Cholesky: returns `B` (n x rank) with
/// `B Bᵀ ≈ A`, truncated at the given diagonal tolerance.
pub fn pivoted_cholesky(a: &ArrayView2<f64>, tol: f64) -> Result<(Array2<f64>, usize)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::invalid_argument(
            "pivoted_cholesky: matrix must be square",
        ));
    }
    if n == 0 {
        return Ok((Array2::zeros((0, 0)), 0));
    }
    let mut buf = square_buffer(a);
    let ni = n as i32;
    let mut piv = vec![0i32; n];
    let mut rank = 0i32;
    let mut work = vec![0.0f64; 2 * n];
    let mut info = 0i32;
    unsafe {
        dpstrf_(
            b"L".as_ptr(),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            piv.as_mut_ptr(),
            &mut rank,
            &tol,
            work.as_mut_ptr(),
            &mut info,
        );
    }
    if info < 0 {
        return Err(Error::Numerical(format!("dpstrf failed with info={info}")));
    }
    let r = rank.max(0) as usize;
    // P^T A P = L L^T, so A = (P L)(P L)^T; row piv[j]-1 of B is row j of L.
    let mut b = Array2::zeros((n, r));
    for j in 0..n {
        let dest = (piv[j] - 1) as usize;
        for c in 0..r.min(j + 1) {
            b[[dest, c]] = buf[j + c * n];
        }
    }
    Ok((b, r))
}

/// Orthonormalize: QR of the given (n x k) matrix, returning Q with the sign
/// convention that the R diagonal is nonnegative (determinism across runs).
pub fn orthonormal_columns(a: &ArrayView2<f64>) -> Result<Array2<f64>> {
    let (n, k) = a.dim();
    if k > n {
        return Err(Error::invalid_argument("orthonormal_columns: k > n"));
    }
    if k == 0 {
        return Ok(Array2::zeros((n, 0)));
    }
    let mut buf = vec![0.0f64; n * k];
    for j in 0..k {
        for i in 0..n {
            buf[i + j * n] = a[[i, j]];
        }
    }
    let m = n as i32;
    let kk = k as i32;
    let mut tau = vec![0.0f64; k];
    let mut info = 0i32;
    unsafe {
        let mut wkopt = 0.0f64;
        dgeqrf_(
            &m,
            &kk,
            buf.as_mut_ptr(),
            &m,
            tau.as_mut_ptr(),
            &mut wkopt,
            &-1,
            &mut info,
        );
        let lwork = wkopt as i32;
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        dgeqrf_(
            &m,
            &kk,
            buf.as_mut_ptr(),
            &m,
            tau.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
        if info != 0 {
            return Err(Error::Numerical(format!("dgeqrf failed with info={info}")));
        }
    }
    let signs: Vec<f64> = (0..k)
        .map(|j| if buf[j + j * n] < 0.0 { -1.0 } else { 1.0 })
        .collect();
    unsafe {
        let mut wkopt = 0.0f64;
        dorgqr_(
            &m,
            &kk,
            &kk,
            buf.as_mut_ptr(),
            &m,
            tau.as_ptr(),
            &mut wkopt,
            &-1,
            &mut info,
        );
        let lwork = wkopt as i32;
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        dorgqr_(
            &m,
            &kk,
            &kk,
            buf.as_mut_ptr(),
            &m,
            tau.as_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
        if info != 0 {
            return Err(Error::Numerical(format!("dorgqr failed with info={info}")));
        }
    }
    let mut q = Array2::zeros((n, k));
    for j in 0..k {
        for i in 0..n {
            q[[i, j]] = buf[i + j * n] * signs[j];
        }
    }
    Ok(q)
}

/// Enforce exact symmetry by averaging with the transpose.
pub fn symmetrize(a: &mut Array2<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
}
