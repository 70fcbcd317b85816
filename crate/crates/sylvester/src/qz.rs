//! Generalized Schur (QZ) decomposition of a complex matrix pencil via
//! LAPACK's zgges.
//!
//! For square `(a, b)` it produces unitary `q`, `z` and upper-triangular
//! `s`, `t` with `a = q s z^H` and `b = q t z^H`. LAPACK expects
//! column-major storage, so the wrapper transposes on the way in and out.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::SylError;

type Selctg = Option<unsafe extern "C" fn(*const Complex64, *const Complex64) -> i32>;

#[link(name = "openblas")]
extern "C" {
    fn zgges_(
        jobvsl: *const u8,
        jobvsr: *const u8,
        sort: *const u8,
        selctg: Selctg,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        b: *mut Complex64,
        ldb: *const i32,
        sdim: *mut i32,
        alpha: *mut Complex64,
        beta: *mut Complex64,
        vsl: *mut Complex64,
        ldvsl: *const i32,
        vsr: *mut Complex64,
        ldvsr: *const i32,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        bwork: *mut i32,
        info: *mut i32,
    );
}

/// `a = q s z^H`, `b = q t z^H` with `s`, `t` upper triangular.
#[derive(Debug, Clone)]
pub struct Qz {
    pub s: Array2<Complex64>,
    pub t: Array2<Complex64>,
    pub q: Array2<Complex64>,
    pub z: Array2<Complex64>,
}

fn to_col_major(a: &Array2<Complex64>) -> Vec<Complex64> {
    let n = a.nrows();
    let mut v = vec![Complex64::ZERO; n * n];
    for j in 0..n {
        for i in 0..n {
            v[i + j * n] = a[(i, j)];
        }
    }
    v
}

fn from_col_major(v: &[Complex64], n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| v[i + j * n])
}

/// Computes the generalized Schur form of the pencil `(a, b)`.
pub fn qz(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Qz, SylError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(SylError::InvalidDimensions {
            detail: format!(
                "qz needs square matrices of equal size, got {:?} and {:?}",
                a.dim(),
                b.dim()
            ),
        });
    }
    if n == 0 {
        let empty = Array2::zeros((0, 0));
        return Ok(Qz { s: empty.clone(), t: empty.clone(), q: empty.clone(), z: empty });
    }
    let ni = n as i32;
    let mut am = to_col_major(a);
    let mut bm = to_col_major(b);
    let mut alpha = vec![Complex64::ZERO; n];
    let mut beta = vec![Complex64::ZERO; n];
    let mut vsl = vec![Complex64::ZERO; n * n];
    let mut vsr = vec![Complex64::ZERO; n * n];
    let mut rwork = vec![0.0f64; 8 * n];
    let mut sdim: i32 = 0;
    let mut info: i32 = 0;

    // Workspace query, then the real factorization.
    let mut work_probe = [Complex64::ZERO; 1];
    let query: i32 = -1;
    unsafe {
        zgges_(
            b"V".as_ptr(),
            b"V".as_ptr(),
            b"N".as_ptr(),
            None,
            &ni,
            am.as_mut_ptr(),
            &ni,
            bm.as_mut_ptr(),
            &ni,
            &mut sdim,
            alpha.as_mut_ptr(),
            beta.as_mut_ptr(),
            vsl.as_mut_ptr(),
            &ni,
            vsr.as_mut_ptr(),
            &ni,
            work_probe.as_mut_ptr(),
            &query,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(SylError::Lapack { routine: "zgges (workspace query)", info });
    }
    let lwork = work_probe[0].re.max(1.0) as i32;
    let mut work = vec![Complex64::ZERO; lwork as usize];
    unsafe {
        zgges_(
            b"V".as_ptr(),
            b"V".as_ptr(),
            b"N".as_ptr(),
            None,
            &ni,
            am.as_mut_ptr(),
            &ni,
            bm.as_mut_ptr(),
            &ni,
            &mut sdim,
            alpha.as_mut_ptr(),
            beta.as_mut_ptr(),
            vsl.as_mut_ptr(),
            &ni,
            vsr.as_mut_ptr(),
            &ni,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            std::ptr::null_mut(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(SylError::Lapack { routine: "zgges", info });
    }
    Ok(Qz {
        s: from_col_major(&am, n),
        t: from_col_major(&bm, n),
        q: from_col_major(&vsl, n),
        z: from_col_major(&vsr, n),
    })
}
