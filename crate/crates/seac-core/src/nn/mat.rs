//! Row-major matrices over f32/f64 with a GEMM hook.
//!
//! Training runs in f32; gradient verification instantiates the same code in
//! f64. The three GEMM variants cover every product the network code needs
//! without materializing transposes.

use std::fmt::{Debug, Display};

use num_traits::{Float, NumCast};

/// Element type for network math. The GEMM hook dispatches to the tuned
/// kernels; everything else comes from `Float`.
pub trait Scalar: Float + NumCast + Default + Debug + Display + Send + Sync + 'static {
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );

    fn from64(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 -> scalar conversion")
    }

    fn to64(self) -> f64 {
        <f64 as NumCast>::from(self).expect("scalar -> f64 conversion")
    }
}

impl Scalar for f32 {
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::sgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

impl Scalar for f64 {
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::dgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape mismatch");
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn at(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn fill(&mut self, v: T) {
        self.data.fill(v);
    }

    /// `self = alpha * a @ b + beta * self` with `a: m x k`, `b: k x n`.
    pub fn gemm_nn(&mut self, alpha: T, a: &Mat<T>, b: &Mat<T>, beta: T) {
        assert_eq!(a.cols, b.rows);
        assert_eq!(self.rows, a.rows);
        assert_eq!(self.cols, b.cols);
        unsafe {
            T::gemm_raw(
                a.rows,
                a.cols,
                b.cols,
                alpha,
                a.data.as_ptr(),
                a.cols as isize,
                1,
                b.data.as_ptr(),
                b.cols as isize,
                1,
                beta,
                self.data.as_mut_ptr(),
                self.cols as isize,
                1,
            );
        }
    }

    /// `self = alpha * a @ b^T + beta * self` with `a: m x k`, `b: n x k`.
    pub fn gemm_nt(&mut self, alpha: T, a: &Mat<T>, b: &Mat<T>, beta: T) {
        assert_eq!(a.cols, b.cols);
        assert_eq!(self.rows, a.rows);
        assert_eq!(self.cols, b.rows);
        unsafe {
            T::gemm_raw(
                a.rows,
                a.cols,
                b.rows,
                alpha,
                a.data.as_ptr(),
                a.cols as isize,
                1,
                b.data.as_ptr(),
                1,
                b.cols as isize,
                beta,
                self.data.as_mut_ptr(),
                self.cols as isize,
                1,
            );
        }
    }

    /// `self = alpha * a^T @ b + beta * self` with `a: k x m`, `b: k x n`.
    pub fn gemm_tn(&mut self, alpha: T, a: &Mat<T>, b: &Mat<T>, beta: T) {
        assert_eq!(a.rows, b.rows);
        assert_eq!(self.rows, a.cols);
        assert_eq!(self.cols, b.cols);
        unsafe {
            T::gemm_raw(
                a.cols,
                a.rows,
                b.cols,
                alpha,
                a.data.as_ptr(),
                1,
                a.cols as isize,
                b.data.as_ptr(),
                b.cols as isize,
                1,
                beta,
                self.data.as_mut_ptr(),
                self.cols as isize,
                1,
            );
        }
    }
}
