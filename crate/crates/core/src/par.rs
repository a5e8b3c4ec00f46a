//! Data-parallel kernels.
//!
//! With the `parallel` feature (on by default) the row loops run on the rayon
//! pool; without it every kernel falls back to the serial version. Both
//! versions stay public so the benches can compare them in one build.

use num_complex::Complex64;

use crate::matrix::ZERO;

/// Row-major `a (m x k) * b (k x n)`.
pub fn matmul(a: &[Complex64], m: usize, k: usize, b: &[Complex64], n: usize) -> Vec<Complex64> {
    #[cfg(feature = "parallel")]
    {
        // small products are not worth the fork/join
        if m * k * n >= 32 * 32 * 32 {
            return matmul_parallel(a, m, k, b, n);
        }
    }
    matmul_serial(a, m, k, b, n)
}

#[inline]
fn row_kernel(a_row: &[Complex64], b: &[Complex64], n: usize, out: &mut [Complex64]) {
    for (p, &x) in a_row.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        let b_row = &b[p * n..(p + 1) * n];
        for (o, y) in out.iter_mut().zip(b_row) {
            *o += x * y;
        }
    }
}

pub fn matmul_serial(
    a: &[Complex64],
    m: usize,
    k: usize,
    b: &[Complex64],
    n: usize,
) -> Vec<Complex64> {
    let mut out = vec![ZERO; m * n];
    if n == 0 {
        return out;
    }
    for (i, row) in out.chunks_mut(n).enumerate() {
        row_kernel(&a[i * k..(i + 1) * k], b, n, row);
    }
    out
}

#[cfg(feature = "parallel")]
pub fn matmul_parallel(
    a: &[Complex64],
    m: usize,
    k: usize,
    b: &[Complex64],
    n: usize,
) -> Vec<Complex64> {
    use rayon::prelude::*;

    let mut out = vec![ZERO; m * n];
    if n == 0 {
        return out;
    }
    out.par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| row_kernel(&a[i * k..(i + 1) * k], b, n, row));
    out
}

/// Map over a slice, in parallel when the feature is enabled.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fill `out` in fixed-size chunks; `f(chunk_index, chunk)`.
pub fn for_each_chunk<F>(out: &mut [Complex64], chunk: usize, f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if out.len() >= 4096 {
            out.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
    }
    out.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}
