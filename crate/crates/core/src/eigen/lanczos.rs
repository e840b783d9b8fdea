//! Restarted Lanczos for the largest eigenpair of a symmetric operator.
//!
//! Used only as a warm start: the cooperative operators are diagonally
//! similar to symmetric ones, and plain power iteration needs on the order of
//! `spread / gap` steps, which is prohibitive on long domains where the top of
//! the spectrum clusters.

pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub struct LanczosResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub matvecs: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Number of eigenvalues of the symmetric tridiagonal `(alpha, beta)` below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for k in 0..alpha.len() {
        let b2 = if k == 0 {
            0.0
        } else {
            beta[k - 1] * beta[k - 1]
        };
        q = alpha[k] - x - if k == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (alpha[k].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenpair of a symmetric tridiagonal matrix.
pub(crate) fn tridiagonal_top(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], vec![1.0]);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 }
            + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;
    // Inverse iteration with partial pivoting.
    let scale = hi.abs().max(1.0);
    let shift = theta + 4.0 * f64::EPSILON * scale;
    let mut v = vec![1.0; k];
    for _ in 0..3 {
        v = solve_tridiagonal_shifted(alpha, beta, shift, &v);
        let n = norm(&v);
        for x in &mut v {
            *x /= n;
        }
    }
    (theta, v)
}

/// Solve `(T - shift I) x = rhs` by Gaussian elimination with partial pivoting.
fn solve_tridiagonal_shifted(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = alpha.len();
    let mut d: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
    let mut du: Vec<f64> = beta.to_vec();
    let mut dl: Vec<f64> = beta.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    let tiny = f64::MIN_POSITIVE.sqrt();
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
        dl[i] = 0.0;
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

/// Largest eigenpair of `op`, starting from `start`.
///
/// Stops when the Ritz residual `||S y - theta y||` drops below `tol` or
/// after `max_matvecs` operator applications. The returned vector has unit
/// Euclidean norm.
pub fn top_eigenpair<O: SymmetricOperator + ?Sized>(
    op: &O,
    start: &[f64],
    tol: f64,
    max_basis: usize,
    max_matvecs: usize,
) -> LanczosResult {
    let n = op.dim();
    assert_eq!(start.len(), n);
    let mut y: Vec<f64> = start.to_vec();
    let mut matvecs = 0;
    let mut best: LanczosResult;
    let basis_cap = max_basis.min(n).max(1);
    loop {
        let ny = norm(&y);
        for v in &mut y {
            *v /= ny;
        }
        let mut basis: Vec<Vec<f64>> = vec![y.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![0.0; n];
        let mut done = false;
        loop {
            let k = basis.len() - 1;
            op.apply(&basis[k], &mut w);
            matvecs += 1;
            let a = dot(&basis[k], &w);
            alpha.push(a);
            for (wi, vi) in w.iter_mut().zip(&basis[k]) {
                *wi -= a * vi;
            }
            if k > 0 {
                let b = beta[k - 1];
                for (wi, vi) in w.iter_mut().zip(&basis[k - 1]) {
                    *wi -= b * vi;
                }
            }
            // Full reorthogonalization, two passes.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= c * vi;
                    }
                }
            }
            let b = norm(&w);
            let scale = alpha.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
            let invariant = b <= 1e-14 * scale;
            let full = basis.len() >= basis_cap || matvecs >= max_matvecs;
            let check = invariant || full || alpha.len().is_multiple_of(10);
            if check {
                let ritz = tridiagonal_top(&alpha, &beta);
                let last = *ritz.1.last().unwrap();
                let res = if invariant { 0.0 } else { (b * last).abs() };
                if res <= tol || invariant {
                    done = true;
                }
                if done || full {
                    let mut vec = vec![0.0; n];
                    for (c, v) in ritz.1.iter().zip(&basis) {
                        for (yi, vi) in vec.iter_mut().zip(v) {
                            *yi += c * vi;
                        }
                    }
                    best = LanczosResult {
                        value: ritz.0,
                        vector: vec,
                        matvecs,
                        residual: res,
                    };
                    break;
                }
            }
            beta.push(b);
            let next: Vec<f64> = w.iter().map(|x| x / b).collect();
            basis.push(next);
        }
        if done || matvecs >= max_matvecs {
            let nv = norm(&best.vector);
            for v in &mut best.vector {
                *v /= nv;
            }
            return best;
        }
        y = best.vector.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    struct Dense(DMatrix<f64>);

    impl SymmetricOperator for Dense {
        fn dim(&self) -> usize {
            self.0.nrows()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..self.0.nrows() {
                y[i] = (0..self.0.ncols()).map(|j| self.0[(i, j)] * x[j]).sum();
            }
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let alpha = vec![2.0, -1.0, 0.5, 3.0, 1.0, 0.0];
        let beta = vec![1.0, 0.3, 2.0, 0.1, 0.7];
        let (theta, v) = tridiagonal_top(&alpha, &beta);
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..6 {
            m[(i, i)] = alpha[i];
            if i < 5 {
                m[(i, i + 1)] = beta[i];
                m[(i + 1, i)] = beta[i];
            }
        }
        let eig = m.clone().symmetric_eigen();
        let top = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((theta - top).abs() < 1e-12);
        let mv = &m * DMatrix::from_column_slice(6, 1, &v);
        for i in 0..6 {
            assert!((mv[(i, 0)] - theta * v[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn lanczos_with_restarts() {
        let n = 120;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let d = (i as f64 - j as f64).abs();
            (-d / 3.0).exp() + if i == j { (i as f64 * 0.37).sin() } else { 0.0 }
        });
        let top = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let op = Dense(m);
        let r = top_eigenpair(&op, &vec![1.0; n], 1e-12, 15, 100_000);
        assert!((r.value - top).abs() < 1e-10, "{} vs {}", r.value, top);
        assert!(r.residual <= 1e-12);
    }
}
