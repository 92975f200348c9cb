//! Real symmetric eigenvalue solvers.
//!
//! Two routes are provided. [`symmetric_eigenvalues`] is a dense solver:
//! Householder reduction to tridiagonal form followed by implicit QL with
//! Wilkinson-type shifts. [`periodic_jacobi_eigenvalues`] exploits the
//! cyclic-tridiagonal shape of the gauge-reduced Floquet matrices and counts
//! eigenvalues below a trial energy with an `LDLᵀ` inertia count, then
//! bisects. The dense route is the reference; the bisection route is `O(q²)`
//! and is what keeps `q` in the thousands affordable.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("QL iteration failed to converge at eigenvalue {0}")]
    NoConvergence(usize),
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
}

/// Dense real symmetric matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "row {i} has wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Adds `v` at `(i, j)` and at `(j, i)` (once on the diagonal).
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
        if i != j {
            self.data[j * self.n + i] += v;
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<(), EigenError> {
        for i in 0..self.n {
            for j in 0..i {
                let diff = (self.get(i, j) - self.get(j, i)).abs();
                if diff > tol {
                    return Err(EigenError::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(())
    }
}

/// All eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>, EigenError> {
    let n = m.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = m.data.clone();
    let (mut d, mut e) = householder_tridiagonal(&mut a, n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`), ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>, EigenError> {
    assert_eq!(off.len() + 1, diag.len().max(1));
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction of the row-major symmetric `a` (destroyed).
/// Returns the diagonal and the sub-diagonal, the latter as `e[0..n-1]` with
/// `e[n-1] = 0`.
fn householder_tridiagonal(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let idx = |i: usize, j: usize| i * n + j;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[idx(i, j)];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] -= f * e[k] + g * a[idx(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
        d[i] = h;
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }
    // Shift so that e[i] couples i and i+1.
    e.rotate_left(1);
    e[n - 1] = 0.0;
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix; `e[i]` couples `i, i+1`.
/// Eigenvalues are left in `d`, unsorted.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<(), EigenError> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(EigenError::NoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// A real symmetric cyclic-tridiagonal ("periodic Jacobi") matrix:
/// `diag[i]` on the diagonal, `hop[i]` coupling `i, i+1`, and `corner`
/// coupling `0, n-1`. For `n ≤ 2` the corner is added onto the existing
/// entries, so a 1×1 matrix is `diag[0] + 2·corner` and a 2×2 one has
/// off-diagonal `hop[0] + corner`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicJacobi {
    pub diag: Vec<f64>,
    pub hop: Vec<f64>,
    pub corner: f64,
}

impl PeriodicJacobi {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> SymMatrix {
        let n = self.dim();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, self.diag[i]);
        }
        for (i, &h) in self.hop.iter().enumerate().take(n.saturating_sub(1)) {
            m.add_sym(i, i + 1, h);
        }
        match n {
            0 => {}
            1 => m.add_sym(0, 0, 2.0 * self.corner),
            _ => m.add_sym(n - 1, 0, self.corner),
        }
        m
    }

    /// Upper bound on the spectral radius (Gershgorin).
    fn radius(&self) -> f64 {
        let h = self.hop.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        self.diag.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + 2.0 * h + 2.0 * self.corner.abs()
    }

    /// Number of eigenvalues strictly below `x` (Sylvester inertia of `A − x`).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.dim();
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + self.radius());
        let guard = |v: f64| if v == 0.0 { -tiny } else { v };
        let mut count = 0;
        let mut pivot = guard(self.diag[0] - x);
        if pivot < 0.0 {
            count += 1;
        }
        // `fill` is the last-row entry in the column being eliminated.
        let mut fill = self.corner;
        let mut last = self.diag[n - 1] - x;
        for j in 0..n - 2 {
            last -= fill * fill / pivot;
            let next = self.diag[j + 1] - x - self.hop[j] * self.hop[j] / pivot;
            let coupling = if j + 1 == n - 2 { self.hop[n - 2] } else { 0.0 };
            fill = coupling - self.hop[j] * fill / pivot;
            pivot = guard(next);
            if pivot < 0.0 {
                count += 1;
            }
        }
        last -= fill * fill / pivot;
        if guard(last) < 0.0 {
            count += 1;
        }
        count
    }
}

/// All eigenvalues of a periodic Jacobi matrix by inertia-count bisection.
pub fn periodic_jacobi_eigenvalues(m: &PeriodicJacobi) -> Result<Vec<f64>, EigenError> {
    let n = m.dim();
    if n <= 2 {
        return symmetric_eigenvalues(&m.to_dense());
    }
    let r = m.radius() * (1.0 + 1e-12) + 1e-300;
    let mut out = vec![0.0; n];
    // Explicit stack of (lo, hi, count(lo), count(hi)).
    let mut stack = vec![(-r, r, 0usize, n)];
    while let Some((lo, hi, clo, chi)) = stack.pop() {
        if clo == chi {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let width_ok = hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + 4.0 * f64::MIN_POSITIVE;
        if width_ok || mid <= lo || mid >= hi {
            for slot in &mut out[clo..chi] {
                *slot = mid;
            }
            continue;
        }
        let cm = m.count_below(mid).clamp(clo, chi);
        stack.push((mid, hi, cm, chi));
        stack.push((lo, mid, clo, cm));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn two_by_two() {
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert_close(&symmetric_eigenvalues(&m).unwrap(), &[1.0, 3.0], 1e-14);
    }

    #[test]
    fn free_chain_closed_form() {
        // Path graph: eigenvalues 2cos(kπ/(n+1)).
        let n = 37;
        let ev = tridiagonal_eigenvalues(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
        let mut expect: Vec<f64> =
            (1..=n).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
        expect.sort_by(f64::total_cmp);
        assert_close(&ev, &expect, 1e-13);
    }

    #[test]
    fn ring_closed_form() {
        // Cycle graph: eigenvalues 2cos(2πk/n); antiperiodic ring 2cos(π(2k+1)/n).
        let n = 12;
        for (corner, shift) in [(1.0, 0.0), (-1.0, 1.0)] {
            let m = PeriodicJacobi { diag: vec![0.0; n], hop: vec![1.0; n - 1], corner };
            let mut expect: Vec<f64> = (0..n)
                .map(|k| 2.0 * (std::f64::consts::PI * (2.0 * k as f64 + shift) / n as f64).cos())
                .collect();
            expect.sort_by(f64::total_cmp);
            assert_close(&periodic_jacobi_eigenvalues(&m).unwrap(), &expect, 1e-13);
            assert_close(&symmetric_eigenvalues(&m.to_dense()).unwrap(), &expect, 1e-13);
        }
    }

    #[test]
    fn small_periodic_shapes() {
        let one = PeriodicJacobi { diag: vec![1.0], hop: vec![], corner: 1.5 };
        assert_close(&periodic_jacobi_eigenvalues(&one).unwrap(), &[4.0], 0.0);
        let two = PeriodicJacobi { diag: vec![2.0, -2.0], hop: vec![1.0], corner: 1.0 };
        let r = 8f64.sqrt();
        assert_close(&periodic_jacobi_eigenvalues(&two).unwrap(), &[-r, r], 1e-14);
    }

    #[test]
    fn asymmetric_input_detected() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(m.check_symmetric(1e-12), Err(EigenError::NotSymmetric { .. })));
    }

    proptest! {
        #[test]
        fn trace_and_frobenius_preserved(vals in prop::collection::vec(-3.0f64..3.0, 36)) {
            let n = 6;
            let mut m = SymMatrix::zeros(n);
            for i in 0..n { for j in 0..=i { m.set(i, j, vals[i * n + j]); m.set(j, i, vals[i * n + j]); } }
            let ev = symmetric_eigenvalues(&m).unwrap();
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let frob: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m.get(i, j).powi(2)).sum();
            prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-11);
            prop_assert!((ev.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-10);
        }

        #[test]
        fn bisection_matches_dense(diag in prop::collection::vec(-2.0f64..2.0, 3..40), corner in prop::sample::select(vec![1.0, -1.0, 0.5])) {
            let n = diag.len();
            let m = PeriodicJacobi { diag, hop: vec![1.0; n - 1], corner };
            let a = periodic_jacobi_eigenvalues(&m).unwrap();
            let b = symmetric_eigenvalues(&m.to_dense()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12, "{} vs {}", x, y);
            }
        }
    }
}
