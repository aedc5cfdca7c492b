//! Banded and dense linear algebra kernels used by the solvers and the
//! spectral routines.

use faer::complex_native::c64;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::symbol_sets::ComplexPoint;

type C = ComplexPoint;

/// Relative pivot threshold below which the Thomas fast path gives up.
pub const THOMAS_PIVOT_TOL: f64 = 1e-12;

/// Thomas algorithm for a tridiagonal system.
///
/// `sub[i]` couples row `i + 1` to column `i`, `sup[i]` couples row `i` to column `i + 1`.
/// Returns `None` when a pivot drops below `THOMAS_PIVOT_TOL` times the matrix scale.
pub fn thomas(sub: &[C], diag: &[C], sup: &[C], rhs: &[C]) -> Option<Vec<C>> {
    let n = diag.len();
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Some(Vec::new());
    }
    let scale = diag
        .iter()
        .chain(sub)
        .chain(sup)
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let tol = THOMAS_PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
    let mut c = vec![C::new(0.0, 0.0); n];
    let mut d = vec![C::new(0.0, 0.0); n];
    let mut piv = diag[0];
    if piv.norm() < tol {
        return None;
    }
    if n > 1 {
        c[0] = sup[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i - 1] * c[i - 1];
        if piv.norm() < tol {
            return None;
        }
        if i < n - 1 {
            c[i] = sup[i] / piv;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Some(d)
}

/// Square band matrix with `kl` sub- and `ku` superdiagonals, stored with room
/// for the fill-in produced by partial pivoting.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![C::new(0.0, 0.0); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if i < self.n && j < self.n && off >= 0 && (off as usize) < self.width {
            Some(i * self.width + off as usize)
        } else {
            None
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.slot(i, j).map_or(C::new(0.0, 0.0), |s| self.data[s])
    }

    pub fn set(&mut self, i: usize, j: usize, z: C) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = z;
    }

    /// `A - shift I`
    pub fn shifted(&self, shift: C) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let z = out.get(i, i) - shift;
            out.set(i, i, z);
        }
        out
    }

    /// LU factorization with partial pivoting.
    pub fn factor(&self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut a = self.clone();
        let mut piv = vec![0usize; n];
        let mut mult = vec![C::new(0.0, 0.0); n * kl.max(1)];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.get(k, k).norm();
            for r in k + 1..=last {
                let m = a.get(r, k).norm();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Error::ExactlySingular(k));
            }
            piv[k] = p;
            let jmax = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let x = a.get(k, j);
                    let y = a.get(p, j);
                    a.set(k, j, y);
                    if a.slot(p, j).is_some() {
                        a.set(p, j, x);
                    }
                }
            }
            let pivot = a.get(k, k);
            for r in k + 1..=last {
                let l = a.get(r, k) / pivot;
                mult[k * kl.max(1) + (r - k - 1)] = l;
                a.set(r, k, C::new(0.0, 0.0));
                if l != C::new(0.0, 0.0) {
                    for j in k + 1..=jmax {
                        let z = a.get(r, j) - l * a.get(k, j);
                        a.set(r, j, z);
                    }
                }
            }
        }
        Ok(BandLu { u: a, piv, mult })
    }
}

/// Factors of a [`BandMatrix`]; solves with `A` and with `A^*`.
#[derive(Clone, Debug)]
pub struct BandLu {
    u: BandMatrix,
    piv: Vec<usize>,
    mult: Vec<C>,
}

impl BandLu {
    fn upper_width(&self) -> usize {
        self.u.ku + self.u.kl
    }

    fn m(&self, k: usize, r: usize) -> C {
        self.mult[k * self.u.kl.max(1) + (r - k - 1)]
    }

    pub fn solve(&self, b: &[C]) -> Vec<C> {
        let n = self.u.n;
        let kl = self.u.kl;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for r in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                x[r] -= self.m(k, r) * xk;
            }
        }
        let w = self.upper_width();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..=(i + w).min(n - 1) {
                s -= self.u.get(i, j) * x[j];
            }
            x[i] = s / self.u.get(i, i);
        }
        x
    }

    /// Solves `A^* x = b`.
    pub fn solve_adjoint(&self, b: &[C]) -> Vec<C> {
        let n = self.u.n;
        let kl = self.u.kl;
        let w = self.upper_width();
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for j in i.saturating_sub(w)..i {
                s -= self.u.get(j, i).conj() * x[j];
            }
            x[i] = s / self.u.get(i, i).conj();
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for r in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                s -= self.m(k, r).conj() * x[r];
            }
            x[k] = s;
            x.swap(k, self.piv[k]);
        }
        x
    }
}

/// Back substitution for an upper triangular matrix with bands at offsets 0, 1, 2.
///
/// `d0[i] = A(i, i)`, `d1[i] = A(i, i + 1)`, `d2[i] = A(i, i + 2)`.
pub fn upper_substitution(d0: &[C], d1: &[C], d2: &[C], rhs: &[C]) -> Result<Vec<C>> {
    let n = d0.len();
    let mut x = vec![C::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= d1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= d2[i] * x[i + 2];
        }
        if d0[i] == C::new(0.0, 0.0) {
            return Err(Error::ExactlySingular(i));
        }
        x[i] = s / d0[i];
    }
    Ok(x)
}

/// Forward substitution for a lower triangular matrix with bands at offsets -2, -1, 0.
///
/// `d0[i] = A(i, i)`, `l1[i] = A(i + 1, i)`, `l2[i] = A(i + 2, i)`.
pub fn lower_substitution(l2: &[C], l1: &[C], d0: &[C], rhs: &[C]) -> Result<Vec<C>> {
    let n = d0.len();
    let mut x = vec![C::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = rhs[i];
        if i >= 1 {
            s -= l1[i - 1] * x[i - 1];
        }
        if i >= 2 {
            s -= l2[i - 2] * x[i - 2];
        }
        if d0[i] == C::new(0.0, 0.0) {
            return Err(Error::ExactlySingular(i));
        }
        x[i] = s / d0[i];
    }
    Ok(x)
}

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (implicit QL with Wilkinson shifts), sorted ascending.
pub fn sym_tridiag_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::repeat(0.0)).take(n).collect();
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
            if iter > 100 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut deflated = false;
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
                    deflated = true;
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
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator via
/// Lanczos with full reorthogonalization.
///
/// Stops when the Ritz residual falls below `rtol` times the Ritz value.
pub fn lanczos_largest<F>(n: usize, mut apply: F, rtol: f64, max_iter: usize) -> f64
where
    F: FnMut(&[C]) -> Vec<C>,
{
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<C> = (0..n).map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    normalize(&mut q);
    let mut basis: Vec<Vec<C>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut theta = 0.0;
    let limit = max_iter.min(n);
    for k in 0..limit {
        let mut z = apply(&q);
        let a = dot(&q, &z).re;
        basis.push(q.clone());
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let h = dot(b, &z);
                for (zi, bi) in z.iter_mut().zip(b) {
                    *zi -= h * bi;
                }
            }
        }
        let bnorm = norm(&z);
        theta = *sym_tridiag_eigenvalues(&alpha, &beta).last().unwrap();
        if bnorm <= f64::EPSILON * theta.abs().max(f64::MIN_POSITIVE) || k + 1 == limit {
            break;
        }
        let last = ritz_last_component(&alpha, &beta, theta);
        if bnorm * last.abs() <= rtol * theta {
            break;
        }
        beta.push(bnorm);
        q = z.iter().map(|zi| zi / bnorm).collect();
    }
    theta
}

/// Last component of the unit eigenvector of the tridiagonal `(alpha, beta)` for eigenvalue `theta`.
fn ritz_last_component(alpha: &[f64], beta: &[f64], theta: f64) -> f64 {
    let k = alpha.len();
    if k == 1 {
        return 1.0;
    }
    // inverse iteration with a slightly perturbed shift
    let shift = theta * (1.0 + 1e-13) + 1e-300;
    let sub: Vec<C> = beta.iter().map(|&b| C::new(b, 0.0)).collect();
    let diag: Vec<C> = alpha.iter().map(|&a| C::new(a - shift, 0.0)).collect();
    let mut y = vec![C::new(1.0, 0.0); k];
    for _ in 0..3 {
        let next = match thomas(&sub, &diag, &sub, &y) {
            Some(v) => v,
            None => {
                let mut m = BandMatrix::zeros(k, 1, 1);
                for i in 0..k {
                    m.set(i, i, diag[i] + C::new(1e-14 * theta.abs().max(1e-300), 0.0));
                    if i + 1 < k {
                        m.set(i, i + 1, sub[i]);
                        m.set(i + 1, i, sub[i]);
                    }
                }
                match m.factor() {
                    Ok(lu) => lu.solve(&y),
                    Err(_) => return 0.0,
                }
            }
        };
        y = next;
        let s = norm(&y);
        if !s.is_finite() || s == 0.0 {
            return 0.0;
        }
        for yi in y.iter_mut() {
            *yi /= s;
        }
    }
    y[k - 1].norm()
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [C]) {
    let s = norm(a);
    for z in a.iter_mut() {
        *z /= s;
    }
}

/// Dense matrix in row-major order, used for the small dense paths.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<C>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C::new(0.0, 0.0); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C) {
        self.data[i * self.n + j] = z;
    }

    fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.n, self.n, |i, j| {
            let z = self.get(i, j);
            c64::new(z.re, z.im)
        })
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.n == 0 {
            return Vec::new();
        }
        let mut s = self.to_faer().singular_values();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn eigenvalues(&self) -> Vec<C> {
        if self.n == 0 {
            return Vec::new();
        }
        self.to_faer()
            .eigenvalues::<c64>()
            .into_iter()
            .map(|z| C::new(z.re, z.im))
            .collect()
    }
}
