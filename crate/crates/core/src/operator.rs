//! Finite sections `P_{l,r} S^k A P_{l,r}` of a tridiagonal operator and its
//! two one-step translations, plus the constant-diagonal special cases.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BandMatrix, DenseMatrix};
use crate::pseudoergodic::DiagonalField;
use crate::symbol_sets::{ComplexPoint, TOL_CASE};

type C = ComplexPoint;

const ZERO: C = C::new(0.0, 0.0);

/// Square window `[l, r]` of `S^k A`.
///
/// The three bands sit at column offsets `-k - 1`, `-k`, `-k + 1` and are indexed
/// by `min(i, j) - l`, so a band at offset `o` holds `r - l + 1 - |o|` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandedSystem {
    pub l: i64,
    pub r: i64,
    pub shift_k: i32,
    pub sub: Vec<C>,
    pub main: Vec<C>,
    pub sup: Vec<C>,
}

impl BandedSystem {
    /// Checks shapes and builds a system from raw bands.
    pub fn from_bands(l: i64, r: i64, shift_k: i32, sub: Vec<C>, main: Vec<C>, sup: Vec<C>) -> Result<Self> {
        if !(-1..=1).contains(&shift_k) {
            return Err(Error::UnsupportedShift(shift_k));
        }
        if r < l {
            return Err(Error::InvalidInput(format!("empty window [{l}, {r}]")));
        }
        let n = (r - l + 1) as usize;
        let sys = Self { l, r, shift_k, sub, main, sup };
        for (o, band) in sys.offsets().into_iter().zip(sys.bands()) {
            let expected = n.saturating_sub(o.unsigned_abs() as usize);
            if band.len() != expected {
                return Err(Error::DimensionError { expected, got: band.len() });
            }
        }
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        (self.r - self.l + 1) as usize
    }

    /// Column offsets of `sub`, `main`, `sup`.
    pub fn offsets(&self) -> [i64; 3] {
        let k = self.shift_k as i64;
        [-k - 1, -k, -k + 1]
    }

    fn bands(&self) -> [&Vec<C>; 3] {
        [&self.sub, &self.main, &self.sup]
    }

    /// Entry `(i, j)` in absolute indices; zero off the band or outside the window.
    pub fn get(&self, i: i64, j: i64) -> C {
        if i < self.l || i > self.r || j < self.l || j > self.r {
            return ZERO;
        }
        let t = (i.min(j) - self.l) as usize;
        match self.offsets().iter().position(|&o| o == j - i) {
            Some(b) => self.bands()[b][t],
            None => ZERO,
        }
    }

    /// `y = P S^k A P x` with `x` indexed over `[l, r]`.
    pub fn apply(&self, x: &[C]) -> Result<Vec<C>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionError { expected: n, got: x.len() });
        }
        let mut y = vec![ZERO; n];
        for (o, band) in self.offsets().into_iter().zip(self.bands()) {
            for (t, &a) in band.iter().enumerate() {
                let (row, col) = if o >= 0 { (t, t + o as usize) } else { (t + (-o) as usize, t) };
                y[row] += a * x[col];
            }
        }
        Ok(y)
    }

    /// Anti-transpose `(i, j) -> (l + r - j, l + r - i)`.
    pub fn reflect(&self) -> Result<Self> {
        if self.shift_k != 0 {
            return Err(Error::UnsupportedShift(self.shift_k));
        }
        let rev = |b: &Vec<C>| b.iter().rev().copied().collect::<Vec<_>>();
        Ok(Self {
            l: self.l,
            r: self.r,
            shift_k: 0,
            sub: rev(&self.sub),
            main: rev(&self.main),
            sup: rev(&self.sup),
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut d = DenseMatrix::zeros(n);
        for (o, band) in self.offsets().into_iter().zip(self.bands()) {
            for (t, &a) in band.iter().enumerate() {
                let (row, col) = if o >= 0 { (t, t + o as usize) } else { (t + (-o) as usize, t) };
                d.set(row, col, a);
            }
        }
        d
    }

    /// Band storage with room for two sub- and two superdiagonals.
    pub fn to_band(&self) -> BandMatrix {
        let n = self.dim();
        let lo = -self.offsets()[0].min(0);
        let hi = self.offsets()[2].max(0);
        let mut m = BandMatrix::zeros(n, lo as usize, hi as usize);
        for (o, band) in self.offsets().into_iter().zip(self.bands()) {
            for (t, &a) in band.iter().enumerate() {
                let (row, col) = if o >= 0 { (t, t + o as usize) } else { (t + (-o) as usize, t) };
                m.set(row, col, a);
            }
        }
        m
    }

    /// Largest entry modulus.
    pub fn scale(&self) -> f64 {
        self.bands().iter().flat_map(|b| b.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Field indices read by `materialize(field, l, r, shift_k)`.
pub fn field_span(l: i64, r: i64, shift_k: i32) -> (i64, i64) {
    match shift_k {
        -1 => (l + 1, r + 1),
        1 => (l - 1, r - 1),
        _ => (l, r),
    }
}

/// Builds `P_{l,r} S^k A P_{l,r}`, where entry `(i, j)` of `S^k A` is `A(i - k, j)`.
pub fn materialize(field: &DiagonalField, l: i64, r: i64, shift_k: i32) -> Result<BandedSystem> {
    if !(-1..=1).contains(&shift_k) {
        return Err(Error::UnsupportedShift(shift_k));
    }
    if r < l {
        return Err(Error::InvalidInput(format!("empty window [{l}, {r}]")));
    }
    let (a, b) = field_span(l, r, shift_k);
    if !field.covers(a, b) {
        return Err(Error::OutOfRange { lo: a, hi: b, field_lo: field.lo(), field_hi: field.hi() });
    }
    let k = shift_k as i64;
    let n = (r - l + 1) as usize;
    // band at offset o, position t: row i = l + t + max(0, -o)
    let band = |o: i64, pick: fn(&crate::pseudoergodic::Triple) -> C| -> Vec<C> {
        let len = n.saturating_sub(o.unsigned_abs() as usize);
        (0..len)
            .map(|t| {
                let i = l + t as i64 + (-o).max(0);
                pick(&field.at(i - k))
            })
            .collect()
    };
    Ok(BandedSystem {
        l,
        r,
        shift_k,
        sub: band(-k - 1, |t| t.u),
        main: band(-k, |t| t.v),
        sup: band(-k + 1, |t| t.w),
    })
}

/// `v + u e^{i phi} + w e^{-i phi}` at `samples` equally spaced angles.
pub fn laurent_spectrum(u: C, v: C, w: C, samples: usize) -> Result<Vec<C>> {
    if samples < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 samples, got {samples}")));
    }
    Ok(unit_circle(samples).map(|t| v + u * t + w * t.conj()).collect())
}

/// Eigenvalues `u z + v + w / z` of the periodic `n x n` section, `z` ranging over the `n`-th roots of unity.
pub fn circulant_spectrum(u: C, v: C, w: C, n: usize) -> Result<Vec<C>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    Ok(unit_circle(n).map(|t| v + u * t + w * t.conj()).collect())
}

fn unit_circle(n: usize) -> impl Iterator<Item = C> {
    (0..n).map(move |k| C::from_polar(1.0, TAU * (k as f64 / n as f64)))
}

/// Symbol of the constant-diagonal operator `S^k L(u, v, w)`.
///
/// A band at column offset `o` contributes `t^{-o}`, so the unshifted symbol is
/// `u t + v + w t^{-1}` and the shifted one is `t^k` times that.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToeplitzSymbol {
    pub u: C,
    pub v: C,
    pub w: C,
    pub shift_k: i32,
}

/// Angular samples used to locate the minimum of `|a(t)|`.
pub const SYMBOL_SAMPLES: usize = 4096;

impl ToeplitzSymbol {
    pub fn new(u: C, v: C, w: C, shift_k: i32) -> Self {
        Self { u, v, w, shift_k }
    }

    pub fn eval(&self, t: C) -> C {
        (self.u * t + self.v + self.w / t) * t.powi(self.shift_k)
    }

    /// `|a(e^{i phi})|`; independent of the shift.
    pub fn modulus(&self, phi: f64) -> f64 {
        let t = C::from_polar(1.0, phi);
        (self.u * t + self.v + self.w * t.conj()).norm()
    }

    /// Minimum and maximum of `|a|` on the unit circle.
    pub fn extremes(&self) -> (f64, f64) {
        (self.refine(SYMBOL_SAMPLES, 1.0), -self.refine(SYMBOL_SAMPLES, -1.0))
    }

    /// Dense sampling, then golden-section search around every sampled local extremum.
    fn refine(&self, samples: usize, sign: f64) -> f64 {
        let h = TAU / samples as f64;
        let vals: Vec<f64> = (0..samples).map(|k| sign * self.modulus(h * k as f64)).collect();
        let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
        for k in 0..samples {
            let prev = vals[(k + samples - 1) % samples];
            let next = vals[(k + 1) % samples];
            if vals[k] <= prev && vals[k] <= next {
                let f = |phi: f64| sign * self.modulus(phi);
                best = best.min(golden_min(f, h * (k as f64 - 1.0), h * (k as f64 + 1.0), 1e-12));
            }
        }
        best
    }

    /// Winding number of `a` around zero, from the roots of `u t^2 + v t + w`.
    pub fn winding(&self) -> i32 {
        let inside = quadratic_roots(self.u, self.v, self.w).iter().filter(|z| z.norm() < 1.0).count() as i32;
        inside - 1 + self.shift_k
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(0.5 * (a + b)))
}

/// Roots of `a t^2 + b t + c`, degree dropping when leading coefficients vanish.
fn quadratic_roots(a: C, b: C, c: C) -> Vec<C> {
    if a == ZERO {
        return if b == ZERO { vec![] } else { vec![-c / b] };
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
    if q == ZERO {
        return vec![ZERO, ZERO];
    }
    vec![q / a, c / q]
}

/// `1 / min |a(t)|`, the norm of the inverse of a triangular Toeplitz operator.
pub fn toeplitz_inverse_norm_triangular(u: C, v: C, w: C, shift_k: i32) -> Result<f64> {
    if !(-1..=1).contains(&shift_k) {
        return Err(Error::UnsupportedShift(shift_k));
    }
    let triangular = match shift_k {
        0 => u == ZERO || w == ZERO,
        _ => true,
    };
    if !triangular {
        return Err(Error::InvalidInput("unshifted tridiagonal Toeplitz operator is not triangular".into()));
    }
    let sym = ToeplitzSymbol::new(u, v, w, shift_k);
    let (lo, _) = sym.extremes();
    if lo <= TOL_CASE {
        return Err(Error::SymbolVanishes(lo));
    }
    let wind = sym.winding();
    if wind != 0 {
        return Err(Error::NotInvertible(wind));
    }
    Ok(1.0 / lo)
}
