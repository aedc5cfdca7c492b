//! Eigenvalues, singular values and pseudospectra of finite sections, and
//! Hausdorff distances between point clouds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lanczos_largest, sym_tridiag_eigenvalues};
use crate::operator::{circulant_spectrum, materialize, BandedSystem};
use crate::pseudoergodic::{DiagonalField, FieldOrientation};
use crate::symbol_sets::{ComplexPoint, TriSymbolSet};

type C = ComplexPoint;

/// Largest window handled by the dense eigenvalue and SVD paths.
pub const DENSE_SIZE_CAP: usize = 4000;

/// Largest window accepted by [`pseudospectrum_grid`].
pub const PSEUDO_SIZE_CAP: usize = 1500;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CloudKind {
    Eigenvalues,
    SingularValues,
    Pseudospectrum { eps: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSource {
    pub l: i64,
    pub r: i64,
    pub shift_k: i32,
}

impl From<&BandedSystem> for WindowSource {
    fn from(s: &BandedSystem) -> Self {
        Self { l: s.l, r: s.r, shift_k: s.shift_k }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCloud {
    pub kind: CloudKind,
    pub points: Vec<C>,
    pub source: WindowSource,
}

fn check_size(sys: &BandedSystem, cap: usize) -> Result<()> {
    if sys.dim() > cap {
        return Err(Error::BudgetExceeded(format!("window of size {} exceeds the cap {cap}", sys.dim())));
    }
    Ok(())
}

/// True when `w_i = conj(u_{i+1})` and `v_i` is real.
pub fn is_selfadjoint(sys: &BandedSystem) -> bool {
    let tol = 1e-14 * sys.scale().max(f64::MIN_POSITIVE);
    sys.shift_k == 0
        && sys.main.iter().all(|z| z.im.abs() <= tol)
        && sys.sub.iter().zip(&sys.sup).all(|(u, w)| (u.conj() - w).norm() <= tol)
}

fn sort_points(points: &mut [C]) {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

pub fn eigenvalues(sys: &BandedSystem) -> Result<SpectralCloud> {
    if sys.shift_k != 0 {
        return Err(Error::UnsupportedShift(sys.shift_k));
    }
    check_size(sys, DENSE_SIZE_CAP)?;
    let mut points: Vec<C> = if is_selfadjoint(sys) {
        // a unitary diagonal scaling makes the Hermitian tridiagonal real symmetric
        let d: Vec<f64> = sys.main.iter().map(|z| z.re).collect();
        let e: Vec<f64> = sys.sub.iter().map(|z| z.norm()).collect();
        sym_tridiag_eigenvalues(&d, &e).into_iter().map(|x| C::new(x, 0.0)).collect()
    } else {
        sys.to_dense().eigenvalues()
    };
    sort_points(&mut points);
    Ok(SpectralCloud { kind: CloudKind::Eigenvalues, points, source: sys.into() })
}

/// Singular values, descending, as points on the non-negative real axis.
pub fn singular_values(sys: &BandedSystem) -> Result<SpectralCloud> {
    check_size(sys, DENSE_SIZE_CAP)?;
    let points = sys.to_dense().singular_values().into_iter().map(|s| C::new(s, 0.0)).collect();
    Ok(SpectralCloud { kind: CloudKind::SingularValues, points, source: sys.into() })
}

/// Rectangular grid of `nx x ny` nodes over `[x0, x1] x [y0, y1]`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

pub const DEFAULT_GRID_RES: usize = 201;

impl GridSpec {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = Self { x0, x1, y0, y1, nx, ny };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x0, self.x1, self.y0, self.y1].iter().all(|x| x.is_finite());
        if !finite || self.x1 <= self.x0 || self.y1 <= self.y0 {
            return Err(Error::InvalidGrid(format!("degenerate box [{}, {}] x [{}, {}]", self.x0, self.x1, self.y0, self.y1)));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 x 2 nodes, got {} x {}", self.nx, self.ny)));
        }
        Ok(())
    }

    /// Box around the upper spectral bound `V + (u^* + w^*) D`, inflated by 20%.
    pub fn around(sets: &TriSymbolSet, res: usize) -> Result<Self> {
        let rad = sets.u_star_max() + sets.w_star_max();
        let pts = sets.v().samples();
        let fold = |f: fn(f64, f64) -> f64, init: f64, part: fn(&C) -> f64| pts.iter().map(part).fold(init, f);
        let (x0, x1) = (fold(f64::min, f64::INFINITY, |z| z.re) - rad, fold(f64::max, f64::NEG_INFINITY, |z| z.re) + rad);
        let (y0, y1) = (fold(f64::min, f64::INFINITY, |z| z.im) - rad, fold(f64::max, f64::NEG_INFINITY, |z| z.im) + rad);
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let (hx, hy) = (0.6 * (x1 - x0).max(1e-3), 0.6 * (y1 - y0).max(1e-3));
        Self::new(cx - hx, cx + hx, cy - hy, cy + hy, res, res)
    }

    pub fn node(&self, ix: usize, iy: usize) -> C {
        let x = self.x0 + (self.x1 - self.x0) * ix as f64 / (self.nx - 1) as f64;
        let y = self.y0 + (self.y1 - self.y0) * iy as f64 / (self.ny - 1) as f64;
        C::new(x, y)
    }

    /// Length of a cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        let dx = (self.x1 - self.x0) / (self.nx - 1) as f64;
        let dy = (self.y1 - self.y0) / (self.ny - 1) as f64;
        dx.hypot(dy)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pseudospectrum {
    pub grid: GridSpec,
    /// `sigma_min(A_n - lambda I)` at every node, row by row (`iy` outer).
    pub sigma_min: Vec<f64>,
    pub levels: Vec<SpectralCloud>,
}

/// `sigma_min(A - lambda I)`; zero when the shifted matrix is exactly singular.
pub fn sigma_min_shifted(sys: &BandedSystem, lambda: C) -> f64 {
    let Ok(lu) = sys.to_band().shifted(lambda).factor() else {
        return 0.0;
    };
    let lam = lanczos_largest(sys.dim(), |x| lu.solve(&lu.solve_adjoint(x)), 1e-10, 600);
    if lam.is_finite() && lam > 0.0 {
        1.0 / lam.sqrt()
    } else {
        0.0
    }
}

/// Resolvent-norm field on `grid` and the node sets `sigma_min <= eps` for each level.
pub fn pseudospectrum_grid(sys: &BandedSystem, grid: GridSpec, eps_levels: &[f64]) -> Result<Pseudospectrum> {
    grid.validate()?;
    check_size(sys, PSEUDO_SIZE_CAP)?;
    let nodes: Vec<C> = (0..grid.ny).flat_map(|iy| (0..grid.nx).map(move |ix| (ix, iy))).map(|(ix, iy)| grid.node(ix, iy)).collect();
    let sigma_min: Vec<f64> = nodes.par_iter().map(|&z| sigma_min_shifted(sys, z)).collect();
    let levels = eps_levels
        .iter()
        .map(|&eps| SpectralCloud {
            kind: CloudKind::Pseudospectrum { eps },
            points: nodes.iter().zip(&sigma_min).filter(|(_, &s)| s <= eps).map(|(z, _)| *z).collect(),
            source: sys.into(),
        })
        .collect();
    Ok(Pseudospectrum { grid, sigma_min, levels })
}

/// `max_{m in M} min_{n in N} |m - n|`
pub fn directed_hausdorff(m: &[C], n: &[C]) -> Result<f64> {
    if m.is_empty() || n.is_empty() {
        return Err(Error::InvalidInput("Hausdorff distance of an empty cloud".into()));
    }
    let mut sorted = n.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re));
    let worst = m
        .par_iter()
        .map(|z| {
            let start = sorted.partition_point(|p| p.re < z.re);
            let mut best = f64::INFINITY;
            for p in &sorted[start..] {
                if p.re - z.re >= best {
                    break;
                }
                best = best.min((p - z).norm());
            }
            for p in sorted[..start].iter().rev() {
                if z.re - p.re >= best {
                    break;
                }
                best = best.min((p - z).norm());
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

pub fn hausdorff(m: &[C], n: &[C]) -> Result<f64> {
    Ok(directed_hausdorff(m, n)?.max(directed_hausdorff(n, m)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyMode {
    Eigenvalues,
    SingularValues,
    /// Periodic sections built from the first entry of a constant field.
    Circulant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub mode: StudyMode,
    pub sizes: Vec<usize>,
    pub distances: Vec<f64>,
    /// Each distance at most the previous one, up to [`DECREASE_SLACK`].
    pub decreasing: bool,
    pub tolerance: f64,
    pub within_tolerance: bool,
    pub converged: bool,
}

/// Rounding allowance when comparing consecutive distances.
pub const DECREASE_SLACK: f64 = 1e-9;

/// Window of `n` indices: `[1, n]` on semi-infinite fields, centred otherwise.
pub fn study_window(orientation: FieldOrientation, n: usize) -> (i64, i64) {
    let n = n as i64;
    match orientation {
        FieldOrientation::SemiInfinite => (1, n),
        FieldOrientation::BiInfinite => (-(n / 2), n - 1 - n / 2),
    }
}

/// Distance from the finite-section cloud of each size to `target`.
pub fn convergence_study(
    field: &mut DiagonalField,
    sizes: &[usize],
    mode: StudyMode,
    target: &[C],
    tolerance: f64,
) -> Result<HausdorffReport> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sizes must be non-empty and ascending".into()));
    }
    let mut distances = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let (l, r) = study_window(field.orientation(), n);
        if mode != StudyMode::Circulant {
            field.ensure(l, r)?;
        }
        let cloud = match mode {
            StudyMode::Eigenvalues => eigenvalues(&materialize(field, l, r, 0)?)?.points,
            StudyMode::SingularValues => singular_values(&materialize(field, l, r, 0)?)?.points,
            StudyMode::Circulant => {
                let t = field.at(field.lo());
                circulant_spectrum(t.u, t.v, t.w, n)?
            }
        };
        distances.push(hausdorff(&cloud, target)?);
    }
    let decreasing = distances.windows(2).all(|w| w[1] <= w[0] + DECREASE_SLACK);
    let within_tolerance = *distances.last().unwrap() <= tolerance;
    Ok(HausdorffReport {
        mode,
        sizes: sizes.to_vec(),
        distances,
        decreasing,
        tolerance,
        within_tolerance,
        converged: decreasing && within_tolerance,
    })
}
