//! Rayleigh–Lamb dispersion for a free isotropic plate.
//!
//! Roots are searched in phase speed `c = ω/k` at fixed frequency-half-thickness
//! product `fd`. The first grid point is bracketed from a dense scan; subsequent
//! points follow the branch with a predictor and a narrow continuation window.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Isotropic elastic plate. `half_thickness` is `d = h/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateMaterial {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
    pub half_thickness: f64,
}

impl PlateMaterial {
    pub fn new(
        youngs_modulus: f64,
        poisson_ratio: f64,
        density: f64,
        half_thickness: f64,
    ) -> Result<Self> {
        let mat = Self {
            youngs_modulus,
            poisson_ratio,
            density,
            half_thickness,
        };
        mat.validate()?;
        Ok(mat)
    }

    /// The 2 mm aluminium panel used throughout the reference study.
    pub fn aluminum_2mm() -> Self {
        Self {
            youngs_modulus: 69e9,
            poisson_ratio: 0.33,
            density: 2660.0,
            half_thickness: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus > 0.0) {
            return Err(invalid("youngs_modulus", "must be > 0"));
        }
        if !(self.density > 0.0) {
            return Err(invalid("density", "must be > 0"));
        }
        if !(self.half_thickness > 0.0) {
            return Err(invalid("half_thickness", "must be > 0"));
        }
        if !(self.poisson_ratio > 0.0 && self.poisson_ratio < 0.5) {
            return Err(invalid("poisson_ratio", "must lie in (0, 0.5)"));
        }
        Ok(())
    }

    /// Lamé parameters `(λ, μ)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        (lambda, mu)
    }

    pub fn bulk_speeds(&self) -> BulkSpeeds {
        bulk_speeds(self)
    }

    /// Axial (extensional) plate speed `sqrt(E / (ρ (1 − ν²)))`, the S0 low-frequency limit.
    pub fn axial_plate_speed(&self) -> f64 {
        let nu = self.poisson_ratio;
        (self.youngs_modulus / (self.density * (1.0 - nu * nu))).sqrt()
    }

    /// Kirchhoff–Love flexural phase speed at a given `fd` (Hz·m), the A0 low-frequency limit.
    pub fn flexural_speed(&self, fd: f64) -> f64 {
        let h = 2.0 * self.half_thickness;
        let nu = self.poisson_ratio;
        let bending = self.youngs_modulus * h.powi(3) / (12.0 * (1.0 - nu * nu));
        let omega = self.omega(fd);
        omega.sqrt() * (bending / (self.density * h)).powf(0.25)
    }

    /// Angular frequency for a frequency-half-thickness product.
    pub fn omega(&self, fd: f64) -> f64 {
        2.0 * PI * fd / self.half_thickness
    }
}

/// Pressure and shear bulk speeds (m/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulkSpeeds {
    pub pressure: f64,
    pub shear: f64,
}

pub fn bulk_speeds(mat: &PlateMaterial) -> BulkSpeeds {
    let (lambda, mu) = mat.lame();
    BulkSpeeds {
        pressure: ((lambda + 2.0 * mu) / mat.density).sqrt(),
        shear: (mu / mat.density).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Symmetric,
    Antisymmetric,
}

/// A Lamb mode: family plus order (`S0`, `A0`, `S1`, `A1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub family: Family,
    pub order: u8,
}

impl Mode {
    pub const S0: Mode = Mode {
        family: Family::Symmetric,
        order: 0,
    };
    pub const A0: Mode = Mode {
        family: Family::Antisymmetric,
        order: 0,
    };
    pub const S1: Mode = Mode {
        family: Family::Symmetric,
        order: 1,
    };
    pub const A1: Mode = Mode {
        family: Family::Antisymmetric,
        order: 1,
    };
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.family {
            Family::Symmetric => 'S',
            Family::Antisymmetric => 'A',
        };
        write!(f, "{letter}{}", self.order)
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S0" => Ok(Mode::S0),
            "A0" => Ok(Mode::A0),
            "S1" => Ok(Mode::S1),
            "A1" => Ok(Mode::A1),
            other => Err(invalid("mode", format!("unknown mode `{other}`"))),
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Mode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// cos(η d) with η² possibly negative (η = iη̃ gives cosh).
fn cos_part(eta_sq: f64, d: f64) -> f64 {
    if eta_sq >= 0.0 {
        (eta_sq.sqrt() * d).cos()
    } else {
        ((-eta_sq).sqrt() * d).cosh()
    }
}

// sin(η d)/η, which is real for either sign of η² and tends to d at η = 0.
fn sinc_part(eta_sq: f64, d: f64) -> f64 {
    if eta_sq > 0.0 {
        let eta = eta_sq.sqrt();
        (eta * d).sin() / eta
    } else if eta_sq < 0.0 {
        let eta = (-eta_sq).sqrt();
        (eta * d).sinh() / eta
    } else {
        d
    }
}

/// Rayleigh–Lamb characteristic function at `(k, ω)`.
///
/// The product form `(k²−ηs²)² cos(ηp d) sin(ηs d) + 4k²ηpηs sin(ηp d) cos(ηs d)`
/// (symmetric; sines and cosines swapped for antisymmetric) is divided by `ηs`
/// (symmetric) or `ηp` (antisymmetric). The quotient stays real when either `η²`
/// turns negative and has no spurious zeros at `c = c_shear` or `c = c_pressure`.
/// Its sign changes exactly where the product form has a Lamb root.
pub fn rayleigh_lamb_residual(mat: &PlateMaterial, family: Family, k: f64, omega: f64) -> f64 {
    let speeds = bulk_speeds(mat);
    let d = mat.half_thickness;
    let k2 = k * k;
    let p2 = (omega / speeds.pressure).powi(2) - k2;
    let s2 = (omega / speeds.shear).powi(2) - k2;
    let a = (k2 - s2).powi(2);
    match family {
        Family::Symmetric => {
            a * cos_part(p2, d) * sinc_part(s2, d) + 4.0 * k2 * p2 * sinc_part(p2, d) * cos_part(s2, d)
        }
        Family::Antisymmetric => {
            a * sinc_part(p2, d) * cos_part(s2, d) + 4.0 * k2 * s2 * cos_part(p2, d) * sinc_part(s2, d)
        }
    }
}

/// One point on a traced branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    /// Frequency times half-thickness (Hz·m).
    pub fd: f64,
    /// Wavenumber (rad/m).
    pub k: f64,
    pub c_phase: f64,
    pub c_group: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub mode: Mode,
    pub half_thickness: f64,
    pub samples: Vec<DispersionSample>,
}

impl DispersionCurve {
    /// Builds a curve from `(fd, c_phase)` pairs and finite-differences the group speed.
    pub fn from_phase_speeds(mode: Mode, half_thickness: f64, points: &[(f64, f64)]) -> Self {
        let samples = points
            .iter()
            .map(|&(fd, c)| {
                let omega = 2.0 * PI * fd / half_thickness;
                DispersionSample {
                    fd,
                    k: omega / c,
                    c_phase: c,
                    c_group: c,
                }
            })
            .collect();
        let mut curve = Self {
            mode,
            half_thickness,
            samples,
        };
        curve.fill_group_speeds();
        curve
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn omega(&self, i: usize) -> f64 {
        2.0 * PI * self.samples[i].fd / self.half_thickness
    }

    /// Highest angular frequency covered.
    pub fn max_omega(&self) -> f64 {
        self.samples
            .last()
            .map(|s| 2.0 * PI * s.fd / self.half_thickness)
            .unwrap_or(0.0)
    }

    /// Wavenumber at `omega`, linearly interpolated in ω.
    ///
    /// Fundamental modes pass through the origin, so they are anchored at
    /// `(0, 0)` below the first traced sample. Returns `None` outside coverage.
    pub fn wavenumber_at(&self, omega: f64) -> Option<f64> {
        let n = self.samples.len();
        if n == 0 || omega < 0.0 {
            return None;
        }
        let w0 = self.omega(0);
        if omega < w0 {
            if self.mode.order == 0 {
                return Some(self.samples[0].k * omega / w0);
            }
            return None;
        }
        if omega > self.max_omega() {
            return None;
        }
        // binary search on monotone fd
        let fd = omega * self.half_thickness / (2.0 * PI);
        let j = self.samples.partition_point(|s| s.fd < fd);
        if j == 0 {
            return Some(self.samples[0].k);
        }
        if j >= n {
            return Some(self.samples[n - 1].k);
        }
        let (a, b) = (&self.samples[j - 1], &self.samples[j]);
        let t = (fd - a.fd) / (b.fd - a.fd);
        Some(a.k + t * (b.k - a.k))
    }

    /// Group speed `dω/dk`: central differences inside, one-sided at the ends.
    pub fn fill_group_speeds(&mut self) {
        let n = self.samples.len();
        if n < 2 {
            for s in &mut self.samples {
                s.c_group = s.c_phase;
            }
            return;
        }
        let omegas: Vec<f64> = (0..n).map(|i| self.omega(i)).collect();
        let ks: Vec<f64> = self.samples.iter().map(|s| s.k).collect();
        for i in 0..n {
            let (lo, hi) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            self.samples[i].c_group = (omegas[hi] - omegas[lo]) / (ks[hi] - ks[lo]);
        }
    }

    /// CSV with header `fd_Hz_m,k_rad_per_m,c_phase_m_s,c_group_m_s,mode`.
    pub fn write_csv<W: Write>(&self, out: &mut W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(out, "fd_Hz_m,k_rad_per_m,c_phase_m_s,c_group_m_s,mode")?;
        }
        for s in &self.samples {
            writeln!(out, "{},{},{},{},{}", s.fd, s.k, s.c_phase, s.c_group, self.mode)?;
        }
        Ok(())
    }
}

/// Numerical knobs for [`trace_mode`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceOptions {
    /// Points in the initial phase-speed scan.
    pub scan_points: usize,
    /// Scan lower bound as a multiple of the shear speed.
    pub scan_lo: f64,
    /// Scan upper bound as a multiple of the pressure speed.
    pub scan_hi: f64,
    /// Relative half-width of the continuation bracket around the predicted root.
    pub window: f64,
    /// Sub-intervals checked for sign changes inside the continuation bracket.
    pub window_divisions: usize,
    /// Relative bisection tolerance in phase speed.
    pub rel_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            scan_points: 2000,
            scan_lo: 0.01,
            scan_hi: 5.0,
            window: 0.10,
            window_divisions: 64,
            rel_tol: 1e-10,
        }
    }
}

/// Uniform `fd` grid `step, 2·step, …, max` (Hz·m).
pub fn fd_grid(step: f64, max: f64) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    (1..=n).map(|i| i as f64 * step).collect()
}

struct BranchSolver<'a> {
    mat: &'a PlateMaterial,
    family: Family,
    rel_tol: f64,
}

impl BranchSolver<'_> {
    fn residual(&self, fd: f64, c: f64) -> f64 {
        let omega = self.mat.omega(fd);
        rayleigh_lamb_residual(self.mat, self.family, omega / c, omega)
    }

    fn bisect(&self, fd: f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut f_lo = self.residual(fd, lo);
        for _ in 0..200 {
            if hi - lo <= self.rel_tol * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = self.residual(fd, mid);
            if f_mid == 0.0 {
                return mid;
            }
            if (f_mid > 0.0) == (f_lo > 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All roots with a sign change between consecutive points of a uniform grid on `[lo, hi]`.
    fn roots_in(&self, fd: f64, lo: f64, hi: f64, divisions: usize) -> Vec<f64> {
        let step = (hi - lo) / divisions as f64;
        let mut roots = Vec::new();
        let mut prev_c = lo;
        let mut prev_f = self.residual(fd, lo);
        for i in 1..=divisions {
            let c = lo + step * i as f64;
            let f = self.residual(fd, c);
            if prev_f == 0.0 {
                roots.push(prev_c);
            } else if (f > 0.0) != (prev_f > 0.0) && f != 0.0 {
                roots.push(self.bisect(fd, prev_c, c));
            }
            prev_c = c;
            prev_f = f;
        }
        roots
    }
}

/// Traces one Lamb branch over an increasing `fd` grid (Hz·m).
///
/// Fundamental modes are seeded from their low-frequency asymptotes (axial plate
/// speed for S0, flexural speed for A0). Higher orders start at the first grid
/// point where the dense scan shows enough roots, i.e. above the cutoff.
pub fn trace_mode(
    mat: &PlateMaterial,
    mode: Mode,
    fd_grid: &[f64],
    opts: &TraceOptions,
) -> Result<DispersionCurve> {
    mat.validate()?;
    if fd_grid.is_empty() {
        return Err(Error::EmptyRange);
    }
    if fd_grid.windows(2).any(|w| w[1] <= w[0]) || fd_grid[0] <= 0.0 {
        return Err(invalid("fd_grid", "must be positive and strictly increasing"));
    }
    let speeds = bulk_speeds(mat);
    let solver = BranchSolver {
        mat,
        family: mode.family,
        rel_tol: opts.rel_tol,
    };
    let scan_lo = opts.scan_lo * speeds.shear;
    let scan_hi = opts.scan_hi * speeds.pressure;
    let ordinal = mode.order as usize;

    let mut points: Vec<(f64, f64)> = Vec::with_capacity(fd_grid.len());
    let mut grid = fd_grid.iter().copied();

    // Seed.
    for fd in grid.by_ref() {
        let roots = solver.roots_in(fd, scan_lo, scan_hi, opts.scan_points);
        let seed = if mode.order == 0 {
            let target = match mode.family {
                Family::Symmetric => mat.axial_plate_speed(),
                Family::Antisymmetric => mat.flexural_speed(fd),
            };
            roots
                .iter()
                .copied()
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        } else {
            roots.get(ordinal).copied()
        };
        match seed {
            Some(c) => {
                points.push((fd, c));
                break;
            }
            None if mode.order == 0 => {
                return Err(Error::BranchLost {
                    fd,
                    lo: scan_lo,
                    hi: scan_hi,
                })
            }
            None => continue,
        }
    }

    for fd in grid {
        let n = points.len();
        let (fd_prev, c_prev) = points[n - 1];
        let predicted = if n >= 2 {
            let (fd_pp, c_pp) = points[n - 2];
            let slope = (c_prev / c_pp).ln() / (fd_prev / fd_pp).ln();
            c_prev * (slope * (fd / fd_prev).ln()).exp()
        } else if mode == Mode::A0 {
            c_prev * (fd / fd_prev).sqrt()
        } else {
            c_prev
        };
        let lo = predicted * (1.0 - opts.window);
        let hi = predicted * (1.0 + opts.window);
        let roots = solver.roots_in(fd, lo, hi, opts.window_divisions);
        let mut next = roots
            .iter()
            .copied()
            .min_by(|a, b| (a - predicted).abs().total_cmp(&(b - predicted).abs()));
        if next.is_none() && mode.order > 0 {
            // Near the cutoff the phase speed falls steeply; fall back to the ordinal root.
            next = solver
                .roots_in(fd, scan_lo, scan_hi, opts.scan_points)
                .get(ordinal)
                .copied();
        }
        match next {
            Some(c) => points.push((fd, c)),
            None => return Err(Error::BranchLost { fd, lo, hi }),
        }
    }

    if points.is_empty() {
        return Err(Error::EmptyRange);
    }
    Ok(DispersionCurve::from_phase_speeds(
        mode,
        mat.half_thickness,
        &points,
    ))
}

/// Maximum group speed over `[fd_lo, fd_hi]` and the `fd` where it occurs (earliest on ties).
pub fn fastest_group_speed(curve: &DispersionCurve, fd_lo: f64, fd_hi: f64) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for s in curve
        .samples
        .iter()
        .filter(|s| s.fd >= fd_lo && s.fd <= fd_hi)
    {
        match best {
            Some((c, _)) if s.c_group <= c => {}
            _ => best = Some((s.c_group, s.fd)),
        }
    }
    best.ok_or(Error::EmptyRange)
}
