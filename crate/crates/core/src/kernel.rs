//! Kernels `K_t(x, y)` comparable to the fractional-Laplacian kernel, and
//! validation of the structural conditions they must satisfy: measurability
//! (by construction), exchange symmetry, two-sided ellipticity
//! `lambda^-1 <= |x-y|^{d+2s} K <= lambda`, and angular cancellation
//! `|int_{S^{d-1}} theta K(x, x + rho theta)| <= lambda rho^{-d}`.

use crate::error::{Error, Result};
use crate::grid::Dim;
use rand::Rng;
use std::f64::consts::PI;
use std::sync::Arc;

/// Normalization constant of the fractional Laplacian kernel,
/// `(-Delta)^s f(x) = c_{d,s} P.V. int (f(x) - f(y)) |x-y|^{-d-2s} dy`
/// with Fourier symbol `|xi|^{2s}`:
/// `c_{d,s} = 4^s s Gamma(d/2 + s) / (pi^{d/2} Gamma(1 - s))`.
/// The value is pinned by the spectral/quadrature agreement tests.
pub fn fractional_constant(d: Dim, s: f64) -> f64 {
    let dd = d.as_usize() as f64;
    4f64.powf(s) * s * gamma(dd / 2.0 + s) / (PI.powf(dd / 2.0) * gamma(1.0 - s))
}

/// Lanczos approximation (g = 7, n = 9), accurate to ~2e-10 relative for the
/// arguments used here (0 < z < 5).
pub(crate) fn gamma(z: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        PI / ((PI * z).sin() * gamma(1.0 - z))
    } else {
        let z = z - 1.0;
        let mut x = G[0];
        for (i, &g) in G.iter().enumerate().skip(1) {
            x += g / (z + i as f64);
        }
        let t = z + 7.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * x
    }
}

/// Periodic domain geometry for kernel evaluation: dimension and period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    pub d: Dim,
    pub period: f64,
}

impl Torus {
    pub fn new(d: Dim, period: f64) -> Self {
        Torus { d, period }
    }

    /// Minimum-image displacement `y - x`, each component in `[-L/2, L/2)`.
    pub fn displacement(&self, x: [f64; 2], y: [f64; 2]) -> [f64; 2] {
        let mi = |v: f64| {
            let l = self.period;
            let mut r = v % l;
            if r < -l / 2.0 {
                r += l;
            } else if r >= l / 2.0 {
                r -= l;
            }
            r
        };
        match self.d {
            Dim::One => [mi(y[0] - x[0]), 0.0],
            Dim::Two => [mi(y[0] - x[0]), mi(y[1] - x[1])],
        }
    }

    pub fn distance(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        let d = self.displacement(x, y);
        d[0].hypot(d[1])
    }
}

/// Spatial modulation of the kernel amplitude. Every variant is evaluated at
/// the unordered pair, so exchange symmetry holds exactly by construction.
#[derive(Clone)]
pub enum Modulation {
    /// `m = factor * c_{d,s}`; `factor = 1` reproduces the pure kernel.
    Constant { factor: f64 },
    /// Even function of the separation only (translation invariant):
    /// `m = c_{d,s} (1 + amplitude cos(2 pi r / wavelength))`.
    SeparationCosine { amplitude: f64, wavelength: f64 },
    /// Depends on the pair midpoint along the first axis, optionally drifting
    /// in time: `m = c_{d,s} (1 + amplitude sin(2 pi (x1 + y1) / L + drift_rate t))`.
    MidpointSine { amplitude: f64, drift_rate: f64 },
    /// Arbitrary user modulation of the *pair*; called with the ordered
    /// representative, so the implementation need not be symmetric itself.
    Custom(Arc<dyn Fn([f64; 2], [f64; 2], f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Modulation::Constant { factor } => write!(f, "Constant {{ factor: {factor} }}"),
            Modulation::SeparationCosine { amplitude, wavelength } => {
                write!(f, "SeparationCosine {{ amplitude: {amplitude}, wavelength: {wavelength} }}")
            }
            Modulation::MidpointSine { amplitude, drift_rate } => {
                write!(f, "MidpointSine {{ amplitude: {amplitude}, drift_rate: {drift_rate} }}")
            }
            Modulation::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Kernel sampled on a separation grid; interpolated log-linearly, which
/// preserves positivity and local homogeneity trends.
#[derive(Debug, Clone)]
pub struct KernelTable {
    separations: Vec<f64>,
    log_r: Vec<f64>,
    log_k: Vec<f64>,
}

impl KernelTable {
    pub fn new(separations: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if separations.len() < 2 || separations.len() != values.len() {
            return Err(Error::domain("kernel table needs >= 2 matched samples".into()));
        }
        for w in separations.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::domain("kernel table separations must increase".into()));
            }
        }
        if separations[0] <= 0.0 || values.iter().any(|&v| v <= 0.0) {
            return Err(Error::domain("kernel table requires positive entries".into()));
        }
        let log_r = separations.iter().map(|r| r.ln()).collect();
        let log_k = values.iter().map(|v| v.ln()).collect();
        Ok(KernelTable {
            separations,
            log_r,
            log_k,
        })
    }

    pub fn separations(&self) -> &[f64] {
        &self.separations
    }

    fn value_at(&self, r: f64) -> f64 {
        let lr = r.ln();
        let n = self.log_r.len();
        let seg = match self.log_r.binary_search_by(|v| v.partial_cmp(&lr).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let t = (lr - self.log_r[seg]) / (self.log_r[seg + 1] - self.log_r[seg]);
        (self.log_k[seg] + t * (self.log_k[seg + 1] - self.log_k[seg])).exp()
    }
}

/// Kernel family: the pure fractional kernel, a modulated version of it, or
/// a tabulated kernel.
#[derive(Debug, Clone)]
pub enum KernelFamily {
    Fractional,
    Modulated(Modulation),
    Tabulated(KernelTable),
}

/// Description of a kernel `K_t(x,y)` together with its ellipticity constant
/// and order.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    s: f64,
    lambda: f64,
    family: KernelFamily,
    time_dependent: bool,
}

impl KernelSpec {
    pub fn new(s: f64, lambda: f64, family: KernelFamily) -> Result<Self> {
        if !(0.0 < s && s <= 0.5) {
            return Err(Error::domain(format!(
                "kernel order s = {s} outside the supported critical/supercritical range (0, 1/2]"
            )));
        }
        if !(lambda > 1.0) {
            return Err(Error::domain(format!("ellipticity constant lambda = {lambda} must exceed 1")));
        }
        let time_dependent = matches!(
            family,
            KernelFamily::Modulated(Modulation::MidpointSine { drift_rate, .. }) if drift_rate != 0.0
        ) || matches!(family, KernelFamily::Modulated(Modulation::Custom(_)));
        Ok(KernelSpec {
            s,
            lambda,
            family,
            time_dependent,
        })
    }

    pub fn fractional(s: f64, lambda: f64) -> Result<Self> {
        KernelSpec::new(s, lambda, KernelFamily::Fractional)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    /// True when `K(x, y)` depends on `y - x` only, which enables the
    /// precomputed-stencil fast path in the operator plans.
    pub fn is_translation_invariant(&self) -> bool {
        matches!(
            self.family,
            KernelFamily::Fractional
                | KernelFamily::Modulated(Modulation::Constant { .. })
                | KernelFamily::Modulated(Modulation::SeparationCosine { .. })
                | KernelFamily::Tabulated(_)
        )
    }

    /// Amplitude `|x-y|^{d+2s} K_t(x,y)` for the minimum-image pair. Pairs are
    /// ordered lexicographically before evaluating the modulation, so the
    /// exchange symmetry `K(x,y) = K(y,x)` is exact.
    fn amplitude(&self, torus: Torus, x: [f64; 2], y: [f64; 2], r: f64, t: f64) -> f64 {
        let c = fractional_constant(torus.d, self.s);
        match &self.family {
            KernelFamily::Fractional => c,
            KernelFamily::Modulated(m) => {
                let (a, b) = ordered_pair(x, y);
                match m {
                    Modulation::Constant { factor } => factor * c,
                    Modulation::SeparationCosine { amplitude, wavelength } => {
                        c * (1.0 + amplitude * (2.0 * PI * r / wavelength).cos())
                    }
                    Modulation::MidpointSine { amplitude, drift_rate } => {
                        let phase = 2.0 * PI * (a[0] + b[0]) / torus.period + drift_rate * t;
                        c * (1.0 + amplitude * phase.sin())
                    }
                    Modulation::Custom(f) => f(a, b, t),
                }
            }
            KernelFamily::Tabulated(table) => table.value_at(r) * r.powf(torus.d.as_usize() as f64 + 2.0 * self.s),
        }
    }

    /// Kernel value at the minimum-image separation (no image sum; the
    /// operator plans periodize separately).
    pub fn evaluate(&self, torus: Torus, x: [f64; 2], y: [f64; 2], t: f64) -> Result<f64> {
        let r = torus.distance(x, y);
        if r <= 0.0 {
            return Err(Error::Singularity);
        }
        let amp = self.amplitude(torus, x, y, r, t);
        Ok(amp * r.powf(-(torus.d.as_usize() as f64) - 2.0 * self.s))
    }

    /// Kernel value at a raw (non-wrapped) displacement; used by the image
    /// sums in the operator plans, where the displacement may exceed a period.
    pub(crate) fn evaluate_displacement(
        &self,
        torus: Torus,
        x: [f64; 2],
        delta: [f64; 2],
        t: f64,
    ) -> f64 {
        let r = delta[0].hypot(delta[1]);
        debug_assert!(r > 0.0);
        let y = [x[0] + delta[0], x[1] + delta[1]];
        let amp = self.amplitude(torus, x, y, r, t);
        amp * r.powf(-(torus.d.as_usize() as f64) - 2.0 * self.s)
    }

    /// Sample this kernel onto a separation table (for round-trip tests and
    /// external kernels given as data).
    pub fn tabulate(&self, torus: Torus, separations: Vec<f64>, t: f64) -> Result<KernelSpec> {
        let x = [0.0, 0.0];
        let values = separations
            .iter()
            .map(|&r| self.evaluate_displacement(torus, x, [r, 0.0], t))
            .collect();
        KernelSpec::new(
            self.s,
            self.lambda,
            KernelFamily::Tabulated(KernelTable::new(separations, values)?),
        )
    }
}

fn ordered_pair(x: [f64; 2], y: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    if (y[0], y[1]) < (x[0], x[1]) {
        (y, x)
    } else {
        (x, y)
    }
}

/// Which structural condition a validation run checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ConditionId {
    Symmetry,
    Ellipticity,
    AngularCancellation,
}

/// Outcome of one validation scan, with the worst witnessed configuration.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub condition: ConditionId,
    pub n_samples: usize,
    /// Most extreme measured ratio for the condition: `r^{d+2s} K` for
    /// ellipticity and symmetry-defect scans, `|integral| rho^d` for the
    /// angular-cancellation quadrature.
    pub worst_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pass: bool,
    /// `(x, y or rho placeholder, t)` of the worst case.
    pub witness: ([f64; 2], [f64; 2], f64),
}

const ELLIPTICITY_TOL: f64 = 1e-9;

/// Scan `|x - y|^{d+2s} K_t(x,y)` over pseudo-random triples; pass iff every
/// ratio stays inside `[lambda^-1, lambda]` up to a 1e-9 relative fuzz.
pub fn validate_ellipticity(
    spec: &KernelSpec,
    torus: Torus,
    n_samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    if n_samples == 0 {
        return Err(Error::domain("validate_ellipticity needs n_samples >= 1".into()));
    }
    let mut rng = crate::rng::stream(seed, "kernel.ellipticity");
    let l = torus.period;
    let dd = torus.d.as_usize() as f64;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut witness = ([0.0; 2], [0.0; 2], 0.0);
    let mut worst_slack = 0.0f64;
    for _ in 0..n_samples {
        let (x, y, r) = loop {
            let x = [rng.gen_range(0.0..l), rng.gen_range(0.0..l)];
            let y = [rng.gen_range(0.0..l), rng.gen_range(0.0..l)];
            let r = torus.distance(x, y);
            if r > 1e-9 * l {
                break (x, y, r);
            }
        };
        let t = if spec.is_time_dependent() {
            rng.gen_range(0.0..1.0)
        } else {
            0.0
        };
        let k = spec.evaluate(torus, x, y, t)?;
        let ratio = r.powf(dd + 2.0 * spec.s()) * k;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        // distance to the admissible band, in log scale
        let slack = (ratio / spec.lambda()).max((1.0 / spec.lambda()) / ratio);
        if slack > worst_slack {
            worst_slack = slack;
            witness = (x, y, t);
        }
    }
    let lo = (1.0 / spec.lambda()) * (1.0 - ELLIPTICITY_TOL);
    let hi = spec.lambda() * (1.0 + ELLIPTICITY_TOL);
    let pass = min_ratio >= lo && max_ratio <= hi;
    let worst_ratio = if max_ratio / spec.lambda() > (1.0 / spec.lambda()) / min_ratio {
        max_ratio
    } else {
        min_ratio
    };
    Ok(ValidationReport {
        condition: ConditionId::Ellipticity,
        n_samples,
        worst_ratio,
        min_ratio,
        max_ratio,
        pass,
        witness,
    })
}

/// Exchange-symmetry scan. Symmetry is exact by construction (unordered-pair
/// evaluation); the scan confirms it and reports the worst defect.
pub fn validate_symmetry(
    spec: &KernelSpec,
    torus: Torus,
    n_samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    if n_samples == 0 {
        return Err(Error::domain("validate_symmetry needs n_samples >= 1".into()));
    }
    let mut rng = crate::rng::stream(seed, "kernel.symmetry");
    let l = torus.period;
    let mut worst = 0.0f64;
    let mut witness = ([0.0; 2], [0.0; 2], 0.0);
    for _ in 0..n_samples {
        let x = [rng.gen_range(0.0..l), rng.gen_range(0.0..l)];
        let y = [rng.gen_range(0.0..l), rng.gen_range(0.0..l)];
        if torus.distance(x, y) <= 1e-9 * l {
            continue;
        }
        let t = rng.gen_range(0.0..1.0);
        let kxy = spec.evaluate(torus, x, y, t)?;
        let kyx = spec.evaluate(torus, y, x, t)?;
        let defect = (kxy - kyx).abs() / kxy.max(kyx);
        if defect > worst {
            worst = defect;
            witness = (x, y, t);
        }
    }
    Ok(ValidationReport {
        condition: ConditionId::Symmetry,
        n_samples,
        worst_ratio: worst,
        min_ratio: 0.0,
        max_ratio: worst,
        pass: worst == 0.0,
        witness,
    })
}

/// Angular-cancellation quadrature: two-point sphere in 1-d, trapezoid on the
/// circle in 2-d. Reports `max |integral| rho^d` over centers and radii; pass
/// iff it stays below `lambda (1 + quadrature tolerance)`.
pub fn validate_angular_cancellation(
    spec: &KernelSpec,
    torus: Torus,
    radii: &[f64],
    n_centers: usize,
    seed: u64,
) -> Result<ValidationReport> {
    if radii.iter().any(|&r| r <= 0.0) {
        return Err(Error::domain("angular cancellation radii must be positive".into()));
    }
    let mut rng = crate::rng::stream(seed, "kernel.angular");
    let l = torus.period;
    let dd = torus.d.as_usize() as f64;
    let quad_tol = 1e-6;
    let n_theta = 64;
    let mut worst = 0.0f64;
    let mut witness = ([0.0; 2], [0.0; 2], 0.0);
    for _ in 0..n_centers.max(1) {
        let x = [rng.gen_range(0.0..l), rng.gen_range(0.0..l)];
        let t = if spec.is_time_dependent() {
            rng.gen_range(0.0..1.0)
        } else {
            0.0
        };
        for &rho in radii {
            let integral_norm = match torus.d {
                Dim::One => {
                    let kp = spec.evaluate_displacement(torus, x, [rho, 0.0], t);
                    let km = spec.evaluate_displacement(torus, x, [-rho, 0.0], t);
                    (kp - km).abs()
                }
                Dim::Two => {
                    let mut sx = 0.0;
                    let mut sy = 0.0;
                    let w = 2.0 * PI / n_theta as f64;
                    for j in 0..n_theta {
                        let th = w * j as f64;
                        let dir = [th.cos(), th.sin()];
                        let k = spec.evaluate_displacement(torus, x, [rho * dir[0], rho * dir[1]], t);
                        sx += dir[0] * k * w;
                        sy += dir[1] * k * w;
                    }
                    sx.hypot(sy)
                }
            };
            let scaled = integral_norm * rho.powf(dd);
            if scaled > worst {
                worst = scaled;
                witness = (x, [rho, 0.0], t);
            }
        }
    }
    Ok(ValidationReport {
        condition: ConditionId::AngularCancellation,
        n_samples: n_centers.max(1) * radii.len(),
        worst_ratio: worst,
        min_ratio: 0.0,
        max_ratio: worst,
        pass: worst <= spec.lambda() * (1.0 + quad_tol),
        witness,
    })
}
