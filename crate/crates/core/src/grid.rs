//! Periodic uniform grids in one and two dimensions, spectral transforms,
//! differential operators, norms and truncations.
//!
//! Conventions:
//! * physical samples live at `x_a = i_a * h`, `h = L/N`, row-major layout;
//! * `to_spectral` returns Fourier coefficients `fhat_k` of
//!   `f(x) = sum_k fhat_k exp(i xi_k . x)` with `xi = 2 pi k / L`, so a
//!   constant field has only a zero mode and Parseval reads
//!   `||f||_2^2 = L^d sum_k |fhat_k|^2`;
//! * odd spectral derivatives zero the Nyquist column so real fields stay
//!   real.

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;

/// Spatial dimension of the torus; the lab runs in 1-d (cheap oracles) and
/// 2-d (the SQG setting).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            _ => Err(Error::Dimension(format!("d = {d} not supported, use 1 or 2"))),
        }
    }
}

/// Periodic uniform grid: `N` points per axis on a torus of period `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    d: Dim,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(d: Dim, n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::domain(format!(
                "grid size N = {n} must be a power of two with N >= 8"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!("period L = {length} must be positive")));
        }
        Ok(Grid { d, n, length })
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Grid spacing `h = L/N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of samples `N^d`.
    pub fn len(&self) -> usize {
        match self.d {
            Dim::One => self.n,
            Dim::Two => self.n * self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d.as_usize() as i32)
    }

    /// Physical coordinates of the sample at flat index `idx`.
    /// The second component is 0 in 1-d.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = self.spacing();
        match self.d {
            Dim::One => [idx as f64 * h, 0.0],
            Dim::Two => [(idx / self.n) as f64 * h, (idx % self.n) as f64 * h],
        }
    }

    /// Integer wavevector at flat index `idx` (fftfreq convention).
    pub fn wavevector(&self, idx: usize) -> [i64; 2] {
        match self.d {
            Dim::One => [self.k_of(idx), 0],
            Dim::Two => [self.k_of(idx / self.n), self.k_of(idx % self.n)],
        }
    }

    fn k_of(&self, i: usize) -> i64 {
        if i <= self.n / 2 - 1 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Continuous frequency `xi = 2 pi k / L` at flat index `idx`.
    pub fn xi(&self, idx: usize) -> [f64; 2] {
        let f = 2.0 * std::f64::consts::PI / self.length;
        let k = self.wavevector(idx);
        [k[0] as f64 * f, k[1] as f64 * f]
    }

    /// |xi| at flat index `idx`.
    pub fn xi_norm(&self, idx: usize) -> f64 {
        let xi = self.xi(idx);
        xi[0].hypot(xi[1])
    }

    /// True where any axis hits the Nyquist wavenumber `-N/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let k = self.wavevector(idx);
        k[0] == -(self.n as i64) / 2 || k[1] == -(self.n as i64) / 2
    }

    /// Minimum-image representative of a coordinate difference, in
    /// `[-L/2, L/2)` per axis.
    pub fn min_image(&self, dx: f64) -> f64 {
        let l = self.length;
        let mut r = dx % l;
        if r < -l / 2.0 {
            r += l;
        } else if r >= l / 2.0 {
            r -= l;
        }
        r
    }

    /// Torus distance between two points.
    pub fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let dx = self.min_image(a[0] - b[0]);
        let dy = match self.d {
            Dim::One => 0.0,
            Dim::Two => self.min_image(a[1] - b[1]),
        };
        dx.hypot(dy)
    }
}

/// Real scalar field sampled on a [`Grid`]; the discrete stand-in for
/// `u(., t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid,
    values: Vec<f64>,
    time_tag: Option<f64>,
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("field contains non-finite samples".into()));
        }
        Ok(GridField {
            grid,
            values,
            time_tag: None,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridField {
            grid,
            values: vec![0.0; grid.len()],
            time_tag: None,
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        GridField {
            grid,
            values: vec![c; grid.len()],
            time_tag: None,
        }
    }

    /// Sample a closure at the grid points. 1-d closures receive `y = 0`.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let p = grid.point(i);
                f(p[0], p[1])
            })
            .collect();
        GridField {
            grid,
            values,
            time_tag: None,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time_tag(&self) -> Option<f64> {
        self.time_tag
    }

    pub fn with_time_tag(mut self, t: f64) -> Self {
        self.time_tag = Some(t);
        self
    }

    pub fn set_time_tag(&mut self, t: f64) {
        self.time_tag = Some(t);
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Discrete `l^p` norm with quadrature weight `h^{d/p}`;
    /// `p = infinity` returns `max |f|`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p < 1.0 {
            return Err(Error::domain(format!("lp_norm requires p >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let hv = self.grid.cell_volume();
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok((hv * sum).powf(1.0 / p))
    }

    /// `||f||_2`, the default energy norm.
    pub fn l2_norm(&self) -> f64 {
        let hv = self.grid.cell_volume();
        (hv * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise positive-part truncation `(f - level)_+`, or
    /// `(-f - level)_+` for the minus sign.
    pub fn truncate(&self, level: f64, sign: TruncationSign) -> GridField {
        let values = self
            .values
            .iter()
            .map(|&v| match sign {
                TruncationSign::Plus => (v - level).max(0.0),
                TruncationSign::Minus => (-v - level).max(0.0),
            })
            .collect();
        GridField {
            grid: self.grid,
            values,
            time_tag: self.time_tag,
        }
    }

    /// Forward spectral transform.
    pub fn to_spectral(&self) -> SpectralField {
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        match self.grid.d {
            Dim::One => fft::forward(&mut buf),
            Dim::Two => fft::forward2(&mut buf, self.grid.n),
        }
        let scale = 1.0 / self.grid.len() as f64;
        for c in &mut buf {
            *c *= scale;
        }
        SpectralField {
            grid: self.grid,
            modes: buf,
        }
    }

    /// Spectral gradient, one component per axis.
    pub fn gradient(&self) -> Vec<GridField> {
        let spec = self.to_spectral();
        (0..self.grid.d.as_usize())
            .map(|axis| spec.derivative(axis).to_physical())
            .collect()
    }

    /// `(-d2 f, d1 f)`; the divergence-free rotation of the gradient. 2-d only.
    pub fn perp_gradient(&self) -> Result<[GridField; 2]> {
        if self.grid.d != Dim::Two {
            return Err(Error::Dimension("perp_gradient requires d = 2".into()));
        }
        let spec = self.to_spectral();
        let d1 = spec.derivative(0).to_physical();
        let d2 = spec.derivative(1).to_physical();
        let mut neg_d2 = d2;
        for v in neg_d2.values_mut() {
            *v = -*v;
        }
        Ok([neg_d2, d1])
    }

    /// Gagliardo (H^s) seminorm computed spectrally:
    /// `(L^d sum |xi|^{2s} |fhat|^2)^{1/2}`, i.e. `||(-Delta)^{s/2} f||_2`.
    pub fn gagliardo_seminorm(&self, s: f64) -> Result<f64> {
        if !(0.0 < s && s < 1.0) {
            return Err(Error::domain(format!("gagliardo_seminorm requires s in (0,1), got {s}")));
        }
        let spec = self.to_spectral();
        let ld = self.grid.length.powi(self.grid.d.as_usize() as i32);
        let mut acc = 0.0;
        for (idx, m) in spec.modes.iter().enumerate() {
            let xin = self.grid.xi_norm(idx);
            if xin > 0.0 {
                acc += xin.powf(2.0 * s) * m.norm_sqr();
            }
        }
        Ok((ld * acc).sqrt())
    }

    /// Zip-map over two fields on the same grid.
    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<GridField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("zip_with on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(GridField {
            grid: self.grid,
            values,
            time_tag: self.time_tag,
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            time_tag: self.time_tag,
        }
    }

    /// `h^d sum f g`, the discrete L^2 pairing.
    pub fn inner(&self, other: &GridField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("inner product on different grids".into()));
        }
        Ok(self.grid.cell_volume()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>())
    }
}

/// Sign convention for level-set truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationSign {
    Plus,
    Minus,
}

/// Complex Fourier coefficients of a real field.
///
/// Hermitian symmetry (`modes[-k] = conj(modes[k])`) holds for transforms of
/// real input, so `to_physical` is real to round-off; the imaginary residue
/// is dropped.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    modes: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} modes, got {}",
                grid.len(),
                modes.len()
            )));
        }
        Ok(SpectralField { grid, modes })
    }

    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            modes: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [Complex64] {
        &mut self.modes
    }

    /// Inverse transform; returns the real part (imaginary part is round-off
    /// for Hermitian inputs).
    pub fn to_physical(&self) -> GridField {
        let mut buf = self.modes.clone();
        match self.grid.d {
            Dim::One => fft::inverse(&mut buf),
            Dim::Two => fft::inverse2(&mut buf, self.grid.n),
        }
        GridField {
            grid: self.grid,
            values: buf.iter().map(|c| c.re).collect(),
            time_tag: None,
        }
    }

    /// Multiply every mode by a real function of `xi`.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> f64) -> SpectralField {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let xin = self.grid.xi_norm(idx);
                c * m(xin)
            })
            .collect();
        SpectralField {
            grid: self.grid,
            modes,
        }
    }

    /// Spectral first derivative along `axis`, Nyquist column zeroed.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                if self.grid.is_nyquist(idx) {
                    Complex64::new(0.0, 0.0)
                } else {
                    let xi = self.grid.xi(idx)[axis];
                    Complex64::new(0.0, xi) * c
                }
            })
            .collect();
        SpectralField {
            grid: self.grid,
            modes,
        }
    }

    /// `L^d sum |fhat|^2`; equals `||f||_2^2` by Parseval.
    pub fn energy(&self) -> f64 {
        let ld = self.grid.length.powi(self.grid.d.as_usize() as i32);
        ld * self.modes.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Zero all modes with `|k_a| > cutoff` on any axis (sharp truncation,
    /// used for the 2/3 dealiasing rule).
    pub fn truncate_above(&mut self, cutoff: i64) {
        for idx in 0..self.modes.len() {
            let k = self.grid.wavevector(idx);
            if k[0].abs() > cutoff || k[1].abs() > cutoff {
                self.modes[idx] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Evaluate the truncated Fourier series at an arbitrary physical point.
    /// Exact for band-limited fields; used by the zoom diagnostics for
    /// off-grid sampling.
    pub fn eval_at(&self, x: [f64; 2]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in self.modes.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let xi = self.grid.xi(idx);
            let phase = xi[0] * x[0] + xi[1] * x[1];
            acc += c * Complex64::new(phase.cos(), phase.sin());
        }
        acc.re
    }
}

/// Divergence of a spectral vector field, returned in physical space.
pub fn divergence(components: &[GridField]) -> Result<GridField> {
    let grid = components[0].grid();
    let mut out = SpectralField::zeros(grid);
    for (axis, comp) in components.iter().enumerate() {
        if comp.grid() != grid {
            return Err(Error::GridMismatch("divergence components on different grids".into()));
        }
        let d = comp.to_spectral().derivative(axis);
        for (o, v) in out.modes.iter_mut().zip(d.modes.iter()) {
            *o += v;
        }
    }
    Ok(out.to_physical())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1(n: usize) -> Grid {
        Grid::new(Dim::One, n, 2.0 * PI).unwrap()
    }

    fn grid2(n: usize) -> Grid {
        Grid::new(Dim::Two, n, 2.0 * PI).unwrap()
    }

    #[test]
    fn grid_invariants_enforced() {
        assert!(Grid::new(Dim::One, 6, 1.0).is_err());
        assert!(Grid::new(Dim::One, 12, 1.0).is_err());
        assert!(Grid::new(Dim::One, 16, -1.0).is_err());
        let g = Grid::new(Dim::One, 16, 4.0).unwrap();
        assert_eq!(g.spacing(), 0.25);
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let f = GridField::constant(grid1(32), 3.5);
        let spec = f.to_spectral();
        assert!((spec.modes()[0].re - 3.5).abs() < 1e-13);
        for m in &spec.modes()[1..] {
            assert!(m.norm() < 1e-13);
        }
        let back = spec.to_physical();
        for v in back.values() {
            assert!((v - 3.5).abs() < 1e-13);
        }
    }

    #[test]
    fn cosine_splits_into_two_half_modes() {
        let g = grid1(64);
        let f = GridField::from_fn(g, |x, _| x.cos());
        let spec = f.to_spectral();
        for (idx, m) in spec.modes().iter().enumerate() {
            let k = g.wavevector(idx)[0];
            if k.abs() == 1 {
                assert!((m.re - 0.5).abs() < 1e-13, "k={k} m={m}");
                assert!(m.im.abs() < 1e-13);
            } else {
                assert!(m.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn random_round_trip_1d_and_2d() {
        use rand::Rng;
        let mut rng = crate::rng::stream(11, "grid.roundtrip");
        for grid in [grid1(64), grid2(16)] {
            let f = GridField::new(
                grid,
                (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let back = f.to_spectral().to_physical();
            let err = f
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(err <= 1e-12, "round trip error {err}");
        }
    }

    #[test]
    fn parseval_holds() {
        use rand::Rng;
        let mut rng = crate::rng::stream(3, "grid.parseval");
        let g = grid2(32);
        let f = GridField::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let l2 = f.l2_norm();
        let se = f.to_spectral().energy();
        assert!((l2 * l2 - se).abs() <= 1e-10 * l2 * l2);
    }

    #[test]
    fn lp_norms_match_closed_forms() {
        let g = grid1(64);
        let c3 = GridField::constant(g, 3.0);
        let n2 = c3.lp_norm(2.0).unwrap();
        assert!((n2 - 3.0 * (2.0 * PI).sqrt()).abs() < 1e-12);
        assert_eq!(c3.lp_norm(f64::INFINITY).unwrap(), 3.0);
        assert!(c3.lp_norm(0.5).is_err());

        let s = GridField::from_fn(g, |x, _| x.sin());
        // integral of sin^2 over [0, 2pi] is pi
        assert!((s.lp_norm(2.0).unwrap() - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gagliardo_eigenfunction_cases() {
        let g = grid1(128);
        let c = GridField::constant(g, 2.0);
        assert_eq!(c.gagliardo_seminorm(0.3).unwrap(), 0.0);

        // |xi| = 1 modes: seminorm equals the L2 norm for every s
        let f = GridField::from_fn(g, |x, _| x.cos());
        for s in [0.25, 0.5, 0.75] {
            let gs = f.gagliardo_seminorm(s).unwrap();
            assert!((gs - f.l2_norm()).abs() < 1e-12, "s={s}");
        }

        // |xi| = 2, s = 1/2: seminorm^2 = 2 ||f||_2^2
        let f2 = GridField::from_fn(g, |x, _| (2.0 * x).cos());
        let gs = f2.gagliardo_seminorm(0.5).unwrap();
        assert!((gs * gs - 2.0 * f2.l2_norm().powi(2)).abs() < 1e-10);

        assert!(f2.gagliardo_seminorm(1.0).is_err());
        assert!(f2.gagliardo_seminorm(0.0).is_err());
    }

    #[test]
    fn gradient_of_constant_vanishes_and_perp_gradient_matches() {
        let g2 = grid2(32);
        let c = GridField::constant(g2, 1.0);
        for comp in c.gradient() {
            assert!(comp.sup_norm() < 1e-13);
        }

        // f = sin(x1) -> perp grad = (0, cos(x1))
        let f = GridField::from_fn(g2, |x, _| x.sin());
        let [p1, p2] = f.perp_gradient().unwrap();
        assert!(p1.sup_norm() < 1e-12);
        let expect = GridField::from_fn(g2, |x, _| x.cos());
        let err = p2
            .values()
            .iter()
            .zip(expect.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-12);

        let f1 = GridField::from_fn(grid1(32), |x, _| x.sin());
        assert!(f1.perp_gradient().is_err());
    }

    #[test]
    fn perp_gradient_is_divergence_free() {
        use rand::Rng;
        let mut rng = crate::rng::stream(5, "grid.perp");
        let g = grid2(32);
        let f = GridField::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let [b1, b2] = f.perp_gradient().unwrap();
        let div = divergence(&[b1, b2]).unwrap();
        assert!(div.l2_norm() <= 1e-10 * f.l2_norm());
    }

    #[test]
    fn truncate_examples() {
        let g = grid1(64);
        let one = GridField::constant(g, 1.0);
        assert_eq!(one.truncate(2.0, TruncationSign::Plus).sup_norm(), 0.0);

        let three = GridField::constant(g, 3.0);
        let t = three.truncate(1.0, TruncationSign::Plus);
        for v in t.values() {
            assert_eq!(*v, 2.0);
        }

        // (sin)_+ has L1 norm 2 on [0, 2pi]
        let s = GridField::from_fn(g, |x, _| x.sin());
        let plus = s.truncate(0.0, TruncationSign::Plus);
        assert!((plus.lp_norm(1.0).unwrap() - 2.0).abs() < 1e-3);
        assert!(plus.values().iter().all(|&v| v >= 0.0));

        let minus = s.truncate(0.5, TruncationSign::Minus);
        let expect = GridField::from_fn(g, |x, _| (-x.sin() - 0.5).max(0.0));
        for (a, b) in minus.values().iter().zip(expect.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn spectral_point_evaluation_is_exact_for_band_limited() {
        let g = grid2(16);
        let f = GridField::from_fn(g, |x, y| (2.0 * x).cos() + (x + y).sin());
        let spec = f.to_spectral();
        for (x, y) in [(0.3, 1.7), (4.0, 2.2), (6.1, 0.05)] {
            let direct = (2.0f64 * x).cos() + (x + y).sin();
            assert!((spec.eval_at([x, y]) - direct).abs() < 1e-11);
        }
    }
}
