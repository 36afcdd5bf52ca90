use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::fft::FftPlans;
use super::SpectralError;

/// Doubly periodic N×N grid on the box [0, L)².
///
/// Spectral arrays are stored row-major with the first index running over
/// k₁ and the second over k₂, both in FFT order: slot `i < N/2` holds the
/// wavenumber `i`, slot `i ≥ N/2` holds `i − N`. The wavevector of integer
/// index k is ξ = (2π/L)·k. The k = −N/2 slots (the Nyquist rows and
/// columns) are kept at zero by every operation in this crate.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    length: f64,
    /// ξ value per axis slot (identical for both axes)
    axis_xi: Arc<Vec<f64>>,
    plans: Arc<FftPlans>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

/// Build a grid with `n` modes per dimension on a box of side `length`.
pub fn make_grid(n: usize, length: f64) -> Result<Grid, SpectralError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(SpectralError::InvalidGridSize(n));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(SpectralError::InvalidLength(length));
    }
    let kappa = 2.0 * PI / length;
    let axis_xi = (0..n).map(|i| kappa * wavenumber_of(n, i) as f64).collect();
    Ok(Grid {
        n,
        length,
        axis_xi: Arc::new(axis_xi),
        plans: Arc::new(FftPlans::new(n)),
    })
}

#[inline]
fn wavenumber_of(n: usize, slot: usize) -> i64 {
    if slot < n / 2 {
        slot as i64
    } else {
        slot as i64 - n as i64
    }
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of grid points (and of spectral slots) per component.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical grid spacing L/N.
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Wavevector spacing 2π/L.
    pub fn kappa(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Integer wavenumber stored in axis slot `slot`.
    #[inline]
    pub fn wavenumber(&self, slot: usize) -> i64 {
        wavenumber_of(self.n, slot)
    }

    /// ξ component stored in axis slot `slot`.
    #[inline]
    pub fn axis_xi(&self, slot: usize) -> f64 {
        self.axis_xi[slot]
    }

    /// Integer wavevector (k₁, k₂) of flat index `idx`.
    #[inline]
    pub fn k_of(&self, idx: usize) -> [i64; 2] {
        [self.wavenumber(idx / self.n), self.wavenumber(idx % self.n)]
    }

    /// Wavevector ξ of flat index `idx`.
    #[inline]
    pub fn xi_of(&self, idx: usize) -> [f64; 2] {
        [self.axis_xi[idx / self.n], self.axis_xi[idx % self.n]]
    }

    /// |ξ| of flat index `idx`.
    #[inline]
    pub fn xi_norm(&self, idx: usize) -> f64 {
        let [x1, x2] = self.xi_of(idx);
        x1.hypot(x2)
    }

    /// Flat index of the integer wavevector (k₁, k₂); wraps periodically.
    pub fn index_of(&self, k1: i64, k2: i64) -> usize {
        let n = self.n as i64;
        let i1 = k1.rem_euclid(n) as usize;
        let i2 = k2.rem_euclid(n) as usize;
        i1 * self.n + i2
    }

    /// Flat index of −k for the wavevector stored at `idx`.
    #[inline]
    pub fn neg_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    /// True if `idx` lies on a k = −N/2 row or column.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = self.n / 2;
        idx / self.n == half || idx % self.n == half
    }

    /// True if the mode survives the two-thirds truncation.
    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let [k1, k2] = self.k_of(idx);
        let n = self.n as i64;
        3 * k1.abs() <= n && 3 * k2.abs() <= n
    }

    /// Largest |ξ| on the grid (a Nyquist corner).
    pub fn max_xi_norm(&self) -> f64 {
        self.kappa() * (self.n as f64 / 2.0) * std::f64::consts::SQRT_2
    }

    /// Physical coordinate of axis sample `i`.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub(crate) fn plans(&self) -> &FftPlans {
        &self.plans
    }
}
