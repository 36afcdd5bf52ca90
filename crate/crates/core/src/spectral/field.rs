use rustfft::num_complex::Complex64;

use super::fft::for_each_pair;
use super::grid::Grid;
use super::{component_weights, SpectralError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
    /// Symmetric 2×2 tensor stored as (xx, xy, yy).
    SymTensor,
}

impl Rank {
    pub fn components(self) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => 2,
            Rank::SymTensor => 3,
        }
    }
}

/// Fourier coefficients of a real field, one array per component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    rank: Rank,
    comps: Vec<Vec<Complex64>>,
}

/// Real samples on the grid points x = (i₁, i₂)·L/N, row-major in i₁.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    rank: Rank,
    comps: Vec<Vec<f64>>,
}

fn check_comps<T>(grid: &Grid, rank: Rank, comps: &[Vec<T>]) -> Result<(), SpectralError> {
    if comps.len() != rank.components() {
        return Err(SpectralError::ShapeMismatch {
            expected: rank.components(),
            got: comps.len(),
        });
    }
    for c in comps {
        if c.len() != grid.len() {
            return Err(SpectralError::ShapeMismatch {
                expected: grid.len(),
                got: c.len(),
            });
        }
    }
    Ok(())
}

impl SpectralField {
    /// Wrap coefficient arrays. Nyquist slots are cleared; reality symmetry
    /// is the caller's responsibility (see [`SpectralField::symmetrize`]).
    pub fn new(grid: Grid, rank: Rank, comps: Vec<Vec<Complex64>>) -> Result<Self, SpectralError> {
        check_comps(&grid, rank, &comps)?;
        let mut f = SpectralField { grid, rank, comps };
        f.clear_nyquist();
        Ok(f)
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, rank: Rank, comps: Vec<Vec<Complex64>>) -> Self {
        SpectralField { grid, rank, comps }
    }

    pub fn zeros(grid: &Grid, rank: Rank) -> Self {
        let comps = vec![vec![Complex64::default(); grid.len()]; rank.components()];
        SpectralField {
            grid: grid.clone(),
            rank,
            comps,
        }
    }

    /// Real field whose coefficients on |k₁|,|k₂| ≤ `kmax` are drawn from
    /// `draw` (real and imaginary parts independently) and then symmetrized.
    pub fn band_limited_from(
        grid: &Grid,
        rank: Rank,
        kmax: i64,
        mut draw: impl FnMut() -> f64,
    ) -> Self {
        let mut f = SpectralField::zeros(grid, rank);
        for c in 0..rank.components() {
            for idx in 0..grid.len() {
                let [k1, k2] = grid.k_of(idx);
                if k1.abs() <= kmax && k2.abs() <= kmax && !grid.is_nyquist(idx) {
                    let re = draw();
                    let im = draw();
                    f.comps[c][idx] = Complex64::new(re, im);
                }
            }
        }
        f.symmetrize();
        f
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn comps(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn comps_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }

    pub fn into_comps(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    /// Coefficients at ξ = 0, one per component.
    pub fn mean(&self) -> Vec<Complex64> {
        self.comps.iter().map(|c| c[0]).collect()
    }

    fn check_same(&self, other: &Self) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        if self.rank != other.rank {
            return Err(SpectralError::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        for c in &mut self.comps {
            for z in c.iter_mut() {
                *z *= alpha;
            }
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    /// self += alpha·other
    pub fn axpy(&mut self, alpha: f64, other: &Self) -> Result<(), SpectralError> {
        self.check_same(other)?;
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * alpha;
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpectralError> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SpectralError> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Real L² inner product (Frobenius for tensors).
    pub fn inner(&self, other: &Self) -> Result<f64, SpectralError> {
        self.check_same(other)?;
        let w = component_weights(self.rank);
        let mut acc = 0.0;
        for ((a, b), wc) in self.comps.iter().zip(&other.comps).zip(w) {
            let s: f64 = a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum();
            acc += wc * s;
        }
        let l = self.grid.length();
        Ok(acc * l * l)
    }

    /// Σ over modes of weight(idx)·Σ_c w_c|f̂_c|², times L².
    pub fn weighted_energy(&self, weight: impl Fn(usize) -> f64) -> f64 {
        let w = component_weights(self.rank);
        let mut acc = 0.0;
        for idx in 0..self.grid.len() {
            let mut e = 0.0;
            for (c, wc) in self.comps.iter().zip(w) {
                e += wc * c[idx].norm_sqr();
            }
            if e != 0.0 {
                acc += weight(idx) * e;
            }
        }
        let l = self.grid.length();
        acc * l * l
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.weighted_energy(|_| 1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b))
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn clear_nyquist(&mut self) {
        let n = self.grid.n();
        let half = n / 2;
        for c in &mut self.comps {
            for i in 0..n {
                c[half * n + i] = Complex64::default();
                c[i * n + half] = Complex64::default();
            }
        }
    }

    /// Largest |f̂(ξ) − conj f̂(−ξ)| over all components.
    pub fn reality_defect(&self) -> f64 {
        let g = &self.grid;
        let mut m: f64 = 0.0;
        for c in &self.comps {
            for idx in 0..g.len() {
                if g.is_nyquist(idx) {
                    m = m.max(c[idx].norm());
                }
            }
            for_each_pair(g.n(), |idx, neg| {
                m = m.max((c[idx] - c[neg].conj()).norm());
            });
        }
        m
    }

    /// Project onto real fields: f̂(ξ) ← (f̂(ξ) + conj f̂(−ξ))/2, Nyquist cleared.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n();
        self.clear_nyquist();
        for c in &mut self.comps {
            for_each_pair(n, |idx, j| {
                if j >= idx {
                    let avg = (c[idx] + c[j].conj()) * 0.5;
                    c[idx] = avg;
                    c[j] = avg.conj();
                }
            });
        }
    }
}

impl PhysicalField {
    pub fn new(grid: Grid, rank: Rank, comps: Vec<Vec<f64>>) -> Result<Self, SpectralError> {
        check_comps(&grid, rank, &comps)?;
        Ok(PhysicalField { grid, rank, comps })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, rank: Rank, comps: Vec<Vec<f64>>) -> Self {
        PhysicalField { grid, rank, comps }
    }

    /// Sample `f(x₁, x₂) -> [component values]` at every grid point.
    pub fn from_fn(grid: &Grid, rank: Rank, f: impl Fn(f64, f64) -> Vec<f64>) -> Self {
        let n = grid.n();
        let mut comps = vec![Vec::with_capacity(grid.len()); rank.components()];
        for i in 0..n {
            for j in 0..n {
                let v = f(grid.coordinate(i), grid.coordinate(j));
                for (c, x) in comps.iter_mut().zip(v) {
                    c.push(x);
                }
            }
        }
        PhysicalField {
            grid: grid.clone(),
            rank,
            comps,
        }
    }

    pub(crate) fn check_shape(&self) -> Result<(), SpectralError> {
        check_comps(&self.grid, self.rank, &self.comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn comps(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Rectangle-rule L² norm, exact for trigonometric polynomials resolved by the grid.
    pub fn l2_norm(&self) -> f64 {
        let w = component_weights(self.rank);
        let dx = self.grid.dx();
        let s: f64 = self
            .comps
            .iter()
            .zip(w)
            .map(|(c, wc)| wc * c.iter().map(|x| x * x).sum::<f64>())
            .sum();
        (s * dx * dx).sqrt()
    }
}
