use super::field::SpectralField;
use super::grid::Grid;

const RISE: (f64, f64) = (0.75, 1.2);
const FALL: (f64, f64) = (1.5, 8.0 / 3.0);

fn g(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// C^∞ step from 0 (x ≤ 0) to 1 (x ≥ 1).
pub(crate) fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = g(x);
        a / (a + g(1.0 - x))
    }
}

/// Raw radial bump: support [3/4, 8/3], equal to 1 on [6/5, 3/2].
pub fn bump(r: f64) -> f64 {
    let up = smooth_step((r - RISE.0) / (RISE.1 - RISE.0));
    let down = 1.0 - smooth_step((r - FALL.0) / (FALL.1 - FALL.0));
    up * down
}

/// Shells j with φ(2^{−j}r) ≠ 0 and their renormalized weights, so the
/// weights sum to one. At most two shells overlap.
pub fn shell_weights(r: f64) -> Vec<(i32, f64)> {
    if r <= 0.0 {
        return Vec::new();
    }
    let lo = (r * 3.0 / 8.0).log2().floor() as i32;
    let hi = (r * 4.0 / 3.0).log2().ceil() as i32;
    let mut raw: Vec<(i32, f64)> = (lo..=hi)
        .map(|j| (j, bump(r * 2f64.powi(-j))))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    let total: f64 = raw.iter().map(|&(_, w)| w).sum();
    for (_, w) in &mut raw {
        *w /= total;
    }
    raw
}

/// Littlewood–Paley pieces Δ̇_j f for every shell touching a nonzero grid mode.
#[derive(Debug, Clone)]
pub struct DyadicShells {
    pub j_min: i32,
    pub j_max: i32,
    /// shells[j − j_min] = Δ̇_j f
    pub shells: Vec<SpectralField>,
}

impl DyadicShells {
    pub fn shell(&self, j: i32) -> Option<&SpectralField> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        self.shells.get((j - self.j_min) as usize)
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    /// Σ_j Δ̇_j f.
    pub fn sum(&self) -> SpectralField {
        let mut acc = SpectralField::zeros(self.shells[0].grid(), self.shells[0].rank());
        for s in &self.shells {
            acc.axpy(1.0, s).expect("shells share grid and rank");
        }
        acc
    }
}

fn shell_range(grid: &Grid) -> (i32, i32) {
    let rmin = grid.kappa();
    let rmax = grid.max_xi_norm();
    let lo = (rmin * 3.0 / 8.0).log2().floor() as i32;
    let hi = (rmax * 4.0 / 3.0).log2().ceil() as i32;
    (lo, hi)
}

pub fn dyadic_decompose(f: &SpectralField) -> DyadicShells {
    let grid = f.grid();
    let (j_min, j_max) = shell_range(grid);
    let mut shells: Vec<SpectralField> = (j_min..=j_max)
        .map(|_| SpectralField::zeros(grid, f.rank()))
        .collect();
    for idx in 1..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        for (j, w) in shell_weights(grid.xi_norm(idx)) {
            let s = &mut shells[(j - j_min) as usize];
            for c in 0..f.rank().components() {
                s.comp_mut(c)[idx] = f.comp(c)[idx] * w;
            }
        }
    }
    DyadicShells {
        j_min,
        j_max,
        shells,
    }
}

/// ‖Δ̇_j f‖²_{L²} for every shell in one pass, as (j, energy) pairs.
pub fn shell_energies(f: &SpectralField) -> Vec<(i32, f64)> {
    let grid = f.grid();
    let (j_min, j_max) = shell_range(grid);
    let mut e = vec![0.0; (j_max - j_min + 1) as usize];
    let weights = super::component_weights(f.rank());
    let l2 = grid.length() * grid.length();
    for idx in 1..grid.len() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let m: f64 = f
            .comps()
            .iter()
            .zip(weights)
            .map(|(c, w)| w * c[idx].norm_sqr())
            .sum();
        if m == 0.0 {
            continue;
        }
        for (j, w) in shell_weights(grid.xi_norm(idx)) {
            e[(j - j_min) as usize] += w * w * m * l2;
        }
    }
    (j_min..=j_max).zip(e).collect()
}
