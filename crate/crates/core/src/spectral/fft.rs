use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use super::SpectralError;

const BLOCK: usize = 32;

pub(crate) struct FftPlans {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl FftPlans {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        FftPlans {
            n,
            forward,
            inverse,
            scratch_len,
        }
    }

    /// Unnormalized 2D transform in place (rows, transpose, rows, transpose).
    fn fft2(&self, data: &mut [Complex64], work: &mut Vec<Complex64>, inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![Complex64::default(); self.scratch_len];
        work.resize(n * n, Complex64::default());
        // rows that are entirely zero (e.g. truncated by dealiasing) stay zero
        for row in data.chunks_exact_mut(n) {
            if row.iter().any(|z| z.re != 0.0 || z.im != 0.0) {
                plan.process_with_scratch(row, &mut scratch);
            }
        }
        transpose(data, work, n);
        plan.process_with_scratch(work, &mut scratch);
        transpose(work, data, n);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// Visit every non-Nyquist flat index together with the index of −k.
#[inline]
pub(crate) fn for_each_pair(n: usize, mut f: impl FnMut(usize, usize)) {
    let half = n / 2;
    for i1 in 0..n {
        if i1 == half {
            continue;
        }
        let n1 = (n - i1) % n;
        for i2 in 0..n {
            if i2 == half {
                continue;
            }
            f(i1 * n + i2, n1 * n + (n - i2) % n);
        }
    }
}

/// Synthesize real samples of every component, two components per complex FFT.
pub(crate) fn inverse_components(grid: &Grid, comps: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let plans = grid.plans();
    let len = grid.len();
    let mut out = Vec::with_capacity(comps.len());
    let mut buf = vec![Complex64::default(); len];
    let mut work = Vec::new();
    for pair in comps.chunks(2) {
        match pair {
            [f, g] => {
                for ((b, &x), &y) in buf.iter_mut().zip(f.iter()).zip(g.iter()) {
                    *b = Complex64::new(x.re - y.im, x.im + y.re);
                }
                plans.fft2(&mut buf, &mut work, true);
                out.push(buf.iter().map(|z| z.re).collect());
                out.push(buf.iter().map(|z| z.im).collect());
            }
            [f] => {
                buf.copy_from_slice(f);
                plans.fft2(&mut buf, &mut work, true);
                out.push(buf.iter().map(|z| z.re).collect());
            }
            _ => unreachable!(),
        }
    }
    out
}

/// Analyze real samples of every component, two components per complex FFT.
/// Nyquist rows and columns come out zero.
pub(crate) fn forward_components(grid: &Grid, comps: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let plans = grid.plans();
    let len = grid.len();
    let norm = 1.0 / len as f64;
    let mut out = Vec::with_capacity(comps.len());
    let mut buf = vec![Complex64::default(); len];
    let mut work = Vec::new();
    for pair in comps.chunks(2) {
        match pair {
            [f, g] => {
                for ((b, &x), &y) in buf.iter_mut().zip(f.iter()).zip(g.iter()) {
                    *b = Complex64::new(x, y);
                }
                plans.fft2(&mut buf, &mut work, false);
                let mut fa = vec![Complex64::default(); len];
                let mut ga = vec![Complex64::default(); len];
                for_each_pair(grid.n(), |idx, neg| {
                    let z = buf[idx];
                    let zc = buf[neg].conj();
                    fa[idx] = (z + zc) * (0.5 * norm);
                    // (z - zc) / 2i
                    let d = (z - zc) * (0.5 * norm);
                    ga[idx] = Complex64::new(d.im, -d.re);
                });
                out.push(fa);
                out.push(ga);
            }
            [f] => {
                for (b, &x) in buf.iter_mut().zip(f.iter()) {
                    *b = Complex64::new(x, 0.0);
                }
                plans.fft2(&mut buf, &mut work, false);
                let mut fa = vec![Complex64::default(); len];
                for_each_pair(grid.n(), |idx, neg| {
                    fa[idx] = (buf[idx] + buf[neg].conj()) * (0.5 * norm);
                });
                out.push(fa);
            }
            _ => unreachable!(),
        }
    }
    out
}

/// Physical samples to Fourier coefficients.
pub fn transform_forward(f: &PhysicalField) -> Result<SpectralField, SpectralError> {
    f.check_shape()?;
    let refs: Vec<&[f64]> = f.comps().iter().map(|c| c.as_slice()).collect();
    let comps = forward_components(f.grid(), &refs);
    Ok(SpectralField::from_parts_unchecked(f.grid().clone(), f.rank(), comps))
}

/// Fourier coefficients to physical samples.
pub fn transform_inverse(f: &SpectralField) -> PhysicalField {
    let refs: Vec<&[Complex64]> = f.comps().iter().map(|c| c.as_slice()).collect();
    let comps = inverse_components(f.grid(), &refs);
    PhysicalField::from_parts_unchecked(f.grid().clone(), f.rank(), comps)
}

/// Inverse-transform several fields on one grid, packing components pairwise.
pub fn inverse_many(fields: &[&SpectralField]) -> Result<Vec<PhysicalField>, SpectralError> {
    let Some(first) = fields.first() else {
        return Ok(Vec::new());
    };
    let grid = first.grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(SpectralError::GridMismatch);
    }
    let refs: Vec<&[Complex64]> = fields
        .iter()
        .flat_map(|f| f.comps().iter().map(|c| c.as_slice()))
        .collect();
    let mut comps = inverse_components(grid, &refs).into_iter();
    Ok(fields
        .iter()
        .map(|f| {
            let mine = comps.by_ref().take(f.rank().components()).collect();
            PhysicalField::from_parts_unchecked(grid.clone(), f.rank(), mine)
        })
        .collect())
}

/// Forward-transform several fields on one grid, packing components pairwise.
pub fn forward_many(fields: &[&PhysicalField]) -> Result<Vec<SpectralField>, SpectralError> {
    let Some(first) = fields.first() else {
        return Ok(Vec::new());
    };
    let grid = first.grid();
    for f in fields {
        if f.grid() != grid {
            return Err(SpectralError::GridMismatch);
        }
        f.check_shape()?;
    }
    let refs: Vec<&[f64]> = fields
        .iter()
        .flat_map(|f| f.comps().iter().map(|c| c.as_slice()))
        .collect();
    let mut comps = forward_components(grid, &refs).into_iter();
    Ok(fields
        .iter()
        .map(|f| {
            let mine = comps.by_ref().take(f.rank().components()).collect();
            SpectralField::from_parts_unchecked(grid.clone(), f.rank(), mine)
        })
        .collect())
}
