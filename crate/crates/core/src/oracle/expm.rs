//! Matrix exponential of small dense complex matrices by scaling and
//! squaring with the degree-13 Padé approximant.

use rustfft::num_complex::Complex64;

pub type CMat<const N: usize> = [[Complex64; N]; N];

const THETA_13: f64 = 5.371920351148152;
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub fn identity<const N: usize>() -> CMat<N> {
    let mut m = [[Complex64::default(); N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    let mut c = [[Complex64::default(); N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn matvec<const N: usize>(a: &CMat<N>, x: &[Complex64; N]) -> [Complex64; N] {
    let mut y = [Complex64::default(); N];
    for i in 0..N {
        for j in 0..N {
            y[i] += a[i][j] * x[j];
        }
    }
    y
}

/// Σ_i c_i M_i
fn combo<const N: usize>(terms: &[(f64, &CMat<N>)]) -> CMat<N> {
    let mut out = [[Complex64::default(); N]; N];
    for &(c, m) in terms {
        for i in 0..N {
            for j in 0..N {
                out[i][j] += m[i][j] * c;
            }
        }
    }
    out
}

fn norm1<const N: usize>(a: &CMat<N>) -> f64 {
    (0..N)
        .map(|j| (0..N).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solve P X = Q by Gaussian elimination with partial pivoting.
fn solve<const N: usize>(mut p: CMat<N>, mut q: CMat<N>) -> CMat<N> {
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&a, &b| p[a][col].norm().total_cmp(&p[b][col].norm()))
            .expect("nonempty");
        p.swap(col, piv);
        q.swap(col, piv);
        let d = p[col][col];
        for r in (col + 1)..N {
            let f = p[r][col] / d;
            if f == Complex64::default() {
                continue;
            }
            for c in col..N {
                let v = p[col][c];
                p[r][c] -= f * v;
            }
            for c in 0..N {
                let v = q[col][c];
                q[r][c] -= f * v;
            }
        }
    }
    for col in (0..N).rev() {
        let d = p[col][col];
        for c in 0..N {
            let mut acc = q[col][c];
            for k in (col + 1)..N {
                acc -= p[col][k] * q[k][c];
            }
            q[col][c] = acc / d;
        }
    }
    q
}

pub fn expm<const N: usize>(a: &CMat<N>) -> CMat<N> {
    let nrm = norm1(a);
    if nrm == 0.0 {
        return identity();
    }
    let squarings = if nrm > THETA_13 {
        (nrm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scale = 2f64.powi(-squarings);
    let a = combo(&[(scale, a)]);
    let id = identity::<N>();
    let a2 = matmul(&a, &a);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a4, &a2);
    let b = &PADE_13;
    let inner_u = matmul(&a6, &combo(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]));
    let u = matmul(
        &a,
        &combo(&[
            (1.0, &inner_u),
            (b[7], &a6),
            (b[5], &a4),
            (b[3], &a2),
            (b[1], &id),
        ]),
    );
    let inner_v = matmul(&a6, &combo(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]));
    let v = combo(&[
        (1.0, &inner_v),
        (b[6], &a6),
        (b[4], &a4),
        (b[2], &a2),
        (b[0], &id),
    ]);
    let p = combo(&[(1.0, &v), (-1.0, &u)]);
    let q = combo(&[(1.0, &v), (1.0, &u)]);
    let mut r = solve(p, q);
    for _ in 0..squarings {
        r = matmul(&r, &r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                m = m.max((a[i][j] - b[i][j]).norm());
            }
        }
        m
    }

    #[test]
    fn zero_gives_identity() {
        let z = [[Complex64::default(); 3]; 3];
        assert_eq!(expm(&z), identity::<3>());
    }

    #[test]
    fn diagonal_and_rotation_closed_forms() {
        let d = [[c(-2.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(30.0, 0.0)]];
        let e = expm(&d);
        assert!((e[0][0] - c(-2.0, 1.0).exp()).norm() < 1e-15);
        assert!((e[1][1] / 30f64.exp() - 1.0).norm() < 1e-13);
        assert!(e[0][1].norm() == 0.0 && e[1][0].norm() == 0.0);
        for th in [0.1, 2.0, 17.0] {
            let a = [[c(0.0, 0.0), c(-th, 0.0)], [c(th, 0.0), c(0.0, 0.0)]];
            let r = expm(&a);
            let want = [
                [c(th.cos(), 0.0), c(-th.sin(), 0.0)],
                [c(th.sin(), 0.0), c(th.cos(), 0.0)],
            ];
            assert!(max_diff(&r, &want) < 1e-13, "theta {th}");
        }
    }

    #[test]
    fn nilpotent_jordan_block() {
        let mut a = [[Complex64::default(); 4]; 4];
        for i in 0..3 {
            a[i][i + 1] = c(1.0, 0.0);
        }
        let e = expm(&a);
        let fact = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for i in 0..4 {
            for j in 0..4 {
                let want = if j >= i { fact[j - i] } else { 0.0 };
                assert!((e[i][j] - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn exponentials_of_commuting_parts_multiply() {
        let a = [
            [c(0.3, 0.1), c(-1.2, 0.4), c(0.0, 2.0)],
            [c(0.5, 0.0), c(-0.7, 0.0), c(1.1, -0.3)],
            [c(0.0, -0.9), c(0.2, 0.2), c(-2.0, 0.0)],
        ];
        let two = combo(&[(2.0, &a)]);
        let sq = matmul(&expm(&a), &expm(&a));
        assert!(max_diff(&expm(&two), &sq) < 1e-12 * norm1(&sq));
        let neg = combo(&[(-1.0, &a)]);
        let id = matmul(&expm(&a), &expm(&neg));
        assert!(max_diff(&id, &identity()) < 1e-13);
    }
}
