//! Dense linear-algebra primitives shared by the solvers.
//!
//! Vectors are plain `f64` slices; matrices are row-major [`DenseMatrix`]
//! values. Only what the recovery algorithms need is provided.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of power iterations used by [`spectral_norm_sq`].
pub const POWER_ITERS: usize = 100;

/// Relative change below which a power iteration counts as stabilized.
pub const POWER_STABLE_RTOL: f64 = 1e-6;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for DenseMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        DenseMatrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl From<DenseMatrix> for RawMatrix {
    fn from(m: DenseMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix must have at least one row and column"));
        }
        Error::check_len("matrix entries", rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            Error::check_len("matrix row", cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Returns `c * self`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_len("matvec operand", self.cols, x.len())?;
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `Aᵀ y`
    pub fn tmatvec(&self, y: &[f64]) -> Result<Vec<f64>> {
        Error::check_len("transposed matvec operand", self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Ok(out)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `‖a − b‖₂`
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Scalar shrinkage `sign(v)·max(|v| − t, 0)`.
#[inline]
pub fn shrink(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Soft-thresholding with a common threshold `t ≥ 0`.
pub fn soft_threshold(v: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("threshold must be nonnegative, got {t}")));
    }
    Ok(v.iter().map(|&x| shrink(x, t)).collect())
}

/// Soft-thresholding with a per-coordinate threshold vector.
pub fn soft_threshold_each(v: &[f64], t: &[f64]) -> Result<Vec<f64>> {
    Error::check_len("threshold vector", v.len(), t.len())?;
    if let Some(bad) = t.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::invalid(format!("threshold must be nonnegative, got {bad}")));
    }
    Ok(v.iter().zip(t).map(|(&x, &ti)| shrink(x, ti)).collect())
}

/// Power-iteration estimate of `λ_max(AᵀA) = ‖A‖₂²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNormEstimate {
    pub value: f64,
    /// False when the last two Rayleigh quotients differ by more than
    /// [`POWER_STABLE_RTOL`] relative.
    pub stabilized: bool,
}

/// Estimates the largest eigenvalue of `AᵀA` by power iteration from a
/// seeded Gaussian start vector.
pub fn spectral_norm_sq(a: &DenseMatrix, iters: usize, seed: u64) -> SpectralNormEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..a.cols())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut value = 0.0;
    let mut prev = f64::NAN;
    for _ in 0..iters.max(1) {
        let av = a.matvec(&v).expect("dimensions fixed by construction");
        let w = a.tmatvec(&av).expect("dimensions fixed by construction");
        prev = value;
        value = dot(&av, &av);
        let nw = norm2(&w);
        if nw == 0.0 {
            return SpectralNormEstimate {
                value: 0.0,
                stabilized: true,
            };
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    let stabilized = (value - prev).abs() <= POWER_STABLE_RTOL * value;
    SpectralNormEstimate { value, stabilized }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&[3.0], 1.0).unwrap(), vec![2.0]);
        assert_eq!(soft_threshold(&[-1.0], 2.0).unwrap(), vec![0.0]);
        assert_eq!(soft_threshold(&[5.0, -5.0], 0.0).unwrap(), vec![5.0, -5.0]);
        assert_eq!(
            soft_threshold_each(&[5.0, -5.0], &[1.0, 2.0]).unwrap(),
            vec![4.0, -3.0]
        );
    }

    #[test]
    fn soft_threshold_errors() {
        assert!(matches!(
            soft_threshold(&[1.0], -0.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            soft_threshold_each(&[1.0, 2.0], &[1.0]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            soft_threshold_each(&[1.0], &[-1.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn shrink_is_scalar_prox_by_grid_search() {
        for &(v, t) in &[(0.7, 0.3), (-2.0, 0.5), (0.1, 0.4), (1.5, 0.0)] {
            let grid_min = (-300_000..=300_000)
                .map(|i| i as f64 * 1e-5)
                .map(|w| (w, t * f64::abs(w) + 0.5 * (w - v) * (w - v)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0;
            assert!((shrink(v, t) - grid_min).abs() <= 1e-5, "v={v} t={t}");
        }
    }

    #[test]
    fn matrix_construction_validates() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(DenseMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn matvec_and_transpose() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(a.matvec(&[1.0, 0.0, -1.0]).unwrap(), vec![-2.0, -2.0]);
        assert_eq!(a.tmatvec(&[1.0, 1.0]).unwrap(), vec![5.0, 7.0, 9.0]);
        assert!(a.matvec(&[1.0]).is_err());
    }

    #[test]
    fn spectral_norm_examples() {
        let eye = DenseMatrix::identity(3).unwrap();
        let est = spectral_norm_sq(&eye, POWER_ITERS, 7);
        assert!((est.value - 1.0).abs() < 1e-12);
        assert!(est.stabilized);

        let d = DenseMatrix::diagonal(&[3.0, 1.0]).unwrap();
        let est = spectral_norm_sq(&d, POWER_ITERS, 7);
        assert!((est.value - 9.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_norm_is_deterministic() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(spectral_norm_sq(&a, 50, 3), spectral_norm_sq(&a, 50, 3));
    }

    proptest! {
        #[test]
        fn soft_threshold_is_nonexpansive(
            u in prop::collection::vec(-10.0..10.0f64, 6),
            v in prop::collection::vec(-10.0..10.0f64, 6),
            t in 0.0..5.0f64,
        ) {
            let su = soft_threshold(&u, t).unwrap();
            let sv = soft_threshold(&v, t).unwrap();
            prop_assert!(dist2(&su, &sv) <= dist2(&u, &v) + 1e-12);
        }

        #[test]
        fn spectral_norm_bounds_rayleigh_quotients(
            entries in prop::collection::vec(-3.0..3.0f64, 12),
            probe in prop::collection::vec(-1.0..1.0f64, 3),
        ) {
            let a = DenseMatrix::new(4, 3, entries).unwrap();
            let est = spectral_norm_sq(&a, 2000, 11);
            let np = dot(&probe, &probe);
            prop_assume!(np > 1e-6);
            let ap = a.matvec(&probe).unwrap();
            prop_assert!(est.value >= dot(&ap, &ap) / np - 1e-6 * (1.0 + est.value));
        }
    }
}
