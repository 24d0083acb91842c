//! Training reflection matrices, schedules for both schemes and noisy pilots.
//!
//! The pilot symbol is fixed to 1, so the received symbol at slot `t` is
//! `θ2[t]ᴴ H θ1[t] + z[t]`.

use rand::Rng;

use crate::channel::CascadedChannel;
use crate::error::{Error, Result};
use crate::math::{bilinear, complex_normal, ones, CMatrix, CVector, C64};

/// Ratio of smallest to largest singular value below which a training
/// matrix is treated as singular.
const SINGULAR_RCOND: f64 = 1e-12;

/// `[D]_{l,k} = exp(-j 2π l k / m)` (zero-based indices).
pub fn dft_matrix(m: usize) -> Result<CMatrix> {
    if m == 0 {
        return Err(Error::Domain("DFT size must be >= 1".into()));
    }
    Ok(CMatrix::from_fn(m, m, |l, k| {
        // reduce the exponent first so large sizes keep full accuracy
        let e = (l * k) % m;
        C64::from_polar(1.0, -std::f64::consts::TAU * e as f64 / m as f64)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingKind {
    /// DFT matrix; inverse is the scaled adjoint `Dᴴ / m`.
    Dft,
    General,
}

/// A square invertible training matrix `Θ = [θ[1], …, θ[m]]` with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMatrix {
    matrix: CMatrix,
    inverse: CMatrix,
    kind: TrainingKind,
    unit_modulus: bool,
}

impl TrainingMatrix {
    pub fn dft(m: usize) -> Result<Self> {
        let matrix = dft_matrix(m)?;
        let inverse = matrix.adjoint() / C64::from(m as f64);
        Ok(Self {
            matrix,
            inverse,
            kind: TrainingKind::Dft,
            unit_modulus: true,
        })
    }

    /// Accepts any invertible square matrix. Matrices with non-unit-modulus
    /// entries are allowed for studying the MSE formula but are flagged by
    /// [`TrainingMatrix::is_unit_modulus`].
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "training matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let sv = matrix.singular_values();
        let (smin, smax) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
        if !(smax > 0.0) || smin / smax < SINGULAR_RCOND {
            return Err(Error::Singular("training matrix"));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or(Error::Singular("training matrix"))?;
        let unit_modulus = matrix.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12);
        Ok(Self {
            matrix,
            inverse,
            kind: TrainingKind::General,
            unit_modulus,
        })
    }

    /// Random i.i.d. phases; redrawn until well conditioned.
    pub fn random_unit_modulus<G: Rng + ?Sized>(m: usize, rng: &mut G) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("training size must be >= 1".into()));
        }
        loop {
            let mat = CMatrix::from_fn(m, m, |_, _| {
                C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
            });
            match Self::new(mat) {
                Ok(t) if t.condition_number() < 1e3 => return Ok(t),
                Ok(_) | Err(Error::Singular(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    pub fn kind(&self) -> TrainingKind {
        self.kind
    }

    pub fn is_unit_modulus(&self) -> bool {
        self.unit_modulus
    }

    pub fn column(&self, k: usize) -> CVector {
        self.matrix.column(k).into_owned()
    }

    /// `tr{(Θ Θᴴ)⁻¹}`.
    pub fn inverse_gram_trace(&self) -> Result<f64> {
        match self.kind {
            TrainingKind::Dft => Ok(1.0),
            TrainingKind::General => {
                let gram = &self.matrix * self.matrix.adjoint();
                let inv = gram.try_inverse().ok_or(Error::Singular("Θ Θᴴ"))?;
                Ok(inv.trace().re)
            }
        }
    }

    fn condition_number(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingScheme {
    /// Full-matrix training over `M1·M2` symbols.
    Scheme1,
    /// Two sub-blocks of `M2` and `M1` symbols.
    Scheme2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubBlock {
    Scheme1,
    /// IRS 1 fixed to all-ones, IRS 2 sweeps `Θ2`.
    Scheme2First,
    /// IRS 2 fixed to all-ones, IRS 1 sweeps `Θ1`.
    Scheme2Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingEntry {
    pub theta1: CVector,
    pub theta2: CVector,
    pub block: SubBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSchedule {
    pub entries: Vec<TrainingEntry>,
    pub scheme: TrainingScheme,
    pub theta1: TrainingMatrix,
    pub theta2: TrainingMatrix,
}

impl TrainingSchedule {
    /// Number of pilot symbols `T_t`.
    pub fn training_time(&self) -> usize {
        self.entries.len()
    }

    pub fn m1(&self) -> usize {
        self.theta1.size()
    }

    pub fn m2(&self) -> usize {
        self.theta2.size()
    }

    pub fn scheme1_dft(m1: usize, m2: usize) -> Result<Self> {
        schedule_scheme1(m1, m2, TrainingMatrix::dft(m1)?, TrainingMatrix::dft(m2)?)
    }

    pub fn scheme2_dft(m1: usize, m2: usize) -> Result<Self> {
        schedule_scheme2(m1, m2, TrainingMatrix::dft(m1)?, TrainingMatrix::dft(m2)?)
    }
}

fn check_sizes(
    m1: usize,
    m2: usize,
    theta1: &TrainingMatrix,
    theta2: &TrainingMatrix,
) -> Result<()> {
    if theta1.size() != m1 || theta2.size() != m2 {
        return Err(Error::Dimension(format!(
            "expected {m1}x{m1} and {m2}x{m2} training matrices, got {0}x{0} and {1}x{1}",
            theta1.size(),
            theta2.size()
        )));
    }
    Ok(())
}

/// Slot `t = i·M2 + j` (zero-based) uses column `i` of `Θ1` and column `j` of `Θ2`.
pub fn schedule_scheme1(
    m1: usize,
    m2: usize,
    theta1: TrainingMatrix,
    theta2: TrainingMatrix,
) -> Result<TrainingSchedule> {
    check_sizes(m1, m2, &theta1, &theta2)?;
    let mut entries = Vec::with_capacity(m1 * m2);
    for i in 0..m1 {
        let t1 = theta1.column(i);
        for j in 0..m2 {
            entries.push(TrainingEntry {
                theta1: t1.clone(),
                theta2: theta2.column(j),
                block: SubBlock::Scheme1,
            });
        }
    }
    Ok(TrainingSchedule {
        entries,
        scheme: TrainingScheme::Scheme1,
        theta1,
        theta2,
    })
}

/// First `M2` slots: `(1, Θ2[:, j])`; next `M1` slots: `(Θ1[:, i], 1)`.
pub fn schedule_scheme2(
    m1: usize,
    m2: usize,
    theta1: TrainingMatrix,
    theta2: TrainingMatrix,
) -> Result<TrainingSchedule> {
    check_sizes(m1, m2, &theta1, &theta2)?;
    let mut entries = Vec::with_capacity(m1 + m2);
    for j in 0..m2 {
        entries.push(TrainingEntry {
            theta1: ones(m1),
            theta2: theta2.column(j),
            block: SubBlock::Scheme2First,
        });
    }
    for i in 0..m1 {
        entries.push(TrainingEntry {
            theta1: theta1.column(i),
            theta2: ones(m2),
            block: SubBlock::Scheme2Second,
        });
    }
    Ok(TrainingSchedule {
        entries,
        scheme: TrainingScheme::Scheme2,
        theta1,
        theta2,
    })
}

/// Received pilot symbols in schedule order.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    pub y: CVector,
    /// Normalized noise power `σ0² / P`.
    pub sigma_sq: f64,
    pub scheme: TrainingScheme,
    pub m1: usize,
    pub m2: usize,
}

impl PilotObservation {
    /// `Y_t = Θ2ᴴ H Θ1 + Z_t` as an `M2 × M1` matrix.
    pub fn scheme1_matrix(&self) -> Result<CMatrix> {
        if self.scheme != TrainingScheme::Scheme1 {
            return Err(Error::Dimension(
                "observation was not taken with Scheme 1 training".into(),
            ));
        }
        Ok(CMatrix::from_column_slice(
            self.m2,
            self.m1,
            self.y.as_slice(),
        ))
    }

    /// `(y⁽¹⁾, y⁽²⁾)` of lengths `M2` and `M1`.
    pub fn scheme2_blocks(&self) -> Result<(CVector, CVector)> {
        if self.scheme != TrainingScheme::Scheme2 {
            return Err(Error::Dimension(
                "observation was not taken with Scheme 2 training".into(),
            ));
        }
        let y1 = self.y.rows(0, self.m2).into_owned();
        let y2 = self.y.rows(self.m2, self.m1).into_owned();
        Ok((y1, y2))
    }
}

/// Simulates the training phase: one CN(0, σ²) noise draw per slot, in slot order.
pub fn observe<G: Rng + ?Sized>(
    h: &CascadedChannel,
    sched: &TrainingSchedule,
    sigma_sq: f64,
    rng: &mut G,
) -> Result<PilotObservation> {
    if h.m1() != sched.m1() || h.m2() != sched.m2() {
        return Err(Error::Dimension(format!(
            "channel is {}x{} but schedule expects {}x{}",
            h.m2(),
            h.m1(),
            sched.m2(),
            sched.m1()
        )));
    }
    if !(sigma_sq >= 0.0) {
        return Err(Error::Domain(format!(
            "noise power must be >= 0, got {sigma_sq}"
        )));
    }
    let scale = sigma_sq.sqrt();
    let y = CVector::from_iterator(
        sched.entries.len(),
        sched.entries.iter().map(|e| {
            let clean = bilinear(&e.theta2, &h.h, &e.theta1);
            if scale > 0.0 {
                clean + complex_normal(rng) * scale
            } else {
                clean
            }
        }),
    );
    Ok(PilotObservation {
        y,
        sigma_sq,
        scheme: sched.scheme,
        m1: sched.m1(),
        m2: sched.m2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{complex_normal_matrix, frobenius_sq};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dft_examples() {
        assert_eq!(dft_matrix(1).unwrap()[(0, 0)], c(1.0, 0.0));
        let d2 = dft_matrix(2).unwrap();
        let expect2 = [c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
        for (a, b) in d2.iter().zip(expect2.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
        let row = dft_matrix(4).unwrap().row(1).into_owned();
        let expect = [c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0)];
        for (a, b) in row.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(dft_matrix(0).is_err());
    }

    #[test]
    fn dft_is_scaled_unitary() {
        for m in 1..=16 {
            let d = dft_matrix(m).unwrap();
            let g = &d * d.adjoint();
            let target = CMatrix::identity(m, m) * C64::from(m as f64);
            assert!(frobenius_sq(&(g - target)).sqrt() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn dft_closed_form_inverse_matches_lu() {
        for m in [1, 3, 6, 10] {
            let fast = TrainingMatrix::dft(m).unwrap();
            let general = TrainingMatrix::new(dft_matrix(m).unwrap()).unwrap();
            assert!(frobenius_sq(&(fast.inverse() - general.inverse())) < 1e-24);
            assert!((general.inverse_gram_trace().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_training_is_rejected() {
        let singular = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(
            TrainingMatrix::new(singular),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            TrainingMatrix::new(CMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn identity_training_is_flagged_non_unit_modulus() {
        let t = TrainingMatrix::new(CMatrix::identity(3, 3)).unwrap();
        assert!(!t.is_unit_modulus());
        assert!(TrainingMatrix::dft(3).unwrap().is_unit_modulus());
    }

    #[test]
    fn scheme1_schedule_layout() {
        let s = TrainingSchedule::scheme1_dft(1, 1).unwrap();
        assert_eq!(s.training_time(), 1);
        assert_eq!(s.entries[0].theta1[0], c(1.0, 0.0));

        let s = TrainingSchedule::scheme1_dft(2, 2).unwrap();
        assert_eq!(s.training_time(), 4);
        assert_eq!(s.entries[0].theta1, ones(2));
        assert_eq!(s.entries[1].theta1, ones(2));
        assert_ne!(s.entries[2].theta1, ones(2));
        assert_eq!(s.entries[0].theta2, s.entries[2].theta2);

        assert_eq!(
            TrainingSchedule::scheme1_dft(6, 6).unwrap().training_time(),
            36
        );
    }

    #[test]
    fn scheme2_schedule_layout() {
        let s = TrainingSchedule::scheme2_dft(1, 1).unwrap();
        assert_eq!(s.training_time(), 2);
        assert!(s
            .entries
            .iter()
            .all(|e| e.theta1 == ones(1) && e.theta2 == ones(1)));

        let s = TrainingSchedule::scheme2_dft(6, 6).unwrap();
        assert_eq!(s.training_time(), 12);
        assert!(s.entries[..6]
            .iter()
            .all(|e| e.theta1 == ones(6) && e.block == SubBlock::Scheme2First));
        assert!(s.entries[6..]
            .iter()
            .all(|e| e.theta2 == ones(6) && e.block == SubBlock::Scheme2Second));

        let s = TrainingSchedule::scheme2_dft(3, 5).unwrap();
        assert_eq!(s.training_time(), 8);
    }

    #[test]
    fn schedule_size_mismatch() {
        let t = TrainingMatrix::dft(3).unwrap();
        assert!(schedule_scheme1(2, 3, t.clone(), t.clone()).is_err());
        assert!(schedule_scheme2(3, 4, t.clone(), t).is_err());
    }

    #[test]
    fn schedule_entries_are_unit_modulus() {
        for (m1, m2) in [(1, 1), (2, 3), (6, 6), (7, 4)] {
            for s in [
                TrainingSchedule::scheme1_dft(m1, m2).unwrap(),
                TrainingSchedule::scheme2_dft(m1, m2).unwrap(),
            ] {
                for e in &s.entries {
                    for z in e.theta1.iter().chain(e.theta2.iter()) {
                        assert!((z.norm() - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn noise_free_scheme1_observation_is_bilinear_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = CascadedChannel::new(complex_normal_matrix(3, 4, 1.0, &mut rng));
        let s = TrainingSchedule::scheme1_dft(4, 3).unwrap();
        let obs = observe(&h, &s, 0.0, &mut rng).unwrap();
        let y = obs.scheme1_matrix().unwrap();
        let expected = s.theta2.matrix().adjoint() * &h.h * s.theta1.matrix();
        assert!(frobenius_sq(&(&y - &expected)) < 1e-24 * frobenius_sq(&expected));
        for (t, e) in s.entries.iter().enumerate() {
            assert_eq!(obs.y[t], h.gain(&e.theta1, &e.theta2).unwrap());
        }
        assert!(obs.scheme2_blocks().is_err());
    }

    #[test]
    fn scalar_observation_adds_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = CascadedChannel::new(CMatrix::from_element(1, 1, c(0.3, -0.2)));
        let s = TrainingSchedule::scheme1_dft(1, 1).unwrap();
        let obs = observe(&h, &s, 0.5, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let z = complex_normal(&mut rng) * 0.5f64.sqrt();
        assert!((obs.y[0] - (c(0.3, -0.2) + z)).norm() < 1e-15);
    }

    #[test]
    fn empirical_noise_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = CascadedChannel::new(CMatrix::zeros(10, 10));
        let s = TrainingSchedule::scheme1_dft(10, 10).unwrap();
        let sigma_sq = 0.37;
        let mut acc = 0.0;
        let mut n = 0usize;
        while n < 10_000 {
            let obs = observe(&h, &s, sigma_sq, &mut rng).unwrap();
            acc += obs.y.iter().map(|z| z.norm_sqr()).sum::<f64>();
            n += obs.y.len();
        }
        let var = acc / n as f64;
        assert!((var / sigma_sq - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn scheme2_blocks_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = CascadedChannel::new(complex_normal_matrix(2, 3, 1.0, &mut rng));
        let s = TrainingSchedule::scheme2_dft(3, 2).unwrap();
        let obs = observe(&h, &s, 0.0, &mut rng).unwrap();
        let (y1, y2) = obs.scheme2_blocks().unwrap();
        assert_eq!(y1.len(), 2);
        assert_eq!(y2.len(), 3);
        assert!(obs.scheme1_matrix().is_err());
    }

    #[test]
    fn observe_rejects_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = CascadedChannel::new(CMatrix::zeros(2, 2));
        let s = TrainingSchedule::scheme1_dft(3, 2).unwrap();
        assert!(observe(&h, &s, 0.1, &mut rng).is_err());
        let s = TrainingSchedule::scheme1_dft(2, 2).unwrap();
        assert!(observe(&h, &s, -1.0, &mut rng).is_err());
    }
}
