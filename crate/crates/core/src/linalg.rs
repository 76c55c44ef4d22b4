//! Small dense helpers shared by the state and density-matrix code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Trace distance `½‖|a⟩⟨a| − |b⟩⟨b|‖₁` between two normalized pure states.
///
/// Evaluated as `sqrt(1 − |⟨a|b⟩|²)` but through the phase-aligned difference
/// vector, which keeps the result accurate when the states nearly coincide
/// (the naive form loses half the digits to cancellation).
pub fn trace_distance_pure(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    assert_eq!(a.len(), b.len(), "trace distance of vectors with different lengths");
    let overlap = b.dotc(a);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    let diff2 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>();
    // ‖a − e^{iφ}b‖² = 2 − 2|⟨a|b⟩| for unit vectors.
    let half = 0.5 * diff2;
    (half * (2.0 - half)).max(0.0).sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// `½‖a − b‖₁` for two Hermitian matrices.
pub fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

/// Largest deviation from Hermiticity, `max |m_ij − conj(m_ji)|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_trace_distance_limits() {
        let a = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let b = DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0)]);
        assert!((trace_distance_pure(&a, &b) - 1.0).abs() < 1e-15);
        let phased = a.map(|z| z * C64::from_polar(1.0, 0.7));
        assert!(trace_distance_pure(&a, &phased) < 1e-15);

        // |+> vs |0>: sqrt(1 - 1/2)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]);
        assert!((trace_distance_pure(&a, &plus) - s).abs() < 1e-15);
    }

    #[test]
    fn pure_trace_distance_matches_density_form() {
        let a = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let b = DVector::from_vec(vec![C64::new(0.8, 0.0), C64::new(0.6, 0.0)]);
        let ra = &a * a.adjoint();
        let rb = &b * b.adjoint();
        assert!((trace_distance(&ra, &rb) - trace_distance_pure(&a, &b)).abs() < 1e-14);
    }
}
