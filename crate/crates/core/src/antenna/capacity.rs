use num_complex::Complex64;
use thiserror::Error;

use super::channel::ChannelMatrix;
use crate::model::{BaseId, Marking, PlaceId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("power matrix entries must be finite and nonnegative")]
    InvalidPower,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

/// `log2 det(A)` for a Hermitian positive definite `A` (row-major, n x n), via Cholesky.
pub fn log2_det_hpd(a: &[Complex64], n: usize) -> Result<f64, CapacityError> {
    if a.len() != n * n {
        return Err(CapacityError::DimensionMismatch(format!(
            "expected {} entries, found {}",
            n * n,
            a.len()
        )));
    }
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    let mut log2_det = 0.0;
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return Err(CapacityError::NotPositiveDefinite);
        }
        let ljj = d.sqrt();
        l[j * n + j] = Complex64::new(ljj, 0.0);
        log2_det += 2.0 * ljj.log2();
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(log2_det)
}

/// Sum capacity `log2 det(I + rho * (n_r / n_ts) * Hc P Hc^H)` in bits/s/Hz.
///
/// `hc` may have any number of rows; all-zero rows (inactive antennas) leave the
/// determinant unchanged. `power` is the diagonal of `P`.
pub fn capacity(hc: &ChannelMatrix, rho: f64, n_ts: usize, n_r: usize, power: &[f64]) -> Result<f64, CapacityError> {
    if hc.cols() != n_r {
        return Err(CapacityError::DimensionMismatch(format!(
            "channel has {} columns but there are {n_r} users",
            hc.cols()
        )));
    }
    if power.len() != n_r {
        return Err(CapacityError::DimensionMismatch(format!(
            "power matrix has {} diagonal entries but there are {n_r} users",
            power.len()
        )));
    }
    if n_ts == 0 {
        return Err(CapacityError::DimensionMismatch("no antennas selected".into()));
    }
    if power.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(CapacityError::InvalidPower);
    }
    let scale = rho * n_r as f64 / n_ts as f64;
    let n = hc.rows();
    let mut g = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        let ra = hc.row(a);
        for b in 0..=a {
            let rb = hc.row(b);
            let mut s = Complex64::new(0.0, 0.0);
            for u in 0..n_r {
                s += ra[u] * power[u] * rb[u].conj();
            }
            let v = s * scale;
            g[a * n + b] = v;
            g[b * n + a] = v.conj();
        }
        g[a * n + a] += 1.0;
    }
    Ok(log2_det_hpd(&g, n)?.max(0.0))
}

/// The neighborhood channel matrix: row `i` is `h`'s row `i` when antenna base
/// `antennas[i]` is in `place`, and zero otherwise.
pub fn build_hc(marking: &Marking, place: PlaceId, antennas: &[BaseId], h: &ChannelMatrix) -> ChannelMatrix {
    assert_eq!(antennas.len(), h.rows(), "one antenna base per channel row");
    let here = marking.get(place);
    let mut hc = ChannelMatrix::zeros(h.rows(), h.cols());
    for (i, a) in antennas.iter().enumerate() {
        if here.contains_base(*a) {
            hc.row_mut(i).copy_from_slice(h.row(i));
        }
    }
    hc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_on_real_diagonal() {
        let a = [
            Complex64::new(4.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        assert!((log2_det_hpd(&a, 2).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = [
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert_eq!(log2_det_hpd(&a, 2), Err(CapacityError::NotPositiveDefinite));
    }

    #[test]
    fn hermitian_off_diagonal() {
        // det [[2, i], [-i, 2]] = 4 - 1 = 3
        let a = [
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        assert!((log2_det_hpd(&a, 2).unwrap() - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let h = ChannelMatrix::zeros(2, 3);
        assert!(matches!(
            capacity(&h, 1.0, 2, 2, &[1.0, 1.0]),
            Err(CapacityError::DimensionMismatch(_))
        ));
        assert!(matches!(
            capacity(&h, 1.0, 2, 3, &[1.0, 1.0]),
            Err(CapacityError::DimensionMismatch(_))
        ));
        assert_eq!(
            capacity(&h, 1.0, 2, 3, &[1.0, -1.0, 1.0]),
            Err(CapacityError::InvalidPower)
        );
    }

    #[test]
    fn empty_selection_is_zero() {
        let h = ChannelMatrix::zeros(0, 2);
        assert_eq!(capacity(&h, 10.0, 1, 2, &[1.0, 1.0]).unwrap(), 0.0);
    }
}
