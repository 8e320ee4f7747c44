use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// `[tr H, tr H², …, tr H^k_max]` by repeated multiplication.
pub fn power_traces(h: &ComplexMatrix, k_max: u32) -> Result<Vec<C64>> {
    if k_max == 0 {
        return Err(Error::InvalidMatrix("k_max must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(k_max as usize);
    let mut power = h.clone();
    for k in 1..=k_max {
        if k > 1 {
            power = &power * h;
        }
        if !power.is_finite() {
            return Err(Error::Overflow(format!("H^{k} is not finite")));
        }
        out.push(power.trace());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{pauli, I};

    #[test]
    fn pauli_x_traces() {
        let t = power_traces(&pauli::sigma_x(), 2).unwrap();
        assert_eq!(t, vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0)]);
    }

    #[test]
    fn nilpotent_traces() {
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(power_traces(&h, 2).unwrap(), vec![C64::new(0.0, 0.0); 2]);
    }

    #[test]
    fn imaginary_diagonal() {
        // diag(i, -i): i^k + (-i)^k = 0, -2, 0
        let h = ComplexMatrix::from_diagonal(&[I, -I]);
        let t = power_traces(&h, 3).unwrap();
        let want = [C64::new(0.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.0, 0.0)];
        for (a, b) in t.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let h = ComplexMatrix::from_real_rows(&[&[1e200]]).unwrap();
        assert!(matches!(power_traces(&h, 3), Err(Error::Overflow(_))));
    }

    #[test]
    fn zero_k_rejected() {
        assert!(power_traces(&pauli::sigma_z(), 0).is_err());
    }
}
