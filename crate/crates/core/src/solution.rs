use crate::error::{Error, Result};

/// Nodal vector potential on a uniform mesh together with the reaction
/// field on each element edge.
///
/// `b_x[n]` belongs to the interval between nodes `n` and `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution1D {
    dz: f64,
    a_y: Vec<f64>,
    b_x: Vec<f64>,
}

impl Solution1D {
    pub fn from_potential(a_y: Vec<f64>, dz: f64) -> Result<Self> {
        let b_x = reaction_field_forward_diff(&a_y, dz)?;
        Ok(Self { dz, a_y, b_x })
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn a_y(&self) -> &[f64] {
        &self.a_y
    }

    pub fn b_x(&self) -> &[f64] {
        &self.b_x
    }

    pub fn n_nodes(&self) -> usize {
        self.a_y.len()
    }
}

/// `b_x(n) = -(A_y(n+1) - A_y(n)) / dz`.
pub fn reaction_field_forward_diff(a_y: &[f64], dz: f64) -> Result<Vec<f64>> {
    if a_y.len() < 2 {
        return Err(Error::TooFewNodes {
            required: 2,
            found: a_y.len(),
        });
    }
    if !(dz.is_finite() && dz > 0.0) {
        return Err(Error::invalid("dz", format!("must be finite and > 0, got {dz}")));
    }
    Ok(a_y.windows(2).map(|w| -(w[1] - w[0]) / dz).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_has_no_field() {
        let b = reaction_field_forward_diff(&[2.0; 6], 0.1).unwrap();
        assert_eq!(b, vec![0.0; 5]);
    }

    #[test]
    fn linear_ramp_gives_constant_field() {
        let dz = 0.25;
        let b0 = 1.7;
        let a: Vec<f64> = (0..10).map(|n| -b0 * n as f64 * dz).collect();
        for v in reaction_field_forward_diff(&a, dz).unwrap() {
            assert!((v - b0).abs() < 1e-12);
        }
    }

    #[test]
    fn needs_two_nodes() {
        assert!(matches!(
            reaction_field_forward_diff(&[1.0], 0.1),
            Err(Error::TooFewNodes { .. })
        ));
    }

    #[test]
    fn edge_count_is_one_less() {
        let s = Solution1D::from_potential(vec![0.0, 1.0, 3.0], 0.5).unwrap();
        assert_eq!(s.b_x().len(), s.a_y().len() - 1);
        assert_eq!(s.b_x(), &[-2.0, -4.0]);
    }
}
