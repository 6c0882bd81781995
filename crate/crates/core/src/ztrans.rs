//! Z-domain view of the linear-element stencil.
//!
//! Dividing `(-1 - Pe) y(n-1) + 2 y(n) + (-1 + Pe) y(n+1)` by `-1 + Pe`
//! gives the characteristic polynomial `(Z - 1)(Z - r)` with
//! `r = (-1 - Pe)/(-1 + Pe)`. For `Pe > 1` the root `r` is negative and
//! drives node-to-node alternation; as `Pe` grows it tends to `-1`, where
//! the potential-input numerator `(Z - 1)(Z + 1)` cancels it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem1d::InputMode;

/// `gain * prod(Z - zero) / prod(Z - pole)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF {
    pub gain: f64,
    pub zeros: Vec<Complex64>,
    pub poles: Vec<Complex64>,
}

impl RationalTF {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|q| z - q).product();
        let den: Complex64 = self.poles.iter().map(|p| z - p).product();
        self.gain * num / den
    }
}

/// The non-unit pole `(-1 - Pe)/(-1 + Pe)`.
pub fn homogeneous_root(pe: f64) -> Result<f64> {
    if !(pe.is_finite() && pe > 0.0) {
        return Err(Error::invalid("pe", format!("must be finite and > 0, got {pe}")));
    }
    if pe == 1.0 {
        return Err(Error::SingularPeclet);
    }
    Ok((-1.0 - pe) / (-1.0 + pe))
}

pub fn transfer_function(pe: f64, dz: f64, mode: InputMode) -> Result<RationalTF> {
    let r = homogeneous_root(pe)?;
    if !(dz.is_finite() && dz > 0.0) {
        return Err(Error::invalid("dz", format!("must be finite and > 0, got {dz}")));
    }
    let c = |x: f64| Complex64::new(x, 0.0);
    let poles = vec![c(1.0), c(r)];
    Ok(match mode {
        InputMode::FluxDensity => RationalTF {
            gain: 2.0 * pe * dz / (-1.0 + pe),
            zeros: vec![c(0.0)],
            poles,
        },
        InputMode::VectorPotential => RationalTF {
            gain: -pe / (-1.0 + pe),
            zeros: vec![c(1.0), c(-1.0)],
            poles,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// `Pe < 1`: the non-unit pole is positive, no alternating mode.
    Stable,
    /// `Pe > 1` and the alternating pole is left uncancelled.
    Oscillatory,
    /// `Pe > 1` with a zero close enough to the alternating pole.
    Cancelled,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Oscillatory => "oscillatory",
            Classification::Cancelled => "cancelled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// The non-unit pole when it is negative.
    pub oscillatory_pole: Option<Complex64>,
    /// Distance from the non-unit pole to the nearest zero.
    pub cancellation_residual: f64,
    pub classification: Classification,
}

/// Residual below which a pole counts as cancelled.
pub const DEFAULT_CANCELLATION_TOLERANCE: f64 = 0.05;

pub fn stability_report(tf: &RationalTF, pe: f64) -> Result<StabilityReport> {
    stability_report_with_tolerance(tf, pe, DEFAULT_CANCELLATION_TOLERANCE)
}

pub fn stability_report_with_tolerance(
    tf: &RationalTF,
    pe: f64,
    tolerance: f64,
) -> Result<StabilityReport> {
    let r = homogeneous_root(pe)?;
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::invalid("tolerance", "must be finite and >= 0"));
    }
    let p2 = Complex64::new(r, 0.0);
    let cancellation_residual = tf
        .zeros
        .iter()
        .map(|q| (p2 - q).norm())
        .fold(f64::INFINITY, f64::min);
    let classification = if pe < 1.0 {
        Classification::Stable
    } else if cancellation_residual < tolerance {
        Classification::Cancelled
    } else {
        Classification::Oscillatory
    };
    Ok(StabilityReport {
        oscillatory_pole: (r < 0.0).then_some(p2),
        cancellation_residual,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn flux_density_at_three() {
        let tf = transfer_function(3.0, 0.25, InputMode::FluxDensity).unwrap();
        assert_eq!(tf.poles, vec![c(1.0), c(-2.0)]);
        assert_eq!(tf.zeros, vec![c(0.0)]);
        assert!((tf.gain - 3.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn potential_zeros_are_plus_minus_one() {
        for pe in [0.2, 3.0, 77.0] {
            let tf = transfer_function(pe, 0.1, InputMode::VectorPotential).unwrap();
            assert_eq!(tf.zeros, vec![c(1.0), c(-1.0)]);
        }
    }

    #[test]
    fn poles_shared_between_modes() {
        for pe in [0.5, 2.0, 500.0] {
            let a = transfer_function(pe, 0.2, InputMode::FluxDensity).unwrap();
            let b = transfer_function(pe, 0.2, InputMode::VectorPotential).unwrap();
            assert_eq!(a.poles, b.poles);
        }
    }

    #[test]
    fn second_pole_tends_to_minus_one() {
        let mut last = f64::INFINITY;
        for pe in [10.0, 100.0, 1e3, 1e4, 1e6] {
            let d = (homogeneous_root(pe).unwrap() + 1.0).abs();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn poles_are_roots_of_the_stencil() {
        // (-1 + Pe) Z^2 + 2 Z + (-1 - Pe) = 0
        for pe in [0.3, 3.0, 40.0] {
            let tf = transfer_function(pe, 0.1, InputMode::FluxDensity).unwrap();
            for p in &tf.poles {
                let v = (-1.0 + pe) * p * p + 2.0 * p + (-1.0 - pe);
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn classification_examples() {
        let tf = transfer_function(3000.0, 0.25, InputMode::VectorPotential).unwrap();
        let rep = stability_report(&tf, 3000.0).unwrap();
        assert!((rep.cancellation_residual - 2.0 / 2999.0).abs() < 1e-15);
        assert_eq!(rep.classification, Classification::Cancelled);

        let tf = transfer_function(3000.0, 0.25, InputMode::FluxDensity).unwrap();
        let rep = stability_report(&tf, 3000.0).unwrap();
        assert_eq!(rep.classification, Classification::Oscillatory);
        assert!((rep.oscillatory_pole.unwrap().re + 1.000_667).abs() < 1e-6);

        let tf = transfer_function(0.5, 0.25, InputMode::VectorPotential).unwrap();
        let rep = stability_report(&tf, 0.5).unwrap();
        assert_eq!(rep.classification, Classification::Stable);
        assert_eq!(rep.oscillatory_pole, None);
    }

    #[test]
    fn unit_peclet_is_singular() {
        assert_eq!(
            transfer_function(1.0, 0.1, InputMode::FluxDensity),
            Err(Error::SingularPeclet)
        );
    }

    #[test]
    fn residual_is_two_over_pe_minus_one_and_decreasing() {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let pe = 1.1 * 1.05f64.powi(i);
            let tf = transfer_function(pe, 0.1, InputMode::VectorPotential).unwrap();
            let res = stability_report(&tf, pe).unwrap().cancellation_residual;
            assert!((res - 2.0 / (pe - 1.0)).abs() <= 1e-12 * res);
            assert!(res < last);
            last = res;
        }
    }

    #[test]
    fn gain_weighted_residue_matches_asy_amplitude() {
        // the exit oscillation equals (residue / gain) / (2 r^2) per unit B
        for pe in [1.5, 3.0, 30.0, 3000.0] {
            let tf = transfer_function(pe, 0.1, InputMode::VectorPotential).unwrap();
            let r = tf.poles[1];
            let residue = tf.gain * (r - tf.zeros[0]) * (r - tf.zeros[1]) / (r - tf.poles[0]);
            let mapped = (residue / tf.gain).norm() / (2.0 * r.norm_sqr());
            let amp = crate::analytic::oscillation_amplitude_asy(pe, 1.0).abs();
            assert!((mapped - amp).abs() < 1e-12 * amp, "pe {pe}: {mapped} vs {amp}");
        }
    }

    #[test]
    fn eval_matches_factored_form() {
        let tf = transfer_function(4.0, 0.2, InputMode::FluxDensity).unwrap();
        let z = Complex64::new(0.3, 0.4);
        let want = tf.gain * z / ((z - 1.0) * (z - tf.poles[1]));
        assert!((tf.eval(z) - want).norm() < 1e-14);
    }
}
