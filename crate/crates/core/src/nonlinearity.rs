//! The nonlinearity `phi`, its derivative and inverse, data bounds and the
//! CFL constant of the explicit boundary update.
//!
//! The power law is the signed power `phi(u) = |u|^(m-1) u` with
//! `m >= 1`, so signed initial data is handled throughout.  The logarithmic
//! diffusion `phi(u) = log(1 + u)` is the natural `m -> 0` limit.  Custom
//! triples (forward, derivative, inverse) are accepted after a consistency
//! screen over the declared data range.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied nonlinearity: forward map, derivative and inverse, valid on
/// a declared data range.  All three must be pure and reentrant.
#[derive(Clone)]
pub struct CustomPhi {
    forward: Evaluator,
    derivative: Evaluator,
    inverse: Evaluator,
    range: (f64, f64),
}

/// The nonlinearity of the diffusion equation.
#[derive(Clone)]
pub enum PhiSpec {
    /// Signed power `|u|^(m-1) u`, `m >= 1`.
    PowerLaw { m: f64 },
    /// `log(1 + u)`, defined for `u > -1`.
    Logarithmic,
    Custom(CustomPhi),
}

impl fmt::Debug for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::PowerLaw { m } => write!(f, "PowerLaw {{ m: {m} }}"),
            PhiSpec::Logarithmic => write!(f, "Logarithmic"),
            PhiSpec::Custom(c) => write!(f, "Custom {{ range: {:?} }}", c.range),
        }
    }
}

impl PartialEq for PhiSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PhiSpec::PowerLaw { m: a }, PhiSpec::PowerLaw { m: b }) => a == b,
            (PhiSpec::Logarithmic, PhiSpec::Logarithmic) => true,
            (PhiSpec::Custom(a), PhiSpec::Custom(b)) => {
                Arc::ptr_eq(&a.forward, &b.forward)
                    && Arc::ptr_eq(&a.derivative, &b.derivative)
                    && Arc::ptr_eq(&a.inverse, &b.inverse)
            }
            _ => false,
        }
    }
}

/// Number of probe points used to screen a custom triple at construction.
const CUSTOM_PROBES: usize = 64;

impl PhiSpec {
    /// Signed power law with exponent `m >= 1`.
    pub fn power_law(m: f64) -> Result<Self> {
        if !(m >= 1.0) || !m.is_finite() {
            return Err(Error::Validation(format!("m must be >= 1, got {m}")));
        }
        Ok(PhiSpec::PowerLaw { m })
    }

    pub fn logarithmic() -> Self {
        PhiSpec::Logarithmic
    }

    /// Custom nonlinearity.  The triple is probed on `CUSTOM_PROBES` points
    /// of `[range.0, range.1]`: the inverse must undo the forward map to
    /// 1e-12 relative, a central difference of the forward map must match
    /// the derivative, and the derivative must be nonnegative.
    pub fn custom(
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        range: (f64, f64),
    ) -> Result<Self> {
        if !(range.0 < range.1) || !range.0.is_finite() || !range.1.is_finite() {
            return Err(Error::Validation(format!(
                "custom phi range must be a finite nonempty interval, got {range:?}"
            )));
        }
        let candidate = CustomPhi {
            forward: Arc::new(forward),
            derivative: Arc::new(derivative),
            inverse: Arc::new(inverse),
            range,
        };
        let (lo, hi) = range;
        let span = hi - lo;
        let fd_step = 1e-6 * span.max(1.0);
        for p in 0..CUSTOM_PROBES {
            // keep the finite-difference stencil inside the declared range
            let t = (p as f64 + 0.5) / CUSTOM_PROBES as f64;
            let u = lo + t * span;
            let w = (candidate.forward)(u);
            let back = (candidate.inverse)(w);
            if !w.is_finite() || !back.is_finite() {
                return Err(Error::InconsistentPhi(format!(
                    "non-finite evaluation at u = {u}"
                )));
            }
            if (back - u).abs() > 1e-12 * u.abs().max(1.0) {
                return Err(Error::InconsistentPhi(format!(
                    "inverse(forward({u})) = {back}, off by {:.3e}",
                    (back - u).abs()
                )));
            }
            let d = (candidate.derivative)(u);
            if d < 0.0 || !d.is_finite() {
                return Err(Error::InconsistentPhi(format!(
                    "derivative at u = {u} is {d}; phi must be nondecreasing"
                )));
            }
            if u - fd_step >= lo && u + fd_step <= hi {
                let central =
                    ((candidate.forward)(u + fd_step) - (candidate.forward)(u - fd_step)) / (2.0 * fd_step);
                if (central - d).abs() > 1e-4 * d.abs().max(1.0) {
                    return Err(Error::InconsistentPhi(format!(
                        "derivative at u = {u} is {d} but a central difference gives {central}"
                    )));
                }
            }
        }
        Ok(PhiSpec::Custom(candidate))
    }

    /// `phi(u)`.
    pub fn apply(&self, u: f64) -> Result<f64> {
        match self {
            PhiSpec::PowerLaw { m } => {
                if *m == 1.0 {
                    Ok(u)
                } else {
                    Ok(u.abs().powf(*m).copysign(u))
                }
            }
            PhiSpec::Logarithmic => {
                if u <= -1.0 {
                    Err(Error::Domain(format!("log(1 + u) undefined at u = {u}")))
                } else {
                    Ok(u.ln_1p())
                }
            }
            PhiSpec::Custom(c) => Ok((c.forward)(u)),
        }
    }

    /// `phi^{-1}(w)`.
    pub fn inverse(&self, w: f64) -> Result<f64> {
        match self {
            PhiSpec::PowerLaw { m } => {
                if *m == 1.0 {
                    Ok(w)
                } else {
                    Ok(w.abs().powf(1.0 / *m).copysign(w))
                }
            }
            PhiSpec::Logarithmic => Ok(w.exp_m1()),
            PhiSpec::Custom(c) => {
                let u = (c.inverse)(w);
                if !u.is_finite() {
                    return Err(Error::Domain(format!(
                        "custom inverse undefined at w = {w}"
                    )));
                }
                Ok(u)
            }
        }
    }

    /// `phi'(u)`.  For the power law the value at `u = 0` is the limit:
    /// `0` for `m > 1` and `1` for `m = 1`.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        match self {
            PhiSpec::PowerLaw { m } => Ok(*m * u.abs().powf(*m - 1.0)),
            PhiSpec::Logarithmic => {
                if u <= -1.0 {
                    Err(Error::Domain(format!("1/(1 + u) undefined at u = {u}")))
                } else {
                    Ok(1.0 / (1.0 + u))
                }
            }
            PhiSpec::Custom(c) => Ok((c.derivative)(u)),
        }
    }

    /// Supremum of `phi'` over `[lo, hi]`.  Closed form for the built-in
    /// kinds; a dense probe for custom triples.
    pub fn sup_derivative(&self, lo: f64, hi: f64) -> Result<f64> {
        debug_assert!(lo <= hi);
        match self {
            PhiSpec::PowerLaw { m } => {
                // |u|^{m-1} is maximal at the endpoint of largest magnitude.
                let peak = lo.abs().max(hi.abs());
                Ok(*m * peak.powf(*m - 1.0))
            }
            PhiSpec::Logarithmic => self.derivative(lo),
            PhiSpec::Custom(_) => {
                let probes = 1025;
                let mut sup = 0.0_f64;
                for p in 0..probes {
                    let u = lo + (hi - lo) * p as f64 / (probes - 1) as f64;
                    sup = sup.max(self.derivative(u)?);
                }
                Ok(sup)
            }
        }
    }
}

/// Extremes of the initial data and of its image under `phi`, with zero
/// always included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataBounds {
    pub u_min: f64,
    pub u_max: f64,
    pub b_min: f64,
    pub b_max: f64,
}

/// Scans initial-data samples: `u_min/u_max` bound the data, `b_min/b_max`
/// bound `phi(data)`.  Zero is included on both sides so the homogeneous
/// boundary value always lies inside the bounds.
pub fn data_bounds(f_samples: &[f64], phi: &PhiSpec) -> Result<DataBounds> {
    let mut bounds = DataBounds {
        u_min: 0.0,
        u_max: 0.0,
        b_min: 0.0,
        b_max: 0.0,
    };
    for &u in f_samples {
        if !u.is_finite() {
            return Err(Error::Domain(format!("non-finite initial sample {u}")));
        }
        let w = phi.apply(u)?;
        bounds.u_min = bounds.u_min.min(u);
        bounds.u_max = bounds.u_max.max(u);
        bounds.b_min = bounds.b_min.min(w);
        bounds.b_max = bounds.b_max.max(w);
    }
    Ok(bounds)
}

/// CFL constant `C` such that the scheme satisfies the discrete maximum
/// principle whenever `dt <= C * dx`.
///
/// `C = 1 / sup { phi'(xi) : xi in [u_min, u_max] }`, additionally capped by
/// `[m * b_max^(m-1)]^{-1}` for the power law; the minimum of the two
/// candidates is safe in both the small-data and large-data regimes.
/// Degenerate data (`sup phi' = 0`) imposes no restriction and yields
/// `f64::INFINITY`.
pub fn cfl_constant(phi: &PhiSpec, bounds: &DataBounds) -> Result<f64> {
    let sup = phi.sup_derivative(bounds.u_min, bounds.u_max)?;
    let mut c = 1.0 / sup; // sup == 0 gives the +inf sentinel
    if let PhiSpec::PowerLaw { m } = phi {
        let literal = 1.0 / (m * bounds.b_max.powf(m - 1.0));
        c = c.min(literal);
    }
    Ok(c)
}

/// `dt <= C * dx`, boundary case included.  The infinite sentinel accepts
/// any step.
pub fn validate_timestep(dt: f64, dx: f64, c: f64) -> bool {
    dt <= c * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn power_law_is_signed() {
        let phi = PhiSpec::power_law(2.0).unwrap();
        assert_eq!(phi.apply(3.0).unwrap(), 9.0);
        assert_eq!(phi.apply(-3.0).unwrap(), -9.0);
        let phi3 = PhiSpec::power_law(3.0).unwrap();
        assert_eq!(phi3.inverse(-8.0).unwrap(), -2.0);
        assert_eq!(phi3.apply(0.0).unwrap(), 0.0);
    }

    #[test]
    fn logarithmic_values() {
        let phi = PhiSpec::logarithmic();
        assert_eq!(phi.apply(0.0).unwrap(), 0.0);
        assert_relative_eq!(phi.inverse(2.0_f64.ln()).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(phi.derivative(0.0).unwrap(), 1.0);
        assert!(matches!(phi.apply(-1.0), Err(Error::Domain(_))));
        assert!(matches!(phi.derivative(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_values_and_limits() {
        let phi1 = PhiSpec::power_law(1.0).unwrap();
        for u in [-2.0, 0.0, 0.7] {
            assert_eq!(phi1.derivative(u).unwrap(), 1.0);
        }
        let phi2 = PhiSpec::power_law(2.0).unwrap();
        assert_eq!(phi2.derivative(0.5).unwrap(), 1.0);
        assert_eq!(phi2.derivative(0.0).unwrap(), 0.0);
        // limit value for 1 < m < 2
        let phi15 = PhiSpec::power_law(1.5).unwrap();
        assert_eq!(phi15.derivative(0.0).unwrap(), 0.0);
    }

    #[test]
    fn m_below_one_rejected() {
        assert!(matches!(PhiSpec::power_law(0.5), Err(Error::Validation(_))));
    }

    #[test]
    fn round_trip_randomized() {
        // 1e4 draws per kind, |inv(phi(u)) - u| <= 1e-12 * max(1, |u|).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let kinds: Vec<PhiSpec> = [1.0, 1.5, 2.0, 3.0, 10.0]
            .iter()
            .map(|&m| PhiSpec::power_law(m).unwrap())
            .chain([PhiSpec::logarithmic()])
            .collect();
        for phi in &kinds {
            for _ in 0..10_000 {
                let mut u: f64 = rng.gen_range(-10.0..10.0);
                if matches!(phi, PhiSpec::Logarithmic) {
                    u = u.max(-0.999);
                }
                let back = phi.inverse(phi.apply(u).unwrap()).unwrap();
                assert!(
                    (back - u).abs() <= 1e-12 * u.abs().max(1.0),
                    "round trip failed for {phi:?} at u = {u}: {back}"
                );
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference_at_second_order() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let phi = PhiSpec::power_law(3.0).unwrap();
        let mut ratio_sum = 0.0;
        let mut count = 0;
        for _ in 0..100 {
            let u: f64 = rng.gen_range(0.5..5.0);
            let d = phi.derivative(u).unwrap();
            let central = |h: f64| {
                (phi.apply(u + h).unwrap() - phi.apply(u - h).unwrap()) / (2.0 * h)
            };
            let h = 1e-3;
            let e1 = (central(h) - d).abs();
            let e2 = (central(h / 2.0) - d).abs();
            if e2 > 1e-13 {
                ratio_sum += e1 / e2;
                count += 1;
            }
        }
        let mean_ratio = ratio_sum / count as f64;
        assert!(
            (mean_ratio - 4.0).abs() < 0.5,
            "error ratio under h -> h/2 should be ~4, got {mean_ratio}"
        );
    }

    #[test]
    fn bounds_examples() {
        let phi = PhiSpec::power_law(2.0).unwrap();
        let b = data_bounds(&[0.0, 0.0], &phi).unwrap();
        assert_eq!(b, DataBounds { u_min: 0.0, u_max: 0.0, b_min: 0.0, b_max: 0.0 });

        let b = data_bounds(&[0.0, 0.3, 1.0], &phi).unwrap();
        assert_eq!(b.b_max, 1.0);
        assert_eq!(b.b_min, 0.0);

        let phi3 = PhiSpec::power_law(3.0).unwrap();
        let b = data_bounds(&[-0.5, 0.8], &phi3).unwrap();
        assert_eq!(b.u_min, -0.5);
        assert_eq!(b.u_max, 0.8);
        assert_relative_eq!(b.b_min, -0.125, max_relative = 1e-15);
        assert_relative_eq!(b.b_max, 0.512, max_relative = 1e-15);
    }

    #[test]
    fn cfl_exact_values() {
        let phi1 = PhiSpec::power_law(1.0).unwrap();
        let b = data_bounds(&[0.0, 0.4, 2.5], &phi1).unwrap();
        assert_eq!(cfl_constant(&phi1, &b).unwrap(), 1.0);

        let phi2 = PhiSpec::power_law(2.0).unwrap();
        let b = data_bounds(&[0.0, 1.0], &phi2).unwrap();
        assert_eq!(cfl_constant(&phi2, &b).unwrap(), 0.5);
    }

    #[test]
    fn cfl_degenerate_data_is_unrestricted() {
        let phi = PhiSpec::power_law(2.0).unwrap();
        let b = data_bounds(&[0.0; 8], &phi).unwrap();
        let c = cfl_constant(&phi, &b).unwrap();
        assert!(c.is_infinite());
        assert!(validate_timestep(1e9, 1.0, c));
    }

    #[test]
    fn timestep_validation() {
        assert!(validate_timestep(0.5, 1.0, 0.5));
        assert!(!validate_timestep(0.6, 1.0, 0.5));
        assert!(validate_timestep(1.0, 1.0, 1.0));
    }

    #[test]
    fn custom_triple_screening() {
        // consistent triple: phi(u) = u^3 on [0.1, 2]
        let ok = PhiSpec::custom(
            |u| u * u * u,
            |u| 3.0 * u * u,
            |w| w.cbrt(),
            (0.1, 2.0),
        );
        assert!(ok.is_ok());
        let phi = ok.unwrap();
        assert_relative_eq!(phi.apply(1.1).unwrap(), 1.331, max_relative = 1e-14);

        // wrong derivative
        let bad = PhiSpec::custom(|u| u * u * u, |u| 2.0 * u, |w| w.cbrt(), (0.1, 2.0));
        assert!(matches!(bad, Err(Error::InconsistentPhi(_))));

        // wrong inverse
        let bad = PhiSpec::custom(|u| u * u * u, |u| 3.0 * u * u, |w| w.sqrt(), (0.1, 2.0));
        assert!(matches!(bad, Err(Error::InconsistentPhi(_))));
    }

    proptest! {
        // Enlarging the data range never increases the CFL constant.
        #[test]
        fn cfl_monotone_under_range_growth(
            m in 1.0..6.0_f64,
            peak in 0.01..4.0_f64,
            extra in 0.0..2.0_f64,
        ) {
            let phi = PhiSpec::power_law(m).unwrap();
            let small = data_bounds(&[0.0, peak], &phi).unwrap();
            let large = data_bounds(&[0.0, peak + extra], &phi).unwrap();
            let c_small = cfl_constant(&phi, &small).unwrap();
            let c_large = cfl_constant(&phi, &large).unwrap();
            prop_assert!(c_large <= c_small * (1.0 + 1e-12));
        }

        // phi is nondecreasing wherever its derivative exists.
        #[test]
        fn power_law_monotone(m in 1.0..8.0_f64, a in -5.0..5.0_f64, b in -5.0..5.0_f64) {
            let phi = PhiSpec::power_law(m).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(phi.apply(lo).unwrap() <= phi.apply(hi).unwrap() + 1e-15);
        }
    }
}
