//! Closed-form physics kernels, generic over the scalar type.
//!
//! Everything here is a pure function of its arguments so the same kernels
//! back constraint evaluation, Jacobian rows, and the exact-form feasibility
//! checker. The solver stack instantiates them at [`crate::Real`].

use num_traits::Float;

/// Hazen-Williams flow exponent (total), as used in `q |q|^0.852`.
pub const HW_EXPONENT: f64 = 1.852;

/// Smoothing half-width for the Hazen-Williams law inside solver
/// evaluations, in L/s. The exact non-smooth form is used for feasibility
/// checking.
pub const HW_DELTA: f64 = 1e-4;

/// Exact Hazen-Williams friction kernel `q |q|^0.852`; odd in `q`. Multiply
/// by `L * r` for the head loss of a pipe.
pub fn hazen_williams<T: Float>(q: T) -> T {
    let e = T::from(HW_EXPONENT - 1.0).unwrap();
    q * q.abs().powf(e)
}

/// Derivative of the exact kernel: `1.852 |q|^0.852` (continuous, zero at 0).
pub fn hazen_williams_deriv<T: Float>(q: T) -> T {
    let e = T::from(HW_EXPONENT - 1.0).unwrap();
    T::from(HW_EXPONENT).unwrap() * q.abs().powf(e)
}

/// Smoothed kernel `q (q^2 + delta^2)^0.426`, differentiable at 0.
pub fn hazen_williams_smooth<T: Float>(q: T, delta: T) -> T {
    let half = T::from((HW_EXPONENT - 1.0) / 2.0).unwrap();
    q * (q * q + delta * delta).powf(half)
}

/// Derivative of the smoothed kernel:
/// `(q^2 + delta^2)^(-0.574) (1.852 q^2 + delta^2)`.
pub fn hazen_williams_smooth_deriv<T: Float>(q: T, delta: T) -> T {
    let s = q * q + delta * delta;
    let e = T::from((HW_EXPONENT - 1.0) / 2.0 - 1.0).unwrap();
    s.powf(e) * (T::from(HW_EXPONENT).unwrap() * q * q + delta * delta)
}

/// Pump head gain `a q^2 + b q + c z` (concave in `q` for `a < 0`).
pub fn pump_head_gain<T: Float>(q: T, z: T, a: T, b: T, c: T) -> T {
    a * q * q + b * q + c * z
}

/// Pump electrical draw `alpha q + mu z`; zero when off since `z = 0`
/// forces `q = 0`.
pub fn pump_power<T: Float>(q: T, z: T, alpha: T, mu: T) -> T {
    alpha * q + mu * z
}

/// One storage energy step:
/// `E_next = E + dt (eta_c * p_charge - p_discharge / eta_d)`.
pub fn storage_energy_step<T: Float>(e: T, dt: T, eta_c: T, eta_d: T, p_charge: T, p_discharge: T) -> T {
    e + dt * (eta_c * p_charge - p_discharge / eta_d)
}

/// Tank volume from level: `V = area (h - elevation)`.
pub fn tank_volume<T: Float>(area: T, head: T, elevation: T) -> T {
    area * (head - elevation)
}

/// m^3 exchanged by a 1 L/s flow over one hour. Converts tank withdrawal
/// rates (L/s) into volume steps (m^3) over interval lengths in hours.
pub const LPS_HOUR_TO_M3: f64 = 3.6;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hw_zero_flow_no_loss() {
        assert_eq!(hazen_williams(0.0f64), 0.0);
        assert_eq!(hazen_williams_deriv(0.0f64), 0.0);
    }

    #[test]
    fn hw_reference_value() {
        // 100 m * 0.01 resistance * 0.5 L/s: loss = 0.5^1.852
        let loss = 100.0 * 0.01 * hazen_williams(0.5f64);
        assert_relative_eq!(loss, 0.277008086966231496, max_relative = 1e-15);
        // inverse: the head difference recovers the flow
        assert_relative_eq!(loss.powf(1.0 / HW_EXPONENT), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn hw_smooth_close_to_exact_away_from_zero() {
        let q = 0.5f64;
        assert_relative_eq!(
            hazen_williams_smooth(q, HW_DELTA),
            0.277008091686449243,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            hazen_williams_smooth_deriv(q, HW_DELTA),
            1.026037952725737223,
            max_relative = 1e-15
        );
        assert_relative_eq!(hazen_williams_deriv(q), 1.026037954122921460, max_relative = 1e-15);
    }

    #[test]
    fn storage_step_reference() {
        // E=1, dt=1, eta_c=0.9, charge 1, discharge 0 -> 1.9
        assert_eq!(storage_energy_step(1.0f64, 1.0, 0.9, 0.9, 1.0, 0.0), 1.9);
    }

    #[test]
    fn pump_kernels_reference() {
        assert_eq!(pump_head_gain(2.0f64, 1.0, -1.0, 0.0, 10.0), 6.0);
        assert_eq!(pump_power(3.0f64, 1.0, 2.0, 5.0), 11.0);
        assert_eq!(pump_power(0.0f64, 0.0, 2.0, 5.0), 0.0);
    }

    #[test]
    fn tank_volume_reference() {
        assert_eq!(tank_volume(2.0f64, 5.0, 2.0), 6.0);
    }

    #[test]
    fn kernels_generic_over_f32() {
        let v: f32 = hazen_williams(0.5f32);
        assert!((v - 0.277008).abs() < 1e-5);
    }
}
