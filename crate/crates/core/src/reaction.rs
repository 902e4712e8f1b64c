//! Explicit reaction substep `W(U~) = W(U) + G(U) h`.

use crate::error::{Error, Result};
use crate::gas::{GasModel, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionOutcome {
    pub state: State,
    /// `q0 rho phi(T) Z h`.
    pub heat_released: f64,
    /// `1 - phi(T) h / u`.
    pub z_factor: f64,
}

/// Advances `s` through one reaction step of length `h`, with the rate frozen
/// at the incoming temperature.
pub fn react(gas: &GasModel, s: &State, h: f64) -> Result<ReactionOutcome> {
    gas.check_supersonic(s)?;
    if !(h >= 0.0) {
        return Err(Error::Range(format!("reaction step must be >= 0, got {h}")));
    }
    let t = gas.temperature(s.p, s.rho)?;
    let phi = gas.rate(t)?;
    let z_factor = 1.0 - phi * h / s.u;
    if !(z_factor > 0.0) {
        return Err(Error::StepTooLarge(format!("phi h / u = {} >= 1", phi * h / s.u)));
    }
    if h == 0.0 || s.z == 0.0 {
        return Ok(ReactionOutcome { state: *s, heat_released: 0.0, z_factor });
    }
    let g = gas.gamma;
    let m = s.rho * s.u;
    let mom = m * s.u + s.p;
    let heat = gas.q0 * phi * s.z * h / s.u;
    let enth = g * s.p / ((g - 1.0) * s.rho) + 0.5 * s.u * s.u + heat;
    let a = -(g + 1.0) / (2.0 * (g - 1.0));
    let b = g * mom / ((g - 1.0) * m);
    let c = -enth;
    let disc = b * b - 4.0 * a * c;
    if !(disc >= 0.0) {
        return Err(Error::StepTooLarge(format!("heat release {heat:e} chokes the flow (discriminant {disc:e})")));
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let r1 = q / a;
    let r2 = c / q;
    let u = if (r1 - s.u).abs() <= (r2 - s.u).abs() { r1 } else { r2 };
    let z = z_factor * s.z;
    let out = State::new(u, s.v, mom - m * u, m / u, z);
    if !(out.p > 0.0 && out.rho > 0.0) {
        return Err(Error::StepTooLarge(format!("non-physical post-reaction state {out:?}")));
    }
    gas.check_supersonic(&out)?;
    Ok(ReactionOutcome { state: out, heat_released: gas.q0 * s.rho * phi * s.z * h, z_factor })
}
