//! Elementary wave curves, their composition and self-similar wave fans.
//!
//! Strengths of the genuinely nonlinear families are measured as the change of
//! the characteristic slope across the wave, `alpha = lambda_i(U) - lambda_i(U_a)`,
//! on both the rarefaction (`alpha > 0`) and shock (`alpha < 0`) branches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{Family, GasModel, State};
use crate::numerics::brent;

/// RK4 steps along a rarefaction curve of strength `RK_REF_ALPHA` or more.
pub const RK_STEPS: usize = 64;
/// Shorter curves keep the step `RK_REF_ALPHA / RK_STEPS`, with at least
/// `RK_MIN_STEPS` steps.
pub const RK_REF_ALPHA: f64 = 0.05;
pub const RK_MIN_STEPS: usize = 4;
/// Accepted Richardson error estimate for a rarefaction curve.
pub const RAREFACTION_TOL: f64 = 1e-10;
/// Below this strength the RK4 truncation error is far under roundoff and the
/// Richardson comparison is skipped.
const RICHARDSON_MIN_ALPHA: f64 = 1e-3;
/// Relative bracket width at which the shock density solve stops.
pub const SHOCK_RHO_TOL: f64 = 1e-14;
pub const SHOCK_MAX_ITER: usize = 100;
/// Tolerance on `lambda(state) - xi` when sampling inside a rarefaction fan.
pub const FAN_SAMPLE_TOL: f64 = 1e-10;

/// Scales `(u, v)` by `exp(sigma)`.
pub fn contact_2(gas: &GasModel, sigma: f64, ua: &State) -> Result<State> {
    let f = sigma.exp();
    let s = State { u: ua.u * f, v: ua.v * f, ..*ua };
    gas.check_supersonic(&s)?;
    Ok(s)
}

/// Scales `rho` by `exp(sigma)`.
pub fn contact_3(gas: &GasModel, sigma: f64, ua: &State) -> Result<State> {
    let s = State { rho: ua.rho * sigma.exp(), ..*ua };
    gas.check_supersonic(&s)?;
    Ok(s)
}

/// Shifts `z` by `alpha`.
pub fn contact_4(alpha: f64, ua: &State) -> Result<State> {
    let z = ua.z + alpha;
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Range(format!("reactant fraction {z} outside [0, 1]")));
    }
    Ok(State { z, ..*ua })
}

fn rfield(gas: &GasModel, fam: Family, s: &State) -> Result<[f64; 5]> {
    if !(s.p > 0.0 && s.rho > 0.0) {
        return Err(Error::Integration(format!("non-physical state {s:?}")));
    }
    let c2 = gas.gamma * s.p / s.rho;
    if !(s.u > 0.0 && s.u * s.u - c2 >= 2.0 * crate::gas::SONIC_TOL * c2) {
        return Err(Error::Sonic { u: s.u, c: c2.sqrt() });
    }
    let (r, _) = gas.normalized_r(fam, s);
    if r.iter().all(|x| x.is_finite()) {
        Ok(r)
    } else {
        Err(Error::Integration("eigenvector is not finite".into()))
    }
}

fn rk4(gas: &GasModel, fam: Family, alpha: f64, ua: &State, n: usize) -> Result<State> {
    let h = alpha / n as f64;
    let mut s = *ua;
    for _ in 0..n {
        let k1 = rfield(gas, fam, &s)?;
        let k2 = rfield(gas, fam, &s.offset(0.5 * h, &k1))?;
        let k3 = rfield(gas, fam, &s.offset(0.5 * h, &k2))?;
        let k4 = rfield(gas, fam, &s.offset(h, &k3))?;
        let mut d = [0.0; 5];
        for i in 0..5 {
            d[i] = (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) / 6.0;
        }
        s = s.offset(h, &d);
    }
    Ok(s)
}

fn rk_steps(alpha: f64) -> usize {
    let n = (alpha / RK_REF_ALPHA * RK_STEPS as f64).ceil() as usize;
    n.clamp(RK_MIN_STEPS, RK_STEPS).next_multiple_of(2)
}

/// Point on the `i`-rarefaction curve through `ua` at parameter `alpha >= 0`.
pub fn rarefaction(gas: &GasModel, fam: Family, alpha: f64, ua: &State) -> Result<State> {
    if alpha < 0.0 {
        return Err(Error::Range(format!("rarefaction strength must be >= 0, got {alpha}")));
    }
    gas.check_supersonic(ua)?;
    if alpha == 0.0 {
        return Ok(*ua);
    }
    let mut n = rk_steps(alpha);
    let mut fine = rk4(gas, fam, alpha, ua, n)?;
    if alpha >= RICHARDSON_MIN_ALPHA {
        let mut coarse = rk4(gas, fam, alpha, ua, n / 2)?;
        loop {
            let scale = fine.to_array().iter().fold(1.0f64, |m, x| m.max(x.abs()));
            if fine.dist(&coarse) / 15.0 <= RAREFACTION_TOL * scale {
                break;
            }
            if n >= 4096 {
                return Err(Error::Integration(format!(
                    "Richardson estimate {:e} above tolerance at alpha = {alpha}",
                    fine.dist(&coarse) / 15.0
                )));
            }
            n *= 2;
            coarse = fine;
            fine = rk4(gas, fam, alpha, ua, n)?;
        }
    }
    gas.check_supersonic(&fine)?;
    Ok(fine)
}

/// States at the midpoints of `pieces` equal subintervals of a rarefaction of
/// strength `alpha`, integrated in a single pass.
pub fn rarefaction_midpoints(gas: &GasModel, fam: Family, alpha: f64, ua: &State, pieces: usize) -> Result<Vec<State>> {
    if alpha < 0.0 || pieces == 0 {
        return Err(Error::Range(format!("bad rarefaction subdivision ({alpha}, {pieces})")));
    }
    let steps = (rk_steps(alpha) / (2 * pieces)).max(1);
    let half = 0.5 * alpha / pieces as f64;
    let mut out = Vec::with_capacity(pieces);
    let mut s = *ua;
    for i in 0..pieces {
        s = rk4(gas, fam, half, &s, steps)?;
        out.push(s);
        if i + 1 < pieces {
            s = rk4(gas, fam, half, &s, steps)?;
        }
    }
    Ok(out)
}

/// Result of a shock evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shock {
    pub state: State,
    /// Slope `dy/dx` of the discontinuity.
    pub speed: f64,
}

/// Admissible density interval of the Hugoniot branch through `ua`.
pub fn shock_density_limits(gas: &GasModel, fam: Family, ua: &State) -> (f64, f64) {
    let g = gas.gamma;
    match fam {
        Family::One => (ua.rho, ua.rho * (g + 1.0) / (g - 1.0)),
        Family::Five => (ua.rho * (g - 1.0) / (g + 1.0), ua.rho),
    }
}

/// State on the `i`-Hugoniot branch through `ua` with density `rho`, and the
/// discontinuity slope.
pub fn shock_branch(gas: &GasModel, fam: Family, rho: f64, ua: &State) -> Result<Shock> {
    let g = gas.gamma;
    let ghat = 0.5 * (g + 1.0) - 0.5 * (g - 1.0) * rho / ua.rho;
    if !(ghat > 0.0 && rho > 0.0) {
        return Err(Error::Range(format!("density {rho} outside the Hugoniot branch")));
    }
    let ca2 = g * ua.p / ua.rho;
    let dp = ca2 * (rho - ua.rho) / ghat;
    let chat2 = rho * ca2 / (ghat * ua.rho);
    let q = ua.u * ua.u + ua.v * ua.v - chat2;
    let den = ua.u * ua.u - chat2;
    if !(q > 0.0 && den > 0.0) {
        return Err(Error::Sonic { u: ua.u, c: chat2.sqrt() });
    }
    let sg = match fam {
        Family::One => -1.0,
        Family::Five => 1.0,
    };
    let speed = (ua.u * ua.v + sg * (chat2 * q).sqrt()) / den;
    let dv = dp / (ua.rho * (speed * ua.u - ua.v));
    let du = -speed * dv;
    let state = State::new(ua.u + du, ua.v + dv, ua.p + dp, rho, ua.z);
    if !(state.p > 0.0) {
        return Err(Error::Range(format!("shock pressure {} not positive", state.p)));
    }
    Ok(Shock { state, speed })
}

/// Residuals of the four jump relations (pressure/density, tangential
/// velocity, normal momentum, reactant) for a computed shock.
pub fn jump_residuals(gas: &GasModel, ua: &State, sh: &Shock) -> [f64; 4] {
    let g = gas.gamma;
    let s = sh.state;
    let ghat = 0.5 * (g + 1.0) - 0.5 * (g - 1.0) * s.rho / ua.rho;
    let ca2 = g * ua.p / ua.rho;
    [
        (s.p - ua.p) - ca2 / ghat * (s.rho - ua.rho),
        (s.u - ua.u) + sh.speed * (s.v - ua.v),
        ua.rho * (sh.speed * ua.u - ua.v) * (s.v - ua.v) - (s.p - ua.p),
        s.z - ua.z,
    ]
}

/// Point on the `i`-shock curve through `ua` with strength `alpha < 0`.
pub fn shock(gas: &GasModel, fam: Family, alpha: f64, ua: &State) -> Result<Shock> {
    if alpha > 0.0 {
        return Err(Error::Range(format!("shock strength must be <= 0, got {alpha}")));
    }
    gas.check_supersonic(ua)?;
    let lam_a = gas.lambda_unchecked(fam, ua);
    if alpha == 0.0 {
        return Ok(Shock { state: *ua, speed: lam_a });
    }
    let eval = |rho: f64| -> Result<f64> {
        let sh = shock_branch(gas, fam, rho, ua)?;
        Ok(gas.lambda(fam, &sh.state)? - lam_a - alpha)
    };
    let (lo, hi) = shock_density_limits(gas, fam, ua);
    let (r, _) = gas.normalized_r(fam, ua);
    let mut step = alpha * r[3];
    if step == 0.0 || !step.is_finite() {
        return Err(Error::NoRoot("degenerate density direction".into()));
    }
    let limit = if step > 0.0 { hi } else { lo };
    let mut near = ua.rho;
    let mut f_near = -alpha;
    let mut far = ua.rho + step;
    for _ in 0..80 {
        if (far - limit) * step.signum() >= 0.0 {
            far = near + 0.5 * (limit - near);
        }
        let f_far = match eval(far) {
            Ok(v) => v,
            Err(Error::Sonic { .. }) | Err(Error::Range(_)) => {
                return Err(Error::NoRoot(format!("shock of strength {alpha} leaves the supersonic branch")))
            }
            Err(e) => return Err(e),
        };
        if f_far <= 0.0 {
            let rho = brent(&eval, near, far, f_near, f_far, SHOCK_RHO_TOL * ua.rho, SHOCK_MAX_ITER)?;
            let sh = shock_branch(gas, fam, rho, ua)?;
            gas.check_supersonic(&sh.state)?;
            return Ok(sh);
        }
        near = far;
        f_near = f_far;
        step *= 2.0;
        far = ua.rho + step;
    }
    Err(Error::NoRoot(format!("no bracket for shock strength {alpha}")))
}

fn family_of(i: usize) -> Option<Family> {
    match i {
        1 => Some(Family::One),
        5 => Some(Family::Five),
        _ => None,
    }
}

/// Lax curve `Phi_i(alpha; ua)` for `i` in 1..=5.
pub fn wave_curve(gas: &GasModel, i: usize, alpha: f64, ua: &State) -> Result<State> {
    match (i, family_of(i)) {
        (_, Some(fam)) => {
            if alpha >= 0.0 {
                rarefaction(gas, fam, alpha, ua)
            } else {
                Ok(shock(gas, fam, alpha, ua)?.state)
            }
        }
        (2, _) => contact_2(gas, alpha, ua),
        (3, _) => contact_3(gas, alpha, ua),
        (4, _) => contact_4(alpha, ua),
        _ => Err(Error::Range(format!("wave family {i} not in 1..=5"))),
    }
}

/// Applies the five curves in order 1, 2, 3, 4, 5 from below to above.
pub fn compose(gas: &GasModel, strengths: &[f64; 5], ua: &State) -> Result<State> {
    let mut s = *ua;
    for (i, &a) in strengths.iter().enumerate() {
        if a != 0.0 {
            s = wave_curve(gas, i + 1, a, &s)?;
        }
    }
    Ok(s)
}

/// Geometry of a genuinely nonlinear wave inside a fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WaveShape {
    None,
    Shock { slope: f64 },
    Rarefaction { lo: f64, hi: f64 },
}

impl WaveShape {
    pub fn min_slope(&self) -> Option<f64> {
        match *self {
            WaveShape::None => None,
            WaveShape::Shock { slope } => Some(slope),
            WaveShape::Rarefaction { lo, .. } => Some(lo),
        }
    }

    pub fn max_slope(&self) -> Option<f64> {
        match *self {
            WaveShape::None => None,
            WaveShape::Shock { slope } => Some(slope),
            WaveShape::Rarefaction { hi, .. } => Some(hi),
        }
    }
}

/// Which Riemann problem produced a fan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FanKind {
    Weak,
    Boundary,
    StrongContact,
}

/// Self-similar solution of one Riemann problem, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFan {
    pub kind: FanKind,
    pub below: State,
    pub above: State,
    /// `(alpha_1, sigma_2, sigma_3, alpha_4, alpha_5)`.
    pub strengths: [f64; 5],
    /// Constant states after the 1-wave, 2-, 3- and 4-contacts.
    pub states: [State; 4],
    pub wave1: WaveShape,
    pub wave5: WaveShape,
    /// Slope `v/u` of the contact slot.
    pub contact_slope: f64,
}

/// Side of the contact slot a slope falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

fn gn_wave(gas: &GasModel, fam: Family, alpha: f64, ua: &State) -> Result<(State, WaveShape)> {
    if alpha > 0.0 {
        let s = rarefaction(gas, fam, alpha, ua)?;
        let lo = gas.lambda_unchecked(fam, ua);
        Ok((s, WaveShape::Rarefaction { lo, hi: lo + alpha }))
    } else if alpha < 0.0 {
        let sh = shock(gas, fam, alpha, ua)?;
        Ok((sh.state, WaveShape::Shock { slope: sh.speed }))
    } else {
        Ok((*ua, WaveShape::None))
    }
}

impl WaveFan {
    /// Fan with no waves.
    pub fn constant(kind: FanKind, s: State) -> Self {
        WaveFan {
            kind,
            below: s,
            above: s,
            strengths: [0.0; 5],
            states: [s; 4],
            wave1: WaveShape::None,
            wave5: WaveShape::None,
            contact_slope: s.slope(),
        }
    }

    /// Builds the fan of `strengths` issuing from `below`.
    pub fn build(gas: &GasModel, kind: FanKind, strengths: [f64; 5], below: &State) -> Result<Self> {
        gas.check_supersonic(below)?;
        let (s1, wave1) = gn_wave(gas, Family::One, strengths[0], below)?;
        let s2 = if strengths[1] != 0.0 { contact_2(gas, strengths[1], &s1)? } else { s1 };
        let s3 = if strengths[2] != 0.0 { contact_3(gas, strengths[2], &s2)? } else { s2 };
        let s4 = if strengths[3] != 0.0 { contact_4(strengths[3], &s3)? } else { s3 };
        let (above, wave5) = gn_wave(gas, Family::Five, strengths[4], &s4)?;
        Ok(WaveFan {
            kind,
            below: *below,
            above,
            strengths,
            states: [s1, s2, s3, s4],
            wave1,
            wave5,
            contact_slope: s1.slope(),
        })
    }

    /// Smallest and largest slope carried by the fan, if any wave is present.
    pub fn slope_range(&self) -> Option<(f64, f64)> {
        let has_contact = self.strengths[1] != 0.0 || self.strengths[2] != 0.0 || self.strengths[3] != 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for w in [self.wave1, self.wave5] {
            if let (Some(a), Some(b)) = (w.min_slope(), w.max_slope()) {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        if has_contact {
            lo = lo.min(self.contact_slope);
            hi = hi.max(self.contact_slope);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Side of the contact slot containing slope `xi` (ties go below).
    pub fn side(&self, xi: f64) -> Side {
        if xi <= self.contact_slope {
            Side::Below
        } else {
            Side::Above
        }
    }

    fn sample_rarefaction(gas: &GasModel, fam: Family, base: &State, alpha: f64, lo: f64, xi: f64) -> Result<State> {
        let mut a = (xi - lo).clamp(0.0, alpha);
        let mut s = rarefaction(gas, fam, a, base)?;
        let mut err = gas.lambda_unchecked(fam, &s) - xi;
        if err.abs() <= FAN_SAMPLE_TOL {
            return Ok(s);
        }
        let (mut l, mut r) = if err > 0.0 { (0.0, a) } else { (a, alpha) };
        for _ in 0..200 {
            a = 0.5 * (l + r);
            s = rarefaction(gas, fam, a, base)?;
            err = gas.lambda_unchecked(fam, &s) - xi;
            if err.abs() <= FAN_SAMPLE_TOL || r - l < 1e-15 {
                break;
            }
            if err > 0.0 {
                r = a;
            } else {
                l = a;
            }
        }
        Ok(s)
    }

    /// State at slope `xi` (ties at discontinuities go below).
    pub fn sample(&self, gas: &GasModel, xi: f64) -> Result<State> {
        match self.wave1 {
            WaveShape::Shock { slope } if xi <= slope => return Ok(self.below),
            WaveShape::Rarefaction { lo, .. } if xi <= lo => return Ok(self.below),
            WaveShape::Rarefaction { lo, hi } if xi < hi => {
                return Self::sample_rarefaction(gas, Family::One, &self.below, self.strengths[0], lo, xi)
            }
            _ => {}
        }
        if xi <= self.contact_slope {
            return Ok(self.states[0]);
        }
        match self.wave5 {
            WaveShape::Shock { slope } if xi <= slope => Ok(self.states[3]),
            WaveShape::Shock { .. } => Ok(self.above),
            WaveShape::Rarefaction { lo, .. } if xi <= lo => Ok(self.states[3]),
            WaveShape::Rarefaction { lo, hi } if xi < hi => {
                Self::sample_rarefaction(gas, Family::Five, &self.states[3], self.strengths[4], lo, xi)
            }
            WaveShape::Rarefaction { .. } => Ok(self.above),
            WaveShape::None => Ok(self.above),
        }
    }
}
