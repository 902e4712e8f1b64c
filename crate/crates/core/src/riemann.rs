//! Riemann solvers: weak interior problems, the wall problem and the problem
//! straddling the strong contact.

use crate::error::{Error, Result};
use crate::gas::{Family, GasModel, State};
use crate::numerics::solve4;
use crate::waves::{compose, wave_curve, FanKind, WaveFan};

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
/// Central finite-difference step for Newton Jacobians.
pub const FD_STEP: f64 = 1e-7;
pub const MAX_PRESSURE_RATIO: f64 = 1.5;
pub const DET_MIN: f64 = 1e-10;
/// Largest wall turn accepted by the boundary solver.
pub const MAX_WALL_ANGLE: f64 = 0.2;

fn unknowns_to_strengths(x: &[f64; 4], a4: f64) -> [f64; 5] {
    [x[0], x[1], x[2], a4, x[3]]
}

fn residual(gas: &GasModel, x: &[f64; 4], a4: f64, ua: &State, ub: &State) -> Result<[f64; 4]> {
    let s = compose(gas, &unknowns_to_strengths(x, a4), ua)?;
    Ok([s.u - ub.u, s.v - ub.v, s.p - ub.p, s.rho - ub.rho])
}

fn norm(r: &[f64; 4]) -> f64 {
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Central-difference Jacobian of the composition with respect to the four
/// unknowns, stored row-major.
fn fd_jacobian(gas: &GasModel, x: &[f64; 4], a4: f64, ua: &State, ub: &State) -> Result<[[f64; 4]; 4]> {
    let mut jac = [[0.0; 4]; 4];
    for j in 0..4 {
        let mut xp = *x;
        let mut xm = *x;
        xp[j] += FD_STEP;
        xm[j] -= FD_STEP;
        let rp = residual(gas, &xp, a4, ua, ub)?;
        let rm = residual(gas, &xm, a4, ua, ub)?;
        for i in 0..4 {
            jac[i][j] = (rp[i] - rm[i]) / (2.0 * FD_STEP);
        }
    }
    Ok(jac)
}

/// Jacobian of the composition at zero strengths: columns `r_1, r_2, r_3, r_5`.
fn linear_jacobian(gas: &GasModel, ua: &State) -> Result<[[f64; 4]; 4]> {
    let cols = [
        gas.eigenvector(1, ua)?,
        gas.eigenvector(2, ua)?,
        gas.eigenvector(3, ua)?,
        gas.eigenvector(5, ua)?,
    ];
    let mut jac = [[0.0; 4]; 4];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..4 {
            jac[i][j] = c[i];
        }
    }
    Ok(jac)
}

/// Damped step `x + t dx`, halving `t` until the residual decreases.
fn damped_step(
    gas: &GasModel,
    x: &[f64; 4],
    dx: &[f64; 4],
    r0: f64,
    a4: f64,
    ua: &State,
    ub: &State,
) -> Option<([f64; 4], [f64; 4])> {
    let mut t = 1.0;
    for _ in 0..40 {
        let xt = [x[0] + t * dx[0], x[1] + t * dx[1], x[2] + t * dx[2], x[3] + t * dx[3]];
        if let Ok(r) = residual(gas, &xt, a4, ua, ub) {
            let n = norm(&r);
            if n < r0 || n <= NEWTON_TOL {
                return Some((xt, r));
            }
        }
        t *= 0.5;
    }
    None
}

struct NewtonOutcome {
    x: [f64; 4],
    iterations: usize,
}

/// Solves `compose(x) = ub` for the four unknowns.
///
/// When `chord` is set the first iterations reuse the exact zero-strength
/// Jacobian; this converges at a rate proportional to the wave strengths and
/// is abandoned for full finite-difference Newton as soon as it stalls.
fn newton(gas: &GasModel, ua: &State, ub: &State, a4: f64, x0: [f64; 4], chord: bool) -> Result<NewtonOutcome> {
    let mut x = x0;
    let mut r = residual(gas, &x, a4, ua, ub)?;
    let mut rn = norm(&r);
    let mut iterations = 0;
    if chord && rn > NEWTON_TOL {
        let j0 = linear_jacobian(gas, ua)?;
        while iterations < NEWTON_MAX_ITER && rn > NEWTON_TOL {
            let mut a = j0;
            let mut dx = r.map(|v| -v);
            solve4(&mut a, &mut dx);
            let xt = [x[0] + dx[0], x[1] + dx[1], x[2] + dx[2], x[3] + dx[3]];
            let Ok(rt) = residual(gas, &xt, a4, ua, ub) else { break };
            let nt = norm(&rt);
            iterations += 1;
            if nt > 0.25 * rn && nt > NEWTON_TOL {
                if nt < rn {
                    x = xt;
                    r = rt;
                    rn = nt;
                }
                break;
            }
            x = xt;
            r = rt;
            rn = nt;
        }
    }
    while rn > NEWTON_TOL {
        if iterations >= NEWTON_MAX_ITER {
            return Err(Error::NoConvergence { iterations, residual: rn });
        }
        let mut jac = fd_jacobian(gas, &x, a4, ua, ub)?;
        let mut dx = r.map(|v| -v);
        let det = solve4(&mut jac, &mut dx);
        if det == 0.0 || dx.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateJacobian { det });
        }
        iterations += 1;
        match damped_step(gas, &x, &dx, rn, a4, ua, ub) {
            Some((xn, rnew)) => {
                x = xn;
                r = rnew;
                rn = norm(&r);
            }
            None => return Err(Error::NoConvergence { iterations, residual: rn }),
        }
    }
    Ok(NewtonOutcome { x, iterations })
}

/// Resolves the jump between two nearby states into five weak waves.
pub fn solve_weak(gas: &GasModel, ua: &State, ub: &State) -> Result<WaveFan> {
    gas.check_supersonic(ua)?;
    gas.check_supersonic(ub)?;
    if ua == ub {
        return Ok(WaveFan::constant(FanKind::Weak, *ua));
    }
    let a4 = ub.z - ua.z;
    let out = newton(gas, ua, ub, a4, [0.0; 4], true)?;
    finish(gas, FanKind::Weak, &out.x, a4, ua, ub)
}

fn finish(gas: &GasModel, kind: FanKind, x: &[f64; 4], a4: f64, ua: &State, ub: &State) -> Result<WaveFan> {
    let mut fan = WaveFan::build(gas, kind, unknowns_to_strengths(x, a4), ua)?;
    // Report the requested upper state; the composition matches it to solver tolerance.
    fan.above = *ub;
    if fan.strengths[4] == 0.0 {
        fan.states[3] = *ub;
    }
    Ok(fan)
}

/// Solution of the strong-contact problem together with its Jacobian determinant.
#[derive(Debug, Clone, Copy)]
pub struct StrongContactSolution {
    pub fan: WaveFan,
    /// Determinant of the map `(alpha_5, sigma_3, sigma_2, alpha_1) -> (u, v, p, rho)`
    /// at the solution.
    pub det: f64,
    pub iterations: usize,
}

/// Resolves the jump across the strong contact. Returns the fan and the
/// Jacobian determinant at the solution.
pub fn solve_strong_contact_full(gas: &GasModel, ua: &State, ub: &State) -> Result<StrongContactSolution> {
    gas.check_supersonic(ua)?;
    gas.check_supersonic(ub)?;
    let ratio = (ua.p / ub.p).max(ub.p / ua.p);
    if ratio > MAX_PRESSURE_RATIO {
        return Err(Error::Config(format!(
            "pressure ratio {ratio:.4} across the strong contact exceeds {MAX_PRESSURE_RATIO}"
        )));
    }
    let qa = (ua.u * ua.u + ua.v * ua.v).sqrt();
    let qb = (ub.u * ub.u + ub.v * ub.v).sqrt();
    let x0 = [0.0, (qb / qa).ln(), (ub.rho / ua.rho).ln(), 0.0];
    let a4 = ub.z - ua.z;
    let out = newton(gas, ua, ub, a4, x0, false)?;
    let jac = fd_jacobian(gas, &out.x, a4, ua, ub)?;
    // Reversing four columns is an even permutation, so the determinant in the
    // order (alpha_5, sigma_3, sigma_2, alpha_1) equals that of `jac`.
    let det = crate::numerics::det4(&jac);
    if !(det.abs() >= DET_MIN) {
        return Err(Error::DegenerateJacobian { det });
    }
    let fan = finish(gas, FanKind::StrongContact, &out.x, a4, ua, ub)?;
    Ok(StrongContactSolution { fan, det, iterations: out.iterations })
}

pub fn solve_strong_contact(gas: &GasModel, ua: &State, ub: &State) -> Result<WaveFan> {
    Ok(solve_strong_contact_full(gas, ua, ub)?.fan)
}

/// Closed-form Jacobian determinant of the strong-contact map at a background
/// pair `v1` (below) and `v2` (above) with `v = 0` and equal pressures.
pub fn strong_contact_det_closed(gas: &GasModel, v1: &State, v2: &State) -> Result<f64> {
    let s20 = (v2.u / v1.u).ln();
    let s30 = (v2.rho / v1.rho).ln();
    let k1 = gas.kappa(Family::One, v1)?;
    let k5 = gas.kappa(Family::Five, v2)?;
    let l51 = gas.lambda(Family::Five, v1)?;
    let l52 = gas.lambda(Family::Five, v2)?;
    Ok(k1 * k5 * v1.rho * v1.rho * v1.u * v1.u * (s20 + s30).exp() * (l52 * (2.0 * s20 + s30).exp() + l51))
}

fn wall_residual(s: &State, omega: f64) -> f64 {
    -s.u * omega.sin() + s.v * omega.cos()
}

/// Outgoing 1-wave making the state tangent to a wall segment at angle `omega`.
pub fn solve_boundary(gas: &GasModel, ua: &State, omega: f64) -> Result<WaveFan> {
    gas.check_supersonic(ua)?;
    if !(omega.abs() <= MAX_WALL_ANGLE) {
        return Err(Error::Range(format!("wall angle {omega} exceeds {MAX_WALL_ANGLE}")));
    }
    let f = |g: f64| -> Result<f64> { Ok(wall_residual(&wave_curve(gas, 1, g, ua)?, omega)) };
    let mut g = 0.0;
    let mut r = wall_residual(ua, omega);
    if r.abs() <= NEWTON_TOL {
        return Ok(WaveFan::constant(FanKind::Boundary, *ua));
    }
    let r1 = gas.eigenvector(1, ua)?;
    let d0 = -r1[0] * omega.sin() + r1[1] * omega.cos();
    let mut deriv = d0;
    let mut iterations = 0;
    while r.abs() > NEWTON_TOL {
        if iterations >= NEWTON_MAX_ITER {
            return Err(Error::NoConvergence { iterations, residual: r.abs() });
        }
        if !(deriv.abs() > 0.0) {
            return Err(Error::DegenerateJacobian { det: deriv });
        }
        let dg = -r / deriv;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            if let Ok(rt) = f(g + t * dg) {
                if rt.abs() < r.abs() || rt.abs() <= NEWTON_TOL {
                    accepted = Some((g + t * dg, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((gn, rn)) = accepted else {
            return Err(Error::NoConvergence { iterations, residual: r.abs() });
        };
        iterations += 1;
        if rn.abs() > 0.25 * r.abs() {
            deriv = (f(gn + FD_STEP)? - f(gn - FD_STEP)?) / (2.0 * FD_STEP);
        }
        g = gn;
        r = rn;
    }
    WaveFan::build(gas, FanKind::Boundary, [g, 0.0, 0.0, 0.0, 0.0], ua)
}
