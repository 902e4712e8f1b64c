//! Quasi-one-dimensional duct model between the wall and the strong contact,
//! field averaging, and the comparison harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{GasModel, State};
use crate::scheme::{self, SchemeConfig, SolutionField};
use crate::wall::WallPolyline;

/// Update size below which ratios are dominated by rounding and not recorded.
const RATIO_FLOOR: f64 = 1e-13;
const NO_CONTRACTION_RATIO: f64 = 0.9;
const NO_CONTRACTION_COUNT: usize = 3;

/// Cross-section `A(x_j)` on the uniform grid `x_j = j dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuctGeometry {
    pub dx: f64,
    pub a: Vec<f64>,
}

impl DuctGeometry {
    pub fn from_fn(dx: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Self {
        DuctGeometry { dx, a: (0..nodes).map(|j| f(j as f64 * dx)).collect() }
    }

    /// Wall-to-contact distance of a 2D run on the grid `dx = h/2`. Wall and
    /// contact are linear between columns, so midpoints are interpolated.
    pub fn from_field(field: &SolutionField) -> Self {
        let cols = &field.columns;
        let mut a = Vec::with_capacity(2 * cols.len());
        for (i, c) in cols.iter().enumerate() {
            let ak = c.y_wall - c.contact_y;
            a.push(ak);
            if let Some(n) = cols.get(i + 1) {
                a.push(0.5 * (ak + n.y_wall - n.contact_y));
            }
        }
        DuctGeometry { dx: 0.5 * field.h, a }
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// `int |A'|` of the piecewise-linear interpolant.
    pub fn total_variation(&self) -> f64 {
        self.a.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn bounds(&self) -> (f64, f64) {
        let lo = self.a.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn validate(&self, delta0: Option<f64>) -> Result<()> {
        if self.a.len() < 2 || !(self.dx > 0.0) {
            return Err(Error::Config("duct geometry needs dx > 0 and at least two nodes".into()));
        }
        let (lo, _) = self.bounds();
        if !(lo > 0.0) || self.a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("duct cross-section must stay positive, min A = {lo}")));
        }
        if let Some(d) = delta0 {
            let tv = self.total_variation();
            if tv > d {
                return Err(Error::Config(format!("duct variation int|A'| = {tv:.6} exceeds delta0 = {d}")));
            }
        }
        Ok(())
    }
}

/// Inlet state `(rho, u, p, Z)` of the duct model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuctState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub z: f64,
}

impl DuctState {
    pub fn from_state(s: &State) -> Self {
        DuctState { rho: s.rho, u: s.u, p: s.p, z: s.z }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.rho, self.u, self.p, self.z]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quasi1DSolution {
    pub dx: f64,
    pub nodes: Vec<DuctState>,
    pub iterations: usize,
    /// Sup-norm change of `(rho, u, p)` per iteration.
    pub updates: Vec<f64>,
    /// `updates[n] / updates[n-1]` for iterations `n >= 2` whose previous update
    /// is above the rounding floor, as `(n, ratio)`.
    pub ratios: Vec<(usize, f64)>,
    pub final_update: f64,
    /// `min` and `max` of `A rho phi(T) / (rho_0 u_0 A_0)` on the converged iterate.
    pub c_lower: f64,
    pub c_upper: f64,
}

impl Quasi1DSolution {
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Largest violation of `Z_0 e^{-C^* x} <= Z <= Z_0 e^{-C_* x}` (zero when satisfied).
    pub fn envelope_violation(&self) -> f64 {
        let z0 = self.nodes[0].z;
        self.nodes
            .iter()
            .enumerate()
            .map(|(j, n)| {
                let x = self.x(j);
                let lo = z0 * (-self.c_upper * x).exp();
                let hi = z0 * (-self.c_lower * x).exp();
                (lo - n.z).max(n.z - hi).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    /// Largest ratio recorded after iteration 2.
    pub fn max_ratio_after(&self, n0: usize) -> Option<f64> {
        self.ratios.iter().filter(|(n, _)| *n > n0).map(|(_, r)| *r).reduce(f64::max)
    }
}

/// Supersonic root of the momentum/Bernoulli quadratic at one node:
/// `u + A p / m = big_m`, `gamma p / ((gamma-1) rho) + u^2/2 = big_b`, `rho u A = m`.
fn supersonic_u(gamma: f64, big_m: f64, big_b: f64) -> Result<f64> {
    let g1 = gamma / (gamma - 1.0);
    let a = 0.5 - g1;
    let disc = g1 * g1 * big_m * big_m + 4.0 * a * big_b;
    let vertex = gamma * big_m / (gamma + 1.0);
    if !(disc > 0.0) {
        let c = (gamma * (big_m - vertex) * vertex).max(0.0).sqrt();
        return Err(Error::Sonic { u: vertex, c });
    }
    Ok(vertex + disc.sqrt() / (2.0 * a.abs()))
}

/// Contraction iteration for the integral form of the duct model.
pub fn solve_q1d(geom: &DuctGeometry, inlet: DuctState, gas: &GasModel, tol: f64, max_iter: usize) -> Result<Quasi1DSolution> {
    geom.validate(None)?;
    let in_state = State::new(inlet.u, 0.0, inlet.p, inlet.rho, inlet.z);
    gas.check_supersonic(&in_state)?;
    if !(0.0..=1.0).contains(&inlet.z) {
        return Err(Error::Range(format!("inlet Z = {} outside [0, 1]", inlet.z)));
    }
    let n = geom.a.len();
    let a = &geom.a;
    let m = inlet.rho * inlet.u * a[0];
    let m0 = inlet.u + a[0] * inlet.p / m;
    let b0 = gas.gamma * inlet.p / ((gas.gamma - 1.0) * inlet.rho) + 0.5 * inlet.u * inlet.u;

    // A rho phi(T) / m at each node.
    let decay = |rho: &[f64], p: &[f64]| -> Result<Vec<f64>> {
        (0..n).map(|j| Ok(a[j] * rho[j] * gas.rate(gas.temperature(p[j], rho[j])?)? / m)).collect()
    };
    let closed_z = |d: &[f64]| -> Vec<f64> {
        let mut z = Vec::with_capacity(n);
        let mut acc = 0.0;
        z.push(inlet.z);
        for j in 1..n {
            acc += 0.5 * geom.dx * (d[j - 1] + d[j]);
            z.push(inlet.z * (-acc).exp());
        }
        z
    };

    let mut rho = vec![inlet.rho; n];
    let mut u = vec![inlet.u; n];
    let mut p = vec![inlet.p; n];
    let mut d = decay(&rho, &p)?;
    let mut z = closed_z(&d);

    let mut updates = Vec::new();
    let mut ratios = Vec::new();
    let mut slow = 0;
    for it in 1..=max_iter {
        let (mut ip, mut iq) = (0.0, 0.0);
        let mut delta: f64 = 0.0;
        let mut next = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for j in 0..n {
            if j > 0 {
                ip += (a[j] - a[j - 1]) * 0.5 * (p[j - 1] + p[j]);
                iq += 0.5 * geom.dx * (d[j - 1] * z[j - 1] + d[j] * z[j]);
            }
            let big_m = m0 + ip / m;
            // `iq` already carries the 1/m factor through `d`.
            let big_b = b0 + gas.q0 * iq;
            let uj = supersonic_u(gas.gamma, big_m, big_b)?;
            let rj = m / (uj * a[j]);
            let pj = (big_m - uj) * m / a[j];
            if !(pj > 0.0) {
                return Err(Error::Domain(format!("duct pressure {pj} at node {j}")));
            }
            delta = delta.max((rj - rho[j]).abs()).max((uj - u[j]).abs()).max((pj - p[j]).abs());
            next.0.push(rj);
            next.1.push(uj);
            next.2.push(pj);
        }
        (rho, u, p) = next;
        d = decay(&rho, &p)?;
        z = closed_z(&d);
        if let Some(&prev) = updates.last() {
            if it >= 2 && prev > RATIO_FLOOR {
                let r = delta / prev;
                ratios.push((it, r));
                slow = if r > NO_CONTRACTION_RATIO { slow + 1 } else { 0 };
                if slow >= NO_CONTRACTION_COUNT {
                    return Err(Error::NoContraction { iteration: it, ratio: r });
                }
            }
        }
        updates.push(delta);
        if delta <= tol {
            let c_lower = d.iter().copied().fold(f64::INFINITY, f64::min);
            let c_upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let nodes = (0..n).map(|j| DuctState { rho: rho[j], u: u[j], p: p[j], z: z[j] }).collect();
            return Ok(Quasi1DSolution {
                dx: geom.dx,
                nodes,
                iterations: it,
                updates,
                ratios,
                final_update: delta,
                c_lower,
                c_upper,
            });
        }
    }
    Err(Error::MaxIterations(max_iter))
}

/// Average of a column between the tracked contact and the wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnAverage {
    pub x: f64,
    pub a: f64,
    pub mean: DuctState,
}

/// Exact average of `(rho, u, p, Z)` over `[chi(x), g(x)]` at the column `x = kh`.
/// The lowest cell above the contact interface is stretched or cut to `chi`.
pub fn average_field(field: &SolutionField, x: f64) -> Result<ColumnAverage> {
    let t = x / field.h;
    let k = t.round();
    if !(k >= 0.0 && (k as usize) < field.columns.len()) || (t - k).abs() > 1e-9 {
        return Err(Error::Range(format!(
            "x = {x} is not a column abscissa of the run (h = {}, {} columns)",
            field.h,
            field.columns.len()
        )));
    }
    let col = &field.columns[k as usize];
    let (chi, g) = (col.contact_y, col.y_wall);
    let area = g - chi;
    let mut acc = [0.0; 4];
    for (i, c) in col.upper_cells().iter().enumerate() {
        let lo = if i == 0 { chi } else { c.y_lo };
        let w = c.y_hi.min(g) - lo;
        let s = DuctState::from_state(&c.state).to_array();
        for q in 0..4 {
            acc[q] += w * s[q];
        }
    }
    let [rho, u, p, z] = acc.map(|v| v / area);
    Ok(ColumnAverage { x: col.x, a: area, mean: DuctState { rho, u, p, z } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub x: f64,
    pub a: f64,
    pub averaged: DuctState,
    pub duct: DuctState,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub sup: f64,
    /// Componentwise sup of `|U_bar - U_A|` in `(rho, u, p, Z)` order.
    pub sup_components: [f64; 4],
}

/// Compares column averages with the duct solution at the shared nodes `x = kh`.
pub fn compare(field: &SolutionField, q1d: &Quasi1DSolution) -> Result<Comparison> {
    if ((2.0 * q1d.dx - field.h) / field.h).abs() > 1e-12 {
        return Err(Error::GridMismatch(format!("duct dx = {} but the run has h = {}", q1d.dx, field.h)));
    }
    let needed = 2 * (field.columns.len() - 1) + 1;
    if q1d.nodes.len() < needed {
        return Err(Error::GridMismatch(format!("duct has {} nodes, the run needs {needed}", q1d.nodes.len())));
    }
    let mut rows = Vec::with_capacity(field.columns.len());
    let mut sup_components = [0.0f64; 4];
    for col in &field.columns {
        let avg = average_field(field, col.x)?;
        let duct = q1d.nodes[2 * col.k];
        let (b, d) = (avg.mean.to_array(), duct.to_array());
        let mut mx: f64 = 0.0;
        for q in 0..4 {
            let e = (b[q] - d[q]).abs();
            sup_components[q] = sup_components[q].max(e);
            mx = mx.max(e);
        }
        rows.push(CompareRow { x: col.x, a: avg.a, averaged: avg.mean, duct, max_abs_diff: mx });
    }
    let sup = sup_components.iter().copied().fold(0.0, f64::max);
    Ok(Comparison { rows, sup, sup_components })
}

/// Inlet of the duct model: average of the upstream data over `(y0, 0)`.
pub fn inlet_average(field: &SolutionField) -> DuctState {
    DuctState::from_state(&field.upstream.average(field.upstream.y0, 0.0))
}

/// Tolerance and iteration cap used by [`solve_for_field`].
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Duct solution paired with a 2D run.
pub fn solve_for_field(field: &SolutionField) -> Result<Quasi1DSolution> {
    solve_q1d(&DuctGeometry::from_field(field), inlet_average(field), &field.gas, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// `TV(g') + TV(U_1) + TV(U_2) + sup |U_2 - U_2^(0)|` of a configuration, with
/// `g'` taken on the discrete wall and states compared in the l1 norm for
/// variations and the sup norm for the offset.
pub fn delta_star(cfg: &SchemeConfig, wall: &WallPolyline) -> f64 {
    let slopes: Vec<f64> = (0..wall.k_max()).map(|k| (wall.y[k + 1] - wall.y[k]) / wall.h).collect();
    let mut tv_wall = slopes.first().map_or(0.0, |s| s.abs());
    tv_wall += slopes.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    let up = &cfg.upstream;
    let tv = |ps: Vec<&scheme::Piece>| ps.windows(2).map(|w| w[0].state.l1_dist(&w[1].state)).sum::<f64>();
    let tv1 = tv(up.lower().collect());
    let tv2 = tv(up.upper().collect());
    let off = up.upper().map(|p| p.state.dist(&cfg.backgrounds[1])).fold(0.0, f64::max);
    tv_wall + tv1 + tv2 + off
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub delta: f64,
    pub h: f64,
    /// Sup over `x` and components of the seed-averaged `U_bar - U_A`.
    pub sup_diff: f64,
    /// Largest single-seed sup difference.
    pub sup_diff_single: f64,
    pub seeds: usize,
    pub q1d_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln sup_diff` against `ln delta` over rows with `delta > 0`.
    pub exponent: Option<f64>,
}

/// Signed differences `U_bar - U_A` at every column of one run.
fn signed_differences(field: &SolutionField) -> Result<(Vec<[f64; 4]>, f64, usize)> {
    let q = solve_for_field(field)?;
    let cmp = compare(field, &q)?;
    let d = cmp
        .rows
        .iter()
        .map(|r| {
            let (b, u) = (r.averaged.to_array(), r.duct.to_array());
            std::array::from_fn(|c| b[c] - u[c])
        })
        .collect();
    Ok((d, cmp.sup, q.iterations))
}

/// Runs `base` rescaled to each `delta_*`. `h_list` holds one step for all rows
/// or one step per row. With several seeds the signed differences are averaged
/// over the ensemble before the sup is taken, which damps the sampling error of
/// individual wave positions.
pub fn scaling_study(base: &SchemeConfig, deltas: &[f64], h_list: &[f64], seeds: &[u64]) -> Result<ScalingStudy> {
    if h_list.len() != 1 && h_list.len() != deltas.len() {
        return Err(Error::Config(format!("{} steps for {} deltas", h_list.len(), deltas.len())));
    }
    // The base profile may be large; only its shape matters here.
    let base_wall = WallPolyline::build(&base.wall, base.h, base.k_max())?;
    let d_base = delta_star(base, &base_wall);
    if !(d_base > 0.0) {
        return Err(Error::Config("base configuration has no perturbation to scale".into()));
    }
    let seeds = if seeds.is_empty() { vec![base.seed] } else { seeds.to_vec() };
    let mut rows = Vec::with_capacity(deltas.len());
    for (i, &delta) in deltas.iter().enumerate() {
        let h = h_list[if h_list.len() == 1 { 0 } else { i }];
        let mut mean: Vec<[f64; 4]> = Vec::new();
        let (mut single, mut iters) = (0.0f64, 0);
        for &seed in &seeds {
            let mut cfg = base.scaled(delta / d_base);
            cfg.h = h;
            cfg.seed = seed;
            let (d, sup, it) = signed_differences(&scheme::run(&cfg)?)?;
            single = single.max(sup);
            iters = iters.max(it);
            if mean.is_empty() {
                mean = vec![[0.0; 4]; d.len()];
            }
            for (m, v) in mean.iter_mut().zip(&d) {
                for c in 0..4 {
                    m[c] += v[c] / seeds.len() as f64;
                }
            }
        }
        let sup_diff = mean.iter().flat_map(|m| m.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
        rows.push(ScalingRow { delta, h, sup_diff, sup_diff_single: single, seeds: seeds.len(), q1d_iterations: iters });
    }
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.delta > 0.0 && r.sup_diff > 0.0).map(|r| (r.delta.ln(), r.sup_diff.ln())).collect();
    Ok(ScalingStudy { rows, exponent: fit_slope(&pts) })
}

/// Least-squares slope; `None` with fewer than two distinct abscissas.
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}
