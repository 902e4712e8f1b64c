//! Runtime instruments: total variation, the wave functional, slab balances,
//! the entropy residual and finite-difference interaction probes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{Family, GasModel, State};
use crate::riemann::{solve_boundary, solve_strong_contact};
use crate::scheme::{Cell, MeshColumn, SolutionField};
use crate::waves::{contact_2, contact_3, wave_curve, FanKind};

/// Central finite-difference step for the interaction probes.
pub const PROBE_STEP: f64 = 1e-4;
/// Width, in diamonds, of the entropy control windows.
pub const ENTROPY_WINDOW: i64 = 16;

/// Sum over interfaces of the componentwise absolute jumps.
pub fn total_variation(cells: &[Cell]) -> f64 {
    cells.windows(2).map(|w| w[0].state.l1_dist(&w[1].state)).sum()
}

pub fn column_tv(col: &MeshColumn) -> f64 {
    total_variation(&col.cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCoefficients {
    /// `d gamma_1 / d omega`.
    pub k_b: f64,
    /// `u / kappa_1(U)`.
    pub k_b_closed: f64,
    /// `d gamma_1 / d omega` with an incoming 5-wave of strength `PROBE_STEP`.
    pub k_b0: f64,
    /// Reflected 1-strength per unit incoming 2-, 3- and 5-strength.
    pub k_b2: f64,
    pub k_b3: f64,
    pub k_b5: f64,
}

fn central<F: Fn(f64) -> Result<f64>>(f: F, eps: f64) -> Result<f64> {
    Ok((f(eps)? - f(-eps)?) / (2.0 * eps))
}

/// Wall reflection coefficients at the wall state `u` (flat wall).
pub fn probe_boundary_coefficients(gas: &GasModel, u: &State) -> Result<BoundaryCoefficients> {
    let e = PROBE_STEP;
    let g1 = |s: &State, w: f64| -> Result<f64> { Ok(solve_boundary(gas, s, w)?.strengths[0]) };
    let k_b = central(|w| g1(u, w), e)?;
    let k_b_closed = u.u / gas.kappa(Family::One, u)?;
    let k_b5 = central(|b| g1(&wave_curve(gas, 5, -b, u)?, 0.0), e)?;
    let k_b2 = central(|b| g1(&contact_2(gas, -b, u)?, 0.0), e)?;
    let k_b3 = central(|b| g1(&contact_3(gas, -b, u)?, 0.0), e)?;
    let ua = wave_curve(gas, 5, -e, u)?;
    let k_b0 = central(|w| g1(&ua, w), e)?;
    Ok(BoundaryCoefficients { k_b, k_b_closed, k_b0, k_b2, k_b3, k_b5 })
}

/// Strong-contact interaction coefficients. `k1j`: outgoing strength `j` per
/// unit 5-wave arriving from below; `k2j`: per unit 1-wave arriving from above.
/// Index 1 and 3 of each array are the contact changes `d sigma_2`, `d sigma_3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactCoefficients {
    pub k1: [f64; 5],
    pub k2: [f64; 5],
}

impl ContactCoefficients {
    pub fn k25(&self) -> f64 {
        self.k2[4]
    }
    pub fn k21(&self) -> f64 {
        self.k2[0]
    }
}

pub fn probe_contact_coefficients(gas: &GasModel, u1: &State, u2: &State) -> Result<ContactCoefficients> {
    let e = PROBE_STEP;
    let from_below = |a: f64| -> Result<[f64; 5]> {
        Ok(solve_strong_contact(gas, &wave_curve(gas, 5, -a, u1)?, u2)?.strengths)
    };
    let from_above = |b: f64| -> Result<[f64; 5]> {
        Ok(solve_strong_contact(gas, u1, &wave_curve(gas, 1, b, u2)?)?.strengths)
    };
    let (p, m) = (from_below(e)?, from_below(-e)?);
    let k1 = std::array::from_fn(|j| (p[j] - m[j]) / (2.0 * e));
    let (p, m) = (from_above(e)?, from_above(-e)?);
    let k2 = std::array::from_fn(|j| (p[j] - m[j]) / (2.0 * e));
    Ok(ContactCoefficients { k1, k2 })
}

/// Closed-form reflection coefficient at a background pair with `v = 0`.
pub fn k25_closed(gas: &GasModel, u1: &State, u2: &State) -> Result<f64> {
    let e = (2.0 * (u2.u / u1.u).ln() + (u2.rho / u1.rho).ln()).exp();
    let l1 = gas.lambda(Family::Five, u1)?;
    let l2 = gas.lambda(Family::Five, u2)? * e;
    Ok((l1 - l2) / (l1 + l2))
}

/// `(K25 numeric, K25 closed form)`.
pub fn probe_reflection(gas: &GasModel, u1: &State, u2: &State) -> Result<(f64, f64)> {
    Ok((probe_contact_coefficients(gas, u1, u2)?.k25(), k25_closed(gas, u1, u2)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalWeights {
    pub c1: f64,
    pub c2: f64,
    /// `K*_{11} .. K*_{15}` for waves below the contact.
    pub k1: [f64; 5],
    /// `K*_{20}` (corner turns) then `K*_{21} .. K*_{25}` above the contact.
    pub k2: [f64; 6],
    pub k: f64,
    pub kz: f64,
}

/// Optional replacements for individual weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightOverrides {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub k11: Option<f64>,
    pub k12: Option<f64>,
    pub k13: Option<f64>,
    pub k14: Option<f64>,
    pub k15: Option<f64>,
    pub k20: Option<f64>,
    pub k22: Option<f64>,
    pub k23: Option<f64>,
    pub k24: Option<f64>,
    pub k25: Option<f64>,
    pub k: Option<f64>,
    pub kz: Option<f64>,
}

/// Probed coefficients at the two backgrounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    pub boundary: BoundaryCoefficients,
    pub contact: ContactCoefficients,
    pub k25_closed: f64,
}

pub fn probe_backgrounds(gas: &GasModel, backgrounds: &[State; 2]) -> Result<ProbeSet> {
    Ok(ProbeSet {
        boundary: probe_boundary_coefficients(gas, &backgrounds[1])?,
        contact: probe_contact_coefficients(gas, &backgrounds[0], &backgrounds[1])?,
        k25_closed: k25_closed(gas, &backgrounds[0], &backgrounds[1])?,
    })
}

impl FunctionalWeights {
    /// Weights satisfying the interaction inequalities at the probed
    /// coefficients; `kz` is left at zero.
    pub fn from_probes(p: &ProbeSet) -> Result<Self> {
        let b = &p.boundary;
        let c = &p.contact;
        let k25c = c.k25().abs();
        if !(b.k_b5 * k25c < 1.0) {
            return Err(Error::Config(format!(
                "reflection condition |K25| * K_b5 < 1 fails: {}",
                b.k_b5 * k25c
            )));
        }
        let k25 = b.k_b5.abs() + 0.5 * (1.0 / k25c - b.k_b5.abs()).min(1.0);
        let k11 = if c.k21() == 0.0 { 1.0 } else { 0.9 * (1.0 - k25 * k25c) / c.k21().abs() };
        let margin = 1.0 - k11 * c.k21().abs() - k25 * k25c;
        let csum = c.k2[1].abs() + c.k2[2].abs();
        let c1 = if csum > 0.0 { (0.5 * margin / csum).min(0.1) } else { 0.1 };
        let c2 = 1.0;
        let need15 = k25 * c.k1[4].abs() + k11 * c.k1[0].abs() + c1 * (c.k1[1].abs() + c.k1[2].abs());
        let k15 = (1.5 * need15).max(1.0);
        let k2x = 1.0 + b.k_b2.abs().max(b.k_b3.abs());
        Ok(FunctionalWeights {
            c1,
            c2,
            k1: [k11, 10.0, 10.0, 2.0 * c2, k15],
            k2: [2.0 * b.k_b.abs(), 1.0, k2x, k2x, 2.0 * c2, k25],
            k: K_MAX,
            kz: 0.0,
        })
    }

    pub fn apply(&mut self, o: &WeightOverrides) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut self.c1, o.c1);
        set(&mut self.c2, o.c2);
        for (i, v) in [o.k11, o.k12, o.k13, o.k14, o.k15].into_iter().enumerate() {
            set(&mut self.k1[i], v);
        }
        set(&mut self.k2[0], o.k20);
        for (i, v) in [o.k22, o.k23, o.k24, o.k25].into_iter().enumerate() {
            set(&mut self.k2[i + 2], v);
        }
        set(&mut self.k, o.k);
        set(&mut self.kz, o.kz);
    }

    /// `K*_{11} |K21| + K*_{25} |K25|`, which must stay below one.
    pub fn consistency(&self, c: &ContactCoefficients) -> f64 {
        self.k1[0] * c.k21().abs() + self.k2[5] * c.k25().abs()
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.c1, self.c2, self.k, self.kz].into_iter().chain(self.k1).chain(self.k2);
        if all.into_iter().any(|w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::Config(format!("functional weights must be finite and nonnegative: {self:?}")));
        }
        Ok(())
    }
}

/// Largest quadratic weight used by default.
pub const K_MAX: f64 = 100.0;

/// Default weights for a field: probed at its backgrounds; `k` capped so that
/// the wall-reflection margin `K*_{25} - K_b5` absorbs four times the new
/// interaction potential of a reflected wave; `kz = 100 (F(J_0) + 2)^2`.
pub fn default_weights(field: &SolutionField, overrides: &WeightOverrides) -> Result<(FunctionalWeights, ProbeSet)> {
    let probes = probe_backgrounds(&field.gas, &field.backgrounds)?;
    let mut w = FunctionalWeights::from_probes(&probes)?;
    if let Some(c0) = field.columns.first().filter(|c| c.has_slab()) {
        let total = weak_total(c0);
        let margin = w.k2[5] - probes.boundary.k_b5;
        if total > 0.0 {
            w.k = (margin / (4.0 * total)).min(K_MAX);
        }
    }
    w.apply(overrides);
    if overrides.kz.is_none() {
        w.kz = 0.0;
        let f0 = field.columns.first().map_or(Ok(0.0), |c| glimm_functional(field, c, &w).map(|s| s.f))?;
        w.kz = 100.0 * (f0 + 2.0).powi(2);
    }
    w.validate()?;
    Ok((w, probes))
}

/// Unweighted sum of weak-wave strengths in the fans of a slab.
pub fn weak_total(col: &MeshColumn) -> f64 {
    col.diamonds
        .iter()
        .map(|d| {
            let a = d.strengths;
            if d.kind == FanKind::StrongContact {
                a[0].abs() + a[4].abs()
            } else {
                a.iter().map(|x| x.abs()).sum()
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSnapshot {
    pub k: usize,
    pub l_c: f64,
    pub l1: f64,
    pub l2: f64,
    /// Future corner turns, truncated at `x_max`.
    pub l0: f64,
    pub q: f64,
    pub f: f64,
    pub f_c: f64,
}

#[derive(Default)]
struct Approach {
    s1_all: f64,
    s1_shock: f64,
    s5_all: f64,
    s5_shock: f64,
    s23: f64,
    q: f64,
}

impl Approach {
    /// Adds a wave lying above all waves seen so far.
    fn add(&mut self, family: usize, a: f64) {
        let m = a.abs();
        if m == 0.0 {
            return;
        }
        let shock = a < 0.0;
        match family {
            1 => {
                self.q += m * (self.s5_all + self.s23 + if shock { self.s1_all } else { self.s1_shock });
                self.s1_all += m;
                if shock {
                    self.s1_shock += m;
                }
            }
            2 | 3 => {
                self.q += m * self.s5_all;
                self.s23 += m;
            }
            5 => {
                self.q += m * if shock { self.s5_all } else { self.s5_shock };
                self.s5_all += m;
                if shock {
                    self.s5_shock += m;
                }
            }
            _ => {}
        }
    }
}

/// Quadratic interaction potential of weak waves listed bottom to top as
/// `(family, strength)`.
pub fn interaction_potential(waves: &[(usize, f64)]) -> f64 {
    let mut acc = Approach::default();
    for &(f, a) in waves {
        acc.add(f, a);
    }
    acc.q
}

/// Functional on the mesh curve crossed by the fans of slab `col.k`.
pub fn glimm_functional(field: &SolutionField, col: &MeshColumn, w: &FunctionalWeights) -> Result<FunctionalSnapshot> {
    if !col.has_slab() {
        return Err(Error::MissingWaveData(col.k));
    }
    let nc = col.contact_index as i64 - col.cells.len() as i64;
    let [u1, u2] = field.backgrounds;
    let s20 = ((u2.u * u2.u + u2.v * u2.v) / (u1.u * u1.u + u1.v * u1.v)).sqrt().ln();
    let s30 = (u2.rho / u1.rho).ln();
    let (mut l1, mut l2, mut l_c) = (0.0, 0.0, 0.0);
    let mut acc = Approach::default();
    for d in &col.diamonds {
        let a = d.strengths;
        if d.n < nc {
            l1 += (0..5).map(|j| w.k1[j] * a[j].abs()).sum::<f64>();
        } else if d.n > nc {
            l2 += (0..5).map(|j| w.k2[j + 1] * a[j].abs()).sum::<f64>();
        } else {
            if d.kind != FanKind::StrongContact {
                return Err(Error::MissingWaveData(col.k));
            }
            l1 += w.k1[0] * a[0].abs();
            l2 += w.k2[5] * a[4].abs();
            l_c = w.c1 * ((a[1] - s20).abs() + (a[2] - s30).abs()) + w.c2 * a[3].abs();
        }
        acc.add(1, a[0]);
        if d.kind != FanKind::StrongContact {
            acc.add(2, a[1]);
            acc.add(3, a[2]);
        }
        acc.add(5, a[4]);
    }
    let l0: f64 = ((col.k + 1)..field.wall.k_max()).map(|j| field.wall.turn(j).abs()).sum();
    let q = acc.q;
    let f = l_c + l1 + l2 + w.k2[0] * l0 + w.k * q;
    let f_c = f + w.kz * reaction_tail(field, col.k);
    Ok(FunctionalSnapshot { k: col.k, l_c, l1, l2, l0, q, f, f_c })
}

/// `sum_{j >= k} exp(-l j h) h sup Z_0`, truncated at the last column.
pub fn reaction_tail(field: &SolutionField, k: usize) -> f64 {
    let z0 = field.z0_sup();
    if z0 == 0.0 {
        return 0.0;
    }
    let l = if field.rate_min.is_finite() { field.rate_min } else { 0.0 };
    (k..=field.wall.k_max()).map(|j| (-l * j as f64 * field.h).exp() * field.h * z0).sum()
}

fn add_scaled(acc: &mut [f64; 5], v: &[f64; 5], w: f64) {
    for i in 0..5 {
        acc[i] += w * v[i];
    }
}

fn overlap(c: &Cell, a: f64, b: f64) -> f64 {
    (c.y_hi.min(b) - c.y_lo.max(a)).max(0.0)
}

/// Balance of one slab between the wall and the strong contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabResidual {
    /// Index `i` of the slab `[(i-1)h, ih]`.
    pub i: usize,
    /// Residuals of the mass, x-momentum, y-momentum, energy and reactant
    /// balances with data sampled at `ih-`.
    pub residual: [f64; 5],
    /// Same balances evaluated on the exact fans at `ih-`, before sampling.
    pub homogeneous: [f64; 5],
    /// Reaction source exchanged at `(i-1)h`.
    pub source: [f64; 5],
}

impl SlabResidual {
    /// `(mass, x-momentum, energy, reactant)`.
    pub fn four(&self) -> [f64; 4] {
        [self.residual[0], self.residual[1], self.residual[3], self.residual[4]]
    }
}

/// Integral balance over the region between the contact path and the wall in
/// slab `i >= 1`, including the wall and contact pressure forces and the
/// reaction source applied at the start of the slab.
pub fn slab_conservation(field: &SolutionField, i: usize) -> Result<SlabResidual> {
    if i == 0 || i >= field.columns.len() {
        return Err(Error::Range(format!("slab index {i} outside 1..{}", field.columns.len())));
    }
    let gas = &field.gas;
    let h = field.h;
    let prev = &field.columns[i - 1];
    let cur = &field.columns[i];
    if !prev.has_slab() {
        return Err(Error::MissingWaveData(i - 1));
    }
    let y_start = prev.interface_y();
    let cs = prev.contact_slope;
    let y_end = y_start + h * cs;
    let b = (cur.y_wall - prev.y_wall) / h;
    let pw = prev.wall_state.p;
    let pc = prev.contact_states[1].p;

    let mut left = [0.0; 5];
    let mut source = [0.0; 5];
    for (c, u) in prev.cells.iter().zip(&prev.sampled) {
        let w = overlap(c, y_start, prev.y_wall);
        if w > 0.0 {
            add_scaled(&mut left, &gas.flux_w(u), w);
            add_scaled(&mut source, &gas.source_g(u)?, h * w);
        }
    }
    let mut right = [0.0; 5];
    for (c, u) in cur.cells.iter().zip(&cur.sampled) {
        let w = overlap(c, y_end, cur.y_wall);
        if w > 0.0 {
            add_scaled(&mut right, &gas.flux_w(u), w);
        }
    }
    let mut exit = [0.0; 5];
    for c in &prev.exit {
        let w = overlap(c, y_end, cur.y_wall);
        if w > 0.0 {
            add_scaled(&mut exit, &gas.flux_w(&c.state), w);
        }
    }
    let mut line = [0.0; 5];
    line[1] = -h * b * pw + h * cs * pc;
    line[2] = h * pw - h * pc;
    let residual = std::array::from_fn(|c| right[c] - left[c] - source[c] + line[c]);
    let homogeneous = std::array::from_fn(|c| exit[c] - left[c] - source[c] + line[c]);
    Ok(SlabResidual { i, residual, homogeneous, source })
}

fn entropy_flux_x(gas: &GasModel, s: &State) -> Result<f64> {
    Ok(s.rho * s.u * gas.entropy(s)?)
}

/// Entropy flux across a lateral edge of slope `b`, per unit length in `x`.
fn entropy_flux_edge(gas: &GasModel, s: &State, b: f64) -> Result<f64> {
    Ok(s.rho * (s.v - b * s.u) * gas.entropy(s)?)
}

/// Net entropy outflow minus the reaction production over diamonds
/// `n_lo..=n_hi` of slab `k`, from `kh-` to `(k+1)h-`.
pub fn entropy_residual(field: &SolutionField, k: usize, n_lo: i64, n_hi: i64) -> Result<f64> {
    let gas = &field.gas;
    let col = field.columns.get(k).ok_or(Error::MissingWaveData(k))?;
    if !col.has_slab() {
        return Err(Error::MissingWaveData(k));
    }
    let n = col.cells.len() as i64;
    if !(n_lo > -n && n_lo <= n_hi && n_hi <= 0) {
        return Err(Error::Range(format!("entropy window [{n_lo}, {n_hi}] outside the column")));
    }
    let s = field.s();
    let h = field.h;
    let yk = col.y_wall;
    let y1 = field.wall.y[k + 1];
    let b = (y1 - yk) / h;
    let (a0, b0) = (yk + (2 * n_lo - 1) as f64 * s, (yk + (2 * n_hi + 1) as f64 * s).min(yk));
    let (a1, b1) = (y1 + (2 * n_lo - 1) as f64 * s, (y1 + (2 * n_hi + 1) as f64 * s).min(y1));
    let mut left = 0.0;
    let mut prod = 0.0;
    for (c, u) in col.cells.iter().zip(&col.sampled) {
        let w = overlap(c, a0, b0);
        if w > 0.0 {
            left += w * entropy_flux_x(gas, u)?;
            if u.z != 0.0 {
                let t = gas.temperature(u.p, u.rho)?;
                prod += w * h * gas.q0 * u.rho * gas.rate(t)? * u.z / t;
            }
        }
    }
    let mut right = 0.0;
    for c in &col.exit {
        let w = overlap(c, a1, b1);
        if w > 0.0 {
            right += w * entropy_flux_x(gas, &c.state)?;
        }
    }
    let top_state = if n_hi == 0 { col.wall_state } else { col.cells[(n_hi + n) as usize].state };
    let bottom_state = col.cells[(n_lo - 1 + n) as usize].state;
    let top = h * entropy_flux_edge(gas, &top_state, b)?;
    let bottom = h * entropy_flux_edge(gas, &bottom_state, b)?;
    Ok(right - left + top - bottom - prod)
}

/// Smallest entropy residual over the windows of slab `k`: consecutive blocks
/// of `ENTROPY_WINDOW` diamonds and the whole column.
pub fn entropy_min(field: &SolutionField, k: usize) -> Result<f64> {
    let n = field.columns.get(k).ok_or(Error::MissingWaveData(k))?.cells.len() as i64;
    let mut best = entropy_residual(field, k, -n + 1, 0)?;
    let mut lo = -n + 1;
    while lo <= 0 {
        let hi = (lo + ENTROPY_WINDOW - 1).min(0);
        best = best.min(entropy_residual(field, k, lo, hi)?);
        lo = hi + 1;
    }
    Ok(best)
}

/// One row of the per-column diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub k: usize,
    pub tv: f64,
    /// Functional of slab `k`; absent for the last column.
    pub functional: Option<FunctionalSnapshot>,
    /// Balance of slab `k` (ending at this column); absent for `k = 0`.
    pub slab: Option<SlabResidual>,
    pub entropy_min: Option<f64>,
}

/// Parts of [`diagnose`] to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub functional: bool,
    pub slab: bool,
    pub entropy: bool,
}

impl Selection {
    pub const ALL: Selection = Selection { functional: true, slab: true, entropy: true };
}

pub fn diagnose(field: &SolutionField, w: &FunctionalWeights) -> Result<Vec<DiagnosticsRow>> {
    diagnose_selected(field, w, Selection::ALL)
}

pub fn diagnose_selected(field: &SolutionField, w: &FunctionalWeights, sel: Selection) -> Result<Vec<DiagnosticsRow>> {
    field
        .columns
        .iter()
        .map(|col| {
            let k = col.k;
            Ok(DiagnosticsRow {
                k,
                tv: column_tv(col),
                functional: if sel.functional && col.has_slab() { Some(glimm_functional(field, col, w)?) } else { None },
                slab: if sel.slab && k > 0 { Some(slab_conservation(field, k)?) } else { None },
                entropy_min: if sel.entropy && col.has_slab() { Some(entropy_min(field, k)?) } else { None },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::solve_weak;
    use crate::scheme::{run, SchemeConfig};

    const U1: State = State::new(2.0, 0.0, 1.0, 1.0, 0.0);
    const U2: State = State::new(2.4, 0.0, 1.0, 0.8, 0.0);

    fn cell(lo: f64, hi: f64, s: State) -> Cell {
        Cell { y_lo: lo, y_hi: hi, state: s }
    }

    #[test]
    fn tv_examples() {
        assert_eq!(total_variation(&[cell(0.0, 1.0, U1), cell(1.0, 2.0, U1)]), 0.0);
        let a = State { u: 2.1, ..U1 };
        assert!((total_variation(&[cell(0.0, 1.0, U1), cell(1.0, 2.0, a)]) - 0.1).abs() < 1e-15);
        let tv = total_variation(&[cell(0.0, 1.0, U1), cell(1.0, 2.0, U2)]);
        assert!((tv - 0.6).abs() < 1e-15);
    }

    #[test]
    fn potential_example() {
        assert!((interaction_potential(&[(5, -0.2), (1, -0.1)]) - 0.02).abs() < 1e-17);
        assert_eq!(interaction_potential(&[(1, -0.1), (5, -0.2)]), 0.0);
        assert_eq!(interaction_potential(&[(1, 0.1), (1, 0.2)]), 0.0);
        assert!((interaction_potential(&[(5, -0.1), (5, 0.3)]) - 0.03).abs() < 1e-17);
        assert!((interaction_potential(&[(2, 0.1), (1, 0.3)]) - 0.03).abs() < 1e-17);
    }

    #[test]
    fn boundary_probe_at_background() {
        let g = GasModel::default();
        let b = probe_boundary_coefficients(&g, &U2).unwrap();
        assert!(((b.k_b - b.k_b_closed) / b.k_b_closed).abs() < 1e-3, "{b:?}");
        assert!(b.k_b > 0.0);
        assert!((b.k_b5 - 1.0).abs() < 1e-3, "{b:?}");
        assert!(b.k_b2.abs() < 1e-3 && b.k_b3.abs() < 1e-3);
        assert_eq!(solve_boundary(&g, &U2, 0.0).unwrap().strengths[0], 0.0);
    }

    #[test]
    fn reflection_probe() {
        let g = GasModel::default();
        let (num, closed) = probe_reflection(&g, &U1, &U2).unwrap();
        assert!((num - closed).abs() < 1e-3, "{num} {closed}");
        assert!(num.abs() < 1.0);
        let (num, closed) = probe_reflection(&g, &U1, &U1).unwrap();
        assert_eq!(closed, 0.0);
        assert!(num.abs() < 1e-6);
    }

    #[test]
    fn default_weights_are_consistent() {
        let g = GasModel::default();
        let p = probe_backgrounds(&g, &[U1, U2]).unwrap();
        let w = FunctionalWeights::from_probes(&p).unwrap();
        assert!(w.consistency(&p.contact) < 1.0);
        assert!(w.k2[5] > p.boundary.k_b5);
        w.validate().unwrap();
    }

    #[test]
    fn background_run_is_balanced() {
        let f = run(&SchemeConfig::background(GasModel::default(), U1, U2, -0.5, 0.02, 0.2)).unwrap();
        let (w, _) = default_weights(&f, &WeightOverrides::default()).unwrap();
        for row in diagnose(&f, &w).unwrap() {
            if let Some(s) = row.slab {
                assert!(s.residual.iter().all(|r| r.abs() <= 1e-12), "{s:?}");
            }
            if let Some(e) = row.entropy_min {
                assert!(e.abs() <= 1e-12);
            }
            if let Some(fs) = row.functional {
                assert_eq!(fs.f, fs.l_c);
                assert!(fs.l_c.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shock_window_produces_entropy() {
        let g = GasModel::default();
        let ub = State::new(2.0, -0.05, 1.08, 1.06, 0.0);
        let fan = solve_weak(&g, &U1, &ub).unwrap();
        assert!(fan.strengths[0] < 0.0 || fan.strengths[4] < 0.0);
        // Column of two cells with the jump in the middle, one slab.
        let mut cfg = SchemeConfig::background(g, U1, U2, -0.5, 0.02, 0.04);
        cfg.upstream = crate::scheme::Upstream {
            y0: -0.5,
            pieces: vec![
                crate::scheme::Piece { y_hi: 0.0, state: U2 },
                crate::scheme::Piece { y_hi: -0.5, state: ub },
                crate::scheme::Piece { y_hi: -0.7, state: U1 },
            ],
        };
        cfg.eps = [0.5, 0.5];
        let f = run(&cfg).unwrap();
        let n = f.columns[0].cells.len() as i64;
        let jump = ((-0.7 - f.columns[0].y_wall) / (2.0 * f.s())).round() as i64 + n;
        let r = entropy_residual(&f, 0, jump - n - 2, jump - n + 2).unwrap();
        assert!(r > 0.0, "{r}");
    }
}
