//! Fractional-step random-choice marching in `x`.
//!
//! Column `k` holds cells of height `2s` hanging below the wall vertex `y_k`:
//! cell `n <= -1` covers `(y_k + 2ns, y_k + 2(n+1)s)`. Diamond `n` of slab `k`
//! is centred at `(kh, y_k + 2ns)` and poses the Riemann problem between cells
//! `n-1` and `n`; diamond `0` sits on the wall. At `x = (k+1)h` diamond `n`
//! covers `y_{k+1} + ((2n-1)s, (2n+1)s)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{Family, GasModel, State};
use crate::reaction::react;
use crate::riemann::{solve_boundary, solve_strong_contact, solve_weak};
use crate::theta::{theta_sequence, ThetaSource};
use crate::wall::{WallPolyline, WallSpec};
use crate::waves::{rarefaction_midpoints, FanKind, Side, WaveFan, WaveShape};

/// Subdivisions of each rarefaction fan in the stored exit profiles.
pub const EXIT_SUBDIVISIONS: usize = 8;
/// Default CFL margin over the computed characteristic bound.
pub const DEFAULT_CFL_FACTOR: f64 = 1.25;

/// One constant piece of the upstream data, covering `(next.y_hi, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub y_hi: f64,
    pub state: State,
}

/// Piecewise-constant upstream profile on `(-inf, 0]`, pieces ordered from the
/// wall downwards. The last piece extends to `-inf` and is the far field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Upstream {
    /// Initial ordinate of the strong contact.
    pub y0: f64,
    pub pieces: Vec<Piece>,
}

impl Upstream {
    /// `u2` on `(y0, 0]`, `u1` below.
    pub fn two_state(y0: f64, u1: State, u2: State) -> Self {
        Upstream { y0, pieces: vec![Piece { y_hi: 0.0, state: u2 }, Piece { y_hi: y0, state: u1 }] }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y0 < 0.0) {
            return Err(Error::Config(format!("contact ordinate y0 = {} must be negative", self.y0)));
        }
        if self.pieces.first().map(|p| p.y_hi) != Some(0.0) {
            return Err(Error::Config("upstream profile must start at the wall (y_hi = 0)".into()));
        }
        if self.pieces.windows(2).any(|w| !(w[1].y_hi < w[0].y_hi)) {
            return Err(Error::Config("upstream breakpoints must decrease".into()));
        }
        if !self.pieces.iter().any(|p| p.y_hi == self.y0) {
            return Err(Error::Config(format!("y0 = {} is not an upstream breakpoint", self.y0)));
        }
        Ok(())
    }

    pub fn far_field(&self) -> State {
        self.pieces.last().expect("validated profile").state
    }

    /// Pieces above the contact.
    pub fn upper(&self) -> impl Iterator<Item = &Piece> {
        self.pieces.iter().filter(move |p| p.y_hi > self.y0)
    }

    /// Pieces below the contact.
    pub fn lower(&self) -> impl Iterator<Item = &Piece> {
        self.pieces.iter().filter(move |p| p.y_hi <= self.y0)
    }

    pub fn lowest_breakpoint(&self) -> f64 {
        self.pieces.last().expect("validated profile").y_hi
    }

    pub fn state_at(&self, y: f64) -> State {
        let i = self.pieces.partition_point(|p| p.y_hi >= y);
        self.pieces[i.saturating_sub(1)].state
    }

    /// Exact average of the primitive variables over `(a, b)`.
    pub fn average(&self, a: f64, b: f64) -> State {
        if !(b > a) {
            return self.state_at(b);
        }
        let mut acc = [0.0; 5];
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = self.pieces.get(i + 1).map_or(f64::NEG_INFINITY, |q| q.y_hi);
            let w = p.y_hi.min(b) - lo.max(a);
            if w > 0.0 {
                let s = p.state.to_array();
                for c in 0..5 {
                    acc[c] += w * s[c];
                }
            }
        }
        State::from_array(acc.map(|v| v / (b - a)))
    }

    pub fn sup_z(&self) -> f64 {
        self.pieces.iter().map(|p| p.state.z).fold(0.0, f64::max)
    }

    /// Profile whose deviation from the backgrounds is multiplied by `f`.
    pub fn scaled(&self, f: f64, backgrounds: &[State; 2]) -> Upstream {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let bg = if p.y_hi > self.y0 { backgrounds[1] } else { backgrounds[0] };
                let (s, b) = (p.state.to_array(), bg.to_array());
                Piece { y_hi: p.y_hi, state: State::from_array(std::array::from_fn(|c| b[c] + f * (s[c] - b[c]))) }
            })
            .collect();
        Upstream { y0: self.y0, pieces }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub gas: GasModel,
    pub wall: WallSpec,
    pub upstream: Upstream,
    /// Background states `[U1, U2]` below and above the contact.
    pub backgrounds: [State; 2],
    pub h: f64,
    pub x_max: f64,
    /// `s/h`; computed from the characteristic bound when absent.
    pub cfl_ratio: Option<f64>,
    pub theta: ThetaSource,
    pub seed: u64,
    /// Requested truncation depth; deepened if too shallow.
    pub y_min: Option<f64>,
    /// Confinement radii around `[U1, U2]` (sup norm).
    pub eps: [f64; 2],
    pub delta0: f64,
}

impl SchemeConfig {
    /// Flat wall carrying the exact two-state solution.
    pub fn background(gas: GasModel, u1: State, u2: State, y0: f64, h: f64, x_max: f64) -> Self {
        SchemeConfig {
            gas,
            wall: WallSpec::Flat,
            upstream: Upstream::two_state(y0, u1, u2),
            backgrounds: [u1, u2],
            h,
            x_max,
            cfl_ratio: None,
            theta: ThetaSource::LowDiscrepancy,
            seed: 0,
            y_min: None,
            eps: [0.25, 0.25],
            delta0: 0.1,
        }
    }

    /// Same case with wall deflection and data deviations multiplied by `f`.
    pub fn scaled(&self, f: f64) -> SchemeConfig {
        SchemeConfig {
            wall: self.wall.scaled(f),
            upstream: self.upstream.scaled(f, &self.backgrounds),
            ..self.clone()
        }
    }

    pub fn k_max(&self) -> usize {
        let k = self.x_max / self.h;
        (k - 1e-9).ceil().max(0.0) as usize
    }
}

/// Mesh sizes derived from a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub s: f64,
    pub cfl_ratio: f64,
    /// Smallest admissible `s/h`.
    pub cfl_bound: f64,
    /// Number of cells per column.
    pub n_cells: usize,
    /// `y0 / (2s)`.
    pub n_contact: i64,
    /// Nominal bottom of the first column.
    pub y_min: f64,
}

pub fn plan(cfg: &SchemeConfig) -> Result<(WallPolyline, Geometry)> {
    cfg.gas.validate()?;
    cfg.upstream.validate()?;
    if !(cfg.h > 0.0 && cfg.x_max > 0.0) {
        return Err(Error::Config(format!("need h > 0 and x_max > 0, got {} and {}", cfg.h, cfg.x_max)));
    }
    let wall = WallPolyline::build(&cfg.wall, cfg.h, cfg.k_max())?;
    wall.check_small(cfg.delta0)?;
    let mut speed: f64 = 0.0;
    for s in cfg.upstream.pieces.iter().map(|p| &p.state).chain(cfg.backgrounds.iter()) {
        gas_check(&cfg.gas, s)?;
        let e = cfg.gas.eigenvalues(s)?;
        speed = speed.max(e[0].abs()).max(e[4].abs());
    }
    let bound = speed + wall.max_slope();
    let ratio = cfg.cfl_ratio.unwrap_or(DEFAULT_CFL_FACTOR * bound);
    if !(ratio > bound) {
        return Err(Error::Config(format!("cfl_ratio {ratio} must exceed the characteristic bound {bound}")));
    }
    let y0 = cfg.upstream.y0;
    let half = (y0.abs() / (2.0 * ratio * cfg.h)).floor();
    if half < 1.0 {
        return Err(Error::Config(format!("h = {} too coarse for y0 = {y0}", cfg.h)));
    }
    let s = y0.abs() / (2.0 * half);
    let n_contact = -(half as i64);
    let ratio = s / cfg.h;
    let wall_low = wall.y.iter().copied().fold(0.0, f64::min);
    let data_low = y0.min(cfg.upstream.lowest_breakpoint());
    let need = data_low + wall_low - ratio * cfg.x_max - 4.0 * s;
    let target = cfg.y_min.map_or(need, |y| y.min(need));
    let n_cells = ((-target) / (2.0 * s)).ceil() as usize + 1;
    Ok((
        wall,
        Geometry { s, cfl_ratio: ratio, cfl_bound: bound, n_cells, n_contact, y_min: -2.0 * s * n_cells as f64 },
    ))
}

fn gas_check(gas: &GasModel, s: &State) -> Result<()> {
    if !(s.p > 0.0 && s.rho > 0.0 && s.is_finite()) {
        return Err(Error::Config(format!("non-physical state {s:?}")));
    }
    gas.check_supersonic(s).map(|_| ())
}

/// One constant piece of a column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub y_lo: f64,
    pub y_hi: f64,
    pub state: State,
}

/// Wave strengths of one solved diamond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondWaves {
    pub n: i64,
    pub kind: FanKind,
    pub strengths: [f64; 5],
}

impl DiamondWaves {
    pub fn is_trivial(&self) -> bool {
        self.strengths.iter().all(|a| *a == 0.0)
    }
}

/// Column at `x = kh` together with the slab `[kh, (k+1)h]` it launches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshColumn {
    pub k: usize,
    pub x: f64,
    pub y_wall: f64,
    pub theta: f64,
    /// States at `kh+` (after the reaction step), bottom to top.
    pub cells: Vec<Cell>,
    /// Sampled states at `kh-`, before the reaction step.
    pub sampled: Vec<State>,
    /// Index of the lowest cell above the contact interface.
    pub contact_index: usize,
    /// Tracked contact ordinate.
    pub contact_y: f64,
    /// Nontrivial, boundary and strong-contact diamonds of the slab, bottom to top.
    /// Empty for the last column.
    pub diamonds: Vec<DiamondWaves>,
    /// Piecewise-constant solution at `(k+1)h-`. Empty for the last column.
    pub exit: Vec<Cell>,
    /// Slope of the strong contact in the slab.
    pub contact_slope: f64,
    /// States on either side of the strong contact in the slab.
    pub contact_states: [State; 2],
    /// State along the wall segment in the slab.
    pub wall_state: State,
    /// Largest wave excursion over the lateral diamond half-width.
    pub cfl_usage: f64,
}

impl MeshColumn {
    pub fn has_slab(&self) -> bool {
        !self.exit.is_empty()
    }

    pub fn cell_n(&self, j: usize) -> i64 {
        j as i64 - self.cells.len() as i64
    }

    /// Cells between the contact interface and the wall.
    pub fn upper_cells(&self) -> &[Cell] {
        &self.cells[self.contact_index..]
    }

    pub fn interface_y(&self) -> f64 {
        self.cells[self.contact_index].y_lo
    }

    pub fn sup_z(&self) -> f64 {
        self.cells.iter().map(|c| c.state.z).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionField {
    pub gas: GasModel,
    pub h: f64,
    pub geometry: Geometry,
    pub wall: WallPolyline,
    pub backgrounds: [State; 2],
    pub upstream: Upstream,
    pub theta_source: ThetaSource,
    pub seed: u64,
    pub columns: Vec<MeshColumn>,
    /// Smallest `phi(T)/u` over all reaction steps.
    pub rate_min: f64,
}

impl SolutionField {
    pub fn s(&self) -> f64 {
        self.geometry.s
    }

    /// Contact path `(x, chi)`.
    pub fn contact_path(&self) -> Vec<(f64, f64)> {
        self.columns.iter().map(|c| (c.x, c.contact_y)).collect()
    }

    pub fn z0_sup(&self) -> f64 {
        self.upstream.sup_z()
    }
}

/// Outcome of a run: the columns completed and the error that stopped it.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub field: SolutionField,
    pub error: Option<Error>,
}

pub fn run(cfg: &SchemeConfig) -> Result<SolutionField> {
    let rep = run_report(cfg)?;
    match rep.error {
        Some(e) => Err(e),
        None => Ok(rep.field),
    }
}

/// Runs the scheme; configuration errors are returned directly, marching
/// errors alongside the partial field.
pub fn run_report(cfg: &SchemeConfig) -> Result<RunReport> {
    let (wall, geometry) = plan(cfg)?;
    let k_max = wall.k_max();
    let thetas = theta_sequence(cfg.theta, cfg.seed, k_max + 1);
    let mut field = SolutionField {
        gas: cfg.gas,
        h: cfg.h,
        geometry,
        wall,
        backgrounds: cfg.backgrounds,
        upstream: cfg.upstream.clone(),
        theta_source: cfg.theta,
        seed: cfg.seed,
        columns: Vec::with_capacity(k_max + 1),
        rate_min: f64::INFINITY,
    };
    let mut march = March { cfg, field: &mut field, thetas, prev: None };
    let error = march.go().err();
    Ok(RunReport { field, error })
}

struct Slab {
    fans: Vec<WaveFan>,
    y: f64,
    nc: i64,
}

struct March<'a> {
    cfg: &'a SchemeConfig,
    field: &'a mut SolutionField,
    thetas: Vec<f64>,
    prev: Option<Slab>,
}

impl March<'_> {
    fn go(&mut self) -> Result<()> {
        let k_max = self.field.wall.k_max();
        let mut chi = self.cfg.upstream.y0;
        for k in 0..=k_max {
            let slope = self.column(k, chi)?;
            chi += self.cfg.h * slope;
        }
        Ok(())
    }

    fn cell_geometry(&self, k: usize) -> (f64, usize, f64) {
        let g = &self.field.geometry;
        (self.field.wall.y[k], g.n_cells, g.s)
    }

    /// Builds column `k` and its slab; returns the contact slope.
    fn column(&mut self, k: usize, chi: f64) -> Result<f64> {
        let gas = self.cfg.gas;
        let h = self.cfg.h;
        let (yk, n, s) = self.cell_geometry(k);
        let ni = n as i64;
        let theta = self.thetas[k];
        let far = self.cfg.upstream.far_field();

        let t = (chi - yk) / s;
        let nc = ((t - 1.0) / 2.0).ceil() as i64;
        if nc >= 0 || nc <= -ni {
            return Err(Error::Confinement { k, n: nc, dist: chi - yk, eps: 0.0 });
        }

        let cells_y = |j: usize| (yk + 2.0 * (j as i64 - ni) as f64 * s, yk + 2.0 * (j as i64 - ni + 1) as f64 * s);
        let mut sampled = Vec::with_capacity(n);
        match &self.prev {
            None => {
                for j in 0..n {
                    let (a, b) = cells_y(j);
                    sampled.push(if j == 0 { far } else { self.cfg.upstream.average(a, b) });
                }
            }
            Some(prev) => {
                let cfan = &prev.fans[(prev.nc + ni) as usize];
                for j in 0..n {
                    if j == 0 {
                        sampled.push(far);
                        continue;
                    }
                    let cn = j as i64 - ni;
                    let y = yk + (2.0 * cn as f64 + 1.0 + theta) * s;
                    let m = if theta <= 0.0 { cn } else { cn + 1 };
                    let fan = &prev.fans[(m + ni) as usize];
                    let xi = (y - (prev.y + 2.0 * m as f64 * s)) / h;
                    let st = fan.sample(&gas, xi).map_err(|e| e.at(k, cn))?;
                    let above = match m.cmp(&prev.nc) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => fan.side(xi) == Side::Above,
                    };
                    let want = cn >= nc;
                    sampled.push(match (want, above) {
                        (true, false) => cfan.states[3],
                        (false, true) => cfan.states[0],
                        _ => st,
                    });
                }
            }
        }

        let mut cells = Vec::with_capacity(n);
        for (j, u) in sampled.iter().enumerate() {
            let (a, b) = cells_y(j);
            let cn = j as i64 - ni;
            let t = gas.temperature(u.p, u.rho).map_err(|e| e.at(k, cn))?;
            let rate = gas.rate(t).map_err(|e| e.at(k, cn))? / u.u;
            self.field.rate_min = self.field.rate_min.min(rate);
            let out = react(&gas, u, h).map_err(|e| e.at(k, cn))?;
            let bg = if cn >= nc { 1 } else { 0 };
            let dist = out.state.dist(&self.cfg.backgrounds[bg]);
            if !(dist <= self.cfg.eps[bg]) {
                return Err(Error::Confinement { k, n: cn, dist, eps: self.cfg.eps[bg] });
            }
            cells.push(Cell { y_lo: a, y_hi: b, state: out.state });
        }
        let contact_index = (nc + ni) as usize;

        let mut col = MeshColumn {
            k,
            x: k as f64 * h,
            y_wall: yk,
            theta,
            cells,
            sampled,
            contact_index,
            contact_y: chi,
            diamonds: Vec::new(),
            exit: Vec::new(),
            contact_slope: 0.0,
            contact_states: [self.cfg.backgrounds[0], self.cfg.backgrounds[1]],
            wall_state: self.cfg.backgrounds[1],
            cfl_usage: 0.0,
        };
        if k == self.field.wall.k_max() {
            if let Some(prev) = &self.prev {
                let cfan = &prev.fans[(prev.nc + ni) as usize];
                col.contact_slope = cfan.contact_slope;
                col.contact_states = [cfan.states[0], cfan.states[3]];
            }
            col.wall_state = col.cells[n - 1].state;
            self.field.columns.push(col);
            return Ok(0.0);
        }

        // Riemann problems of slab k.
        let y1 = self.field.wall.y[k + 1];
        let delta = y1 - yk;
        let omega = self.field.wall.segment_angle(k as isize);
        let mut fans = Vec::with_capacity(n + 1);
        fans.push(WaveFan::constant(FanKind::Weak, far));
        for m in (-ni + 1)..=0 {
            let fan = if m == 0 {
                solve_boundary(&gas, &col.cells[n - 1].state, omega)
            } else {
                let ua = &col.cells[(m - 1 + ni) as usize].state;
                let ub = &col.cells[(m + ni) as usize].state;
                if m == nc {
                    solve_strong_contact(&gas, ua, ub)
                } else if ua == ub {
                    Ok(WaveFan::constant(FanKind::Weak, *ua))
                } else {
                    solve_weak(&gas, ua, ub)
                }
            }
            .map_err(|e| e.at(k, m))?;
            if let Some((lo, hi)) = fan.slope_range() {
                let down = (delta - h * lo) / s;
                let up = if m == 0 { 0.0 } else { (h * hi - delta) / s };
                let usage = down.max(up);
                if !(usage < 1.0) {
                    return Err(Error::CflViolation {
                        k,
                        n: m,
                        detail: format!("slopes [{lo:.6}, {hi:.6}], wall step {delta:e}, s = {s:e}"),
                    });
                }
                col.cfl_usage = col.cfl_usage.max(usage);
            }
            if m == 0 || m == nc || fan.strengths.iter().any(|a| *a != 0.0) {
                col.diamonds.push(DiamondWaves { n: m, kind: fan.kind, strengths: fan.strengths });
            }
            fans.push(fan);
        }

        let mut exit: Vec<Cell> = Vec::with_capacity(n + 8);
        for (i, fan) in fans.iter().enumerate() {
            let m = i as i64 - ni;
            let lo = if m == -ni { y1 - 2.0 * ni as f64 * s } else { y1 + (2 * m - 1) as f64 * s };
            let hi = if m == 0 { y1 } else { y1 + (2 * m + 1) as f64 * s };
            let centre = yk + 2.0 * m as f64 * s;
            fan_pieces(&gas, fan, centre, h, lo, hi, &mut exit).map_err(|e| e.at(k, m))?;
        }
        col.exit = merge(exit);

        let cfan = &fans[(nc + ni) as usize];
        col.contact_slope = cfan.contact_slope;
        col.contact_states = [cfan.states[0], cfan.states[3]];
        col.wall_state = fans[n].above;
        let slope = col.contact_slope;
        self.field.columns.push(col);
        self.prev = Some(Slab { fans, y: yk, nc });
        Ok(slope)
    }
}

fn merge(cells: Vec<Cell>) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::with_capacity(cells.len());
    for c in cells {
        match out.last_mut() {
            Some(last) if last.state == c.state => last.y_hi = c.y_hi,
            _ => out.push(c),
        }
    }
    out
}

/// Appends the constant pieces of `fan` (centred at ordinate `centre`) along the
/// line one step `h` downstream, restricted to `[lo, hi]`.
pub fn fan_pieces(gas: &GasModel, fan: &WaveFan, centre: f64, h: f64, lo: f64, hi: f64, out: &mut Vec<Cell>) -> Result<()> {
    let mut segs: Vec<(f64, State)> = Vec::with_capacity(2 * EXIT_SUBDIVISIONS + 4);
    let push_wave = |shape: WaveShape, fam: Family, alpha: f64, before: State, segs: &mut Vec<(f64, State)>| -> Result<()> {
        match shape {
            WaveShape::None => {}
            WaveShape::Shock { slope } => segs.push((slope, before)),
            WaveShape::Rarefaction { lo, hi } => {
                segs.push((lo, before));
                let mids = rarefaction_midpoints(gas, fam, alpha, &before, EXIT_SUBDIVISIONS)?;
                for (i, st) in mids.into_iter().enumerate() {
                    segs.push((lo + (hi - lo) * (i + 1) as f64 / EXIT_SUBDIVISIONS as f64, st));
                }
            }
        }
        Ok(())
    };
    push_wave(fan.wave1, Family::One, fan.strengths[0], fan.below, &mut segs)?;
    segs.push((fan.contact_slope, fan.states[0]));
    push_wave(fan.wave5, Family::Five, fan.strengths[4], fan.states[3], &mut segs)?;
    segs.push((f64::INFINITY, fan.above));
    let mut y = lo;
    for (xi, st) in segs {
        let top = (centre + h * xi).clamp(lo, hi);
        if top > y {
            out.push(Cell { y_lo: y, y_hi: top, state: st });
            y = top;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const U1: State = State::new(2.0, 0.0, 1.0, 1.0, 0.0);
    const U2: State = State::new(2.4, 0.0, 1.0, 0.8, 0.0);

    #[test]
    fn upstream_average_is_exact() {
        let up = Upstream {
            y0: -0.5,
            pieces: vec![
                Piece { y_hi: 0.0, state: State::new(1.0, 0.0, 1.0, 1.0, 0.0) },
                Piece { y_hi: -0.25, state: State::new(3.0, 0.0, 1.0, 1.0, 0.0) },
                Piece { y_hi: -0.5, state: U1 },
            ],
        };
        up.validate().unwrap();
        assert_eq!(up.average(-0.5, 0.0).u, 2.0);
        assert_eq!(up.state_at(-0.25).u, 3.0);
        assert_eq!(up.state_at(-0.2).u, 1.0);
        assert_eq!(up.state_at(-7.0), U1);
    }

    #[test]
    fn sample_point_example() {
        // y_k = 0, s = 0.25, n = -1, theta = 0.5.
        let y = 0.0 + (2.0 * -1.0 + 1.0 + 0.5) * 0.25;
        assert_eq!(y, -0.125);
    }

    #[test]
    fn background_columns_repeat() {
        let cfg = SchemeConfig::background(GasModel::default(), U1, U2, -0.5, 0.02, 0.2);
        let f = run(&cfg).unwrap();
        let c0 = &f.columns[0];
        assert_eq!(f.columns.len(), 11);
        for c in &f.columns {
            for (a, b) in c.cells.iter().zip(&c0.cells) {
                assert!(a.state.dist(&b.state) <= 1e-12);
            }
            assert_eq!(c.contact_y, -0.5);
        }
    }

    #[test]
    fn corner_emits_boundary_wave() {
        let gas = GasModel::default();
        let mut cfg = SchemeConfig::background(gas, U1, U2, -0.5, 0.02, 0.1);
        cfg.wall = WallSpec::Ramp { x0: 0.02, angle: 0.01 };
        let f = run(&cfg).unwrap();
        let d = f.columns[1].diamonds.iter().find(|d| d.n == 0).unwrap();
        let expect = solve_boundary(&gas, &U2, f.wall.segment_angle(1)).unwrap();
        assert!((d.strengths[0] - expect.strengths[0]).abs() < 1e-14);
        assert!(d.strengths[0] > 0.0);
    }

    #[test]
    fn deterministic() {
        let mut cfg = SchemeConfig::background(GasModel::default(), U1, U2, -0.5, 0.02, 0.2);
        cfg.wall = WallSpec::Bump { x0: 0.0, length: 0.2, amplitude: 0.001 };
        cfg.theta = ThetaSource::Pseudorandom;
        cfg.seed = 3;
        assert_eq!(run(&cfg).unwrap(), run(&cfg).unwrap());
    }

    #[test]
    fn cfl_ratio_below_bound_rejected() {
        let mut cfg = SchemeConfig::background(GasModel::default(), U1, U2, -0.5, 0.02, 0.2);
        cfg.cfl_ratio = Some(0.1);
        assert!(matches!(run(&cfg), Err(Error::Config(_))));
    }
}
