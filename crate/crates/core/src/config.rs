//! Run configuration: TOML text with nested sections, validated against the
//! structural hypotheses before anything is computed.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::WeightOverrides;
use crate::gas::{GasModel, State};
use crate::scheme::{Piece, SchemeConfig, Upstream};
use crate::theta::ThetaSource;
use crate::wall::{WallPolyline, WallSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasBlock {
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub r_gas: f64,
    #[serde(default = "one")]
    pub q0: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default)]
    pub eact: f64,
    /// Lower temperature bound `T0 > 0`.
    #[serde(default = "d_t0")]
    pub t0: f64,
}

impl Default for GasBlock {
    fn default() -> Self {
        GasBlock { gamma: d_gamma(), r_gas: 1.0, q0: 1.0, mu: 1.0, eact: 0.0, t0: d_t0() }
    }
}

fn d_gamma() -> f64 {
    1.4
}
fn one() -> f64 {
    1.0
}
fn d_t0() -> f64 {
    1e-3
}
fn d_eps() -> [f64; 2] {
    [0.25, 0.25]
}
fn d_delta0() -> f64 {
    0.1
}
fn yes() -> bool {
    true
}
fn d_tol() -> f64 {
    1e-12
}
fn d_max_iter() -> usize {
    200
}
fn d_dir() -> String {
    "out".into()
}
fn d_window() -> [f64; 2] {
    [1.7, 2.5]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub u: f64,
    #[serde(default)]
    pub v: f64,
    pub p: f64,
    pub rho: f64,
    #[serde(default)]
    pub z: f64,
}

impl From<StateSpec> for State {
    fn from(s: StateSpec) -> State {
        State::new(s.u, s.v, s.p, s.rho, s.z)
    }
}

/// Upstream piece covering `(next y_hi, y_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub y_hi: f64,
    pub u: f64,
    #[serde(default)]
    pub v: f64,
    pub p: f64,
    pub rho: f64,
    #[serde(default)]
    pub z: f64,
}

impl PieceSpec {
    pub fn state(&self) -> State {
        State::new(self.u, self.v, self.p, self.rho, self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpstreamBlock {
    pub y0: f64,
    /// Ordered from the wall downwards; the last piece is the far field.
    pub pieces: Vec<PieceSpec>,
    /// `U_1^(0)`; defaults to the far-field piece.
    #[serde(default)]
    pub background_below: Option<StateSpec>,
    /// `U_2^(0)`; defaults to the lowest piece above `y0`.
    #[serde(default)]
    pub background_above: Option<StateSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeBlock {
    pub h: f64,
    pub x_max: f64,
    #[serde(default)]
    pub cfl_ratio: Option<f64>,
    #[serde(default)]
    pub theta: ThetaSource,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub y_min: Option<f64>,
    #[serde(default = "d_eps")]
    pub eps: [f64; 2],
    #[serde(default = "d_delta0")]
    pub delta0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsBlock {
    #[serde(default)]
    pub weights: WeightOverrides,
    #[serde(default = "yes")]
    pub functional: bool,
    #[serde(default = "yes")]
    pub slab: bool,
    #[serde(default = "yes")]
    pub entropy: bool,
}

impl Default for DiagnosticsBlock {
    fn default() -> Self {
        DiagnosticsBlock { weights: WeightOverrides::default(), functional: true, slab: true, entropy: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "d_dir")]
    pub dir: String,
    /// Significant digits; `None` prints the shortest round-trip form.
    #[serde(default)]
    pub precision: Option<usize>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: d_dir(), precision: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quasi1dBlock {
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_max_iter")]
    pub max_iter: usize,
}

impl Default for Quasi1dBlock {
    fn default() -> Self {
        Quasi1dBlock { tol: d_tol(), max_iter: d_max_iter() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingBlock {
    pub deltas: Vec<f64>,
    /// One step for all rows, or one per row; defaults to `scheme.h`.
    #[serde(default)]
    pub h: Vec<f64>,
    /// Ensemble of theta seeds; defaults to `scheme.seed`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Accepted range of the fitted exponent.
    #[serde(default = "d_window")]
    pub window: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub gas: GasBlock,
    #[serde(default = "flat")]
    pub wall: WallSpec,
    pub upstream: UpstreamBlock,
    pub scheme: SchemeBlock,
    #[serde(default)]
    pub diagnostics: DiagnosticsBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub quasi1d: Quasi1dBlock,
    #[serde(default)]
    pub scaling: Option<ScalingBlock>,
}

fn flat() -> WallSpec {
    WallSpec::Flat
}

/// One failed check, tagged with the hypothesis it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub label: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) {}", self.label, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<Violation>),
}

/// Which smallness conditions to enforce. Base shapes for the scaling study
/// are rescaled before running, so only their structure is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smallness {
    Enforce,
    Skip,
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg = parse_unvalidated(text)?;
    cfg.check(Smallness::Enforce)?;
    Ok(cfg)
}

pub fn parse_unvalidated(text: &str) -> Result<RunConfig, ConfigError> {
    toml::from_str::<RunConfig>(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |sp| line_col(text, sp.start));
        ConfigError::Parse { line, column, message: e.message().to_string() }
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// Hex SHA-256 of the configuration text.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunConfig {
    pub fn gas_model(&self) -> Result<GasModel, ConfigError> {
        let g = &self.gas;
        GasModel::new(g.gamma, g.r_gas, g.q0, g.mu, g.eact).map_err(|e| one_violation("gas", e.to_string()))
    }

    pub fn upstream(&self) -> Upstream {
        let pieces = self.upstream.pieces.iter().map(|p| Piece { y_hi: p.y_hi, state: p.state() }).collect();
        Upstream { y0: self.upstream.y0, pieces }
    }

    pub fn backgrounds(&self) -> [State; 2] {
        let up = &self.upstream;
        let below = up.background_below.map(State::from).or_else(|| up.pieces.last().map(|p| p.state()));
        let above = up
            .background_above
            .map(State::from)
            .or_else(|| up.pieces.iter().rev().find(|p| p.y_hi > up.y0).map(|p| p.state()));
        let nan = State::new(f64::NAN, 0.0, f64::NAN, f64::NAN, 0.0);
        [below.unwrap_or(nan), above.unwrap_or(nan)]
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig, ConfigError> {
        let s = &self.scheme;
        Ok(SchemeConfig {
            gas: self.gas_model()?,
            wall: self.wall.clone(),
            upstream: self.upstream(),
            backgrounds: self.backgrounds(),
            h: s.h,
            x_max: s.x_max,
            cfl_ratio: s.cfl_ratio,
            theta: s.theta,
            seed: s.seed,
            y_min: s.y_min,
            eps: s.eps,
            delta0: s.delta0,
        })
    }

    /// Every violated condition, not just the first.
    pub fn violations(&self, smallness: Smallness) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |label: &str, message: String| out.push(Violation { label: label.into(), message });
        let s = &self.scheme;
        if !(s.h > 0.0 && s.h.is_finite()) {
            push("config", format!("scheme.h must be positive, got {}", s.h));
        }
        if !(s.x_max > 0.0 && s.x_max.is_finite()) {
            push("config", format!("scheme.x_max must be positive, got {}", s.x_max));
        }
        if !(s.delta0 > 0.0) {
            push("config", format!("scheme.delta0 must be positive, got {}", s.delta0));
        }
        if s.eps.iter().any(|e| !(*e > 0.0)) {
            push("config", format!("scheme.eps radii must be positive, got {:?}", s.eps));
        }
        if let Some(r) = s.cfl_ratio {
            if !(r > 0.0) {
                push("config", format!("scheme.cfl_ratio must be positive, got {r}"));
            }
        }
        if let Some(p) = self.output.precision {
            if !(1..=17).contains(&p) {
                push("config", format!("output.precision must lie in 1..=17, got {p}"));
            }
        }
        let gas = match self.gas_model() {
            Ok(g) => Some(g),
            Err(ConfigError::Validation(v)) => {
                out.extend(v);
                None
            }
            Err(_) => None,
        };
        let mut push = |label: &str, message: String| out.push(Violation { label: label.into(), message });

        // H1: wall through the origin, flat at 0+, small slope variation.
        if let Err(e) = self.wall.validate() {
            push("H1", e.to_string());
        } else if s.h > 0.0 && s.x_max > 0.0 {
            let k_max = (s.x_max / s.h - 1e-9).ceil().max(1.0) as usize;
            match WallPolyline::build(&self.wall, s.h, k_max) {
                Err(e) => push("H1", e.to_string()),
                Ok(w) => {
                    let slope0 = (w.y[1] - w.y[0]) / w.h;
                    if slope0.abs() > 1e-12 {
                        push("H1", format!("wall slope at 0+ is {slope0:.6}, must vanish"));
                    }
                    if smallness == Smallness::Enforce {
                        let tv = w.total_turn();
                        if !(tv < s.delta0) {
                            push("H1", format!("TV(g') = {tv:.6} must stay below delta0 = {}", s.delta0));
                        }
                    }
                }
            }
        }

        // H2: supersonic upstream, reactant in [0, 1], vanishing far-field reactant.
        let up = self.upstream();
        if let Err(e) = up.validate() {
            push("H2", e.to_string());
        }
        if let Some(g) = gas {
            for (i, p) in self.upstream.pieces.iter().enumerate() {
                let st = p.state();
                match g.sound_speed(st.p, st.rho) {
                    Ok(c) if st.u > c && c > 0.0 => {}
                    Ok(c) => push("H2", format!("upstream piece {i} is not supersonic: u = {}, c = {c:.6}", st.u)),
                    Err(e) => push("H2", format!("upstream piece {i}: {e}")),
                }
                if !(0.0..=1.0).contains(&st.z) {
                    push("H2", format!("upstream piece {i} has Z = {} outside [0, 1]", st.z));
                }
                // H3: temperature bounded below.
                if !(self.gas.t0 > 0.0) {
                    continue;
                }
                if let Ok(t) = g.temperature(st.p, st.rho) {
                    if !(t >= self.gas.t0) {
                        push("H3", format!("upstream piece {i} has T = {t:.6} below T0 = {}", self.gas.t0));
                    }
                }
            }
            for (name, b) in ["background_below", "background_above"].iter().zip(self.backgrounds()) {
                match g.sound_speed(b.p, b.rho) {
                    Ok(c) if b.u > c => {}
                    _ => push("H2", format!("{name} is not a supersonic state: {b:?}")),
                }
            }
        }
        if !(self.gas.t0 > 0.0) {
            push("H3", format!("T0 must be positive, got {}", self.gas.t0));
        }
        if let Some(last) = self.upstream.pieces.last() {
            if last.z != 0.0 {
                push("H2", format!("far-field reactant must vanish, got Z = {}", last.z));
            }
        }
        if smallness == Smallness::Enforce && up.validate().is_ok() {
            let bg = self.backgrounds();
            let lower: Vec<&Piece> = up.lower().collect();
            let upper: Vec<&Piece> = up.upper().collect();
            let sup = |ps: &[&Piece], b: &State| ps.iter().map(|p| p.state.dist(b)).fold(0.0, f64::max);
            let tv = |ps: &[&Piece]| ps.windows(2).map(|w| w[0].state.l1_dist(&w[1].state)).sum::<f64>();
            let off = sup(&lower, &bg[0]) + sup(&upper, &bg[1]);
            if !(off < s.delta0) {
                push("H2", format!("upstream offset from the backgrounds {off:.6} must stay below delta0 = {}", s.delta0));
            }
            let var = tv(&lower) + tv(&upper);
            if !(var < s.delta0) {
                push("H2", format!("upstream total variation {var:.6} must stay below delta0 = {}", s.delta0));
            }
        }
        if let Some(sc) = &self.scaling {
            if sc.deltas.is_empty() || sc.deltas.iter().any(|d| !(*d >= 0.0)) {
                push("config", "scaling.deltas must be a nonempty list of nonnegative numbers".into());
            }
            if !sc.h.is_empty() && sc.h.len() != 1 && sc.h.len() != sc.deltas.len() {
                push("config", "scaling.h must hold one step or one per delta".into());
            }
        }
        out
    }

    pub fn check(&self, smallness: Smallness) -> Result<(), ConfigError> {
        let v = self.violations(smallness);
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation(v))
        }
    }
}

fn one_violation(label: &str, message: String) -> ConfigError {
    ConfigError::Validation(vec![Violation { label: label.into(), message }])
}
