//! Polytropic reacting gas: thermodynamics, eigenstructure and fluxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative margin below which `u - c` counts as sonic.
pub const SONIC_TOL: f64 = 1e-10;

/// Primitive state `(u, v, p, rho, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub rho: f64,
    pub z: f64,
}

impl State {
    pub const fn new(u: f64, v: f64, p: f64, rho: f64, z: f64) -> Self {
        State { u, v, p, rho, z }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.u, self.v, self.p, self.rho, self.z]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        State::new(a[0], a[1], a[2], a[3], a[4])
    }

    /// `self + t * d`.
    pub fn offset(self, t: f64, d: &[f64; 5]) -> Self {
        State::new(
            self.u + t * d[0],
            self.v + t * d[1],
            self.p + t * d[2],
            self.rho + t * d[3],
            self.z + t * d[4],
        )
    }

    /// Sup-norm distance.
    pub fn dist(&self, o: &State) -> f64 {
        let a = self.to_array();
        let b = o.to_array();
        (0..5).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    }

    /// Sum of componentwise absolute differences.
    pub fn l1_dist(&self, o: &State) -> f64 {
        let a = self.to_array();
        let b = o.to_array();
        (0..5).map(|i| (a[i] - b[i]).abs()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Flow angle slope `v/u`.
    pub fn slope(&self) -> f64 {
        self.v / self.u
    }
}

/// Genuinely nonlinear families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    One,
    Five,
}

impl Family {
    fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Five => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Family::One => 1,
            Family::Five => 5,
        }
    }
}

/// Gas and reaction constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
    pub r_gas: f64,
    pub cv: f64,
    pub q0: f64,
    pub mu: f64,
    pub eact: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel::new(1.4, 1.0, 1.0, 1.0, 0.0).expect("default gas is valid")
    }
}

impl GasModel {
    pub fn new(gamma: f64, r_gas: f64, q0: f64, mu: f64, eact: f64) -> Result<Self> {
        let g = GasModel { gamma, r_gas, cv: r_gas / (gamma - 1.0), q0, mu, eact };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma > 1.0
            && self.r_gas > 0.0
            && self.q0 > 0.0
            && self.mu > 0.0
            && self.eact >= 0.0
            && self.gamma.is_finite()
            && self.r_gas.is_finite();
        if !ok {
            return Err(Error::Config(format!(
                "gas constants must satisfy gamma>1, R>0, q0>0, mu>0, E>=0 (got {self:?})"
            )));
        }
        let cv = self.r_gas / (self.gamma - 1.0);
        if (self.cv - cv).abs() > 4.0 * f64::EPSILON * cv {
            return Err(Error::Config(format!("cv = {} but R/(gamma-1) = {cv}", self.cv)));
        }
        Ok(())
    }

    fn check_pr(p: f64, rho: f64) -> Result<()> {
        if p > 0.0 && rho > 0.0 && p.is_finite() && rho.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("need p > 0 and rho > 0, got p = {p}, rho = {rho}")))
        }
    }

    pub fn sound_speed(&self, p: f64, rho: f64) -> Result<f64> {
        Self::check_pr(p, rho)?;
        Ok((self.gamma * p / rho).sqrt())
    }

    pub fn temperature(&self, p: f64, rho: f64) -> Result<f64> {
        Self::check_pr(p, rho)?;
        Ok(p / (self.r_gas * rho))
    }

    /// Arrhenius rate `T^mu exp(-E/(R T))`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("rate needs T > 0, got {t}")));
        }
        Ok(t.powf(self.mu) * (-self.eact / (self.r_gas * t)).exp())
    }

    /// `cv ln(p rho^-gamma)`.
    pub fn entropy(&self, s: &State) -> Result<f64> {
        Self::check_pr(s.p, s.rho)?;
        Ok(self.cv * (s.p.ln() - self.gamma * s.rho.ln()))
    }

    /// Returns `c` after checking `u - c >= SONIC_TOL * c`.
    pub fn check_supersonic(&self, s: &State) -> Result<f64> {
        let c = self.sound_speed(s.p, s.rho)?;
        if !(s.u - c >= SONIC_TOL * c) {
            return Err(Error::Sonic { u: s.u, c });
        }
        Ok(c)
    }

    pub fn total_enthalpy(&self, s: &State) -> f64 {
        0.5 * (s.u * s.u + s.v * s.v) + self.gamma * s.p / ((self.gamma - 1.0) * s.rho)
    }

    /// Ordered characteristic slopes `(lambda_1, v/u, v/u, v/u, lambda_5)`.
    pub fn eigenvalues(&self, s: &State) -> Result<[f64; 5]> {
        self.check_supersonic(s)?;
        let l1 = self.lambda_unchecked(Family::One, s);
        let l5 = self.lambda_unchecked(Family::Five, s);
        let w = s.slope();
        Ok([l1, w, w, w, l5])
    }

    pub fn lambda(&self, fam: Family, s: &State) -> Result<f64> {
        self.check_supersonic(s)?;
        Ok(self.lambda_unchecked(fam, s))
    }

    pub(crate) fn lambda_unchecked(&self, fam: Family, s: &State) -> f64 {
        let c2 = self.gamma * s.p / s.rho;
        let q = s.u * s.u + s.v * s.v - c2;
        (s.u * s.v + fam.sign() * (c2 * q).sqrt()) / (s.u * s.u - c2)
    }

    /// `lambda_i` and its gradient in `(u, v, p, rho, z)`.
    pub(crate) fn lambda_grad(&self, fam: Family, s: &State) -> (f64, [f64; 5]) {
        let sg = fam.sign();
        let cc = self.gamma * s.p / s.rho;
        let c = cc.sqrt();
        let q = s.u * s.u + s.v * s.v - cc;
        let sq = q.sqrt();
        let d = s.u * s.u - cc;
        let lam = (s.u * s.v + sg * c * sq) / d;
        let nu = s.v + sg * c * s.u / sq;
        let nv = s.u + sg * c * s.v / sq;
        let nc = sg * (q - cc) / (2.0 * c * sq);
        let lu = (nu - 2.0 * s.u * lam) / d;
        let lv = nv / d;
        let lc = (nc + lam) / d;
        (lam, [lu, lv, lc * self.gamma / s.rho, -lc * cc / s.rho, 0.0])
    }

    /// Unnormalized eigenvector `(-l, 1, rho(l u - v), rho(l u - v)/c^2, 0)`.
    fn rhat(&self, lam: f64, s: &State) -> [f64; 5] {
        let cc = self.gamma * s.p / s.rho;
        let w = s.rho * (lam * s.u - s.v);
        [-lam, 1.0, w, w / cc, 0.0]
    }

    /// Right eigenvector scaled so that `r . grad(lambda) = 1`; also returns kappa.
    pub(crate) fn normalized_r(&self, fam: Family, s: &State) -> ([f64; 5], f64) {
        let (lam, g) = self.lambda_grad(fam, s);
        let r = self.rhat(lam, s);
        let dot: f64 = (0..5).map(|i| g[i] * r[i]).sum();
        let kappa = 1.0 / dot;
        (r.map(|x| kappa * x), kappa)
    }

    pub fn kappa(&self, fam: Family, s: &State) -> Result<f64> {
        self.check_supersonic(s)?;
        let (_, k) = self.normalized_r(fam, s);
        if !k.is_finite() {
            return Err(Error::Domain("kappa is not finite".into()));
        }
        Ok(k)
    }

    /// Right eigenvector of family `i` in 1..=5 (normalized for 1 and 5).
    pub fn eigenvector(&self, i: usize, s: &State) -> Result<[f64; 5]> {
        self.check_supersonic(s)?;
        Ok(match i {
            1 => self.normalized_r(Family::One, s).0,
            5 => self.normalized_r(Family::Five, s).0,
            2 => [s.u, s.v, 0.0, 0.0, 0.0],
            3 => [0.0, 0.0, 0.0, s.rho, 0.0],
            4 => [0.0, 0.0, 0.0, 0.0, 1.0],
            _ => return Err(Error::Range(format!("wave family {i} not in 1..=5"))),
        })
    }

    /// x-direction flux `W(U)`.
    pub fn flux_w(&self, s: &State) -> [f64; 5] {
        let m = s.rho * s.u;
        [m, m * s.u + s.p, m * s.v, m * self.total_enthalpy(s), m * s.z]
    }

    /// y-direction flux `H(U)`.
    pub fn flux_h(&self, s: &State) -> [f64; 5] {
        let n = s.rho * s.v;
        [n, n * s.u, n * s.v + s.p, n * self.total_enthalpy(s), n * s.z]
    }

    /// Reaction source `G(U)`.
    pub fn source_g(&self, s: &State) -> Result<[f64; 5]> {
        let t = self.temperature(s.p, s.rho)?;
        let w = s.rho * self.rate(t)? * s.z;
        Ok([0.0, 0.0, 0.0, self.q0 * w, -w])
    }

    /// `(W, H, G)` after domain checks.
    pub fn fluxes(&self, s: &State) -> Result<([f64; 5], [f64; 5], [f64; 5])> {
        Self::check_pr(s.p, s.rho)?;
        Ok((self.flux_w(s), self.flux_h(s), self.source_g(s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn sound_speed_examples() {
        let g = gas();
        assert!((g.sound_speed(1.0, 1.0).unwrap() - 1.4f64.sqrt()).abs() < 1e-15);
        assert!((g.sound_speed(1.0 / 1.4, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((g.sound_speed(2.0, 0.5).unwrap() - 5.6f64.sqrt()).abs() < 1e-15);
        assert!(matches!(g.sound_speed(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(g.sound_speed(1.0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn temperature_and_rate_examples() {
        let g = gas();
        assert_eq!(g.temperature(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(g.temperature(2.0, 4.0).unwrap(), 0.5);
        let air = GasModel::new(1.4, 287.0, 1.0, 1.0, 0.0).unwrap();
        assert!((air.temperature(1.0, 1.0).unwrap() - 1.0 / 287.0).abs() < 1e-15);
        assert_eq!(g.rate(1.0).unwrap(), 1.0);
        let ge = GasModel::new(1.4, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((ge.rate(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let gh = GasModel::new(1.4, 1.0, 1.0, 0.5, 0.0).unwrap();
        assert!((gh.rate(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(g.rate(0.0).is_err());
    }

    #[test]
    fn entropy_examples() {
        let g = gas();
        assert_eq!(g.entropy(&State::new(2.0, 0.0, 1.0, 1.0, 0.0)).unwrap(), 0.0);
        let r: f64 = 1.7;
        let s = g.entropy(&State::new(2.0, 0.0, r.powf(1.4), r, 0.0)).unwrap();
        assert!(s.abs() < 1e-14);
        let g1 = GasModel { cv: 1.0, r_gas: 0.4, ..gas() };
        let s = g1.entropy(&State::new(2.0, 0.0, std::f64::consts::E, 1.0, 0.0)).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_examples() {
        let g = gas();
        let s = State::new(2.0, 0.0, 1.0, 1.0, 0.0);
        let l = g.eigenvalues(&s).unwrap();
        let expected = 1.4f64.sqrt() * 2.6f64.sqrt() / 2.6;
        assert!((l[4] - expected).abs() < 1e-15);
        assert!((l[4] - 0.733799).abs() < 1e-6);
        assert!((l[0] + l[4]).abs() < 1e-15);
        assert_eq!(l[1], 0.0);
        let s = State::new(2.0, 0.2, 1.0, 1.0, 0.0);
        let l = g.eigenvalues(&s).unwrap();
        assert!((l[2] - 0.1).abs() < 1e-15);
        assert!(l[0] < 0.1 && 0.1 < l[4]);
        let sub = State::new(1.0, 0.0, 1.0, 1.0, 0.0);
        assert!(matches!(g.eigenvalues(&sub), Err(Error::Sonic { .. })));
    }

    #[test]
    fn flux_examples() {
        let g = gas();
        let s = State::new(1.0, 0.0, 1.0, 1.0, 0.0);
        let w = g.flux_w(&s);
        let expect = [1.0, 2.0, 0.0, 4.0, 0.0];
        for i in 0..5 {
            assert!((w[i] - expect[i]).abs() < 1e-15);
        }
        assert_eq!(g.source_g(&s).unwrap(), [0.0; 5]);
        let s = State::new(1.0, 1.0, 1.0, 1.0, 0.3);
        let (w, h, _) = g.fluxes(&s).unwrap();
        assert_eq!(w[0], h[0]);
        assert_eq!(w[1], h[2]);
        assert_eq!(w[2], h[1]);
        assert_eq!(w[3], h[3]);
        assert_eq!(w[4], h[4]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = gas();
        let s = State::new(2.3, 0.17, 1.1, 0.9, 0.2);
        for fam in [Family::One, Family::Five] {
            let (_, grad) = g.lambda_grad(fam, &s);
            let a = s.to_array();
            for j in 0..4 {
                let h = 1e-6;
                let mut ap = a;
                let mut am = a;
                ap[j] += h;
                am[j] -= h;
                let fd = (g.lambda_unchecked(fam, &State::from_array(ap))
                    - g.lambda_unchecked(fam, &State::from_array(am)))
                    / (2.0 * h);
                assert!((fd - grad[j]).abs() < 1e-8, "{fam:?} {j}: {fd} vs {}", grad[j]);
            }
        }
    }

    #[test]
    fn kappa_positive_and_symmetric_at_background() {
        let g = gas();
        for s in [State::new(2.0, 0.0, 1.0, 1.0, 0.0), State::new(2.4, 0.0, 1.0, 0.8, 0.0)] {
            let k1 = g.kappa(Family::One, &s).unwrap();
            let k5 = g.kappa(Family::Five, &s).unwrap();
            assert!(k1 > 0.0);
            assert!((k1 - k5).abs() < 1e-14);
        }
    }

    #[test]
    fn validation_rejects_bad_constants() {
        assert!(GasModel::new(1.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(GasModel::new(1.4, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(GasModel::new(1.4, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(GasModel::new(1.4, 1.0, 1.0, 1.0, -1.0).is_err());
        let mut g = gas();
        g.cv = 1.0;
        assert!(g.validate().is_err());
    }
}
