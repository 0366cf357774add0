//! Vibronic Hamiltonian parameters, grids and the initial wavepacket.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Reduced Planck constant in eV·fs.
pub const HBAR: f64 = 0.658_211_956_9;

const PRESET_24D: &str = include_str!("../data/pyrazine_24d_placeholder.json");

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid time grid: {0}")]
    Time(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Invalid(msg.into()))
}

/// D2h irreducible representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    Ag,
    B1g,
    B2g,
    B3g,
    Au,
    B1u,
    B2u,
    B3u,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::Ag,
        Symmetry::B1g,
        Symmetry::B2g,
        Symmetry::B3g,
        Symmetry::Au,
        Symmetry::B1u,
        Symmetry::B2u,
        Symmetry::B3u,
    ];

    // bit 2: parity (u), bits 0-1: D2 label (A=0, B1=1, B2=2, B3=3); the group law is xor
    fn code(self) -> u8 {
        match self {
            Symmetry::Ag => 0,
            Symmetry::B1g => 1,
            Symmetry::B2g => 2,
            Symmetry::B3g => 3,
            Symmetry::Au => 4,
            Symmetry::B1u => 5,
            Symmetry::B2u => 6,
            Symmetry::B3u => 7,
        }
    }

    fn from_code(c: u8) -> Self {
        Self::ALL[c as usize]
    }

    /// Direct product of two irreps.
    pub fn product(self, other: Symmetry) -> Symmetry {
        Self::from_code(self.code() ^ other.code())
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub label: String,
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa2: Option<f64>,
    pub symmetry: Symmetry,
}

impl ModeParams {
    pub fn is_tuning(&self) -> bool {
        self.kappa1.is_some()
    }

    /// Linear coupling on electronic state `s` (0 = S1, 1 = S2).
    pub fn kappa(&self, s: usize) -> f64 {
        let k = if s == 0 { self.kappa1 } else { self.kappa2 };
        k.unwrap_or(0.0)
    }
}

/// Bilinear on-diagonal term gamma_s * Q_l * Q_m on state s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearDiag {
    pub l: String,
    pub m: String,
    pub gamma1: f64,
    pub gamma2: f64,
}

/// Bilinear inter-state term mu * Q_l * Q_m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearOff {
    pub l: String,
    pub m: String,
    pub mu: f64,
}

fn default_hbar() -> f64 {
    HBAR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VibronicModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub modes: Vec<ModeParams>,
    pub lambda: f64,
    pub delta: f64,
    #[serde(default)]
    pub bilinear_diag: Vec<BilinearDiag>,
    #[serde(default)]
    pub bilinear_off: Vec<BilinearOff>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

/// Resolved bilinear term with mode indices instead of labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerm {
    pub l: usize,
    pub m: usize,
    /// (S1, S2) coefficients; equal for the off-diagonal term.
    pub coeff: [f64; 2],
}

fn mode(label: &str, omega: f64, kappa: Option<(f64, f64)>, symmetry: Symmetry) -> ModeParams {
    ModeParams {
        label: label.to_string(),
        omega,
        kappa1: kappa.map(|k| k.0),
        kappa2: kappa.map(|k| k.1),
        symmetry,
    }
}

impl VibronicModel {
    /// Four-mode linear vibronic pyrazine model.
    pub fn pyrazine_4d() -> Self {
        VibronicModel {
            name: Some("pyrazine-4d".into()),
            notes: None,
            modes: vec![
                mode("nu6a", 0.0740, Some((-0.0964, 0.1194)), Symmetry::Ag),
                mode("nu1", 0.1273, Some((0.0470, 0.2012)), Symmetry::Ag),
                mode("nu9a", 0.1568, Some((0.1594, 0.0484)), Symmetry::Ag),
                mode("nu10a", 0.0936, None, Symmetry::B1g),
            ],
            lambda: 0.1825,
            delta: 0.4617,
            bilinear_diag: vec![],
            bilinear_off: vec![],
            hbar: HBAR,
        }
    }

    /// Two-mode reduction (nu6a + nu10a) of the four-mode model.
    pub fn pyrazine_2d() -> Self {
        let mut m = Self::pyrazine_truncated(2);
        m.name = Some("pyrazine-2d".into());
        m
    }

    /// The first `d - 1` tuning modes of the four-mode model plus the coupling mode, d in 1..=4.
    pub fn pyrazine_truncated(d: usize) -> Self {
        let mut m = Self::pyrazine_4d();
        let keep = d.clamp(1, 4);
        m.name = Some(format!("pyrazine-{keep}d"));
        let coupling = m.modes[3].clone();
        m.modes.truncate(keep - 1);
        m.modes.push(coupling);
        m
    }

    pub fn preset(name: &str) -> Result<Self, ModelError> {
        match name {
            "pyrazine-4d" | "4d" => Ok(Self::pyrazine_4d()),
            "pyrazine-2d" | "2d" => Ok(Self::pyrazine_2d()),
            "pyrazine-24d" | "24d" => load_model(PRESET_24D),
            other => Err(ModelError::UnknownPreset(other.to_string())),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_index(&self, label: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.label == label)
    }

    /// Index of the mode carrying the lambda coupling (the B1g mode), if any.
    pub fn coupling_mode(&self) -> Option<usize> {
        self.modes.iter().position(|m| m.symmetry == Symmetry::B1g)
    }

    /// Constant electronic offset of state `s`: -delta for S1, +delta for S2.
    pub fn offset(&self, s: usize) -> f64 {
        if s == 0 {
            -self.delta
        } else {
            self.delta
        }
    }

    pub fn diag_pairs(&self) -> Vec<PairTerm> {
        self.bilinear_diag
            .iter()
            .map(|b| PairTerm {
                l: self.mode_index(&b.l).expect("validated"),
                m: self.mode_index(&b.m).expect("validated"),
                coeff: [b.gamma1, b.gamma2],
            })
            .collect()
    }

    pub fn off_pairs(&self) -> Vec<PairTerm> {
        self.bilinear_off
            .iter()
            .map(|b| PairTerm {
                l: self.mode_index(&b.l).expect("validated"),
                m: self.mode_index(&b.m).expect("validated"),
                coeff: [b.mu, b.mu],
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.modes.is_empty() {
            return invalid("model has no modes");
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return invalid("hbar must be positive");
        }
        if !self.lambda.is_finite() || !self.delta.is_finite() {
            return invalid("lambda and delta must be finite");
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.omega > 0.0 && m.omega.is_finite()) {
                return invalid(format!("mode '{}': omega must be positive", m.label));
            }
            if m.kappa1.is_some() != m.kappa2.is_some() {
                return invalid(format!("mode '{}': kappa1 and kappa2 must both be given or both omitted", m.label));
            }
            if m.is_tuning() && m.symmetry != Symmetry::Ag {
                return invalid(format!(
                    "mode '{}': linear intra-state coupling requires Ag symmetry, got {}",
                    m.label, m.symmetry
                ));
            }
            if self.modes[..i].iter().any(|o| o.label == m.label) {
                return invalid(format!("duplicate mode label '{}'", m.label));
            }
        }
        let b1g = self.modes.iter().filter(|m| m.symmetry == Symmetry::B1g).count();
        if self.lambda != 0.0 && b1g != 1 {
            return invalid(format!("lambda coupling needs exactly one B1g mode, found {b1g}"));
        }
        let pair = |l: &str, m: &str| -> Result<(Symmetry, Symmetry), ModelError> {
            let li = self
                .mode_index(l)
                .ok_or_else(|| ModelError::Invalid(format!("bilinear term references unknown mode '{l}'")))?;
            let mi = self
                .mode_index(m)
                .ok_or_else(|| ModelError::Invalid(format!("bilinear term references unknown mode '{m}'")))?;
            if li == mi {
                return invalid(format!("bilinear term pairs mode '{l}' with itself"));
            }
            Ok((self.modes[li].symmetry, self.modes[mi].symmetry))
        };
        for b in &self.bilinear_diag {
            let (a, c) = pair(&b.l, &b.m)?;
            if a != c {
                return invalid(format!(
                    "on-diagonal bilinear pair ({}, {}) has symmetries {a} x {c}; both must match",
                    b.l, b.m
                ));
            }
        }
        for b in &self.bilinear_off {
            let (a, c) = pair(&b.l, &b.m)?;
            if a.product(c) != Symmetry::B1g {
                return invalid(format!(
                    "off-diagonal bilinear pair ({}, {}) has product symmetry {a} x {c} = {}, expected B1g",
                    b.l,
                    b.m,
                    a.product(c)
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Diagonal potential of state `s` at the coordinates `q` (one per mode).
    pub fn diag_potential(&self, s: usize, q: &[f64]) -> f64 {
        let mut v = self.offset(s);
        for (m, &x) in self.modes.iter().zip(q) {
            v += m.kappa(s) * x + 0.5 * m.omega * x * x;
        }
        for b in &self.bilinear_diag {
            let (l, m) = (self.mode_index(&b.l).unwrap(), self.mode_index(&b.m).unwrap());
            v += if s == 0 { b.gamma1 } else { b.gamma2 } * q[l] * q[m];
        }
        v
    }

    /// Inter-state coupling at coordinates `q`.
    pub fn coupling(&self, q: &[f64]) -> f64 {
        let mut c = match self.coupling_mode() {
            Some(k) => self.lambda * q[k],
            None => 0.0,
        };
        for b in &self.bilinear_off {
            let (l, m) = (self.mode_index(&b.l).unwrap(), self.mode_index(&b.m).unwrap());
            c += b.mu * q[l] * q[m];
        }
        c
    }
}

/// Parse and validate a JSON model description.
pub fn load_model(config_text: &str) -> Result<VibronicModel, ModelError> {
    let model: VibronicModel = serde_json::from_str(config_text)?;
    model.validate()?;
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// dQ = L/N, the last point stops one spacing short of q_max.
    Periodic,
    /// dQ = L/(N-1), both bounds are grid points.
    #[default]
    Endpoint,
}

impl std::str::FromStr for Convention {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "periodic" => Ok(Convention::Periodic),
            "endpoint" => Ok(Convention::Endpoint),
            _ => Err(ModelError::Grid(format!("unknown convention '{s}'"))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Periodic => "periodic",
            Convention::Endpoint => "endpoint",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_qubits: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub convention: Convention,
}

impl GridSpec {
    pub fn new(n_qubits: usize, q_min: f64, q_max: f64, convention: Convention) -> Result<Self, ModelError> {
        let g = GridSpec { n_qubits, q_min, q_max, convention };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_qubits < 2 || self.n_qubits > 20 {
            return Err(ModelError::Grid(format!("n must be in 2..=20, got {}", self.n_qubits)));
        }
        if !(self.q_min < self.q_max) || !self.q_min.is_finite() || !self.q_max.is_finite() {
            return Err(ModelError::Grid(format!("need q_min < q_max, got [{}, {}]", self.q_min, self.q_max)));
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn spacing(&self) -> f64 {
        let n = self.n_points() as f64;
        match self.convention {
            Convention::Periodic => (self.q_max - self.q_min) / n,
            Convention::Endpoint => (self.q_max - self.q_min) / (n - 1.0),
        }
    }

    pub fn point(&self, idx: usize) -> f64 {
        self.q_min + idx as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points()).map(|i| self.point(i)).collect()
    }

    /// Signed DFT index for output slot `k`: k for k < N/2, k - N otherwise.
    pub fn signed_index(&self, k: usize) -> i64 {
        let n = self.n_points();
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Conjugate momenta in DFT output order.
    pub fn momenta(&self) -> Vec<f64> {
        let n = self.n_points();
        let scale = 2.0 * PI / (n as f64 * self.spacing());
        (0..n).map(|k| scale * self.signed_index(k) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
    pub sample_stride: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize, sample_stride: usize) -> Result<Self, ModelError> {
        let t = TimeGrid { dt, n_steps, sample_stride };
        t.validate()?;
        Ok(t)
    }

    /// `n_steps` steps covering `total_fs`.
    pub fn from_total(total_fs: f64, n_steps: usize, sample_stride: usize) -> Result<Self, ModelError> {
        if n_steps == 0 {
            return Err(ModelError::Time("n_steps must be at least 1".into()));
        }
        Self::new(total_fs / n_steps as f64, n_steps, sample_stride)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(ModelError::Time(format!("dt must be positive, got {}", self.dt)));
        }
        if self.n_steps < 1 {
            return Err(ModelError::Time("n_steps must be at least 1".into()));
        }
        if self.sample_stride < 1 || self.sample_stride > self.n_steps {
            return Err(ModelError::Time(format!(
                "sample_stride must be in 1..={}, got {}",
                self.n_steps, self.sample_stride
            )));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    pub fn n_samples(&self) -> usize {
        self.n_steps / self.sample_stride + 1
    }

    pub fn sample_interval(&self) -> f64 {
        self.dt * self.sample_stride as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Position,
    Momentum,
}

/// Amplitudes over (s, i_1, ..., i_d) in row-major order, electronic index slowest.
///
/// The flat index equals the computational-basis index of the circuit layout
/// (mode 0 most significant, electronic qubit above all mode registers).
#[derive(Debug, Clone, PartialEq)]
pub struct Wavepacket {
    pub n_modes: usize,
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
    pub basis: Basis,
}

impl Wavepacket {
    pub fn zeros(n_modes: usize, n_qubits: usize) -> Self {
        let len = 2usize << (n_modes * n_qubits);
        Wavepacket { n_modes, n_qubits, amplitudes: vec![Complex64::new(0.0, 0.0); len], basis: Basis::Position }
    }

    /// Grid points per electronic sector.
    pub fn sector_len(&self) -> usize {
        1usize << (self.n_modes * self.n_qubits)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        for a in &mut self.amplitudes {
            *a /= n;
        }
    }

    /// Population of electronic state s (0 = S1, 1 = S2).
    pub fn population(&self, s: usize) -> f64 {
        let len = self.sector_len();
        self.amplitudes[s * len..(s + 1) * len].iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn overlap(&self, other: &Wavepacket) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Grid index of mode k at flat index i.
    pub fn mode_index(&self, flat: usize, k: usize) -> usize {
        let shift = (self.n_modes - 1 - k) * self.n_qubits;
        (flat >> shift) & ((1 << self.n_qubits) - 1)
    }
}

/// Normalized product of exp(-Q^2/2) Gaussians on the S2 sector.
pub fn initial_state(model: &VibronicModel, grid: &GridSpec) -> Wavepacket {
    let d = model.n_modes();
    let mut psi = Wavepacket::zeros(d, grid.n_qubits);
    let g1 = gaussian_amplitudes(grid);
    let len = psi.sector_len();
    for i in 0..len {
        let mut a = 1.0;
        for k in 0..d {
            a *= g1[psi.mode_index(i, k)];
        }
        psi.amplitudes[len + i] = Complex64::new(a, 0.0);
    }
    psi.normalize();
    psi
}

/// Normalized single-mode ground-state amplitudes on the grid.
pub fn gaussian_amplitudes(grid: &GridSpec) -> Vec<f64> {
    let mut g: Vec<f64> = grid.points().iter().map(|q| (-0.5 * q * q).exp()).collect();
    let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut g {
        *x /= n;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let m = VibronicModel::preset("pyrazine-4d").unwrap();
        assert_eq!(m.lambda, 0.1825);
        assert_eq!(m.delta, 0.4617);
        let om: Vec<f64> = m.modes.iter().map(|x| x.omega).collect();
        assert_eq!(om, vec![0.0740, 0.1273, 0.1568, 0.0936]);
        let k1: Vec<f64> = m.modes.iter().filter_map(|x| x.kappa1).collect();
        let k2: Vec<f64> = m.modes.iter().filter_map(|x| x.kappa2).collect();
        assert_eq!(k1, vec![-0.0964, 0.0470, 0.1594]);
        assert_eq!(k2, vec![0.1194, 0.2012, 0.0484]);
        assert!(!m.modes[3].is_tuning());
        assert_eq!(m.coupling_mode(), Some(3));
        assert!(m.bilinear_diag.is_empty() && m.bilinear_off.is_empty());
    }

    #[test]
    fn harmonic_sum_rule() {
        let m = VibronicModel::pyrazine_4d();
        let s: f64 = m.modes.iter().map(|x| x.omega / 2.0).sum();
        assert!((s - 0.22585).abs() < 1e-12);
    }

    #[test]
    fn symmetry_products() {
        use Symmetry::*;
        assert_eq!(Ag.product(B1g), B1g);
        assert_eq!(B2g.product(B3g), B1g);
        assert_eq!(Au.product(B1u), B1g);
        assert_eq!(B2u.product(B3u), B1g);
        assert_eq!(Ag.product(B2g), B2g);
        for s in Symmetry::ALL {
            assert_eq!(s.product(s), Ag);
        }
    }

    #[test]
    fn rejects_bad_offdiag_pair() {
        let mut m = VibronicModel::pyrazine_4d();
        m.modes.push(mode("x", 0.1, None, Symmetry::B2g));
        m.bilinear_off.push(BilinearOff { l: "nu6a".into(), m: "x".into(), mu: 0.01 });
        let err = load_model(&m.to_json()).unwrap_err().to_string();
        assert!(err.contains("B1g"), "{err}");
    }

    #[test]
    fn rejects_bad_diag_pair_and_kappa() {
        let mut m = VibronicModel::pyrazine_4d();
        m.bilinear_diag.push(BilinearDiag { l: "nu6a".into(), m: "nu10a".into(), gamma1: 0.0, gamma2: 0.0 });
        assert!(m.validate().is_err());
        let mut m = VibronicModel::pyrazine_4d();
        m.modes[3].kappa1 = Some(0.1);
        m.modes[3].kappa2 = Some(0.1);
        assert!(m.validate().is_err());
        let mut m = VibronicModel::pyrazine_4d();
        m.modes[0].omega = 0.0;
        assert!(m.validate().is_err());
        assert!(load_model("{ not json").is_err());
        assert!(load_model(r#"{"modes": []}"#).is_err());
    }

    #[test]
    fn round_trip() {
        for name in ["pyrazine-4d", "pyrazine-2d", "pyrazine-24d"] {
            let m = VibronicModel::preset(name).unwrap();
            let back = load_model(&m.to_json()).unwrap();
            assert_eq!(m, back);
        }
    }

    #[test]
    fn placeholder_24d_shape() {
        let m = VibronicModel::preset("pyrazine-24d").unwrap();
        assert_eq!(m.n_modes(), 24);
        let count = |s: Symmetry| m.modes.iter().filter(|x| x.symmetry == s).count();
        use Symmetry::*;
        let counts: Vec<usize> = [Ag, B1g, B2g, B3g, Au, B1u, B2u, B3u].iter().map(|&s| count(s)).collect();
        assert_eq!(counts, vec![5, 1, 2, 4, 2, 4, 4, 2]);
        assert!(m.bilinear_diag.iter().all(|b| b.gamma1 == 0.0 && b.gamma2 == 0.0));
        assert!(m.bilinear_off.iter().all(|b| b.mu == 0.0));
        assert_eq!(m.bilinear_off.len(), 29);
    }

    #[test]
    fn grid_spacings() {
        let p = GridSpec::new(4, -5.0, 5.0, Convention::Periodic).unwrap();
        assert!((p.spacing() - 0.625).abs() < 1e-15);
        let e = GridSpec::new(3, -5.0, 5.0, Convention::Endpoint).unwrap();
        assert!((e.spacing() - 10.0 / 7.0).abs() < 1e-15);
        assert!((e.points()[7] - 5.0).abs() < 1e-12);
        let s: f64 = p.momenta().iter().sum();
        // the unpaired -N/2 frequency is the only thing left over
        assert!((s + PI / p.spacing()).abs() < 1e-12);
        assert!(GridSpec::new(1, -5.0, 5.0, Convention::Periodic).is_err());
        assert!(GridSpec::new(3, 5.0, -5.0, Convention::Periodic).is_err());
    }

    #[test]
    fn time_grid_stride() {
        let t = TimeGrid::from_total(264.0, 2048, 16).unwrap();
        assert!((t.sample_interval() - 2.0625).abs() < 1e-12);
        assert_eq!(t.n_samples(), 129);
        assert!(TimeGrid::new(0.1, 10, 0).is_err());
        assert!(TimeGrid::new(-0.1, 10, 1).is_err());
    }

    #[test]
    fn initial_state_on_s2() {
        let m = VibronicModel::pyrazine_4d();
        let g = GridSpec::new(3, -5.0, 5.0, Convention::Endpoint).unwrap();
        let psi = initial_state(&m, &g);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert_eq!(psi.population(0), 0.0);
        assert!((psi.population(1) - 1.0).abs() < 1e-12);
    }
}
