//! Fermionic Fock-space algebra used as the reference oracle.
//!
//! Occupation words store mode 0 in the least-significant bit. Ladder
//! operators follow the Jordan-Wigner sign convention: acting on mode `p`
//! picks up `(-1)^(number of occupied modes below p)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest mode count accepted by the full-space matrix builder.
pub const MATRIX_MODE_CAP: usize = 14;

/// A computational-basis Fock state on `n` modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    n: usize,
    bits: u64,
}

impl FockState {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > 64 {
            return invalid(format!("mode count {n} outside 1..=64"));
        }
        if n < 64 && bits >> n != 0 {
            return invalid(format!("occupation word {bits:#b} has bits at or above mode {n}"));
        }
        Ok(Self { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn occupied(&self, mode: usize) -> bool {
        (self.bits >> mode) & 1 == 1
    }

    pub fn popcount(&self) -> u32 {
        self.bits.count_ones()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LadderKind {
    Create,
    Annihilate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LadderOp {
    pub kind: LadderKind,
    pub mode: usize,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        Self { kind: LadderKind::Create, mode }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { kind: LadderKind::Annihilate, mode }
    }
}

/// Result of applying ladder operators to a basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignedState {
    Zero,
    State { phase: i8, state: FockState },
}

impl SignedState {
    pub fn phase(&self) -> i8 {
        match self {
            SignedState::Zero => 0,
            SignedState::State { phase, .. } => *phase,
        }
    }
}

/// Product of ladder operators with a real coefficient. Factors are written
/// left to right as in `a†_p a_q` and act on kets right to left.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub factors: Vec<LadderOp>,
    pub coeff: f64,
}

impl Monomial {
    pub fn one_body(p: usize, q: usize, coeff: f64) -> Self {
        Self { factors: vec![LadderOp::create(p), LadderOp::annihilate(q)], coeff }
    }

    pub fn two_body(p: usize, q: usize, r: usize, s: usize, coeff: f64) -> Self {
        Self {
            factors: vec![
                LadderOp::create(p),
                LadderOp::create(q),
                LadderOp::annihilate(r),
                LadderOp::annihilate(s),
            ],
            coeff,
        }
    }

    pub fn number(p: usize, coeff: f64) -> Self {
        Self::one_body(p, p, coeff)
    }

    /// `n_p n_q` written as `a†_p a_p a†_q a_q`.
    pub fn number_pair(p: usize, q: usize, coeff: f64) -> Self {
        Self {
            factors: vec![
                LadderOp::create(p),
                LadderOp::annihilate(p),
                LadderOp::create(q),
                LadderOp::annihilate(q),
            ],
            coeff,
        }
    }

    fn creations(&self) -> usize {
        self.factors.iter().filter(|f| f.kind == LadderKind::Create).count()
    }
}

pub fn apply_ladder(op: LadderOp, s: FockState) -> SignedState {
    debug_assert!(op.mode < s.n);
    let occupied = s.occupied(op.mode);
    let blocked = match op.kind {
        LadderKind::Create => occupied,
        LadderKind::Annihilate => !occupied,
    };
    if blocked {
        return SignedState::Zero;
    }
    let below = s.bits & ((1u64 << op.mode) - 1);
    let phase = if below.count_ones() % 2 == 0 { 1 } else { -1 };
    SignedState::State { phase, state: FockState { n: s.n, bits: s.bits ^ (1 << op.mode) } }
}

/// Applies the factors right to left. The coefficient is not folded into the phase.
pub fn apply_monomial(m: &Monomial, s: FockState) -> SignedState {
    let mut phase = 1i8;
    let mut cur = s;
    for op in m.factors.iter().rev() {
        match apply_ladder(*op, cur) {
            SignedState::Zero => return SignedState::Zero,
            SignedState::State { phase: p, state } => {
                phase *= p;
                cur = state;
            }
        }
    }
    SignedState::State { phase, state: cur }
}

/// Parity of the occupied modes strictly between `p` and `q`.
pub fn phase_exponent(j: FockState, p: usize, q: usize) -> u8 {
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    if hi <= lo + 1 {
        return 0;
    }
    let mask = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    ((j.bits & mask).count_ones() % 2) as u8
}

pub fn flip(j: FockState, p: usize, q: usize) -> FockState {
    FockState { n: j.n, bits: j.bits ^ (1 << p) ^ (1 << q) }
}

/// Closed-form action of `a†_p a†_q a_r a_s` (p<q, r>s): annihilate first,
/// then create, with sign `(-1)^(d(j',p,q) + d(j,r,s))` where `j' = FLIP(j;r,s)`.
pub fn two_body_closed_form(j: FockState, p: usize, q: usize, r: usize, s: usize) -> SignedState {
    if p == q || r == s || !j.occupied(r) || !j.occupied(s) {
        return SignedState::Zero;
    }
    let mid = flip(j, r, s);
    if mid.occupied(p) || mid.occupied(q) {
        return SignedState::Zero;
    }
    let parity = phase_exponent(mid, p, q) + phase_exponent(j, r, s);
    let phase = if parity % 2 == 0 { 1 } else { -1 };
    SignedState::State { phase, state: flip(mid, p, q) }
}

/// Sorted list of all `n`-mode occupation words with exactly `eta` set bits.
pub fn eta_basis(n: usize, eta: usize) -> Vec<u64> {
    (0u64..1u64 << n).filter(|b| b.count_ones() as usize == eta).collect()
}

/// Decay bound used for coefficient truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayModel {
    Exponential { c: f64, alpha: f64 },
    Algebraic { c: f64, gamma: f64 },
    HardCutoff { m: usize },
}

impl DecayModel {
    fn bound(&self, dist: usize) -> f64 {
        match *self {
            DecayModel::Exponential { c, alpha } => c * (-alpha * dist as f64).exp(),
            DecayModel::Algebraic { c, gamma } => {
                if dist == 0 {
                    c
                } else {
                    c / (dist as f64).powf(gamma)
                }
            }
            DecayModel::HardCutoff { m } => {
                if dist <= m {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            DecayModel::Exponential { c, alpha } => c > 0.0 && alpha > 0.0,
            DecayModel::Algebraic { c, gamma } => c > 0.0 && gamma > 0.0,
            DecayModel::HardCutoff { m } => m >= 1,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("decay model parameters out of range: {self:?}"))
        }
    }
}

/// Which one-body pairs are kept by a cutoff `|p - q| <= m`, indexed by structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    General,
    NumberOnly,
    NearestNeighbor(usize),
    TranslationInvariant,
    FactorizedNN,
}

impl Structure {
    pub fn tag(&self) -> String {
        match self {
            Structure::General => "general".into(),
            Structure::NumberOnly => "number-only".into(),
            Structure::NearestNeighbor(m) => format!("nearest-neighbor({m})"),
            Structure::TranslationInvariant => "translation-invariant".into(),
            Structure::FactorizedNN => "factorized-nn".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Structure::General),
            "number-only" => Ok(Structure::NumberOnly),
            "translation-invariant" => Ok(Structure::TranslationInvariant),
            "factorized-nn" => Ok(Structure::FactorizedNN),
            _ => {
                let m = s
                    .strip_prefix("nearest-neighbor(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|m| m.parse::<usize>().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown structure `{s}`")))?;
                Ok(Structure::NearestNeighbor(m))
            }
        }
    }
}

/// Translation-invariant coefficient maps: hopping `T(p-q)`, on-site
/// potential `U_p` and density-density interaction `V(p-q)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TiMaps {
    pub t: BTreeMap<i64, f64>,
    pub u: BTreeMap<usize, f64>,
    pub v: BTreeMap<i64, f64>,
}

impl TiMaps {
    pub fn is_empty(&self) -> bool {
        self.t.is_empty() && self.u.is_empty() && self.v.is_empty()
    }
}

/// A second-quantized Hamiltonian
/// `sum h_pq a†_p a_q + sum h_pqrs a†_p a†_q a_r a_s` (p<q, r>s), plus the
/// translation-invariant maps when the structure calls for them.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub n: usize,
    pub structure: Structure,
    pub one_body: BTreeMap<(usize, usize), f64>,
    pub two_body: BTreeMap<(usize, usize, usize, usize), f64>,
    pub ti: TiMaps,
    pub eta: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    n: usize,
    structure: String,
    #[serde(default)]
    one_body: Vec<(usize, usize, String)>,
    #[serde(default)]
    two_body: Vec<(usize, usize, usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ti: Option<TiFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<usize>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TiFile {
    #[serde(rename = "T", default)]
    t: BTreeMap<String, String>,
    #[serde(rename = "U", default)]
    u: BTreeMap<String, String>,
    #[serde(rename = "V", default)]
    v: BTreeMap<String, String>,
}

fn parse_coeff(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Invalid(format!("bad coefficient `{s}`")))?;
    if !v.is_finite() {
        return invalid(format!("non-finite coefficient `{s}`"));
    }
    Ok(v)
}

fn fmt_coeff(v: f64) -> String {
    format!("{v}")
}

impl HamiltonianSpec {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            structure: Structure::General,
            one_body: BTreeMap::new(),
            two_body: BTreeMap::new(),
            ti: TiMaps::default(),
            eta: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SpecFile = serde_json::from_str(text)?;
        let mut h = HamiltonianSpec::empty(f.n);
        h.structure = Structure::parse(&f.structure)?;
        h.eta = f.eta;
        for (p, q, c) in f.one_body {
            *h.one_body.entry((p, q)).or_insert(0.0) += parse_coeff(&c)?;
        }
        for (p, q, r, s, c) in f.two_body {
            *h.two_body.entry((p, q, r, s)).or_insert(0.0) += parse_coeff(&c)?;
        }
        if let Some(ti) = f.ti {
            for (k, v) in ti.t {
                let d: i64 = k.parse().map_err(|_| Error::Invalid(format!("bad T offset `{k}`")))?;
                h.ti.t.insert(d, parse_coeff(&v)?);
            }
            for (k, v) in ti.u {
                let p: usize = k.parse().map_err(|_| Error::Invalid(format!("bad U mode `{k}`")))?;
                h.ti.u.insert(p, parse_coeff(&v)?);
            }
            for (k, v) in ti.v {
                let d: i64 = k.parse().map_err(|_| Error::Invalid(format!("bad V offset `{k}`")))?;
                h.ti.v.insert(d, parse_coeff(&v)?);
            }
        }
        h.validate()?;
        Ok(h)
    }

    pub fn to_json(&self) -> String {
        let ti = if self.ti.is_empty() {
            None
        } else {
            Some(TiFile {
                t: self.ti.t.iter().map(|(d, v)| (d.to_string(), fmt_coeff(*v))).collect(),
                u: self.ti.u.iter().map(|(p, v)| (p.to_string(), fmt_coeff(*v))).collect(),
                v: self.ti.v.iter().map(|(d, v)| (d.to_string(), fmt_coeff(*v))).collect(),
            })
        };
        let f = SpecFile {
            n: self.n,
            structure: self.structure.tag(),
            one_body: self.one_body.iter().map(|(&(p, q), v)| (p, q, fmt_coeff(*v))).collect(),
            two_body: self
                .two_body
                .iter()
                .map(|(&(p, q, r, s), v)| (p, q, r, s, fmt_coeff(*v)))
                .collect(),
            ti,
            eta: self.eta,
        };
        serde_json::to_string_pretty(&f).expect("spec serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 || n > 64 {
            return invalid(format!("mode count {n} outside 1..=64"));
        }
        for &(p, q) in self.one_body.keys() {
            if p >= n || q >= n {
                return invalid(format!("one-body index ({p},{q}) out of range for n={n}"));
            }
        }
        for &(p, q, r, s) in self.two_body.keys() {
            if p >= n || q >= n || r >= n || s >= n {
                return invalid(format!("two-body index ({p},{q},{r},{s}) out of range"));
            }
            if !(p < q && r > s) {
                return invalid(format!("two-body key ({p},{q},{r},{s}) must satisfy p<q and r>s"));
            }
        }
        let span = n as i64 - 1;
        for &d in self.ti.t.keys().chain(self.ti.v.keys()) {
            if d.abs() > span {
                return invalid(format!("offset {d} outside [-{span}, {span}]"));
            }
        }
        if self.ti.v.contains_key(&0) {
            return invalid("V(0) would be a self-interaction n_p n_p");
        }
        for &p in self.ti.u.keys() {
            if p >= n {
                return invalid(format!("U mode {p} out of range"));
            }
        }
        if let Some(eta) = self.eta {
            if eta > n {
                return invalid(format!("eta {eta} exceeds n {n}"));
            }
        }
        if let Structure::NearestNeighbor(m) = self.structure {
            if m == 0 {
                return invalid("nearest-neighbor range must be at least 1");
            }
        }
        Ok(())
    }

    /// One-body coefficients with the translation-invariant `T` and `U` maps expanded.
    pub fn one_body_dense(&self) -> BTreeMap<(usize, usize), f64> {
        let mut out = self.one_body.clone();
        let n = self.n as i64;
        for (&d, &v) in &self.ti.t {
            for p in 0..n {
                let q = p - d;
                if (0..n).contains(&q) {
                    *out.entry((p as usize, q as usize)).or_insert(0.0) += v;
                }
            }
        }
        for (&p, &v) in &self.ti.u {
            *out.entry((p, p)).or_insert(0.0) += v;
        }
        out.retain(|_, v| *v != 0.0);
        out
    }

    /// Two-body coefficients with the `V` map expanded into `n_p n_q` keys `(p,q,q,p)`.
    pub fn two_body_dense(&self) -> BTreeMap<(usize, usize, usize, usize), f64> {
        let mut out = self.two_body.clone();
        let n = self.n as i64;
        for (&d, &v) in &self.ti.v {
            for p in 0..n {
                let q = p - d;
                if (0..n).contains(&q) && q != p {
                    let (a, b) = (p.min(q) as usize, p.max(q) as usize);
                    *out.entry((a, b, b, a)).or_insert(0.0) += v;
                }
            }
        }
        out.retain(|_, v| *v != 0.0);
        out
    }

    /// True when every two-body term is a density-density product `n_p n_q`.
    pub fn two_body_is_number_pairs(&self) -> bool {
        self.two_body_dense().keys().all(|&(p, q, r, s)| r == q && s == p)
    }

    /// `V_pq` map of the number-pair terms, keyed with p<q.
    pub fn number_pairs(&self) -> BTreeMap<(usize, usize), f64> {
        self.two_body_dense()
            .into_iter()
            .filter(|&((p, q, r, s), _)| r == q && s == p)
            .map(|((p, q, _, _), v)| ((p, q), v))
            .collect()
    }

    pub fn terms(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> =
            self.one_body_dense().iter().map(|(&(p, q), &h)| Monomial::one_body(p, q, h)).collect();
        out.extend(
            self.two_body_dense().iter().map(|(&(p, q, r, s), &h)| Monomial::two_body(p, q, r, s, h)),
        );
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms().iter().map(|m| m.coeff.abs()).fold(0.0, f64::max)
    }

    pub fn is_number_conserving(&self) -> bool {
        self.terms().iter().all(|m| 2 * m.creations() == m.factors.len())
    }
}

/// Real sparse matrix keyed by (row, column).
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub dim: usize,
    pub entries: BTreeMap<(usize, usize), f64>,
}

impl SparseMatrix {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries.get(&(r, c)).copied().unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (&(r, c), &v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|(&(r, c), &v)| self.get(c, r) == v)
    }
}

pub fn build_matrix_full(h: &HamiltonianSpec) -> Result<SparseMatrix> {
    if h.n > MATRIX_MODE_CAP {
        return Err(Error::SizeCap { what: "mode count", got: h.n, cap: MATRIX_MODE_CAP });
    }
    let terms = h.terms();
    let dim = 1usize << h.n;
    let mut entries = BTreeMap::new();
    for col in 0..dim as u64 {
        let j = FockState { n: h.n, bits: col };
        for m in &terms {
            if let SignedState::State { phase, state } = apply_monomial(m, j) {
                *entries.entry((state.bits as usize, col as usize)).or_insert(0.0) +=
                    phase as f64 * m.coeff;
            }
        }
    }
    entries.retain(|_, v| *v != 0.0);
    Ok(SparseMatrix { dim, entries })
}

/// Restriction of the full matrix to the weight-`eta` sector, basis in
/// ascending order of the occupation word.
pub fn build_matrix_eta(h: &HamiltonianSpec, eta: usize) -> Result<DMatrix<f64>> {
    if eta > h.n {
        return invalid(format!("eta {eta} exceeds n {}", h.n));
    }
    if !h.is_number_conserving() {
        return invalid("Hamiltonian does not conserve particle number");
    }
    let full = build_matrix_full(h)?;
    let basis = eta_basis(h.n, eta);
    let mut m = DMatrix::zeros(basis.len(), basis.len());
    for (ci, &c) in basis.iter().enumerate() {
        for (ri, &r) in basis.iter().enumerate() {
            m[(ri, ci)] = full.get(r as usize, c as usize);
        }
    }
    Ok(m)
}

/// Outcome of [`truncate_coeffs`].
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub spec: HamiltonianSpec,
    /// Largest retained `|p - q|`; `None` when every term was dropped.
    pub cutoff: Option<usize>,
    /// Upper bound on the dropped one-body mass implied by the decay model.
    pub dropped_bound: f64,
    /// Actual dropped mass `sum |h_pq|` over removed terms.
    pub dropped_mass: f64,
    /// The constant `C'` in `cutoff = C' ln(n / eps)`; only meaningful for exponential decay.
    pub c_prime: f64,
}

/// Drops one-body terms with `|p - q|` above the smallest cutoff whose decay
/// tail bound fits inside `eps`.
pub fn truncate_coeffs(h: &HamiltonianSpec, d: DecayModel, eps: f64) -> Result<Truncation> {
    if eps.is_nan() || eps <= 0.0 {
        return invalid("truncation budget must be positive");
    }
    d.validate()?;
    let n = h.n;
    let dense = h.one_body_dense();
    let total: f64 = dense.values().map(|v| v.abs()).sum();
    let tail = |m: usize| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                let dist = p.abs_diff(q);
                if dist > m {
                    s += d.bound(dist);
                }
            }
        }
        s
    };
    let (cutoff, bound) = if eps >= total {
        (None, total)
    } else {
        let mut m = 0;
        while m + 1 < n && tail(m) > eps {
            m += 1;
        }
        (Some(m), tail(m))
    };
    let mut spec = h.clone();
    spec.one_body = dense.clone();
    spec.ti.t.clear();
    spec.ti.u.clear();
    let mut dropped = 0.0;
    spec.one_body.retain(|&(p, q), v| {
        let keep = matches!(cutoff, Some(m) if p.abs_diff(q) <= m);
        if !keep {
            dropped += v.abs();
        }
        keep
    });
    let c_prime = match cutoff {
        Some(m) if (n as f64 / eps) > 1.0 => m as f64 / (n as f64 / eps).ln(),
        _ => 0.0,
    };
    Ok(Truncation { spec, cutoff, dropped_bound: bound, dropped_mass: dropped, c_prime })
}

/// Synthetic model families used for desk-scale experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SyntheticModel {
    /// Hopping `T(±1) = -t` along an open chain of modes; on-site
    /// potential `u` on the even (first-of-pair) modes.
    Hubbard { t: f64, u: f64 },
    /// Hubbard plus nearest-neighbor density interaction `V(±1) = v`.
    ExtendedHubbard { t: f64, u: f64, v: f64 },
    /// Decaying translation-invariant hopping and density interaction.
    TiFactorized,
    /// General one-body coefficients damped by a decay model.
    Localized(DecayModel),
}

/// Rounds to the dyadic grid of spacing 2^-6 so that generated specs are
/// exactly representable at moderate `m_b`.
fn dyadic(x: f64) -> f64 {
    (x * 64.0).round() / 64.0
}

pub fn gen_synthetic(model: SyntheticModel, n: usize, seed: u64) -> Result<HamiltonianSpec> {
    if n < 2 || !n.is_power_of_two() || n > 64 {
        return invalid(format!("synthetic models need n a power of two in 2..=64, got {n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = HamiltonianSpec::empty(n);
    match model {
        SyntheticModel::Hubbard { t, u } | SyntheticModel::ExtendedHubbard { t, u, .. } => {
            h.structure = Structure::TranslationInvariant;
            h.ti.t.insert(1, -t);
            h.ti.t.insert(-1, -t);
            for p in (0..n).step_by(2) {
                if u != 0.0 {
                    h.ti.u.insert(p, u);
                }
            }
            if let SyntheticModel::ExtendedHubbard { v, .. } = model {
                h.ti.v.insert(1, v);
                h.ti.v.insert(-1, v);
            }
        }
        SyntheticModel::TiFactorized => {
            h.structure = Structure::TranslationInvariant;
            for d in 0..n as i64 {
                let mag = 0.5 * (-(d as f64)).exp();
                let tv = dyadic(mag * rng.gen_range(0.5..1.0));
                if tv != 0.0 {
                    h.ti.t.insert(d, tv);
                    h.ti.t.insert(-d, tv);
                }
                if d > 0 {
                    let vv = dyadic(mag * rng.gen_range(0.5..1.0));
                    if vv != 0.0 {
                        h.ti.v.insert(d, vv);
                        h.ti.v.insert(-d, vv);
                    }
                }
            }
        }
        SyntheticModel::Localized(decay) => {
            decay.validate()?;
            h.structure = Structure::General;
            for p in 0..n {
                for q in p..n {
                    let b = decay.bound(p.abs_diff(q)).min(1.0);
                    let v = dyadic(b * rng.gen_range(-1.0..1.0));
                    if v != 0.0 {
                        h.one_body.insert((p, q), v);
                        h.one_body.insert((q, p), v);
                    }
                }
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(n: usize, bits: u64) -> FockState {
        FockState::new(n, bits).unwrap()
    }

    #[test]
    fn ladder_examples() {
        // |110> means j0=1, j1=1, j2=0.
        let j = fs(3, 0b011);
        assert_eq!(
            apply_ladder(LadderOp::annihilate(0), j),
            SignedState::State { phase: 1, state: fs(3, 0b010) }
        );
        assert_eq!(
            apply_ladder(LadderOp::create(2), fs(3, 0b010)),
            SignedState::State { phase: -1, state: fs(3, 0b110) }
        );
        assert_eq!(apply_ladder(LadderOp::create(1), fs(3, 0b010)), SignedState::Zero);
    }

    #[test]
    fn monomial_example_matches_hand_derivation() {
        let m = Monomial::one_body(2, 0, 1.0);
        assert_eq!(
            apply_monomial(&m, fs(3, 0b011)),
            SignedState::State { phase: -1, state: fs(3, 0b110) }
        );
        assert_eq!(phase_exponent(fs(3, 0b011), 2, 0), 1);
        assert_eq!(flip(fs(3, 0b011), 2, 0), fs(3, 0b110));
        assert_eq!(flip(fs(4, 0b1010), 0, 1), fs(4, 0b1001));
    }

    #[test]
    fn phase_exponent_corner_cases() {
        for bits in 0..16 {
            let j = fs(4, bits);
            assert_eq!(phase_exponent(j, 1, 2), 0);
            assert_eq!(phase_exponent(j, 3, 3), 0);
        }
        assert_eq!(phase_exponent(fs(4, 0), 0, 3), 0);
    }

    #[test]
    fn sign_consistency_exhaustive() {
        for n in 1..=6 {
            for bits in 0..1u64 << n {
                let j = fs(n, bits);
                for p in 0..n {
                    for q in 0..n {
                        if let SignedState::State { phase, state } =
                            apply_monomial(&Monomial::one_body(p, q, 1.0), j)
                        {
                            let expect = if phase_exponent(j, p, q) == 0 { 1 } else { -1 };
                            assert_eq!(phase, expect);
                            if p != q {
                                assert_eq!(state, flip(j, p, q));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn number_operator_fixes_occupied_states() {
        let j = fs(4, 0b0110);
        assert_eq!(
            apply_monomial(&Monomial::number(2, 1.0), j),
            SignedState::State { phase: 1, state: j }
        );
        assert_eq!(apply_monomial(&Monomial::number(0, 1.0), j), SignedState::Zero);
    }

    #[test]
    fn small_matrices() {
        let mut h = HamiltonianSpec::empty(1);
        h.one_body.insert((0, 0), 1.0);
        let m = build_matrix_full(&h).unwrap();
        assert_eq!(m.to_dense(), DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]));

        let mut h = HamiltonianSpec::empty(2);
        h.one_body.insert((0, 1), 1.0);
        h.one_body.insert((1, 0), 1.0);
        let m = build_matrix_full(&h).unwrap();
        assert_eq!(m.get(0b01, 0b10), 1.0);
        assert_eq!(m.get(0b10, 0b01), 1.0);
        assert_eq!(m.entries.len(), 2);
    }

    #[test]
    fn eta_matrix_is_principal_submatrix() {
        let h = gen_synthetic(SyntheticModel::Localized(DecayModel::Exponential { c: 1.0, alpha: 0.5 }), 4, 3)
            .unwrap();
        let full = build_matrix_full(&h).unwrap().to_dense();
        let sub = build_matrix_eta(&h, 2).unwrap();
        assert_eq!(sub.nrows(), 6);
        let basis = eta_basis(4, 2);
        for (a, &r) in basis.iter().enumerate() {
            for (b, &c) in basis.iter().enumerate() {
                assert_eq!(sub[(a, b)], full[(r as usize, c as usize)]);
            }
        }
        let zero = build_matrix_eta(&h, 0).unwrap();
        assert_eq!(zero.shape(), (1, 1));
        assert_eq!(zero[(0, 0)], 0.0);
    }

    #[test]
    fn hubbard_two_site_single_particle_block() {
        let h = gen_synthetic(SyntheticModel::Hubbard { t: 1.0, u: 2.0 }, 2, 0).unwrap();
        let m = build_matrix_eta(&h, 1).unwrap();
        // basis |10> (mode 0) then |01> (mode 1)
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 0.0]));
    }

    #[test]
    fn spec_json_round_trip_and_rejects_unknown_fields() {
        let mut h = gen_synthetic(SyntheticModel::ExtendedHubbard { t: 1.0, u: 2.0, v: 0.5 }, 4, 1).unwrap();
        h.two_body.insert((0, 1, 3, 2), 0.25);
        h.eta = Some(2);
        let text = h.to_json();
        assert_eq!(HamiltonianSpec::from_json(&text).unwrap(), h);
        let bad = r#"{"n":2,"structure":"general","extra":1}"#;
        assert!(HamiltonianSpec::from_json(bad).is_err());
        let bad_order = r#"{"n":4,"structure":"general","two_body":[[1,0,3,2,"1"]]}"#;
        assert!(HamiltonianSpec::from_json(bad_order).is_err());
    }

    #[test]
    fn truncation_examples() {
        let h = gen_synthetic(SyntheticModel::Localized(DecayModel::Exponential { c: 1.0, alpha: 1.0 }), 8, 5)
            .unwrap();
        let t = truncate_coeffs(&h, DecayModel::HardCutoff { m: 1 }, 1e-3).unwrap();
        assert_eq!(t.cutoff, Some(1));
        assert!(t.spec.one_body.keys().all(|&(p, q)| p.abs_diff(q) <= 1));

        let total: f64 = h.one_body.values().map(|v| v.abs()).sum();
        let t = truncate_coeffs(&h, DecayModel::Exponential { c: 1.0, alpha: 1.0 }, total).unwrap();
        assert!(t.spec.one_body.is_empty());
    }

    #[test]
    fn exponential_cutoff_matches_geometric_tail() {
        // Independent oracle: the pair-count weighted tail is bounded by the
        // geometric series 2n C e^{-a(M+1)} / (1 - e^{-a}).
        let n = 16;
        let eps = 1e-3;
        let decay = DecayModel::Exponential { c: 1.0, alpha: 1.0 };
        let h = gen_synthetic(SyntheticModel::Localized(decay), n, 2).unwrap();
        let t = truncate_coeffs(&h, decay, eps).unwrap();
        let m = t.cutoff.unwrap();
        let mut exact_tail = 0.0;
        for d in (m + 1)..n {
            exact_tail += 2.0 * (n - d) as f64 * (-(d as f64)).exp();
        }
        assert!(exact_tail <= eps);
        let mut prev_tail = 0.0;
        for d in m..n {
            prev_tail += 2.0 * (n - d) as f64 * (-(d as f64)).exp();
        }
        assert!(prev_tail > eps);
        let geometric = 2.0 * n as f64 * (-((m + 1) as f64)).exp() / (1.0 - (-1.0f64).exp());
        assert!(exact_tail <= geometric);
        assert_eq!(m, 9);
        assert!((t.c_prime - 9.0 / (16.0f64 / 1e-3).ln()).abs() < 1e-12);
    }

    #[test]
    fn generators_are_deterministic_and_structured() {
        let a = gen_synthetic(SyntheticModel::TiFactorized, 8, 11).unwrap();
        let b = gen_synthetic(SyntheticModel::TiFactorized, 8, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.ti.t.len() < 2 * 8);
        let hub = gen_synthetic(SyntheticModel::Hubbard { t: 1.0, u: 2.0 }, 4, 0).unwrap();
        assert_eq!(hub.ti.t.get(&1), Some(&-1.0));
        assert_eq!(hub.ti.t.get(&-1), Some(&-1.0));
        assert_eq!(hub.ti.u.get(&0), Some(&2.0));
        assert_eq!(hub.ti.u.get(&1), None);
        assert!(gen_synthetic(SyntheticModel::TiFactorized, 6, 0).is_err());
    }
}
