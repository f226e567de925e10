//! Complete block-encoding circuits per Hamiltonian class, their declared
//! `(alpha, m, eps)` triples, and verification against the fermionic
//! reference matrix.
//!
//! Every encoder follows the same contract: with all non-system qubits
//! prepared in and projected onto |0>, the system block equals `H / alpha`
//! up to the declared quantization budget.

mod eta;
mod full;
mod lcu;
mod structured;
mod tables;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lcu::lcu_combine;

use crate::circuit::{count_resources, project_column, Builder, Circuit, CostModel, Qubit, ResourceReport, Role};
use crate::error::{invalid, Error, Result};
use crate::fock::{build_matrix_full, eta_basis, HamiltonianSpec, Structure};
use crate::oracles::lookup::{direct_sampling, select_swap};
use crate::oracles::LookupTable;
use tables::{Ctx, QTable};

/// Largest mode count accepted by [`verify`].
pub const VERIFY_MODE_CAP: usize = 8;

/// Encoder family. Each tag names the diffusion pattern and therefore the
/// subnormalization `alpha_class`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    /// General one-body terms over all `(p, q)`; `alpha = n^2`.
    OneBody,
    /// Diagonal `U_p n_p` only; `alpha = n`.
    Number,
    /// General two-body terms over all `(p, q, r, s)`; `alpha = n^4`.
    TwoBody,
    /// Density-density `V_pq n_p n_q`; `alpha = n^2`.
    Factorized,
    /// One-body plus two-body, combined by LCU.
    General,
    /// One-body terms on the `eta`-particle sector; `alpha = n * eta`.
    EtaOneBody,
    /// Number terms on the `eta`-particle sector; `alpha = eta`.
    EtaNumber,
    /// Density-density terms on the `eta`-particle sector; `alpha = eta^2`.
    EtaFactorized,
    /// Hopping within distance `M`; `alpha = 2 n M`.
    Nn,
    /// Hopping within distance `M` on the sector; `alpha = 2 M eta`.
    NnEta,
    /// Translation-invariant maps; hopping part has `alpha = n^2`.
    Ti,
    /// Translation-invariant maps on the sector; hopping part has `alpha = n * eta`.
    TiEta,
}

impl Class {
    pub const ALL: [Class; 12] = [
        Class::OneBody,
        Class::Number,
        Class::TwoBody,
        Class::Factorized,
        Class::General,
        Class::EtaOneBody,
        Class::EtaNumber,
        Class::EtaFactorized,
        Class::Nn,
        Class::NnEta,
        Class::Ti,
        Class::TiEta,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Class::OneBody => "one-body",
            Class::Number => "number",
            Class::TwoBody => "two-body",
            Class::Factorized => "factorized",
            Class::General => "general",
            Class::EtaOneBody => "eta-one-body",
            Class::EtaNumber => "eta-number",
            Class::EtaFactorized => "eta-factorized",
            Class::Nn => "nn",
            Class::NnEta => "nn-eta",
            Class::Ti => "ti",
            Class::TiEta => "ti-eta",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Class::ALL.into_iter().find(|c| c.tag() == s).ok_or_else(|| Error::UnknownClass(s.to_string()))
    }

    pub fn is_eta(&self) -> bool {
        matches!(self, Class::EtaOneBody | Class::EtaNumber | Class::EtaFactorized | Class::NnEta | Class::TiEta)
    }
}

/// Index arithmetic at the chain ends for the nearest-neighbor encoders.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Indices wrap modulo `n`; wrapped terms are read from the spec like any other.
    #[default]
    Torus,
    /// Wrapped branches carry a zero coefficient.
    Open,
}

impl Boundary {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(Boundary::Torus),
            "open" => Ok(Boundary::Open),
            _ => invalid(format!("unknown boundary `{s}` (expected torus or open)")),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Boundary::Torus => "torus",
            Boundary::Open => "open",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaChoice {
    /// Grid-optimal λ for each table.
    Auto,
    /// Requested λ, rounded up to a power of two and clamped to the table length.
    Fixed(usize),
}

#[derive(Clone, Debug)]
pub struct EncodeOptions {
    pub m_b: usize,
    pub lambda: LambdaChoice,
    /// Particle number for the sector classes; falls back to the spec's `eta`.
    pub eta: Option<usize>,
    /// Hopping range for the nearest-neighbor classes; falls back to the spec structure.
    pub m: Option<usize>,
    pub boundary: Boundary,
    /// Replacement tables, consumed in build order. Used to re-check a stored manifest.
    pub tables: Option<Vec<LookupTable>>,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { m_b: 5, lambda: LambdaChoice::Auto, eta: None, m: None, boundary: Boundary::Torus, tables: None }
    }
}

/// Bookkeeping that travels with an encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingMeta {
    pub class: Class,
    pub n: usize,
    pub eta: Option<usize>,
    /// Length and λ of the first table.
    pub l: usize,
    pub lambda: usize,
    pub m_b: usize,
    pub m: Option<usize>,
    /// Branch-count subnormalization before prescaling (summed over LCU parts).
    pub alpha_class: f64,
    /// Coefficient prescale of the first table.
    pub prescale: f64,
    /// Table entries that some Hamiltonian term reads.
    pub used_entries: usize,
    /// Distinct words among the used entries.
    pub distinct_words: usize,
    pub boundary: Boundary,
    pub tables: Vec<LookupTable>,
    /// `(class, alpha)` of each LCU part; a single entry for a plain encoder.
    pub parts: Vec<(Class, f64)>,
}

#[derive(Clone, Debug)]
pub struct BlockEncoding {
    pub circuit: Circuit,
    /// Every qubit projected onto |0>: all qubits outside the system register.
    pub anc_mask: Vec<Qubit>,
    pub alpha: f64,
    pub eps_budget: f64,
    pub system_qubits: Vec<Qubit>,
    /// The operator this circuit encodes.
    pub reference: HamiltonianSpec,
    pub meta: EncodingMeta,
}

impl BlockEncoding {
    fn assemble(b: Builder, sys: Vec<Qubit>, reference: HamiltonianSpec, meta: EncodingMeta, alpha: f64, eps: f64) -> Self {
        let circuit = b.finish();
        let anc_mask = (0..circuit.qubit_count).filter(|q| !sys.contains(q)).collect();
        BlockEncoding { circuit, anc_mask, alpha, eps_budget: eps, system_qubits: sys, reference, meta }
    }

    /// The verification mode matching the encoder family.
    pub fn default_mode(&self) -> VerifyMode {
        match self.meta.eta {
            Some(e) if self.meta.class.is_eta() => VerifyMode::EtaSector(e),
            _ => VerifyMode::FullSpace,
        }
    }
}

/// Registers shared by every amplitude oracle: the looked-up word, the
/// sampling register and its flag.
pub(crate) struct AmpRegs {
    pub lookup: Vec<Qubit>,
    pub samp: Vec<Qubit>,
    pub flag: Qubit,
}

impl AmpRegs {
    pub fn new(b: &mut Builder, m_b: usize) -> Self {
        AmpRegs {
            lookup: b.register("lookup", m_b, Role::Lookup),
            samp: b.register("sampling", m_b - 1, Role::Sampling),
            flag: b.qubit("sampling_flag", Role::Sampling),
        }
    }

    /// Lookup, direct sampling, lookup again: leaves the coefficient as the
    /// |0>-projected amplitude with the lookup register clean.
    pub fn sample(&self, b: &mut Builder, t: &LookupTable, addr: &[Qubit]) {
        select_swap(b, t, addr, &self.lookup);
        direct_sampling(b, &self.lookup, &self.samp, self.flag);
        select_swap(b, t, addr, &self.lookup);
    }
}

pub(crate) fn diffuse(b: &mut Builder, qs: &[Qubit]) {
    for &q in qs {
        b.h(q);
    }
}

pub(crate) fn log2_n(n: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return invalid(format!("encoders need n a power of two >= 2, got {n}"));
    }
    Ok(n.trailing_zeros() as usize)
}

pub(crate) fn check_m_b(m_b: usize) -> Result<()> {
    if !(2..=32).contains(&m_b) {
        return invalid(format!("m_b {m_b} outside 2..=32"));
    }
    Ok(())
}

/// Metadata for a single-table encoder.
pub(crate) fn meta_for(class: Class, n: usize, eta: Option<usize>, m: Option<usize>, ctx: &Ctx, q: &QTable, alpha_class: f64) -> EncodingMeta {
    EncodingMeta {
        class,
        n,
        eta,
        l: q.table.l,
        lambda: q.table.lambda,
        m_b: ctx.opts.m_b,
        m,
        alpha_class,
        prescale: q.scale,
        used_entries: q.used_entries,
        distinct_words: q.distinct_words,
        boundary: ctx.opts.boundary,
        tables: Vec::new(),
        parts: vec![(class, alpha_class * q.scale)],
    }
}

/// Splits a spec into its one-body off-diagonal, diagonal and two-body pieces.
pub(crate) struct Pieces {
    pub hop: BTreeMap<(usize, usize), f64>,
    pub diag: BTreeMap<usize, f64>,
    pub two: BTreeMap<(usize, usize, usize, usize), f64>,
}

impl Pieces {
    pub fn of(h: &HamiltonianSpec) -> Self {
        let mut hop = BTreeMap::new();
        let mut diag = BTreeMap::new();
        for ((p, q), v) in h.one_body_dense() {
            if p == q {
                diag.insert(p, v);
            } else {
                hop.insert((p, q), v);
            }
        }
        Pieces { hop, diag, two: h.two_body_dense() }
    }
}

pub(crate) fn spec_with(n: usize, one: BTreeMap<(usize, usize), f64>, two: BTreeMap<(usize, usize, usize, usize), f64>) -> HamiltonianSpec {
    let mut h = HamiltonianSpec::empty(n);
    h.one_body = one;
    h.two_body = two;
    h
}

fn eta_of(h: &HamiltonianSpec, opts: &EncodeOptions) -> Result<usize> {
    let eta = opts.eta.or(h.eta).ok_or_else(|| Error::Invalid("this class needs a particle number eta".into()))?;
    if eta == 0 || eta > h.n {
        return invalid(format!("eta {eta} outside 1..={}", h.n));
    }
    Ok(eta)
}

fn m_of(h: &HamiltonianSpec, opts: &EncodeOptions) -> Result<usize> {
    let m = match (opts.m, h.structure) {
        (Some(m), _) => m,
        (None, Structure::NearestNeighbor(m)) => m,
        _ => return invalid("nearest-neighbor classes need a range M (structure or option)"),
    };
    if m == 0 || !m.is_power_of_two() || 2 * m >= h.n {
        return invalid(format!("range M={m} must be a power of two with 2M < n={}", h.n));
    }
    Ok(m)
}

/// Builds the encoder for `class`. Classes whose spec carries extra pieces
/// (a diagonal next to hopping, or `U`/`V` maps next to `T`) are assembled
/// as an LCU of the matching sub-encoders.
pub fn encode(h: &HamiltonianSpec, class: Class, opts: &EncodeOptions) -> Result<BlockEncoding> {
    h.validate()?;
    check_m_b(opts.m_b)?;
    log2_n(h.n)?;
    let mut ctx = Ctx::new(opts);
    let mut be = encode_in(h, class, &mut ctx)?;
    be.meta.tables = std::mem::take(&mut ctx.tables);
    if let Some(over) = &opts.tables {
        if over.len() != be.meta.tables.len() {
            return invalid(format!("{} replacement tables supplied, encoder uses {}", over.len(), be.meta.tables.len()));
        }
    }
    Ok(be)
}

fn encode_in(h: &HamiltonianSpec, class: Class, ctx: &mut Ctx) -> Result<BlockEncoding> {
    let n = h.n;
    let pieces = Pieces::of(h);
    let lcu = |parts: Vec<BlockEncoding>, class: Class| -> Result<BlockEncoding> {
        let mut be = lcu_combine(parts.into_iter().map(|p| (1.0, p)).collect())?;
        be.meta.class = class;
        Ok(be)
    };
    match class {
        Class::OneBody => {
            if !pieces.two.is_empty() {
                return invalid("one-body class given two-body terms; use `general`");
            }
            full::one_body(h, ctx)
        }
        Class::Number => {
            if !pieces.hop.is_empty() || !pieces.two.is_empty() {
                return invalid("number class accepts only diagonal terms U_p n_p");
            }
            full::number(n, &pieces.diag, ctx)
        }
        Class::TwoBody => {
            if !h.one_body_dense().is_empty() {
                return invalid("two-body class given one-body terms; use `general`");
            }
            full::two_body(h, ctx)
        }
        Class::Factorized => {
            if !h.one_body_dense().is_empty() || !h.two_body_is_number_pairs() {
                return invalid("factorized class accepts only n_p n_q terms");
            }
            full::factorized(n, &h.number_pairs(), ctx)
        }
        Class::General => {
            let one = spec_with(n, h.one_body_dense(), BTreeMap::new());
            let two = spec_with(n, BTreeMap::new(), pieces.two.clone());
            match (one.one_body.is_empty(), two.two_body.is_empty()) {
                (_, true) => full::one_body(&one, ctx).map(|mut be| {
                    be.meta.class = Class::General;
                    be
                }),
                (true, false) => full::two_body(&two, ctx).map(|mut be| {
                    be.meta.class = Class::General;
                    be
                }),
                (false, false) => {
                    let a = full::one_body(&one, ctx)?;
                    let b = full::two_body(&two, ctx)?;
                    lcu(vec![a, b], Class::General)
                }
            }
        }
        Class::EtaOneBody => {
            let eta = eta_of(h, ctx.opts)?;
            if !pieces.two.is_empty() {
                return invalid("eta-one-body class accepts only one-body terms");
            }
            eta::one_body(h, eta, eta::Keying::Pair, ctx)
        }
        Class::EtaNumber => {
            let eta = eta_of(h, ctx.opts)?;
            if !pieces.hop.is_empty() || !pieces.two.is_empty() {
                return invalid("eta-number class accepts only diagonal terms U_p n_p");
            }
            eta::number(n, eta, &pieces.diag, ctx)
        }
        Class::EtaFactorized => {
            let eta = eta_of(h, ctx.opts)?;
            if !h.one_body_dense().is_empty() || !h.two_body_is_number_pairs() {
                return invalid("eta-factorized class accepts only n_p n_q terms");
            }
            eta::factorized(n, eta, &h.number_pairs(), ctx)
        }
        Class::Nn | Class::NnEta => {
            let m = m_of(h, ctx.opts)?;
            if !pieces.two.is_empty() {
                return invalid("nearest-neighbor classes accept only one-body terms");
            }
            let eta = if class == Class::NnEta { Some(eta_of(h, ctx.opts)?) } else { None };
            let hop = match eta {
                None => structured::nn(n, m, &pieces.hop, ctx)?,
                Some(e) => structured::nn_eta(n, m, e, &pieces.hop, ctx)?,
            };
            if pieces.diag.is_empty() {
                return Ok(hop);
            }
            let diag = match eta {
                None => full::number(n, &pieces.diag, ctx)?,
                Some(e) => eta::number(n, e, &pieces.diag, ctx)?,
            };
            lcu(vec![hop, diag], class)
        }
        Class::Ti | Class::TiEta => {
            if !h.one_body.is_empty() || !h.two_body.is_empty() {
                return invalid("translation-invariant classes take their terms from the T, U, V maps only");
            }
            let eta = if class == Class::TiEta { Some(eta_of(h, ctx.opts)?) } else { None };
            let mut parts = vec![match eta {
                None => structured::ti(h, ctx)?,
                Some(e) => structured::ti_eta(h, e, ctx)?,
            }];
            let diag: BTreeMap<usize, f64> = h.ti.u.iter().filter(|(_, v)| **v != 0.0).map(|(&p, &v)| (p, v)).collect();
            if !diag.is_empty() {
                parts.push(match eta {
                    None => full::number(n, &diag, ctx)?,
                    Some(e) => eta::number(n, e, &diag, ctx)?,
                });
            }
            if !h.ti.v.is_empty() {
                let pairs = h.number_pairs();
                parts.push(match eta {
                    None => full::factorized(n, &pairs, ctx)?,
                    Some(e) => eta::factorized(n, e, &pairs, ctx)?,
                });
            }
            if parts.len() == 1 {
                return Ok(parts.pop().expect("one part"));
            }
            lcu(parts, class)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    FullSpace,
    /// Only columns with exactly this many particles are checked.
    EtaSector(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_abs_dev: f64,
    pub fro_dev: f64,
    pub alpha_used: f64,
    pub eps_bound: f64,
    pub pass: bool,
    pub columns_checked: usize,
}

/// Extracts the projected block column by column and compares `alpha` times
/// it with the reference matrix. Checked columns are compared on every row,
/// so leakage out of the particle-number sector counts as deviation.
pub fn verify(be: &BlockEncoding, mode: VerifyMode) -> Result<VerificationReport> {
    let n = be.system_qubits.len();
    if n > VERIFY_MODE_CAP {
        return Err(Error::SizeCap { what: "verification mode count", got: n, cap: VERIFY_MODE_CAP });
    }
    let reference = build_matrix_full(&be.reference)?;
    let cols: Vec<u64> = match mode {
        VerifyMode::FullSpace => (0..1u64 << n).collect(),
        VerifyMode::EtaSector(eta) => {
            if eta > n {
                return invalid(format!("eta {eta} exceeds n {n}"));
            }
            eta_basis(n, eta)
        }
    };
    let mut by_col: Vec<BTreeMap<u64, f64>> = vec![BTreeMap::new(); reference.dim];
    for (&(r, c), &v) in &reference.entries {
        by_col[c].insert(r as u64, v);
    }
    let per_col: Vec<(f64, f64)> = cols
        .par_iter()
        .map(|&col| -> Result<(f64, f64)> {
            let got = project_column(&be.circuit, &be.system_qubits, &be.anc_mask, col)?;
            let mut want = by_col[col as usize].clone();
            let (mut max, mut sq) = (0.0f64, 0.0f64);
            for (row, amp) in got {
                let r = want.remove(&row).unwrap_or(0.0);
                let d = (amp * be.alpha - Complex64::new(r, 0.0)).norm();
                max = max.max(d);
                sq += d * d;
            }
            for v in want.values() {
                max = max.max(v.abs());
                sq += v * v;
            }
            Ok((max, sq))
        })
        .collect::<Result<_>>()?;
    let max_abs_dev = per_col.iter().fold(0.0f64, |m, c| m.max(c.0));
    let fro_dev = per_col.iter().map(|c| c.1).sum::<f64>().sqrt();
    Ok(VerificationReport {
        max_abs_dev,
        fro_dev,
        alpha_used: be.alpha,
        eps_bound: be.eps_budget,
        pass: max_abs_dev <= be.eps_budget + 1e-10,
        columns_checked: cols.len(),
    })
}

/// The compile manifest written by `febe encode`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub class: Class,
    pub n: usize,
    pub eta: Option<usize>,
    #[serde(rename = "L")]
    pub l: usize,
    pub lambda: usize,
    pub m_b: usize,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub boundary: Boundary,
    pub alpha: f64,
    pub alpha_class: f64,
    pub prescale: f64,
    pub eps_budget: f64,
    pub used_entries: usize,
    pub distinct_words: usize,
    pub parts: Vec<(Class, f64)>,
    pub resource: ResourceReport,
    pub table: LookupTable,
    pub extra_tables: Vec<LookupTable>,
    /// The input Hamiltonian in spec-file form.
    pub spec: serde_json::Value,
}

impl Manifest {
    pub fn new(be: &BlockEncoding, spec: &HamiltonianSpec, model: CostModel) -> Result<Self> {
        let m = &be.meta;
        let (table, extra) = m.tables.split_first().ok_or_else(|| Error::Invalid("encoding has no table".into()))?;
        Ok(Manifest {
            class: m.class,
            n: m.n,
            eta: m.eta,
            l: m.l,
            lambda: m.lambda,
            m_b: m.m_b,
            m: m.m,
            boundary: m.boundary,
            alpha: be.alpha,
            alpha_class: m.alpha_class,
            prescale: m.prescale,
            eps_budget: be.eps_budget,
            used_entries: m.used_entries,
            distinct_words: m.distinct_words,
            parts: m.parts.clone(),
            resource: count_resources(&be.circuit, model),
            table: table.clone(),
            extra_tables: extra.to_vec(),
            spec: serde_json::from_str(&spec.to_json())?,
        })
    }

    pub fn spec(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::from_json(&serde_json::to_string(&self.spec)?)
    }

    /// Options that rebuild this manifest's circuit from its spec and stored tables.
    pub fn options(&self) -> EncodeOptions {
        let mut tables = vec![self.table.clone()];
        tables.extend(self.extra_tables.iter().cloned());
        EncodeOptions {
            m_b: self.m_b,
            lambda: LambdaChoice::Fixed(self.lambda),
            eta: self.eta,
            m: self.m,
            boundary: self.boundary,
            tables: Some(tables),
        }
    }

    /// Rebuilds the circuit using the stored tables and checks it against the
    /// spec. A table edited after encoding shows up as a failed report.
    pub fn reverify(&self) -> Result<VerificationReport> {
        let spec = self.spec()?;
        let be = encode(&spec, self.class, &self.options())?;
        if (be.alpha - self.alpha).abs() > 1e-12 * self.alpha.abs().max(1.0) {
            return invalid(format!("manifest alpha {} disagrees with rebuilt alpha {}", self.alpha, be.alpha));
        }
        let mut report = verify(&be, be.default_mode())?;
        report.eps_bound = self.eps_budget;
        report.pass = report.max_abs_dev <= self.eps_budget + 1e-10;
        Ok(report)
    }
}

