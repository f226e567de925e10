//! Closed-form cost models, λ selection, and comparison of formulas with
//! counted circuits.
//!
//! Asymptotic formulas are instantiated with unit constants. They are
//! compared with counted circuits by ratio and by log-log slope, never as
//! exact counts. Logarithms are base 2.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blockenc::{encode, verify, Class, EncodeOptions, LambdaChoice};
use crate::circuit::{count_resources, CostModel, ResourceReport};
use crate::error::{invalid, Error, Result};
use crate::fock::{HamiltonianSpec, Structure};
use crate::oracles::{build_select_swap, LookupTable};

fn log2(x: f64) -> f64 {
    x.log2()
}

fn ceil_log2(x: usize) -> usize {
    x.max(1).next_power_of_two().trailing_zeros() as usize
}

/// SELECT-SWAP cost for `L` words of `m_b` bits in groups of `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectSwapCost {
    pub qubits: f64,
    pub t_count: f64,
    pub t_depth: f64,
}

/// `qubits = λ m_b + 2⌈log L⌉`, `T = 4⌈L/λ⌉ + 8 λ m_b`, `depth = ⌈L/λ⌉ + log λ`.
pub fn formula_select_swap(l: usize, lambda: usize, m_b: usize) -> SelectSwapCost {
    let lambda = lambda.max(1);
    let groups = l.div_ceil(lambda) as f64;
    SelectSwapCost {
        qubits: (lambda * m_b + 2 * ceil_log2(l)) as f64,
        t_count: 4.0 * groups + 8.0 * (lambda * m_b) as f64,
        t_depth: groups + log2(lambda as f64),
    }
}

/// Power-of-two λ in `[1, L]` minimizing the SELECT-SWAP T count. Ties go
/// to the candidate closest to `sqrt(L / m_b)` on a log scale, then to the
/// smaller λ.
pub fn optimal_lambda(l: usize, m_b: usize) -> usize {
    let l = l.max(1);
    let target = log2(l as f64 / m_b.max(1) as f64) / 2.0;
    let mut best = (f64::INFINITY, f64::INFINITY, 1usize);
    let mut lambda = 1usize;
    while lambda <= l {
        let t = formula_select_swap(l, lambda, m_b).t_count;
        let dist = (log2(lambda as f64) - target).abs();
        if t < best.0 || (t == best.0 && dist < best.1) {
            best = (t, dist, lambda);
        }
        lambda *= 2;
    }
    best.2
}

/// Formula family. Every block-encoding class maps onto one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaClass {
    SelectSwap,
    Encoder(Class),
}

impl FormulaClass {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "select-swap" {
            return Ok(FormulaClass::SelectSwap);
        }
        Class::parse(s).map(FormulaClass::Encoder)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FormulaClass::SelectSwap => "select-swap",
            FormulaClass::Encoder(c) => c.tag(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostFormulaInput {
    pub class: FormulaClass,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub lambda: usize,
    pub m_b: usize,
    pub eta: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
}

impl CostFormulaInput {
    fn validate(&self) -> Result<()> {
        if self.l == 0 || self.lambda == 0 || self.lambda > self.l.next_power_of_two() {
            return invalid(format!("need 1 <= lambda <= L, got lambda={} L={}", self.lambda, self.l));
        }
        if self.m_b == 0 {
            return invalid("m_b must be positive");
        }
        Ok(())
    }
}

/// A term `coeff * expr` of an instantiated big-O formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub expr: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaReport {
    pub class: FormulaClass,
    pub t_terms: Vec<Term>,
    pub t_count: f64,
    pub t_depth_terms: Vec<Term>,
    pub t_depth: f64,
    pub qubits: f64,
    pub alpha: Option<f64>,
    pub clifford_leading: f64,
}

fn term(expr: &str, value: f64) -> Term {
    Term { coeff: 1.0, expr: expr.to_string(), value }
}

fn padded(eta: usize) -> f64 {
    eta.max(1).next_power_of_two() as f64
}

/// Subnormalization of each encoder family. Particle numbers are rounded up
/// to a power of two, matching the ordinal register the circuits diffuse.
pub fn alpha_formula(class: Class, n: usize, eta: Option<usize>, m: Option<usize>) -> Result<f64> {
    let nf = n as f64;
    let need_eta = || eta.map(padded).ok_or_else(|| Error::Invalid(format!("class {} needs eta", class.tag())));
    let need_m = || m.map(|m| m as f64).ok_or_else(|| Error::Invalid(format!("class {} needs M", class.tag())));
    Ok(match class {
        Class::OneBody | Class::Factorized | Class::Ti => nf * nf,
        Class::Number => nf,
        Class::TwoBody => nf.powi(4),
        Class::General => nf * nf + nf.powi(4),
        Class::EtaOneBody | Class::TiEta => nf * need_eta()?,
        Class::EtaNumber => need_eta()?,
        Class::EtaFactorized => need_eta()?.powi(2),
        Class::Nn => 2.0 * nf * need_m()?,
        Class::NnEta => 2.0 * need_m()? * need_eta()?,
    })
}

/// Instantiates the cost formula of a class at unit constants.
pub fn formula_class(inp: &CostFormulaInput) -> Result<FormulaReport> {
    inp.validate()?;
    let (n, l, lam, m_b) = (inp.n as f64, inp.l as f64, inp.lambda as f64, inp.m_b as f64);
    let sel = formula_select_swap(inp.l, inp.lambda, inp.m_b);
    let lookup_t = vec![term("ceil(L/lambda)", (l / lam).ceil()), term("lambda*m_b", lam * m_b)];
    let n_log_eta = || -> Result<f64> {
        let eta = inp.eta.ok_or_else(|| Error::Invalid("eta-sector formulas need eta".into()))?;
        Ok(n * log2(eta.max(2) as f64))
    };
    let mut t_terms = Vec::new();
    let d_terms: Vec<Term>;
    let mut alpha = None;
    match inp.class {
        FormulaClass::SelectSwap => {
            t_terms = vec![term("4*ceil(L/lambda)", 4.0 * (l / lam).ceil()), term("8*lambda*m_b", 8.0 * lam * m_b)];
            d_terms = vec![term("ceil(L/lambda)", (l / lam).ceil()), term("log(lambda)", log2(lam))];
        }
        FormulaClass::Encoder(c) => {
            alpha = Some(alpha_formula(c, inp.n, inp.eta, inp.m)?);
            match c {
                Class::OneBody | Class::Number | Class::TwoBody | Class::Factorized | Class::General | Class::Nn => {
                    t_terms.push(term("n", n));
                    t_terms.extend(lookup_t);
                    d_terms = vec![term("n", n), term("L/lambda", l / lam), term("2*log(lambda)", 2.0 * log2(lam))];
                }
                Class::Ti => {
                    t_terms = vec![term("n", n), term("ceil(n/lambda)", (n / lam).ceil()), term("lambda*m_b", lam * m_b)];
                    d_terms = vec![term("n", n), term("n/lambda", n / lam), term("2*log(lambda)", 2.0 * log2(lam))];
                }
                Class::EtaOneBody | Class::EtaNumber | Class::EtaFactorized => {
                    t_terms.push(term("n*log(eta)", n_log_eta()?));
                    t_terms.extend(lookup_t);
                    d_terms = vec![term("n*log(eta)", n_log_eta()?), term("L/lambda", l / lam), term("log(lambda)", log2(lam))];
                }
                Class::NnEta => {
                    let mm = inp.m.ok_or_else(|| Error::Invalid("nn-eta formula needs M".into()))? as f64;
                    t_terms = vec![
                        term("n*log(eta)", n_log_eta()?),
                        term("ceil(n*M/lambda)", (n * mm / lam).ceil()),
                        term("lambda*m_b", lam * m_b),
                    ];
                    d_terms = vec![term("n*log(eta)", n_log_eta()?), term("n*M/lambda", n * mm / lam), term("2*log(lambda)", 2.0 * log2(lam))];
                }
                Class::TiEta => {
                    t_terms = vec![term("n*log(eta)", n_log_eta()?), term("ceil(n/lambda)", (n / lam).ceil()), term("lambda*m_b", lam * m_b)];
                    d_terms = vec![term("n*log(eta)", n_log_eta()?), term("n/lambda", n / lam), term("2*log(lambda)", 2.0 * log2(lam))];
                }
            }
        }
    }
    let qubits = match inp.class {
        FormulaClass::SelectSwap => sel.qubits,
        FormulaClass::Encoder(_) => n + sel.qubits,
    };
    Ok(FormulaReport {
        class: inp.class,
        t_count: t_terms.iter().map(|t| t.value).sum(),
        t_terms,
        t_depth: d_terms.iter().map(|t| t.value).sum(),
        t_depth_terms: d_terms,
        qubits,
        alpha,
        clifford_leading: l * m_b,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconciliation {
    pub ratio_t: f64,
    pub ratio_qubits: f64,
}

/// Counted over formula totals; zero when the formula total is zero.
pub fn reconcile(counted: &ResourceReport, formula: &FormulaReport) -> Reconciliation {
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Reconciliation {
        ratio_t: ratio(counted.t_count as f64, formula.t_count),
        ratio_qubits: ratio(counted.qubit_count as f64, formula.qubits),
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (log2(p.0), log2(p.1))).collect();
    let k = pts.len() as f64;
    if k < 2.0 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Whether counted data scales with the expected exponent, within ±0.15.
pub fn scaling_ok(points: &[(f64, f64)], exponent: f64) -> bool {
    (loglog_slope(points) - exponent).abs() <= 0.15
}

/// Counts a built SELECT-SWAP oracle. The words do not affect the T count.
pub fn counted_select_swap(l: usize, lambda: usize, m_b: usize, model: CostModel) -> Result<ResourceReport> {
    let words: Vec<u64> = (0..l as u64).map(|i| i.wrapping_mul(0x9e37_79b9) & ((1u64 << m_b) - 1)).collect();
    let t = LookupTable::new(words, lambda, m_b)?;
    Ok(count_resources(&build_select_swap(&t)?.circuit, model))
}

/// Random dyadic Hamiltonian of the shape a class expects. Coefficients lie
/// on a 1/16 grid inside (-1, 1), so moderate `m_b` encodes them exactly.
pub fn sample_spec(class: Class, n: usize, eta: Option<usize>, m: Option<usize>, seed: u64) -> Result<HamiltonianSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeff = |rng: &mut ChaCha8Rng| loop {
        let v = rng.gen_range(-15i32..=15) as f64 / 16.0;
        if v != 0.0 {
            return v;
        }
    };
    let mut h = HamiltonianSpec::empty(n);
    h.eta = eta;
    match class {
        Class::OneBody | Class::EtaOneBody => {
            for p in 0..n {
                for q in p..n {
                    let v = coeff(&mut rng);
                    h.one_body.insert((p, q), v);
                    h.one_body.insert((q, p), v);
                }
            }
        }
        Class::Number | Class::EtaNumber => {
            for p in 0..n {
                h.one_body.insert((p, p), coeff(&mut rng));
            }
        }
        Class::Factorized | Class::EtaFactorized => {
            for p in 0..n {
                for q in p + 1..n {
                    h.two_body.insert((p, q, q, p), coeff(&mut rng));
                }
            }
        }
        Class::TwoBody | Class::General => {
            for _ in 0..n {
                let (p, q) = distinct_pair(&mut rng, n);
                let (r, s) = distinct_pair(&mut rng, n);
                let v = coeff(&mut rng);
                h.two_body.insert((p, q, s, r), v);
                h.two_body.insert((r, s, q, p), v);
            }
            if class == Class::General {
                for p in 0..n {
                    let q = (p + 1) % n;
                    let v = coeff(&mut rng);
                    h.one_body.insert((p, q), v);
                    h.one_body.insert((q, p), v);
                }
            }
        }
        Class::Nn | Class::NnEta => {
            let m = m.unwrap_or(1);
            h.structure = Structure::NearestNeighbor(m);
            for p in 0..n {
                for d in 1..=m {
                    let q = (p + d) % n;
                    let v = coeff(&mut rng);
                    h.one_body.insert((p, q), v);
                    h.one_body.insert((q, p), v);
                }
            }
        }
        Class::Ti | Class::TiEta => {
            h.structure = Structure::TranslationInvariant;
            for d in 0..n as i64 {
                let v = coeff(&mut rng) / 2.0;
                h.ti.t.insert(d, v);
                h.ti.t.insert(-d, v);
            }
        }
    }
    Ok(h)
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    loop {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a < b {
            return (a, b);
        }
    }
}

/// Cartesian sweep grid. `lambdas` of `None` means the grid-optimal λ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub classes: Vec<Class>,
    pub ns: Vec<usize>,
    pub lambdas: Vec<Option<usize>>,
    pub m_bs: Vec<usize>,
    pub etas: Vec<Option<usize>>,
    pub seed: u64,
    pub model: CostModel,
    /// Rows with `n` at most this large are also verified.
    pub verify_max_n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub class: Class,
    pub n: usize,
    pub eta: Option<usize>,
    #[serde(rename = "L")]
    pub l: usize,
    pub lambda: usize,
    pub m_b: usize,
    pub alpha: f64,
    pub t_formula: f64,
    pub t_counted: u64,
    pub tdepth_formula: f64,
    pub tdepth_counted: u64,
    pub qubits: u64,
    pub clifford_counted: u64,
    pub pass: Option<bool>,
}

pub const CSV_HEADER: [&str; 14] = [
    "class",
    "n",
    "eta",
    "L",
    "lambda",
    "m_b",
    "alpha",
    "t_formula",
    "t_counted",
    "tdepth_formula",
    "tdepth_counted",
    "qubits",
    "clifford_counted",
    "pass",
];

impl SweepRow {
    pub fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.class.tag().to_string(),
            self.n.to_string(),
            opt(self.eta),
            self.l.to_string(),
            self.lambda.to_string(),
            self.m_b.to_string(),
            format!("{}", self.alpha),
            format!("{}", self.t_formula),
            self.t_counted.to_string(),
            format!("{}", self.tdepth_formula),
            self.tdepth_counted.to_string(),
            self.qubits.to_string(),
            self.clifford_counted.to_string(),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
        ]
    }
}

fn sweep_row(class: Class, n: usize, lambda: Option<usize>, m_b: usize, eta: Option<usize>, grid: &SweepGrid) -> Result<SweepRow> {
    let m = matches!(class, Class::Nn | Class::NnEta).then_some(1);
    let spec = sample_spec(class, n, eta, m, grid.seed)?;
    let opts = EncodeOptions {
        m_b,
        lambda: lambda.map_or(LambdaChoice::Auto, LambdaChoice::Fixed),
        eta,
        m,
        ..EncodeOptions::default()
    };
    let be = encode(&spec, class, &opts)?;
    let counted = count_resources(&be.circuit, grid.model);
    let formula = formula_class(&CostFormulaInput {
        class: FormulaClass::Encoder(class),
        n,
        l: be.meta.l,
        lambda: be.meta.lambda,
        m_b,
        eta,
        m,
    })?;
    let pass = if n <= grid.verify_max_n { Some(verify(&be, be.default_mode())?.pass) } else { None };
    Ok(SweepRow {
        class,
        n,
        eta,
        l: be.meta.l,
        lambda: be.meta.lambda,
        m_b,
        alpha: be.alpha,
        t_formula: formula.t_count,
        t_counted: counted.t_count,
        tdepth_formula: formula.t_depth,
        tdepth_counted: counted.t_depth,
        qubits: counted.qubit_count,
        clifford_counted: counted.clifford_count,
        pass,
    })
}

/// One row per grid point, in grid order. η values are applied to sector
/// classes only; other classes take a single row with no η.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    for &lam in grid.lambdas.iter().flatten() {
        if lam == 0 || !lam.is_power_of_two() {
            return invalid(format!("lambda {lam} must be a power of two so that it divides L"));
        }
    }
    let mut points = Vec::new();
    for &class in &grid.classes {
        for &n in &grid.ns {
            for &lambda in &grid.lambdas {
                for &m_b in &grid.m_bs {
                    let etas: Vec<Option<usize>> = if class.is_eta() { grid.etas.clone() } else { vec![None] };
                    for eta in etas {
                        if eta.is_none() && class.is_eta() {
                            continue;
                        }
                        points.push((class, n, lambda, m_b, eta));
                    }
                }
            }
        }
    }
    points.into_par_iter().map(|(c, n, lam, m_b, eta)| sweep_row(c, n, lam, m_b, eta, grid)).collect()
}

/// Counted SELECT-SWAP T at the grid-optimal λ for each `L`, with the
/// formula value and the ratio between them.
pub fn select_swap_scan(ls: &[usize], m_b: usize, model: CostModel) -> Result<Vec<BTreeMap<&'static str, f64>>> {
    ls.iter()
        .map(|&l| {
            let lambda = optimal_lambda(l, m_b);
            let counted = counted_select_swap(l, lambda, m_b, model)?.t_count as f64;
            let formula = formula_select_swap(l, lambda, m_b).t_count;
            Ok(BTreeMap::from([
                ("L", l as f64),
                ("lambda", lambda as f64),
                ("t_counted", counted),
                ("t_formula", formula),
                ("ratio", counted / formula),
            ]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_swap_formula_examples() {
        assert_eq!(formula_select_swap(16, 4, 1).t_count, 48.0);
        assert_eq!(formula_select_swap(16, 16, 3).t_count, 4.0 + 8.0 * 48.0);
        assert_eq!(formula_select_swap(16, 1, 2).qubits, 2.0 + 8.0);
        assert_eq!(formula_select_swap(10, 4, 1).t_depth, 3.0 + 2.0);
    }

    #[test]
    fn optimal_lambda_examples() {
        assert_eq!(optimal_lambda(1024, 4), 16);
        assert_eq!(optimal_lambda(4, 4), 1);
        assert_eq!(optimal_lambda(1, 3), 1);
    }

    #[test]
    fn optimal_lambda_is_grid_optimal() {
        for lb in 0..=14 {
            let l = 1usize << lb;
            for m_b in [1usize, 2, 3, 5, 8, 13, 32, 64] {
                let got = optimal_lambda(l, m_b);
                let t = formula_select_swap(l, got, m_b).t_count;
                let mut lam = 1;
                while lam <= l {
                    assert!(t <= formula_select_swap(l, lam, m_b).t_count, "L={l} m_b={m_b}");
                    lam *= 2;
                }
            }
        }
    }

    #[test]
    fn ti_formula_matches_substitution() {
        let f = formula_class(&CostFormulaInput {
            class: FormulaClass::Encoder(Class::Ti),
            n: 16,
            l: 32,
            lambda: 4,
            m_b: 6,
            eta: None,
            m: None,
        })
        .unwrap();
        assert_eq!(f.t_count, 16.0 + 4.0 + 24.0);
        assert_eq!(f.alpha, Some(256.0));
        assert_eq!(f.clifford_leading, 32.0 * 6.0);
    }

    #[test]
    fn eta_formula_reduces_to_full_shape_at_eta_n() {
        let mk = |class, eta| CostFormulaInput { class: FormulaClass::Encoder(class), n: 16, l: 256, lambda: 8, m_b: 5, eta, m: None };
        let full = formula_class(&mk(Class::OneBody, None)).unwrap();
        let eta = formula_class(&mk(Class::EtaOneBody, Some(16))).unwrap();
        // n log(eta) against n: equal up to the log factor
        assert_eq!(eta.t_terms[0].value, full.t_terms[0].value * 4.0);
        assert_eq!(eta.t_terms[1..], full.t_terms[1..]);
        assert_eq!(eta.alpha, full.alpha);
    }

    #[test]
    fn reconcile_empty_is_zero() {
        let f = formula_class(&CostFormulaInput { class: FormulaClass::SelectSwap, n: 0, l: 16, lambda: 4, m_b: 1, eta: None, m: None }).unwrap();
        let r = reconcile(&ResourceReport::default(), &f);
        assert_eq!((r.ratio_t, r.ratio_qubits), (0.0, 0.0));
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (4..9).map(|k| (2f64.powi(k), 3.0 * 2f64.powf(0.5 * k as f64))).collect();
        assert!((loglog_slope(&pts) - 0.5).abs() < 1e-12);
        assert!(scaling_ok(&pts, 0.6));
        assert!(!scaling_ok(&pts, 0.7));
    }

    #[test]
    fn unknown_formula_class() {
        assert!(matches!(FormulaClass::parse("bogus"), Err(Error::UnknownClass(_))));
        assert_eq!(FormulaClass::parse("select-swap").unwrap(), FormulaClass::SelectSwap);
    }

    #[test]
    fn lambda_above_l_rejected() {
        let inp = CostFormulaInput { class: FormulaClass::SelectSwap, n: 0, l: 4, lambda: 8, m_b: 1, eta: None, m: None };
        assert!(formula_class(&inp).is_err());
    }
}
