//! Coefficient tables: prescaling, fixed-point quantization, λ selection
//! and the declared discretization budget.

use std::collections::BTreeSet;

use super::{EncodeOptions, LambdaChoice};
use crate::error::{invalid, Result};
use crate::oracles::{prescale, quantize, LookupTable};
use crate::resources::optimal_lambda;

/// A quantized table together with what it cost in accuracy.
#[derive(Clone, Debug)]
pub(crate) struct QTable {
    pub table: LookupTable,
    /// Power-of-two factor the coefficients were divided by before quantization.
    pub scale: f64,
    /// `sum uses[l] * |v_l - scale * decode(word_l)|` over the intended values.
    pub eps: f64,
    pub used_entries: usize,
    pub distinct_words: usize,
}

/// Shared state while building one encoding: options, the queue of
/// caller-supplied replacement tables, and every table handed out so far.
pub(crate) struct Ctx<'a> {
    pub opts: &'a EncodeOptions,
    pub tables: Vec<LookupTable>,
}

impl<'a> Ctx<'a> {
    pub fn new(opts: &'a EncodeOptions) -> Self {
        Ctx { opts, tables: Vec::new() }
    }

    pub fn lambda_for(&self, l: usize) -> usize {
        match self.opts.lambda {
            LambdaChoice::Auto => optimal_lambda(l, self.opts.m_b),
            LambdaChoice::Fixed(x) => x.max(1).next_power_of_two().min(l.max(1).next_power_of_two()),
        }
    }

    /// Quantizes `values` (one per address) into a table. `uses[l]` counts
    /// how many Hamiltonian terms read entry `l`; entries with zero uses are
    /// padding and must hold zero.
    pub fn table(&mut self, values: &[f64], uses: &[usize]) -> Result<QTable> {
        debug_assert_eq!(values.len(), uses.len());
        let m_b = self.opts.m_b;
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = prescale(max_abs, m_b);
        let mut words = Vec::with_capacity(values.len());
        let mut eps = 0.0;
        for (&v, &u) in values.iter().zip(uses) {
            let code = quantize(v / scale, m_b)?;
            eps += u as f64 * (v - scale * code.decode(m_b)).abs();
            words.push(code.pack());
        }
        let l = values.len().max(1).next_power_of_two();
        let built = LookupTable::new(words, self.lambda_for(l), m_b)?;
        let table = match &self.opts.tables {
            Some(over) => {
                let Some(t) = over.get(self.tables.len()) else {
                    return invalid(format!("no replacement supplied for table {}", self.tables.len()));
                };
                t.validate()?;
                if t.l != built.l || t.m_b != built.m_b {
                    return invalid(format!(
                        "replacement table {} has shape L={} m_b={}, expected L={} m_b={}",
                        self.tables.len(),
                        t.l,
                        t.m_b,
                        built.l,
                        built.m_b
                    ));
                }
                t.clone()
            }
            None => built,
        };
        let used: Vec<usize> = (0..uses.len()).filter(|&l| uses[l] > 0).collect();
        let distinct: BTreeSet<u64> = used.iter().map(|&l| table.words[l]).collect();
        self.tables.push(table.clone());
        Ok(QTable { table, scale, eps, used_entries: used.len(), distinct_words: distinct.len() })
    }
}
