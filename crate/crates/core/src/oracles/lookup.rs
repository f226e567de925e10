//! SELECT-SWAP data lookup and direct sampling of fixed-point amplitudes.

use serde::{Deserialize, Serialize};

use super::arith::comp;
use super::swap::swap_up;
use crate::circuit::{Builder, Control, Qubit};
use crate::error::{invalid, Error, Result};

/// `L` words of `m_b` bits arranged as `L / lambda` groups of `lambda` rows.
/// Word `l` sits in group `l / lambda`, row `l % lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "TableFile", try_from = "TableFile")]
pub struct LookupTable {
    pub l: usize,
    pub lambda: usize,
    pub m_b: usize,
    pub words: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    #[serde(rename = "L")]
    l: usize,
    lambda: usize,
    m_b: usize,
    words: Vec<String>,
}

impl From<LookupTable> for TableFile {
    fn from(t: LookupTable) -> Self {
        let digits = t.m_b.div_ceil(4).max(1);
        TableFile {
            l: t.l,
            lambda: t.lambda,
            m_b: t.m_b,
            words: t.words.iter().map(|w| format!("{w:0digits$x}")).collect(),
        }
    }
}

impl TryFrom<TableFile> for LookupTable {
    type Error = Error;

    fn try_from(f: TableFile) -> Result<Self> {
        let words = f
            .words
            .iter()
            .map(|s| u64::from_str_radix(s, 16).map_err(|_| Error::Invalid(format!("bad hex word `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        let t = LookupTable { l: f.l, lambda: f.lambda, m_b: f.m_b, words };
        t.validate()?;
        Ok(t)
    }
}

impl LookupTable {
    /// Zero-pads `words` to a power of two and rounds `lambda` up to one.
    pub fn new(mut words: Vec<u64>, lambda: usize, m_b: usize) -> Result<Self> {
        let l = words.len().max(1).next_power_of_two();
        words.resize(l, 0);
        let lambda = lambda.max(1).next_power_of_two();
        let t = LookupTable { l, lambda, m_b, words };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_b == 0 || self.m_b > 63 {
            return invalid(format!("word width {} outside 1..=63", self.m_b));
        }
        if !self.l.is_power_of_two() || self.words.len() != self.l {
            return invalid(format!("table length {} must be a power of two matching L", self.words.len()));
        }
        if !self.lambda.is_power_of_two() || self.lambda > self.l {
            return invalid(format!("lambda {} must be a power of two dividing L={}", self.lambda, self.l));
        }
        if let Some(w) = self.words.iter().find(|&&w| w >> self.m_b != 0) {
            return invalid(format!("word {w:#x} does not fit {} bits", self.m_b));
        }
        Ok(())
    }

    pub fn address_bits(&self) -> usize {
        self.l.trailing_zeros() as usize
    }

    pub fn groups(&self) -> usize {
        self.l / self.lambda
    }
}

/// Sign bit plus magnitude in `m_b - 1` bits. Packed with the sign in bit 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixedPointCode {
    pub b0: bool,
    pub b1: u64,
}

impl FixedPointCode {
    pub fn decode(&self, m_b: usize) -> f64 {
        let mag = self.b1 as f64 / (1u64 << (m_b - 1)) as f64;
        if self.b0 {
            -mag
        } else {
            mag
        }
    }

    pub fn pack(&self) -> u64 {
        self.b0 as u64 | self.b1 << 1
    }

    pub fn unpack(w: u64) -> Self {
        FixedPointCode { b0: w & 1 == 1, b1: w >> 1 }
    }
}

fn round_half_even(v: f64) -> f64 {
    let f = v.floor();
    let d = v - f;
    if d > 0.5 || (d == 0.5 && f % 2.0 != 0.0) {
        f + 1.0
    } else {
        f
    }
}

/// Nearest code to `x`, ties to even magnitude. `|x|` must not exceed the
/// largest magnitude `(2^(m_b-1) - 1) / 2^(m_b-1)` after rounding.
pub fn quantize(x: f64, m_b: usize) -> Result<FixedPointCode> {
    if !(2..=63).contains(&m_b) {
        return invalid(format!("m_b {m_b} outside 2..=63"));
    }
    let scale = (1u64 << (m_b - 1)) as f64;
    let mag = round_half_even(x.abs() * scale);
    if mag >= scale {
        return invalid(format!("coefficient {x} does not fit {m_b}-bit fixed point"));
    }
    let b1 = mag as u64;
    Ok(FixedPointCode { b0: x < 0.0 && b1 != 0, b1 })
}

/// Smallest power of two `s >= 1` with `max_abs / s` inside the code range.
pub fn prescale(max_abs: f64, m_b: usize) -> f64 {
    let scale = (1u64 << (m_b - 1)) as f64;
    let cap = (scale - 1.0) / scale;
    let mut s = 1.0;
    while max_abs / s > cap {
        s *= 2.0;
    }
    s
}

fn cnot_from(b: &mut Builder, c: Control, t: Qubit) {
    if !c.1 {
        b.x(c.0);
    }
    b.cnot(c.0, t);
    if !c.1 {
        b.x(c.0);
    }
}

fn and_from(b: &mut Builder, x: Control, y: Control, t: Qubit, compute: bool) {
    for c in [x, y] {
        if !c.1 {
            b.x(c.0);
        }
    }
    if compute {
        b.and(x.0, y.0, t);
    } else {
        b.unand(x.0, y.0, t);
    }
    for c in [x, y] {
        if !c.1 {
            b.x(c.0);
        }
    }
}

/// Unary iteration over the values of `bits` (little-endian), calling `leaf`
/// with a control that is live exactly on that value. One AND per internal
/// node below the root.
pub fn unary_iterate(
    b: &mut Builder,
    bits: &[Qubit],
    ctrl: Option<Control>,
    base: usize,
    leaf: &mut dyn FnMut(&mut Builder, Option<Control>, usize),
) {
    let Some((&top, rest)) = bits.split_last() else {
        leaf(b, ctrl, base);
        return;
    };
    let half = 1 << rest.len();
    match ctrl {
        None => {
            unary_iterate(b, rest, Some((top, false)), base, leaf);
            unary_iterate(b, rest, Some((top, true)), base + half, leaf);
        }
        Some(c) => {
            let t = b.scratch();
            and_from(b, c, (top, false), t, true);
            unary_iterate(b, rest, Some((t, true)), base, leaf);
            cnot_from(b, c, t);
            unary_iterate(b, rest, Some((t, true)), base + half, leaf);
            and_from(b, c, (top, true), t, false);
            b.release(t);
        }
    }
}

fn select(b: &mut Builder, t: &LookupTable, group_bits: &[Qubit], rows: &[Vec<Qubit>]) {
    let mut leaf = |b: &mut Builder, ctrl: Option<Control>, g: usize| {
        for (r, row) in rows.iter().enumerate() {
            let w = t.words[g * t.lambda + r];
            for (k, &q) in row.iter().enumerate() {
                if (w >> k) & 1 == 1 {
                    match ctrl {
                        None => b.x(q),
                        Some(c) => cnot_from(b, c, q),
                    }
                }
            }
        }
    };
    unary_iterate(b, group_bits, None, 0, &mut leaf);
}

/// `|l>|y> -> |l>|y ^ word_l>`. Low `log lambda` address bits pick the row,
/// high bits the group.
pub fn select_swap(b: &mut Builder, t: &LookupTable, addr: &[Qubit], out: &[Qubit]) {
    assert_eq!(addr.len(), t.address_bits(), "address width mismatch");
    assert_eq!(out.len(), t.m_b, "output width mismatch");
    let rb = t.lambda.trailing_zeros() as usize;
    let (row_bits, group_bits) = addr.split_at(rb);
    let rows: Vec<Vec<Qubit>> = (0..t.lambda).map(|_| b.scratches(t.m_b)).collect();
    b.conjugate(
        |b| {
            select(b, t, group_bits, &rows);
            swap_up(b, row_bits, &rows);
        },
        |b, _| {
            for (&x, &y) in rows[0].iter().zip(out) {
                b.cnot(x, y);
            }
        },
    );
    for row in rows.iter().rev() {
        b.release_all(row);
    }
}

/// Turns the code in `word` (sign in bit 0) into the amplitude `r_b` on
/// `flag = |0>` and `samp = |0...0>`. `samp` has `m_b - 1` qubits.
pub fn direct_sampling(b: &mut Builder, word: &[Qubit], samp: &[Qubit], flag: Qubit) {
    assert_eq!(samp.len() + 1, word.len(), "sampling register must have m_b - 1 qubits");
    for &q in samp {
        b.h(q);
    }
    comp(b, samp, &word[1..], flag);
    b.x(flag);
    for &q in samp {
        b.h(q);
    }
    b.z(word[0]);
}
