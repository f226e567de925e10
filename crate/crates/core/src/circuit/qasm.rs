use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write;

use super::{Circuit, Gate, Qubit, Register, Role, ToffoliKind};
use crate::error::{Error, Result};

const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

/// OpenQASM 2 listing over one flat register `q`. Multi-controlled gates must
/// be lowered first; AND compute/uncompute markers become opaque gates.
pub fn export_text(c: &Circuit) -> Result<String> {
    let mut s = String::from(HEADER);
    let uses = |k: ToffoliKind| c.gates.iter().any(|g| matches!(g, Gate::Toffoli { kind, .. } if *kind == k));
    if uses(ToffoliKind::Compute) {
        s.push_str("opaque and_compute a,b,t;\n");
    }
    if uses(ToffoliKind::Uncompute) {
        s.push_str("opaque and_uncompute a,b,t;\n");
    }
    if c.qubit_count > 0 {
        writeln!(s, "qreg q[{}];", c.qubit_count).unwrap();
    }
    for g in &c.gates {
        let (name, param, qs): (&str, Option<f64>, Vec<Qubit>) = match g {
            Gate::H(q) => ("h", None, vec![*q]),
            Gate::X(q) => ("x", None, vec![*q]),
            Gate::Y(q) => ("y", None, vec![*q]),
            Gate::Z(q) => ("z", None, vec![*q]),
            Gate::S(q) => ("s", None, vec![*q]),
            Gate::Sdg(q) => ("sdg", None, vec![*q]),
            Gate::T(q) => ("t", None, vec![*q]),
            Gate::Tdg(q) => ("tdg", None, vec![*q]),
            Gate::Rz(q, a) => ("rz", Some(*a), vec![*q]),
            Gate::Ry(q, a) => ("ry", Some(*a), vec![*q]),
            Gate::Cnot { c, t } => ("cx", None, vec![*c, *t]),
            Gate::Cz(a, b) => ("cz", None, vec![*a, *b]),
            Gate::Swap(a, b) => ("swap", None, vec![*a, *b]),
            Gate::Toffoli { c0, c1, t, kind } => {
                let name = match kind {
                    ToffoliKind::Plain => "ccx",
                    ToffoliKind::Compute => "and_compute",
                    ToffoliKind::Uncompute => "and_uncompute",
                };
                (name, None, vec![*c0, *c1, *t])
            }
            Gate::Fredkin { c, a, b } => ("cswap", None, vec![*c, *a, *b]),
            Gate::Mcx { .. } | Gate::Mcswap { .. } => {
                return Err(Error::Unlowered(format!("{g:?}")));
            }
        };
        s.push_str(name);
        if let Some(a) = param {
            write!(s, "({a:?})").unwrap();
        }
        let args: Vec<String> = qs.iter().map(|q| format!("q[{q}]")).collect();
        writeln!(s, " {};", args.join(",")).unwrap();
    }
    Ok(s)
}

fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r.trim()),
        None => (1.0, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().ok()?),
        None => (body, 1.0),
    };
    let num = match num.split_once('*') {
        Some((k, "pi")) => k.trim().parse::<f64>().ok()? * PI,
        None if num == "pi" => PI,
        _ => return None,
    };
    Some(sign * num / den)
}

/// Parses the subset emitted by [`export_text`]. Several `qreg`s are laid out
/// one after another.
pub fn parse_text(text: &str) -> Result<Circuit> {
    let mut regs: HashMap<String, (usize, usize)> = HashMap::new();
    let mut c = Circuit::new(0);
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("").trim();
        for stmt in line.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let err = |msg: &str| Error::Parse { line: ln + 1, msg: format!("{msg}: `{stmt}`") };
            if stmt.starts_with("OPENQASM") || stmt.starts_with("include") || stmt.starts_with("opaque") {
                continue;
            }
            if let Some(rest) = stmt.strip_prefix("qreg") {
                let rest = rest.trim();
                let (name, size) = rest
                    .strip_suffix(']')
                    .and_then(|r| r.split_once('['))
                    .ok_or_else(|| err("bad qreg"))?;
                let size: usize = size.parse().map_err(|_| err("bad qreg size"))?;
                regs.insert(name.trim().to_string(), (c.qubit_count, size));
                c.registers.push(Register {
                    name: name.trim().to_string(),
                    qubits: (c.qubit_count..c.qubit_count + size).collect(),
                    role: Role::System,
                });
                c.qubit_count += size;
                continue;
            }
            let (head, args) = match stmt.find(|ch: char| ch.is_whitespace() || ch == '(') {
                Some(i) if stmt[i..].starts_with('(') => {
                    let close = stmt.find(')').ok_or_else(|| err("unclosed parameter"))?;
                    (&stmt[..close + 1], stmt[close + 1..].trim())
                }
                Some(i) => (&stmt[..i], stmt[i..].trim()),
                None => return Err(err("missing operands")),
            };
            let (name, param) = match head.split_once('(') {
                Some((n, p)) => {
                    let p = p.strip_suffix(')').ok_or_else(|| err("bad parameter"))?;
                    (n.trim(), Some(parse_angle(p).ok_or_else(|| err("bad angle"))?))
                }
                None => (head.trim(), None),
            };
            let mut qs = Vec::new();
            for a in args.split(',') {
                let (r, i) = a
                    .trim()
                    .strip_suffix(']')
                    .and_then(|x| x.split_once('['))
                    .ok_or_else(|| err("bad operand"))?;
                let &(off, size) = regs.get(r.trim()).ok_or_else(|| err("unknown register"))?;
                let i: usize = i.parse().map_err(|_| err("bad index"))?;
                if i >= size {
                    return Err(err("index out of range"));
                }
                qs.push(off + i);
            }
            let want = |k: usize| if qs.len() == k { Ok(()) } else { Err(err("wrong operand count")) };
            let need_param = || param.ok_or_else(|| err("missing angle"));
            let g = match name {
                "h" | "x" | "y" | "z" | "s" | "sdg" | "t" | "tdg" => {
                    want(1)?;
                    let q = qs[0];
                    match name {
                        "h" => Gate::H(q),
                        "x" => Gate::X(q),
                        "y" => Gate::Y(q),
                        "z" => Gate::Z(q),
                        "s" => Gate::S(q),
                        "sdg" => Gate::Sdg(q),
                        "t" => Gate::T(q),
                        _ => Gate::Tdg(q),
                    }
                }
                "rz" => {
                    want(1)?;
                    Gate::Rz(qs[0], need_param()?)
                }
                "ry" => {
                    want(1)?;
                    Gate::Ry(qs[0], need_param()?)
                }
                "cx" => {
                    want(2)?;
                    Gate::Cnot { c: qs[0], t: qs[1] }
                }
                "cz" => {
                    want(2)?;
                    Gate::Cz(qs[0], qs[1])
                }
                "swap" => {
                    want(2)?;
                    Gate::Swap(qs[0], qs[1])
                }
                "ccx" | "and_compute" | "and_uncompute" => {
                    want(3)?;
                    let kind = match name {
                        "ccx" => ToffoliKind::Plain,
                        "and_compute" => ToffoliKind::Compute,
                        _ => ToffoliKind::Uncompute,
                    };
                    Gate::Toffoli { c0: qs[0], c1: qs[1], t: qs[2], kind }
                }
                "cswap" => {
                    want(3)?;
                    Gate::Fredkin { c: qs[0], a: qs[1], b: qs[2] }
                }
                _ => return Err(err("unknown gate")),
            };
            c.gates.push(g);
        }
    }
    c.validate()?;
    Ok(c)
}
