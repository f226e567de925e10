use std::f64::consts::FRAC_PI_4;

use super::{Circuit, Control, Gate, Qubit, Register, Role, ToffoliKind};

/// Incremental circuit constructor with named registers and a pool of
/// clean scratch qubits.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    qubits: usize,
    registers: Vec<Register>,
    gates: Vec<Gate>,
    free: Vec<Qubit>,
    scratch_total: usize,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn register(&mut self, name: &str, size: usize, role: Role) -> Vec<Qubit> {
        let qs: Vec<Qubit> = (self.qubits..self.qubits + size).collect();
        self.qubits += size;
        self.registers.push(Register { name: name.to_string(), qubits: qs.clone(), role });
        qs
    }

    pub fn qubit(&mut self, name: &str, role: Role) -> Qubit {
        self.register(name, 1, role)[0]
    }

    /// A qubit promised to be |0> now; hand it back clean with [`Builder::release`].
    pub fn scratch(&mut self) -> Qubit {
        if let Some(q) = self.free.pop() {
            return q;
        }
        let q = self.qubit(&format!("scratch{}", self.scratch_total), Role::Scratch);
        self.scratch_total += 1;
        q
    }

    pub fn scratches(&mut self, k: usize) -> Vec<Qubit> {
        (0..k).map(|_| self.scratch()).collect()
    }

    pub fn release(&mut self, q: Qubit) {
        debug_assert!(!self.free.contains(&q));
        self.free.push(q);
    }

    pub fn release_all(&mut self, qs: &[Qubit]) {
        for &q in qs.iter().rev() {
            self.release(q);
        }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn extend(&mut self, gs: impl IntoIterator<Item = Gate>) {
        self.gates.extend(gs);
    }

    pub fn h(&mut self, q: Qubit) {
        self.push(Gate::H(q));
    }

    pub fn x(&mut self, q: Qubit) {
        self.push(Gate::X(q));
    }

    pub fn z(&mut self, q: Qubit) {
        self.push(Gate::Z(q));
    }

    pub fn cnot(&mut self, c: Qubit, t: Qubit) {
        self.push(Gate::Cnot { c, t });
    }

    pub fn fredkin(&mut self, c: Qubit, a: Qubit, b: Qubit) {
        self.push(Gate::Fredkin { c, a, b });
    }

    /// Clean-target AND.
    pub fn and(&mut self, a: Qubit, b: Qubit, t: Qubit) {
        self.push(Gate::Toffoli { c0: a, c1: b, t, kind: ToffoliKind::Compute });
    }

    pub fn unand(&mut self, a: Qubit, b: Qubit, t: Qubit) {
        self.push(Gate::Toffoli { c0: a, c1: b, t, kind: ToffoliKind::Uncompute });
    }

    pub fn toffoli(&mut self, a: Qubit, b: Qubit, t: Qubit) {
        self.push(Gate::Toffoli { c0: a, c1: b, t, kind: ToffoliKind::Plain });
    }

    /// X on `t` controlled by `controls`, picking the cheapest gate kind.
    pub fn mcx(&mut self, controls: &[Control], t: Qubit) {
        match controls {
            [] => self.x(t),
            [(c, true)] => self.cnot(*c, t),
            [(a, true), (b, true)] => self.toffoli(*a, *b, t),
            _ => self.push(Gate::Mcx { controls: controls.to_vec(), t }),
        }
    }

    pub fn mcswap(&mut self, controls: &[Control], a: Qubit, b: Qubit) {
        match controls {
            [] => self.push(Gate::Swap(a, b)),
            [(c, true)] => self.fredkin(*c, a, b),
            _ => self.push(Gate::Mcswap { controls: controls.to_vec(), a, b }),
        }
    }

    pub fn mark(&self) -> usize {
        self.gates.len()
    }

    /// Appends the inverse of everything emitted since `mark`.
    pub fn undo_since(&mut self, mark: usize) {
        let inv: Vec<Gate> = self.gates[mark..].iter().rev().map(Gate::adjoint).collect();
        self.gates.extend(inv);
    }

    /// Emits `outer`, then `inner`, then the inverse of `outer`. Whatever
    /// `outer` returns (typically scratch qubits) is handed to `inner` and back
    /// to the caller for release.
    pub fn conjugate<R>(
        &mut self,
        outer: impl FnOnce(&mut Builder) -> R,
        inner: impl FnOnce(&mut Builder, &R),
    ) -> R {
        let m = self.mark();
        let r = outer(self);
        let seg: Vec<Gate> = self.gates[m..].to_vec();
        inner(self, &r);
        self.gates.extend(seg.iter().rev().map(Gate::adjoint));
        r
    }

    /// Emits the inverse of whatever `f` emits, leaving scratch bookkeeping from `f` in place.
    pub fn emit_adjoint(&mut self, f: impl FnOnce(&mut Builder)) {
        let m = self.mark();
        f(self);
        let seg = self.gates.split_off(m);
        self.gates.extend(seg.iter().rev().map(Gate::adjoint));
    }

    /// Runs `f`, then replaces its output with the same gates controlled on `controls`.
    pub fn emit_controlled(&mut self, controls: &[Control], f: impl FnOnce(&mut Builder)) {
        let m = self.mark();
        f(self);
        let seg = self.gates.split_off(m);
        for g in seg {
            self.push_controlled(&g, controls);
        }
    }

    /// Appends `g` with extra controls. Diagonal phases route through a scratch
    /// AND, rotations use the X-conjugation trick, and H uses `Ry(π/4) Z Ry(-π/4)`.
    pub fn push_controlled(&mut self, g: &Gate, controls: &[Control]) {
        use Gate::*;
        if controls.is_empty() {
            self.push(g.clone());
            return;
        }
        let with = |extra: &[Control]| -> Vec<Control> {
            controls.iter().copied().chain(extra.iter().copied()).collect()
        };
        match g {
            X(t) => self.mcx(controls, *t),
            Cnot { c, t } => self.mcx(&with(&[(*c, true)]), *t),
            Toffoli { c0, c1, t, .. } => self.mcx(&with(&[(*c0, true), (*c1, true)]), *t),
            Mcx { controls: cs, t } => self.mcx(&with(cs), *t),
            Swap(a, b) => self.mcswap(controls, *a, *b),
            Fredkin { c, a, b } => self.mcswap(&with(&[(*c, true)]), *a, *b),
            Mcswap { controls: cs, a, b } => self.mcswap(&with(cs), *a, *b),
            Z(q) | S(q) | Sdg(q) | T(q) | Tdg(q) => {
                let s = self.scratch();
                let cs = with(&[(*q, true)]);
                self.mcx(&cs, s);
                self.push(g.remap(&|_| s));
                self.mcx(&cs, s);
                self.release(s);
            }
            Cz(a, b) => {
                self.h(*b);
                self.mcx(&with(&[(*a, true)]), *b);
                self.h(*b);
            }
            Y(q) => {
                self.push(Sdg(*q));
                self.mcx(controls, *q);
                self.push(S(*q));
            }
            Rz(q, th) | Ry(q, th) => {
                let half = |a: f64| if matches!(g, Rz(..)) { Rz(*q, a) } else { Ry(*q, a) };
                self.push(half(th / 2.0));
                self.mcx(controls, *q);
                self.push(half(-th / 2.0));
                self.mcx(controls, *q);
            }
            H(q) => {
                self.push(Ry(*q, -FRAC_PI_4));
                self.h(*q);
                self.mcx(controls, *q);
                self.h(*q);
                self.push(Ry(*q, FRAC_PI_4));
            }
        }
    }

    /// Copies `c`'s gates in, mapping its qubit `k` to `map[k]`.
    pub fn append_mapped(&mut self, c: &Circuit, map: &[Qubit]) {
        self.gates.extend(c.gates.iter().map(|g| g.remap(&|q| map[q])));
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn finish(self) -> Circuit {
        Circuit { qubit_count: self.qubits, registers: self.registers, gates: self.gates }
    }
}
