use super::emulator::apply_gate;
use super::gate::{decompose_ccrx, Control, Gate, GateKind};
use num_complex::Complex64;
use std::fmt::Write as _;

/// Gates arranged in columns; gates within a column act on disjoint qubits.
///
/// Depth is the number of columns. Builders decide the column structure, so the depth
/// reflects how blocks are laid out rather than a global recompaction (see
/// [`Circuit::compact_depth`] for the latter).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_qubits: usize,
    columns: Vec<Vec<Gate>>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, columns: vec![] }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn columns(&self) -> &[Vec<Gate>] {
        &self.columns
    }

    pub fn depth(&self) -> usize {
        self.columns.len()
    }

    pub fn gate_count(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.columns.iter().flatten()
    }

    fn check_range(&self, g: &Gate) {
        for q in g.qubits() {
            assert!(q < self.n_qubits, "qubit {q} outside a {}-qubit circuit", self.n_qubits);
        }
    }

    /// Append a single-gate column.
    pub fn push(&mut self, gate: Gate) {
        self.check_range(&gate);
        self.columns.push(vec![gate]);
    }

    /// Append a column; panics if two gates share a qubit.
    pub fn push_column(&mut self, gates: Vec<Gate>) {
        if gates.is_empty() {
            return;
        }
        let mut used = vec![false; self.n_qubits];
        for g in &gates {
            self.check_range(g);
            for q in g.qubits() {
                assert!(!used[q], "qubit {q} used twice in one column");
                used[q] = true;
            }
        }
        self.columns.push(gates);
    }

    /// Sequential composition.
    pub fn append(&mut self, other: &Circuit) {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.columns.extend(other.columns.iter().cloned());
    }

    /// Side-by-side composition of circuits on disjoint qubits; column i of the result
    /// holds column i of every part.
    pub fn parallel(n_qubits: usize, parts: &[Circuit]) -> Circuit {
        let depth = parts.iter().map(Circuit::depth).max().unwrap_or(0);
        let mut out = Circuit::new(n_qubits);
        for c in 0..depth {
            let col: Vec<Gate> = parts.iter().filter_map(|p| p.columns.get(c)).flatten().cloned().collect();
            out.push_column(col);
        }
        out
    }

    fn column_free(&self, c: usize, gate: &Gate) -> bool {
        let q = gate.qubits();
        self.columns[c].iter().all(|g| q.iter().all(|&x| !g.touches(x)))
    }

    /// Put `gate` in the first column where its qubits are free, or in a new final column.
    ///
    /// Only valid when `gate` commutes with every gate already present on its qubits,
    /// e.g. diagonal gates in an all-diagonal block.
    pub fn insert_earliest(&mut self, gate: Gate) {
        self.check_range(&gate);
        match (0..self.columns.len()).find(|&c| self.column_free(c, &gate)) {
            Some(c) => self.columns[c].push(gate),
            None => self.columns.push(vec![gate]),
        }
    }

    /// Append `gate`, then move it to the earliest column it can legally occupy: it passes
    /// backwards over gates it commutes with and lands in a column where its qubits are free.
    pub fn float_back(&mut self, gate: Gate) {
        self.check_range(&gate);
        let mut best = None;
        for c in (0..self.columns.len()).rev() {
            let blocked = self.columns[c].iter().any(|g| overlaps(g, &gate) && !commutes(g, &gate));
            if blocked {
                break;
            }
            if self.column_free(c, &gate) {
                best = Some(c);
            }
        }
        match best {
            Some(c) => self.columns[c].push(gate),
            None => self.columns.push(vec![gate]),
        }
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            columns: self.columns.iter().rev().map(|col| col.iter().map(Gate::inverse).collect()).collect(),
        }
    }

    /// Every gate gains `control`; gates then share a qubit, so each gets its own column.
    pub fn controlled(&self, control: Control) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        for g in self.gates() {
            out.push(g.with_control(control));
        }
        out
    }

    /// Same circuit on a larger register (qubit indices unchanged).
    pub fn widened(&self, n_qubits: usize) -> Circuit {
        assert!(n_qubits >= self.n_qubits);
        Circuit { n_qubits, columns: self.columns.clone() }
    }

    /// Replace every doubly-controlled Rx by its five two-qubit gates. A column containing
    /// CCRx gates becomes five columns.
    pub fn expand_ccrx(&self) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        for col in &self.columns {
            let mut rows: Vec<Vec<Gate>> = vec![vec![]];
            for g in col {
                match decompose_ccrx(g) {
                    Some(parts) => {
                        rows.resize(rows.len().max(5), vec![]);
                        for (r, p) in parts.into_iter().enumerate() {
                            rows[r].push(p);
                        }
                    }
                    None => rows[0].push(g.clone()),
                }
            }
            for r in rows {
                out.push_column(r);
            }
        }
        out
    }

    /// Depth of an as-soon-as-possible schedule over qubits, ignoring the column structure.
    pub fn compact_depth(&self) -> usize {
        let mut level = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in self.gates() {
            let q = g.qubits();
            let l = q.iter().map(|&x| level[x]).max().unwrap_or(0) + 1;
            for x in q {
                level[x] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    /// One gate per line: `NAME angle c=controls t=targets`, with `!q` for zero-polarity
    /// controls and a `# column k` marker before each column.
    pub fn to_text(&self) -> String {
        let mut s = format!("# qubits {} depth {} gates {}\n", self.n_qubits, self.depth(), self.gate_count());
        for (k, col) in self.columns.iter().enumerate() {
            let _ = writeln!(s, "# column {k}");
            for g in col {
                let _ = writeln!(s, "{g}");
            }
        }
        s
    }
}

fn overlaps(a: &Gate, b: &Gate) -> bool {
    a.qubits().iter().any(|&q| b.touches(q))
}

/// Whether two gates commute, checked on the qubits they share.
pub fn commutes(a: &Gate, b: &Gate) -> bool {
    if !overlaps(a, b) || (a.is_diagonal() && b.is_diagonal()) {
        return true;
    }
    let mut qubits = a.qubits();
    for q in b.qubits() {
        if !qubits.contains(&q) {
            qubits.push(q);
        }
    }
    let local = |g: &Gate| {
        let pos = |q: usize| qubits.iter().position(|&x| x == q).unwrap();
        Gate::new(
            g.kind,
            g.targets.iter().map(|&t| pos(t)).collect(),
            g.controls.iter().map(|c| Control { qubit: pos(c.qubit), on_one: c.on_one }).collect(),
        )
    };
    let (la, lb) = (local(a), local(b));
    let dim = 1usize << qubits.len();
    (0..dim).all(|j| {
        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        x[j] = Complex64::new(1.0, 0.0);
        let mut y = x.clone();
        apply_gate(&mut x, &la, &[]);
        apply_gate(&mut x, &lb, &[]);
        apply_gate(&mut y, &lb, &[]);
        apply_gate(&mut y, &la, &[]);
        x.iter().zip(&y).all(|(p, q)| (p - q).norm() < 1e-12)
    })
}

/// Number of gates whose kind satisfies `pred`.
pub fn count_kind(c: &Circuit, pred: impl Fn(&GateKind) -> bool) -> usize {
    c.gates().filter(|g| pred(&g.kind)).count()
}
