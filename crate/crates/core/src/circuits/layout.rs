/// Qubit assignment.
///
/// Mode k occupies qubits (d-1-k)·n .. (d-k)·n with bit i of the grid index on qubit
/// (d-1-k)·n + i, so the first mode is most significant. The electronic qubit sits at
/// d·n (|0> = S1, |1> = S2), followed by the optional Hadamard-test ancilla and the
/// optional QPE time register. With this ordering the system part of the basis index
/// equals the flat wavepacket index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitLayout {
    pub n_modes: usize,
    pub n_qubits: usize,
    pub ancilla: bool,
    pub time_qubits: usize,
}

impl QubitLayout {
    pub fn system(n_modes: usize, n_qubits: usize) -> Self {
        QubitLayout { n_modes, n_qubits, ancilla: false, time_qubits: 0 }
    }

    pub fn with_ancilla(self) -> Self {
        QubitLayout { ancilla: true, ..self }
    }

    pub fn with_time_register(self, m: usize) -> Self {
        QubitLayout { time_qubits: m, ..self }
    }

    pub fn mode_qubit(&self, mode: usize, bit: usize) -> usize {
        assert!(mode < self.n_modes && bit < self.n_qubits);
        (self.n_modes - 1 - mode) * self.n_qubits + bit
    }

    /// Qubits of one mode register, least significant first.
    pub fn register(&self, mode: usize) -> Vec<usize> {
        (0..self.n_qubits).map(|i| self.mode_qubit(mode, i)).collect()
    }

    pub fn electronic(&self) -> usize {
        self.n_modes * self.n_qubits
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.ancilla.then_some(self.electronic() + 1)
    }

    /// Time-register qubit j (weight 2^j).
    pub fn time(&self, j: usize) -> usize {
        assert!(j < self.time_qubits);
        self.electronic() + 1 + usize::from(self.ancilla) + j
    }

    pub fn system_qubits(&self) -> usize {
        self.n_modes * self.n_qubits + 1
    }

    pub fn total(&self) -> usize {
        self.system_qubits() + usize::from(self.ancilla) + self.time_qubits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_disjointness() {
        let l = QubitLayout::system(4, 4).with_ancilla().with_time_register(9);
        assert_eq!(l.system_qubits(), 17);
        assert_eq!(l.total(), 4 * 4 + 1 + 1 + 9);
        let mut all: Vec<usize> = (0..4).flat_map(|k| l.register(k)).collect();
        all.push(l.electronic());
        all.push(l.ancilla().unwrap());
        all.extend((0..9).map(|j| l.time(j)));
        all.sort_unstable();
        assert_eq!(all, (0..l.total()).collect::<Vec<_>>());
    }
}
