//! Layered shallow circuits: statevector simulation, light cones, reduced
//! density matrices, and conjugated parent projectors.
//!
//! Circuits are lists of layers; each layer is a set of gates on pairwise
//! disjoint qubit tuples of arity at most 2. Connectivity is either
//! all-to-all or a `D`-dimensional lattice whose gates must act on nearest
//! neighbors. The light-cone ceiling for depth `t` is
//! [`lightcone_function`]: `2^t` (all-to-all) or `(2t+1)^D` (lattice);
//! [`circuit_lightcone`] computes the exact cone from the actual gate
//! layout, which is never larger.
//!
//! Amplitude convention: **qubit 0 is the most significant bit** of the
//! amplitude index, so `|10⟩` on two qubits is index `0b10 = 2`. This makes
//! amplitude-level fixtures bit-exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};

/// Hard cap on simulated qubit counts (`2^20` amplitudes).
pub const MAX_QUBITS: usize = 20;
/// Cap on dense-operator support sizes (`2^10` dimensional matrices).
pub const MAX_DENSE_SUPPORT: usize = 10;
/// Frobenius tolerance for explicit gate unitarity.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Norm tolerance for state vectors and circuit application.
pub const NORM_TOL: f64 = 1e-10;

/// Which qubit pairs a circuit may couple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Connectivity {
    /// Any pair of qubits may share a gate.
    AllToAll,
    /// Qubits sit on a `D`-dimensional grid; gates act on nearest
    /// neighbors (wrapping around when `periodic`).
    Lattice {
        /// Grid dimension.
        #[serde(rename = "D")]
        d: usize,
        /// Side lengths, one per axis; sites are indexed row-major.
        dims: Vec<usize>,
        /// Whether the grid wraps around.
        periodic: bool,
    },
}

impl Connectivity {
    /// One-dimensional chain of `n` sites.
    #[must_use]
    pub fn line(n: usize, periodic: bool) -> Self {
        Self::Lattice {
            d: 1,
            dims: vec![n],
            periodic,
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        match self {
            Self::AllToAll => Ok(()),
            Self::Lattice { d, dims, .. } => {
                if *d == 0 || dims.len() != *d {
                    return Err(Error::InvalidInput(format!(
                        "lattice dimension {d} does not match {} side lengths",
                        dims.len()
                    )));
                }
                if dims.contains(&0) {
                    return Err(Error::InvalidInput("lattice sides must be positive".into()));
                }
                let sites: usize = dims.iter().product();
                if sites != n {
                    return Err(Error::InvalidInput(format!(
                        "lattice with sides {dims:?} has {sites} sites but the circuit declares {n} qubits"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Whether a two-qubit gate may couple sites `a` and `b`.
    #[must_use]
    pub fn allows_pair(&self, a: usize, b: usize) -> bool {
        match self {
            Self::AllToAll => a != b,
            Self::Lattice { dims, periodic, .. } => {
                if a == b {
                    return false;
                }
                let (ca, cb) = (coords(a, dims), coords(b, dims));
                let mut diff_axis = None;
                for (axis, (&x, &y)) in ca.iter().zip(&cb).enumerate() {
                    if x != y {
                        if diff_axis.is_some() {
                            return false;
                        }
                        diff_axis = Some((axis, x, y));
                    }
                }
                match diff_axis {
                    None => false,
                    Some((axis, x, y)) => {
                        let side = dims[axis];
                        let gap = x.abs_diff(y);
                        gap == 1 || (*periodic && side > 2 && gap == side - 1)
                    }
                }
            }
        }
    }
}

fn coords(site: usize, dims: &[usize]) -> Vec<usize> {
    let mut rest = site;
    let mut out = vec![0; dims.len()];
    for (axis, &side) in dims.iter().enumerate().rev() {
        out[axis] = rest % side;
        rest /= side;
    }
    out
}

/// Worst-case light-cone size after `t` layers: the number of qubits that
/// can influence one site. `2^t` for all-to-all coupling, `(2t+1)^D` on a
/// `D`-dimensional lattice; both give 1 at `t = 0`. Saturates instead of
/// overflowing.
#[must_use]
pub fn lightcone_function(conn: &Connectivity, t: usize) -> u64 {
    match conn {
        Connectivity::AllToAll => {
            if t >= 64 {
                u64::MAX
            } else {
                1u64 << t
            }
        }
        Connectivity::Lattice { d, .. } => {
            let side = (2 * t as u64).saturating_add(1);
            side.saturating_pow(*d as u32)
        }
    }
}

/// Built-in gate generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum NamedGate {
    X,
    Y,
    Z,
    H,
    S,
    T,
    CX,
    CZ,
    SWAP,
}

impl NamedGate {
    /// Number of qubits the gate acts on.
    #[must_use]
    pub fn arity(self) -> usize {
        match self {
            Self::X | Self::Y | Self::Z | Self::H | Self::S | Self::T => 1,
            Self::CX | Self::CZ | Self::SWAP => 2,
        }
    }

    /// Dense matrix of the gate. Two-qubit matrices are written in the
    /// basis where the first listed qubit is the more significant bit; for
    /// `CX` the first listed qubit is the control.
    #[must_use]
    pub fn matrix(self) -> CMatrix {
        let o = C64::ZERO;
        let l = C64::ONE;
        let i = C64::i();
        let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        let t = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        match self {
            Self::X => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Self::Y => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Self::Z => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
            Self::H => CMatrix::from_row_slice(2, 2, &[h, h, h, -h]),
            Self::S => CMatrix::from_row_slice(2, 2, &[l, o, o, i]),
            Self::T => CMatrix::from_row_slice(2, 2, &[l, o, o, t]),
            Self::CX => CMatrix::from_row_slice(
                4,
                4,
                &[
                    l, o, o, o, //
                    o, l, o, o, //
                    o, o, o, l, //
                    o, o, l, o,
                ],
            ),
            Self::CZ => CMatrix::from_diagonal(&CVector::from_vec(vec![l, l, l, -l])),
            Self::SWAP => CMatrix::from_row_slice(
                4,
                4,
                &[
                    l, o, o, o, //
                    o, o, l, o, //
                    o, l, o, o, //
                    o, o, o, l,
                ],
            ),
        }
    }
}

/// One gate: a named generator or an explicit unitary, with the qubits it
/// acts on (in matrix bit order, first listed = most significant).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gate {
    /// Built-in generator.
    Named {
        /// Which generator.
        gate: NamedGate,
        /// Target qubits.
        qubits: Vec<usize>,
    },
    /// Explicit unitary, row-major `[re, im]` entries (length 4 or 16).
    Explicit {
        /// Matrix entries, row-major.
        unitary: Vec<[f64; 2]>,
        /// Target qubits.
        qubits: Vec<usize>,
    },
}

impl Gate {
    /// Target qubits in listed order.
    #[must_use]
    pub fn qubits(&self) -> &[usize] {
        match self {
            Self::Named { qubits, .. } | Self::Explicit { qubits, .. } => qubits,
        }
    }

    /// Dense matrix of the gate.
    pub fn matrix(&self) -> Result<CMatrix> {
        match self {
            Self::Named { gate, .. } => Ok(gate.matrix()),
            Self::Explicit { unitary, .. } => {
                let dim = match unitary.len() {
                    4 => 2,
                    16 => 4,
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "explicit unitary must have 4 or 16 entries, got {other}"
                        )))
                    }
                };
                Ok(CMatrix::from_fn(dim, dim, |r, c| {
                    let [re, im] = unitary[r * dim + c];
                    C64::new(re, im)
                }))
            }
        }
    }

    fn validate(&self, n: usize, conn: &Connectivity) -> Result<()> {
        let qubits = self.qubits();
        if qubits.is_empty() || qubits.len() > 2 {
            return Err(Error::InvalidInput(format!(
                "gates act on 1 or 2 qubits, got {}",
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidInput(format!(
                "gate lists qubit {} twice",
                qubits[0]
            )));
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
            return Err(Error::InvalidInput(format!(
                "gate references qubit {q}, but the circuit has {n} qubits"
            )));
        }
        let m = self.matrix()?;
        let expected_dim = 1usize << qubits.len();
        if m.nrows() != expected_dim {
            return Err(Error::InvalidInput(format!(
                "gate on {} qubits needs a {expected_dim}x{expected_dim} matrix, got {}x{}",
                qubits.len(),
                m.nrows(),
                m.ncols()
            )));
        }
        let defect = (m.adjoint() * &m - CMatrix::identity(m.nrows(), m.ncols())).norm();
        if defect > UNITARITY_TOL {
            return Err(Error::InvalidInput(format!(
                "explicit gate is not unitary (‖U†U − 1‖ = {defect:.3e})"
            )));
        }
        if qubits.len() == 2 && !conn.allows_pair(qubits[0], qubits[1]) {
            return Err(Error::InvalidInput(format!(
                "gate on ({}, {}) violates the lattice nearest-neighbor rule",
                qubits[0], qubits[1]
            )));
        }
        Ok(())
    }
}

/// A layered circuit under a connectivity constraint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Circuit {
    /// Qubit count.
    pub n: usize,
    /// Allowed gate geometry.
    pub connectivity: Connectivity,
    /// Gate layers, applied first to last; gates within a layer act on
    /// disjoint qubits.
    pub layers: Vec<Vec<Gate>>,
}

impl Circuit {
    /// Gate-free circuit (the identity).
    #[must_use]
    pub fn identity(n: usize, connectivity: Connectivity) -> Self {
        Self {
            n,
            connectivity,
            layers: Vec::new(),
        }
    }

    /// Circuit depth (number of layers; single-qubit gates occupy a layer
    /// like any other).
    #[must_use]
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Checks the qubit cap, connectivity consistency, per-gate unitarity,
    /// and within-layer disjointness.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "qubit count must lie in 1..={MAX_QUBITS}, got {}",
                self.n
            )));
        }
        self.connectivity.validate(self.n)?;
        for (t, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.n];
            for gate in layer {
                gate.validate(self.n, &self.connectivity)?;
                for &q in gate.qubits() {
                    if used[q] {
                        return Err(Error::InvalidInput(format!(
                            "layer {t} uses qubit {q} in two gates"
                        )));
                    }
                    used[q] = true;
                }
            }
        }
        Ok(())
    }
}

/// A pure state on `n` qubits; qubit 0 is the most significant amplitude
/// index bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "StateVectorData", into = "StateVectorData")]
pub struct StateVector {
    n: usize,
    amps: CVector,
}

#[derive(Serialize, Deserialize)]
struct StateVectorData {
    n: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateVectorData> for StateVector {
    type Error = Error;

    fn try_from(data: StateVectorData) -> Result<Self> {
        let amps = data
            .amplitudes
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect::<Vec<_>>();
        let state = Self::from_amplitudes(amps)?;
        if state.n != data.n {
            return Err(Error::InvalidInput(format!(
                "declared {} qubits but provided {} amplitudes",
                data.n,
                data.amplitudes.len()
            )));
        }
        Ok(state)
    }
}

impl From<StateVector> for StateVectorData {
    fn from(state: StateVector) -> Self {
        Self {
            n: state.n,
            amplitudes: state.amps.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis_state(n, 0)
    }

    /// Computational basis state with the given amplitude index.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "qubit count must lie in 1..={MAX_QUBITS}, got {n}"
            )));
        }
        if index >= 1 << n {
            return Err(Error::InvalidInput(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = CVector::from_element(1 << n, C64::ZERO);
        amps[index] = C64::ONE;
        Ok(Self { n, amps })
    }

    /// Wraps explicit amplitudes; the length must be a power of two within
    /// the qubit cap and the norm must be 1 within [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::InvalidInput(format!(
                "amplitude count must be a power of two ≥ 2, got {len}"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "{n} qubits exceed the cap of {MAX_QUBITS}"
            )));
        }
        let amps = CVector::from_vec(amps);
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "state norm is {norm}, expected 1 within {NORM_TOL:.0e}"
            )));
        }
        Ok(Self { n, amps })
    }

    /// Qubit count.
    #[must_use]
    pub fn qubit_count(&self) -> usize {
        self.n
    }

    /// Amplitudes, indexed with qubit 0 as the most significant bit.
    #[must_use]
    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "states on {} and {} qubits",
                self.n, other.n
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }
}

/// A sorted set of qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region(Vec<usize>);

impl Region {
    /// Builds a region, sorting and deduplicating the indices.
    #[must_use]
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    /// Region holding a single site.
    #[must_use]
    pub fn single(site: usize) -> Self {
        Self(vec![site])
    }

    /// Sorted indices.
    #[must_use]
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Number of sites.
    #[must_use]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the region is empty.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether `site` belongs to the region.
    #[must_use]
    pub fn contains(&self, site: usize) -> bool {
        self.0.binary_search(&site).is_ok()
    }

    /// Whether the regions share a site.
    #[must_use]
    pub fn intersects(&self, other: &Self) -> bool {
        self.0.iter().any(|&s| other.contains(s))
    }

    /// Whether every site of `self` lies in `other`.
    #[must_use]
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.0.iter().all(|&s| other.contains(s))
    }

    /// Union of the two regions.
    #[must_use]
    pub fn union(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self::new(v)
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if let Some(&bad) = self.0.iter().find(|&&s| s >= n) {
            return Err(Error::InvalidInput(format!(
                "region references site {bad}, but only {n} sites exist"
            )));
        }
        Ok(())
    }
}

/// Bit position (in the amplitude index) of qubit `q` out of `n`.
fn bit_position(q: usize, n: usize) -> usize {
    n - 1 - q
}

/// Applies a 1- or 2-qubit gate to an amplitude slice. `positions` are bit
/// positions in the index, first listed gate qubit first.
fn apply_gate_to_slice(amps: &mut [C64], gate: &CMatrix, positions: &[usize]) {
    let len = amps.len();
    match positions {
        [p] => {
            let bit = 1usize << *p;
            let (g00, g01, g10, g11) = (gate[(0, 0)], gate[(0, 1)], gate[(1, 0)], gate[(1, 1)]);
            for i in 0..len {
                if i & bit == 0 {
                    let (a0, a1) = (amps[i], amps[i | bit]);
                    amps[i] = g00 * a0 + g01 * a1;
                    amps[i | bit] = g10 * a0 + g11 * a1;
                }
            }
        }
        [pa, pb] => {
            let (ba, bb) = (1usize << *pa, 1usize << *pb);
            let mut tmp = [C64::ZERO; 4];
            for i in 0..len {
                if i & ba == 0 && i & bb == 0 {
                    let idx = [i, i | bb, i | ba, i | ba | bb];
                    for (g, slot) in tmp.iter_mut().enumerate() {
                        *slot = (0..4).map(|k| gate[(g, k)] * amps[idx[k]]).sum();
                    }
                    for (k, &j) in idx.iter().enumerate() {
                        amps[j] = tmp[k];
                    }
                }
            }
        }
        _ => unreachable!("gate arity is validated to 1 or 2"),
    }
}

/// Applies the circuit's layers in order to `input`.
///
/// The output norm is verified to stay within [`NORM_TOL`] of 1.
pub fn apply_circuit(circuit: &Circuit, input: &StateVector) -> Result<StateVector> {
    circuit.validate()?;
    if input.n != circuit.n {
        return Err(Error::DimensionMismatch(format!(
            "circuit on {} qubits, state on {}",
            circuit.n, input.n
        )));
    }
    let mut amps = input.amps.clone();
    for layer in &circuit.layers {
        for gate in layer {
            let m = gate.matrix()?;
            let positions: Vec<usize> = gate
                .qubits()
                .iter()
                .map(|&q| bit_position(q, circuit.n))
                .collect();
            apply_gate_to_slice(amps.as_mut_slice(), &m, &positions);
        }
    }
    let norm = amps.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvariantViolation(format!(
            "circuit application drifted the norm to {norm}"
        )));
    }
    Ok(StateVector { n: circuit.n, amps })
}

/// Exact light cone of `seed` through the stacked layer sequence
/// `[L_t, …, L_1, L_1, …, L_t]`, following the first `stacked_depth`
/// entries.
///
/// The first `t` entries grow the seed through the circuit in Heisenberg
/// order (last layer first), matching the support growth of `U†·O·U`;
/// continuing past `t` stacks the circuit again in application order. The
/// result always contains `seed` and, starting from a single site, never
/// exceeds [`lightcone_function`] at the same depth.
pub fn circuit_lightcone(circuit: &Circuit, seed: &Region, stacked_depth: usize) -> Result<Region> {
    circuit.validate()?;
    seed.validate(circuit.n)?;
    let t = circuit.layers.len();
    let mut in_cone = vec![false; circuit.n];
    for &s in seed.indices() {
        in_cone[s] = true;
    }
    let stack = circuit
        .layers
        .iter()
        .rev()
        .chain(circuit.layers.iter())
        .take(stacked_depth.min(2 * t));
    for layer in stack {
        let mut grown: Vec<usize> = Vec::new();
        for gate in layer {
            if gate.qubits().iter().any(|&q| in_cone[q]) {
                grown.extend_from_slice(gate.qubits());
            }
        }
        for q in grown {
            in_cone[q] = true;
        }
    }
    Ok(Region::new(
        (0..circuit.n).filter(|&q| in_cone[q]).collect(),
    ))
}

/// Reduced density matrix of `state` on `region`, tracing out the rest.
///
/// The matrix is indexed like the full state: the lowest region site is
/// the most significant bit of the reduced index.
pub fn reduced_density_matrix(state: &StateVector, region: &Region) -> Result<CMatrix> {
    reduced_cross_matrix(state, state, region)
}

/// Partial trace of the cross term `|a⟩⟨b|` over the complement of
/// `region`; [`reduced_density_matrix`] is the `a = b` case. Cross terms
/// let callers assemble the reduced matrix of any superposition
/// `Σ cᵢ|ψᵢ⟩` from a fixed set of basis-pair traces.
pub fn reduced_cross_matrix(a: &StateVector, b: &StateVector, region: &Region) -> Result<CMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(format!(
            "states on {} and {} qubits",
            a.n, b.n
        )));
    }
    region.validate(a.n)?;
    if region.len() > MAX_DENSE_SUPPORT {
        return Err(Error::InvalidInput(format!(
            "region of {} sites exceeds the dense cap of {MAX_DENSE_SUPPORT}",
            region.len()
        )));
    }
    let n = a.n;
    let k = region.len();
    let keep: Vec<usize> = region
        .indices()
        .iter()
        .map(|&q| bit_position(q, n))
        .collect();
    let env: Vec<usize> = (0..n)
        .filter(|&q| !region.contains(q))
        .map(|q| bit_position(q, n))
        .collect();
    let dim = 1usize << k;
    let mut rho = CMatrix::zeros(dim, dim);
    for e in 0..1usize << env.len() {
        let mut base = 0usize;
        for (j, &pos) in env.iter().enumerate() {
            if e >> j & 1 == 1 {
                base |= 1 << pos;
            }
        }
        for r in 0..dim {
            let ir = base | scatter_bits(r, &keep, k);
            let ar = a.amps[ir];
            if ar == C64::ZERO {
                continue;
            }
            for c in 0..dim {
                let ic = base | scatter_bits(c, &keep, k);
                rho[(r, c)] += ar * b.amps[ic].conj();
            }
        }
    }
    Ok(rho)
}

/// Scatters the low `k` bits of `value` onto the given index positions;
/// bit `k−1` of `value` (its most significant used bit) goes to
/// `positions[0]`.
fn scatter_bits(value: usize, positions: &[usize], k: usize) -> usize {
    let mut out = 0usize;
    for (j, &pos) in positions.iter().enumerate() {
        if value >> (k - 1 - j) & 1 == 1 {
            out |= 1 << pos;
        }
    }
    out
}

/// Trace norm (sum of absolute eigenvalues) of a Hermitian matrix.
///
/// # Errors
///
/// Fails when the input is not Hermitian within `1e-8` or exceeds the
/// eigensolver's dimension cap.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    linalg::trace_norm_hermitian(m)
}

/// An operator acting on an explicit support region.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LocalOperatorData", into = "LocalOperatorData")]
pub struct LocalOperator {
    /// Sites the operator acts on.
    pub support: Region,
    /// Dense matrix of dimension `2^support.len()`, lowest site most
    /// significant.
    pub matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct LocalOperatorData {
    support: Vec<usize>,
    /// Row-major `[re, im]` entries.
    matrix: Vec<[f64; 2]>,
}

impl TryFrom<LocalOperatorData> for LocalOperator {
    type Error = Error;

    fn try_from(data: LocalOperatorData) -> Result<Self> {
        let support = Region::new(data.support);
        let dim = 1usize << support.len().min(63);
        if data.matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "support of {} sites needs {} matrix entries, got {}",
                support.len(),
                dim * dim,
                data.matrix.len()
            )));
        }
        let matrix = CMatrix::from_fn(dim, dim, |r, c| {
            let [re, im] = data.matrix[r * dim + c];
            C64::new(re, im)
        });
        Self::new(support, matrix)
    }
}

impl From<LocalOperator> for LocalOperatorData {
    fn from(op: LocalOperator) -> Self {
        let dim = op.matrix.nrows();
        let mut matrix = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let v = op.matrix[(r, c)];
                matrix.push([v.re, v.im]);
            }
        }
        Self {
            support: op.support.indices().to_vec(),
            matrix,
        }
    }
}

impl LocalOperator {
    /// Wraps a matrix with its support, checking the dimension.
    pub fn new(support: Region, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << support.len().min(63);
        if support.len() > MAX_DENSE_SUPPORT {
            return Err(Error::InvalidInput(format!(
                "support of {} sites exceeds the dense cap of {MAX_DENSE_SUPPORT}",
                support.len()
            )));
        }
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "support of {} sites needs a {dim}x{dim} matrix, got {}x{}",
                support.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { support, matrix })
    }

    /// Single-site operator from a named generator.
    pub fn from_named(gate: NamedGate, site: usize) -> Result<Self> {
        if gate.arity() != 1 {
            return Err(Error::InvalidInput(format!(
                "{gate:?} is not a single-qubit generator"
            )));
        }
        Self::new(Region::single(site), gate.matrix())
    }

    /// Largest absolute eigenvalue (the operator norm for Hermitian
    /// observables).
    pub fn operator_norm(&self) -> Result<f64> {
        linalg::operator_norm_hermitian(&self.matrix)
    }

    /// Checks Hermiticity within the observable tolerance `1e-10`.
    pub fn require_observable(&self) -> Result<()> {
        let dev = linalg::hermitian_deviation(&self.matrix);
        if dev > 1e-10 {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: 1e-10,
            });
        }
        Ok(())
    }

    /// Applies the operator to a state without densifying it: amplitudes
    /// are gathered block-wise over the support bits, multiplied, and
    /// scattered back. The result is generally unnormalized.
    pub fn apply(&self, state: &StateVector) -> Result<CVector> {
        self.apply_to_vector(&state.amps, state.n)
    }

    /// Applies the operator to a raw amplitude vector over `n` qubits.
    /// The vector does not need to be normalized, so repeated products
    /// like `Π(1 - Pᵢ)|ψ⟩` can be built up in place.
    pub fn apply_to_vector(&self, amps: &CVector, n: usize) -> Result<CVector> {
        self.support.validate(n)?;
        if amps.len() != 1usize << n {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector of length {} for {n} qubits",
                amps.len()
            )));
        }
        let k = self.support.len();
        let dim = 1usize << k;
        let keep: Vec<usize> = self
            .support
            .indices()
            .iter()
            .map(|&q| bit_position(q, n))
            .collect();
        let support_mask: usize = keep.iter().map(|&p| 1usize << p).sum();
        let mut out = amps.clone();
        let mut block = vec![C64::ZERO; dim];
        for i in 0..out.len() {
            if i & support_mask != 0 {
                continue;
            }
            for (r, slot) in block.iter_mut().enumerate() {
                *slot = amps[i | scatter_bits(r, &keep, k)];
            }
            for r in 0..dim {
                let mut acc = C64::ZERO;
                for (c, &b) in block.iter().enumerate() {
                    acc += self.matrix[(r, c)] * b;
                }
                out[i | scatter_bits(r, &keep, k)] = acc;
            }
        }
        Ok(out)
    }

    /// Expectation value `⟨state|O|state⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        let applied = self.apply(state)?;
        Ok(state.amps.dotc(&applied))
    }

    /// Re-expresses the operator on a larger support by tensoring with the
    /// identity on the added sites.
    pub fn embed_into(&self, target: &Region) -> Result<Self> {
        if !self.support.is_subset_of(target) {
            return Err(Error::InvalidInput(format!(
                "target region {:?} does not contain the support {:?}",
                target.indices(),
                self.support.indices()
            )));
        }
        if target.len() > MAX_DENSE_SUPPORT {
            return Err(Error::InvalidInput(format!(
                "target region of {} sites exceeds the dense cap of {MAX_DENSE_SUPPORT}",
                target.len()
            )));
        }
        let kt = target.len();
        let ks = self.support.len();
        // Position of each target bit inside the source support, if any.
        let map: Vec<Option<usize>> = target
            .indices()
            .iter()
            .map(|&site| self.support.indices().iter().position(|&s| s == site))
            .collect();
        let dim = 1usize << kt;
        let mut out = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            let (r_sup, r_env) = split_index(r, kt, ks, &map);
            for c in 0..dim {
                let (c_sup, c_env) = split_index(c, kt, ks, &map);
                if r_env == c_env {
                    out[(r, c)] = self.matrix[(r_sup, c_sup)];
                }
            }
        }
        Self::new(target.clone(), out)
    }
}

/// Splits a `kt`-bit index into the sub-index over mapped (support) bits
/// and the residual environment bits.
fn split_index(idx: usize, kt: usize, ks: usize, map: &[Option<usize>]) -> (usize, usize) {
    let mut sup = 0usize;
    let mut env = 0usize;
    for (j, slot) in map.iter().enumerate() {
        let bit = idx >> (kt - 1 - j) & 1;
        match slot {
            Some(pos) => sup |= bit << (ks - 1 - pos),
            None => env = (env << 1) | bit,
        }
    }
    (sup, env)
}

/// Conjugates `op` (given on `support` bit order) by a gate acting on the
/// listed support positions: `op ← G·op·G†`.
fn conjugate_by_gate(op: &mut CMatrix, gate: &CMatrix, positions: &[usize]) {
    let dim = op.nrows();
    for j in 0..dim {
        let mut col = op.column_mut(j);
        apply_gate_to_slice(col.as_mut_slice(), gate, positions);
    }
    let mut adj = op.adjoint();
    for j in 0..dim {
        let mut col = adj.column_mut(j);
        apply_gate_to_slice(col.as_mut_slice(), gate, positions);
    }
    *op = adj.adjoint();
}

/// Parent projector of the circuit state at `site`, conjugated into the
/// Schrödinger picture: `(1 − U·Z_site·U†)/2` on its light-cone support.
///
/// The operator annihilates `U|0…0⟩` and is verified to be a projector
/// within `1e-10`; its support is the exact cone of `site` through the
/// circuit's own gates, never larger than [`lightcone_function`] at the
/// circuit depth.
pub fn conjugated_parent_projector(circuit: &Circuit, site: usize) -> Result<LocalOperator> {
    circuit.validate()?;
    if site >= circuit.n {
        return Err(Error::InvalidInput(format!(
            "site {site} out of range for {} qubits",
            circuit.n
        )));
    }
    let mut support = Region::single(site);
    let mut op = NamedGate::Z.matrix();
    // Conjugate Z through the layers in application order: the innermost
    // factor of U·Z·U† is the first layer.
    for layer in &circuit.layers {
        let touching: Vec<&Gate> = layer
            .iter()
            .filter(|g| g.qubits().iter().any(|&q| support.contains(q)))
            .collect();
        if touching.is_empty() {
            continue;
        }
        let mut grown = support.clone();
        for gate in &touching {
            grown = grown.union(&Region::new(gate.qubits().to_vec()));
        }
        if grown.len() > MAX_DENSE_SUPPORT {
            return Err(Error::InvalidInput(format!(
                "parent projector support grew to {} sites, beyond the dense cap of {MAX_DENSE_SUPPORT}",
                grown.len()
            )));
        }
        if grown.len() > support.len() {
            let embedded = LocalOperator::new(support, op)?.embed_into(&grown)?;
            support = embedded.support;
            op = embedded.matrix;
        }
        let k = support.len();
        for gate in &touching {
            let positions: Vec<usize> = gate
                .qubits()
                .iter()
                .map(|&q| {
                    let j = support
                        .indices()
                        .iter()
                        .position(|&s| s == q)
                        .expect("gate qubits were united into the support");
                    k - 1 - j
                })
                .collect();
            conjugate_by_gate(&mut op, &gate.matrix()?, &positions);
        }
    }
    let dim = op.nrows();
    let projector = (CMatrix::identity(dim, dim) - op).scale(0.5);
    let defect = (&projector * &projector - &projector).norm();
    if defect > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "conjugated parent operator is not a projector (‖P² − P‖ = {defect:.3e})"
        )));
    }
    LocalOperator::new(support, projector)
}

/// Overlap `⟨a|b⟩`.
pub fn state_overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    a.inner(b)
}

/// Fubini–Study angle `arccos|⟨a|b⟩| ∈ [0, π/2]`.
///
/// The trace distance of the two pure states is `2·sin` of this angle.
pub fn fubini_study_angle(a: &StateVector, b: &StateVector) -> Result<f64> {
    let overlap = a.inner(b)?.norm().min(1.0);
    Ok(overlap.acos())
}

/// Outcome of an exact-factorization check on a circuit state.
#[derive(Debug, Clone, Serialize)]
pub struct ClusteringReport {
    /// Light cone of the first observable's support.
    pub cone_p: Region,
    /// Light cone of the second observable's support.
    pub cone_q: Region,
    /// Whether the two cones share a site.
    pub cones_intersect: bool,
    /// `|⟨PQ⟩ − ⟨P⟩⟨Q⟩|` on the circuit state.
    pub residual: f64,
}

/// Checks exact factorization of disjoint observables on the state the
/// circuit prepares from `|0…0⟩`.
///
/// The supports of `P` and `Q` must be disjoint. When even their
/// conjugated light cones are disjoint, `⟨PQ⟩ = ⟨P⟩⟨Q⟩` holds exactly and
/// a residual above `1e-10` is reported as an invariant violation;
/// intersecting cones make the residual merely informative.
pub fn clustering_check(
    circuit: &Circuit,
    p: &LocalOperator,
    q: &LocalOperator,
) -> Result<ClusteringReport> {
    if p.support.intersects(&q.support) {
        return Err(Error::InvalidInput(
            "observables overlap; factorization is only defined for disjoint supports".into(),
        ));
    }
    p.require_observable()?;
    q.require_observable()?;
    let t = circuit.depth();
    let cone_p = circuit_lightcone(circuit, &p.support, t)?;
    let cone_q = circuit_lightcone(circuit, &q.support, t)?;
    let cones_intersect = cone_p.intersects(&cone_q);

    let state = apply_circuit(circuit, &StateVector::zero_state(circuit.n)?)?;
    let ep = p.expectation(&state)?;
    let eq = q.expectation(&state)?;
    let q_applied = q.apply(&state)?;
    let pq_applied = p.apply(&StateVector {
        n: state.n,
        amps: q_applied,
    })?;
    let epq = state.amps.dotc(&pq_applied);
    let residual = (epq - ep * eq).norm();
    if !cones_intersect && residual > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "disjoint cones must factorize exactly, residual {residual:.3e}"
        )));
    }
    Ok(ClusteringReport {
        cone_p,
        cone_q,
        cones_intersect,
        residual,
    })
}
