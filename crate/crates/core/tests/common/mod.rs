//! Shared generators for the integration suites: random circuits under a
//! connectivity constraint, Haar-like random gates, and random states.

// Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

use aqec_lll::circuit::{Circuit, Connectivity, Gate, NamedGate, StateVector};
use aqec_lll::linalg::{complex_gaussian, CMatrix, C64};
use rand::prelude::IndexedRandom;
use rand::Rng;

/// Unitary drawn from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    qr.q()
}

/// Row-major `[re, im]` encoding used by explicit gates.
pub fn encode_unitary(u: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(u.nrows() * u.ncols());
    for r in 0..u.nrows() {
        for c in 0..u.ncols() {
            out.push([u[(r, c)].re, u[(r, c)].im]);
        }
    }
    out
}

/// Uniform superposition of the `n` weight-one basis states.
#[allow(dead_code)]
pub fn w_state(n: usize) -> StateVector {
    let mut amps = vec![C64::ZERO; 1 << n];
    let amp = C64::from(1.0 / (n as f64).sqrt());
    for q in 0..n {
        amps[1 << (n - 1 - q)] = amp;
    }
    StateVector::from_amplitudes(amps).expect("normalized amplitudes")
}

/// Haar-like random state.
#[allow(dead_code)]
pub fn random_state(rng: &mut impl Rng, n: usize) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let amps = amps.into_iter().map(|a| a / norm).collect();
            return StateVector::from_amplitudes(amps).expect("normalized amplitudes");
        }
    }
}

const SINGLES: [NamedGate; 6] = [
    NamedGate::X,
    NamedGate::Y,
    NamedGate::Z,
    NamedGate::H,
    NamedGate::S,
    NamedGate::T,
];
const PAIRS: [NamedGate; 3] = [NamedGate::CX, NamedGate::CZ, NamedGate::SWAP];

fn random_single(rng: &mut impl Rng, q: usize) -> Gate {
    if rng.random::<f64>() < 0.3 {
        Gate::Explicit {
            unitary: encode_unitary(&random_unitary(rng, 2)),
            qubits: vec![q],
        }
    } else {
        Gate::Named {
            gate: *SINGLES.choose(rng).expect("nonempty"),
            qubits: vec![q],
        }
    }
}

fn random_pair(rng: &mut impl Rng, a: usize, b: usize) -> Gate {
    let (a, b) = if rng.random::<bool>() { (a, b) } else { (b, a) };
    if rng.random::<f64>() < 0.3 {
        Gate::Explicit {
            unitary: encode_unitary(&random_unitary(rng, 4)),
            qubits: vec![a, b],
        }
    } else {
        Gate::Named {
            gate: *PAIRS.choose(rng).expect("nonempty"),
            qubits: vec![a, b],
        }
    }
}

/// Random layered circuit respecting `connectivity`; two-qubit gates are
/// drawn on disjoint pairs, leftover sites occasionally get a single-qubit
/// gate.
pub fn random_circuit(
    rng: &mut impl Rng,
    n: usize,
    depth: usize,
    connectivity: Connectivity,
) -> Circuit {
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut used = vec![false; n];
        let mut layer = Vec::new();
        match &connectivity {
            Connectivity::AllToAll => {
                let mut order: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    order.swap(i, rng.random_range(0..=i));
                }
                for pair in order.chunks(2) {
                    if let [a, b] = *pair {
                        if rng.random::<f64>() < 0.7 {
                            layer.push(random_pair(rng, a, b));
                            used[a] = true;
                            used[b] = true;
                        }
                    }
                }
            }
            Connectivity::Lattice { dims, periodic, .. } => {
                // One-dimensional chains are the lattice case the suites
                // exercise; higher-D generation is not needed here.
                assert_eq!(dims.len(), 1, "test generator supports chains only");
                let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
                if *periodic && n > 2 {
                    edges.push((n - 1, 0));
                }
                for i in (1..edges.len()).rev() {
                    edges.swap(i, rng.random_range(0..=i));
                }
                for (a, b) in edges {
                    if !used[a] && !used[b] && rng.random::<f64>() < 0.6 {
                        layer.push(random_pair(rng, a, b));
                        used[a] = true;
                        used[b] = true;
                    }
                }
            }
        }
        for (q, taken) in used.iter().enumerate() {
            if !taken && rng.random::<f64>() < 0.3 {
                layer.push(random_single(rng, q));
            }
        }
        layers.push(layer);
    }
    let circuit = Circuit {
        n,
        connectivity,
        layers,
    };
    circuit.validate().expect("generated circuit is valid");
    circuit
}
