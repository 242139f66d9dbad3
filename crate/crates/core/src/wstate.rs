//! W-state construction and circuit-depth lower bounds for its approximate
//! preparation.
//!
//! The uniform single-excitation state on `n` qubits,
//!
//! ```text
//! |W_n⟩ = (|10...0⟩ + |010...0⟩ + ... + |0...01⟩) / √n
//! ```
//!
//! is locally almost featureless: every patch of `m` sites carries excitation
//! probability exactly `m/n`, and the correlation between two blocks of `k`
//! sites decays like `k/n`. Those two facts power two independent depth lower
//! bounds for any circuit that prepares a state within trace distance `delta`
//! of `|W_n⟩`:
//!
//! * a probabilistic-certificate argument over vacuum patches (small `delta`),
//! * a correlation argument comparing the joint two-block marginal with the
//!   product of its halves (any `delta < 1/3`).
//!
//! [`w_bound_report`] selects the applicable argument from the connectivity
//! and `delta`, evaluates its hypothesis numerically, and reports the implied
//! minimal depth. [`w_correlation_norm`] checks the closed-form block
//! correlation norm `2k/n + 2k²/n²` against an exact diagonalization, and
//! [`staircase_circuit`] provides a depth `n - 1` nearest-neighbour
//! preparation used as an upper-bound fixture in tests.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::aqec::Code;
use crate::circuit::{Circuit, Connectivity, Gate, NamedGate, Region, StateVector, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::{trace_norm_hermitian, CMatrix, CVector, C64};

/// Largest qubit count accepted by the exact correlation-norm computation.
pub const MAX_CORRELATION_QUBITS: usize = 16;

/// Builds `|W_n⟩`, the uniform superposition of all weight-one basis states.
///
/// Qubit `q` excited corresponds to the basis index with bit `n - 1 - q` set,
/// matching the register convention of [`StateVector::basis_state`].
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] unless `1 <= n <= 20`.
///
/// # Examples
///
/// ```
/// use aqec_lll::wstate::build_w;
///
/// let w2 = build_w(2).unwrap();
/// let amps = w2.amplitudes();
/// assert!((amps[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
/// assert!((amps[2].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
/// assert!(amps[0].norm() < 1e-12 && amps[3].norm() < 1e-12);
/// ```
pub fn build_w(n: usize) -> Result<StateVector> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidInput(format!(
            "W state size must lie in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    if n == 1 {
        return StateVector::basis_state(1, 1);
    }
    let weight = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = vec![C64::ZERO; 1usize << n];
    for q in 0..n {
        amps[1usize << (n - 1 - q)] = weight;
    }
    StateVector::from_amplitudes(amps)
}

/// Builds the two-dimensional code spanned by `|0^n⟩` and `|W_n⟩`.
///
/// Both basis states are permutation symmetric, so the code's subsystem
/// variance is the same for every region of a given size. On a single site it
/// evaluates to `1/√n`, achieved by an equal-weight superposition of the two
/// basis states; restricting to the basis states alone would give only `1/n`.
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] unless `1 <= n <= 20`.
pub fn w_code(n: usize) -> Result<Code> {
    let vacuum = StateVector::zero_state(n)?;
    let w = build_w(n)?;
    Code::new(n, 1, vec![vacuum, w])
}

/// Probability that at least one site of `patch` is excited in `state`.
///
/// Equivalently the expectation of `1 - |0...0⟩⟨0...0|` on the patch. For
/// `|W_n⟩` this equals `m/n` exactly for every patch of `m` sites, which is
/// the local-indistinguishability input to the patch-certificate depth bound.
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] if the patch references qubits outside the
/// state.
pub fn patch_excitation_probability(state: &StateVector, patch: &Region) -> Result<f64> {
    let n = state.qubit_count();
    patch.validate(n)?;
    let mask: usize = patch.indices().iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let vacuum_weight: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|&(index, _)| index & mask == 0)
        .map(|(_, amp)| amp.norm_sqr())
        .sum();
    Ok((1.0 - vacuum_weight).clamp(0.0, 1.0))
}

/// Closed-form and numerically computed block correlation norm of `|W_n⟩`.
///
/// Produced by [`w_correlation_norm`]; the two values agree to `1e-10` by
/// construction (the function fails otherwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WCorrelationReport {
    /// Total number of qubits.
    pub n: usize,
    /// Sites per block; block `A` holds the first `k` qubits, `B` the last.
    pub k: usize,
    /// Closed form `2k/n + 2k²/n²`.
    pub analytic: f64,
    /// Trace norm of `ρ_AB - ρ_A ⊗ ρ_B`, computed from exact spectra.
    pub numeric: f64,
}

/// Computes `‖ρ_AB - ρ_A ⊗ ρ_B‖₁` for `|W_n⟩` with blocks of `k` sites at
/// the two ends of the register, in closed form and numerically.
///
/// The joint and product marginals live in the span of computational states
/// with at most one excitation per block, so the numeric value comes from an
/// exact diagonalization in that `(1 + 2k + k²)`-dimensional subspace rather
/// than a dense `4^k`-dimensional one. Analytically the difference combines
/// the spectrum `{2k/n, 1 - 2k/n}` of the joint marginal with the product of
/// two copies of `{k/n, 1 - k/n}`, giving exactly `2k/n + 2k²/n²`.
///
/// `k = 0` is accepted as the degenerate case where both values are zero.
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] if `n` is zero or exceeds
/// [`MAX_CORRELATION_QUBITS`], or if `2k > n` (the blocks would overlap).
/// Returns [`Error::InvariantViolation`] if the two computations disagree
/// beyond `1e-10`.
///
/// # Examples
///
/// ```
/// use aqec_lll::wstate::w_correlation_norm;
///
/// let report = w_correlation_norm(8, 2).unwrap();
/// assert!((report.analytic - 0.625).abs() < 1e-12);
/// assert!((report.numeric - 0.625).abs() < 1e-10);
/// ```
pub fn w_correlation_norm(n: usize, k: usize) -> Result<WCorrelationReport> {
    if n == 0 || n > MAX_CORRELATION_QUBITS {
        return Err(Error::InvalidInput(format!(
            "correlation norm requires 1 <= n <= {MAX_CORRELATION_QUBITS}, got {n}"
        )));
    }
    if 2 * k > n {
        return Err(Error::InvalidInput(format!(
            "blocks of {k} sites do not fit disjointly in {n} qubits"
        )));
    }
    let nf = n as f64;
    let kf = k as f64;
    let analytic = 2.0 * kf / nf + 2.0 * kf * kf / (nf * nf);
    let numeric = if k == 0 {
        0.0
    } else {
        correlation_difference_norm(n, k)?
    };
    if (analytic - numeric).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "correlation norm mismatch at n={n}, k={k}: closed form {analytic}, numeric {numeric}"
        )));
    }
    Ok(WCorrelationReport {
        n,
        k,
        analytic,
        numeric,
    })
}

/// Trace norm of the joint-minus-product marginal difference on two `k`-site
/// blocks of `|W_n⟩`, via exact diagonalization in the at-most-one-excitation
/// -per-block subspace.
///
/// Subspace basis: index `0` is the vacuum, `1..=k` an excitation on block
/// `A` site `q - 1`, `k + 1..=2k` an excitation on block `B`, and
/// `2k + 1 + i*k + j` the pair `(A site i, B site j)`.
fn correlation_difference_norm(n: usize, k: usize) -> Result<f64> {
    let nf = n as f64;
    let kf = k as f64;
    let dim = 1 + 2 * k + k * k;
    let single = 1.0 / (2.0 * kf).sqrt();
    let block = 1.0 / kf.sqrt();

    // Tracing the environment out of |W_n⟩ leaves the joint marginal
    // (2k/n) |W_2k⟩⟨W_2k| + (1 - 2k/n) |vac⟩⟨vac|.
    let mut joint_excited = CVector::zeros(dim);
    for q in 1..=2 * k {
        joint_excited[q] = C64::new(single, 0.0);
    }
    let mut difference = weighted_outer(&joint_excited, 2.0 * kf / nf);
    difference[(0, 0)] += C64::new(1.0 - 2.0 * kf / nf, 0.0);

    // Each single-block marginal is (k/n) |W_k⟩⟨W_k| + (1 - k/n) |vac⟩⟨vac|;
    // their tensor product splits over the four excitation sectors.
    let mut pair = CVector::zeros(dim);
    for i in 0..k {
        for j in 0..k {
            pair[2 * k + 1 + i * k + j] = C64::new(block * block, 0.0);
        }
    }
    let mut a_only = CVector::zeros(dim);
    for q in 1..=k {
        a_only[q] = C64::new(block, 0.0);
    }
    let mut b_only = CVector::zeros(dim);
    for q in k + 1..=2 * k {
        b_only[q] = C64::new(block, 0.0);
    }
    let p_excited = kf / nf;
    difference -= weighted_outer(&pair, p_excited * p_excited);
    difference -= weighted_outer(&a_only, p_excited * (1.0 - p_excited));
    difference -= weighted_outer(&b_only, (1.0 - p_excited) * p_excited);
    difference[(0, 0)] -= C64::new((1.0 - p_excited) * (1.0 - p_excited), 0.0);

    trace_norm_hermitian(&difference)
}

fn weighted_outer(vector: &CVector, weight: f64) -> CMatrix {
    let dim = vector.len();
    CMatrix::from_fn(dim, dim, |r, c| vector[r] * vector[c].conj() * weight)
}

/// Which lower-bound argument produced a [`WBoundReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundPath {
    /// Vacuum-patch certificate on a chain (`delta <= 1/10`).
    GeometricPatch,
    /// Vacuum-patch certificate with all-to-all lightcones
    /// (`delta < 1/√n` and the certificate hypothesis is satisfiable).
    AllToAllPatch,
    /// Block-correlation argument on a chain (`delta < 1/3`).
    CorrelationLine,
    /// Block-correlation argument with all-to-all lightcones
    /// (`delta < 1/3`).
    CorrelationAllToAll,
}

/// Depth lower bound for preparing a state within trace distance `delta` of
/// `|W_n⟩`, together with the numerically evaluated hypothesis that justifies
/// it. Produced by [`w_bound_report`].
///
/// The meaning of the condition fields depends on [`path`](Self::path):
///
/// * patch paths: `condition_lhs` is `(1 - (3e/2) delta)^(1/delta)`, the
///   certificate's surviving-probability lower bound, and `condition_rhs` is
///   `delta² / 4`, the largest vacuum overlap a `delta`-close state can
///   have. The argument runs when `lhs >= rhs`.
/// * correlation paths: `condition_lhs` is `delta` and `condition_rhs` is
///   `2k/(3n)`; any state within `delta <= 2k/(3n)` of `|W_n⟩` inherits a
///   nonzero block correlation and therefore cannot factorize across the
///   blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WBoundReport {
    /// Number of qubits.
    pub n: usize,
    /// Trace-distance accuracy demanded of the preparation.
    pub delta: f64,
    /// Geometry the preparing circuit is restricted to.
    pub connectivity: Connectivity,
    /// The argument that applied; see [`BoundPath`].
    pub path: BoundPath,
    /// Patch size `m` on the patch paths, block size `k` on the correlation
    /// paths.
    pub patch_size: usize,
    /// Left-hand side of the argument's hypothesis (see type docs).
    pub condition_lhs: f64,
    /// Right-hand side of the argument's hypothesis (see type docs).
    pub condition_rhs: f64,
    /// Whether the hypothesis held, i.e. the bound below is in force.
    pub condition_holds: bool,
    /// Minimal depth consistent with the argument: every circuit of smaller
    /// depth fails to reach trace distance `delta`.
    #[serde(rename = "t_min")]
    pub implied_depth_bound: usize,
}

/// Largest `delta` accepted by the chain patch argument.
const GEOMETRIC_DELTA_MAX: f64 = 0.1 + 1e-12;

/// Largest `delta` accepted by the correlation argument.
const CORRELATION_DELTA_MAX: f64 = 1.0 / 3.0;

/// Computes the depth lower bound implied by `delta`-approximate preparation
/// of `|W_n⟩` on the given geometry.
///
/// Path selection:
///
/// * chain, `delta <= 1/10`: vacuum-patch certificate with patches of
///   `m = delta * n` sites (at least one). Solving its violated hypothesis
///   for the depth yields `t > n/3` at `delta = 1/10`, and shrinking `delta`
///   only strengthens the closeness requirement, so the report carries
///   `t_min = ⌈n/3⌉` across the accepted range.
/// * all-to-all, `delta < 1/√n` with a satisfiable hypothesis: the same
///   certificate with exponential lightcones; `t_min` is the smallest depth
///   with `m · 4^t · (delta/2 + m/n) > 1/e` (equivalently
///   `2^(2t-1) n delta² > 1/(3e)` at `m = delta · n`).
/// * otherwise, `delta < 1/3`: block-correlation argument with
///   `k = ⌈3 delta n / 2⌉` sites per block. On a chain the blocks sit at the
///   two ends, so a depth-`t` circuit factorizes them unless `k + 2t > n/2`;
///   with all-to-all lightcones the analogous requirement is
///   `(4^t + 1) k > n`.
///
/// # Errors
///
/// * [`Error::InvalidInput`] if `n = 0`, `delta` is negative or not finite,
///   or the connectivity is a lattice of dimension two or more (the chain
///   argument does not transfer).
/// * [`Error::Inapplicable`] if `delta >= 1/3`, or if the correlation blocks
///   cannot fit (`⌈3 delta n / 2⌉ > n/2`); no argument applies there.
///
/// # Examples
///
/// ```
/// use aqec_lll::circuit::Connectivity;
/// use aqec_lll::wstate::w_bound_report;
///
/// let chain = Connectivity::line(30, false);
/// let report = w_bound_report(30, 0.1, &chain).unwrap();
/// assert_eq!(report.implied_depth_bound, 10);
/// ```
pub fn w_bound_report(n: usize, delta: f64, connectivity: &Connectivity) -> Result<WBoundReport> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "depth bounds need at least one qubit".into(),
        ));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidInput(format!(
            "trace-distance accuracy must be a finite non-negative number, got {delta}"
        )));
    }
    let line = match connectivity {
        Connectivity::AllToAll => false,
        Connectivity::Lattice { d: 1, .. } => true,
        Connectivity::Lattice { d, .. } => {
            return Err(Error::InvalidInput(format!(
                "depth bounds cover chains and all-to-all geometries, not {d}-dimensional lattices"
            )));
        }
    };

    let nf = n as f64;
    if line && delta <= GEOMETRIC_DELTA_MAX {
        // The violated certificate hypothesis pins t > n/3 at delta = 1/10;
        // smaller delta only tightens the distance requirement, so the same
        // depth bound carries over the whole accepted range.
        let (lhs, rhs) = patch_solvability(delta);
        return Ok(WBoundReport {
            n,
            delta,
            connectivity: connectivity.clone(),
            path: BoundPath::GeometricPatch,
            patch_size: patch_size(n, delta),
            condition_lhs: lhs,
            condition_rhs: rhs,
            condition_holds: lhs >= rhs,
            implied_depth_bound: n.div_ceil(3),
        });
    }

    if !line && delta < nf.powf(-0.5) {
        let (lhs, rhs) = patch_solvability(delta);
        if lhs >= rhs {
            let m = patch_size(n, delta);
            let mf = m as f64;
            let patch_probability = delta / 2.0 + mf / nf;
            let t_min = smallest_depth(|t| mf * 4f64.powi(t as i32) * patch_probability > 1.0 / E)?;
            return Ok(WBoundReport {
                n,
                delta,
                connectivity: connectivity.clone(),
                path: BoundPath::AllToAllPatch,
                patch_size: m,
                condition_lhs: lhs,
                condition_rhs: rhs,
                condition_holds: true,
                implied_depth_bound: t_min,
            });
        }
        // Hypothesis unsatisfiable at this delta; fall through to the
        // correlation argument, which does not need it.
    }

    if delta < CORRELATION_DELTA_MAX {
        let k = (ceil_exact(1.5 * delta * nf) as usize).max(1);
        if 2 * k > n {
            return Err(Error::Inapplicable(format!(
                "correlation blocks of {k} sites do not fit disjointly in {n} qubits"
            )));
        }
        let kf = k as f64;
        let (path, t_min) = if line {
            // Blocks at opposite chain ends stay uncorrelated unless the
            // depth-t lightcones bridge the gap: k + 2t > n/2.
            (
                BoundPath::CorrelationLine,
                smallest_depth(|t| kf + 2.0 * t as f64 > nf / 2.0)?,
            )
        } else {
            (
                BoundPath::CorrelationAllToAll,
                smallest_depth(|t| (4f64.powi(t as i32) + 1.0) * kf > nf)?,
            )
        };
        return Ok(WBoundReport {
            n,
            delta,
            connectivity: connectivity.clone(),
            path,
            patch_size: k,
            condition_lhs: delta,
            condition_rhs: 2.0 * kf / (3.0 * nf),
            condition_holds: delta <= 2.0 * kf / (3.0 * nf),
            implied_depth_bound: t_min,
        });
    }

    Err(Error::Inapplicable(format!(
        "no depth bound applies at trace distance {delta}; every argument needs delta < 1/3"
    )))
}

/// Patch size `m = delta * n`, rounded and clamped to `1..=n`.
fn patch_size(n: usize, delta: f64) -> usize {
    ((delta * n as f64).round() as usize).clamp(1, n)
}

/// Ceiling that tolerates float noise around exact integers, so block
/// counts like `1.5 * 0.2 * 20 = 6.000000000000001` stay at 6 rather than
/// jumping to 7.
fn ceil_exact(x: f64) -> f64 {
    let rounded = x.round();
    if (x - rounded).abs() < 1e-9 {
        rounded
    } else {
        x.ceil()
    }
}

/// Hypothesis pair of the patch certificate: the certificate keeps the
/// vacuum overlap above `(1 - (3e/2) delta)^(1/delta)`, while `delta`
/// -closeness to `|W_n⟩` caps it at `delta² / 4`. The argument runs exactly
/// when the first exceeds the second.
fn patch_solvability(delta: f64) -> (f64, f64) {
    let rhs = delta * delta / 4.0;
    if delta == 0.0 {
        return (1.0, rhs);
    }
    let base = 1.0 - 1.5 * E * delta;
    if base <= 0.0 {
        return (0.0, rhs);
    }
    (base.powf(1.0 / delta), rhs)
}

/// Smallest `t >= 1` satisfying `violated`, searched up to a fixed cap.
fn smallest_depth(violated: impl Fn(usize) -> bool) -> Result<usize> {
    (1..=64).find(|&t| violated(t)).ok_or_else(|| {
        Error::NoConvergence("depth bound exceeded the search cap of 64 layers".into())
    })
}

/// Builds a depth `n - 1` nearest-neighbour circuit preparing `|W_n⟩` from
/// `|0^n⟩` on an open chain (a single bit flip for `n = 1`).
///
/// The first gate moves an excitation in while leaving amplitude `1/√n`
/// behind on qubit 0; each later gate is a two-level rotation with
/// `cos(α_i) = 1/√(n - i)` that deposits `1/√n` on qubit `i` and passes the
/// remainder down the chain. This is an upper-bound fixture: it certifies
/// that `|W_n⟩` is exactly preparable in linear depth, matching the linear
/// lower bound of [`w_bound_report`] up to a constant factor.
///
/// # Errors
///
/// Returns [`Error::InvalidInput`] unless `1 <= n <= 20`.
pub fn staircase_circuit(n: usize) -> Result<Circuit> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidInput(format!(
            "staircase preparation needs 1..={MAX_QUBITS} qubits, got {n}"
        )));
    }
    let connectivity = Connectivity::line(n, false);
    if n == 1 {
        let circuit = Circuit {
            n,
            connectivity,
            layers: vec![vec![Gate::Named {
                gate: NamedGate::X,
                qubits: vec![0],
            }]],
        };
        circuit.validate()?;
        return Ok(circuit);
    }
    let nf = n as f64;
    let mut layers = Vec::with_capacity(n - 1);

    // On |00⟩ the first gate produces stay·|10⟩ + pass·|01⟩ with
    // stay = 1/√n remaining on qubit 0 and the rest moving to qubit 1.
    // Row-major basis order on the gate's qubits: |00⟩, |01⟩, |10⟩, |11⟩.
    let stay = 1.0 / nf.sqrt();
    let pass = ((nf - 1.0) / nf).sqrt();
    let first = vec![
        [0.0, 0.0],
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 0.0],
        [pass, 0.0],
        [stay, 0.0],
        [0.0, 0.0],
        [0.0, 0.0],
        [stay, 0.0],
        [-pass, 0.0],
        [0.0, 0.0],
        [0.0, 0.0],
        [0.0, 0.0],
        [0.0, 0.0],
        [0.0, 0.0],
        [1.0, 0.0],
    ];
    layers.push(vec![Gate::Explicit {
        unitary: first,
        qubits: vec![0, 1],
    }]);

    for i in 1..n - 1 {
        // The moving amplitude arrives on qubit i as |10⟩ of the gate on
        // (i, i+1); keep cos(α) of it in place and pass the rest along.
        let cos = 1.0 / (nf - i as f64).sqrt();
        let sin = (1.0 - cos * cos).sqrt();
        let rotation = vec![
            [1.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [cos, 0.0],
            [sin, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [-sin, 0.0],
            [cos, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, 0.0],
            [1.0, 0.0],
        ];
        layers.push(vec![Gate::Explicit {
            unitary: rotation,
            qubits: vec![i, i + 1],
        }]);
    }
    let circuit = Circuit {
        n,
        connectivity,
        layers,
    };
    circuit.validate()?;
    Ok(circuit)
}
